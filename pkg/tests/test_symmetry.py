"""
Tests for the parameter symmetry group
"""

import collections
import pickle

import pytest

from core.errors import InvalidParametersError
from construction.upb import UpbParams
from classification.invariants import compute_invariants, recover_parameters
from classification.symmetry import (GENERATORS, GROUP_ORDER, ORDERING_MOVES, Generator, GroupElement, ParamPoint,
                                     actions_agree, canonical_params, canonical_representative, cyclic_shift,
                                     element_order, generate_group, inversion, orbit, permute_vectors, swap_sixth,
                                     symmetry_group)
from tests.helpers import random_params

ONES = ParamPoint(1.0, 1.0, 1.0, 1.0)


def random_point(rng):
    return ParamPoint.from_params(random_params(rng, 0.3, 3.0))


def test_cyclic_shift_at_ones():
    image = cyclic_shift(ONES)
    assert image.is_close(ParamPoint(0.5, 0.5, 0.5, 1.5), rel_tol=1e-15)


def test_cyclic_shift_has_period_five(rng):
    for _ in range(50):
        p = random_point(rng)
        q = p
        for _ in range(5):
            q = cyclic_shift(q)
        assert q.relative_error(p) < 1e-10


def test_inversion_at_ones_and_involution(rng):
    assert inversion(ONES) == ParamPoint(1.0, 2.0, 1.0, 2.0)
    for _ in range(50):
        p = random_point(rng)
        assert inversion(inversion(p)).relative_error(p) < 1e-12


def test_swap_sixth_at_ones():
    image = swap_sixth(ONES)
    assert image.alpha == 1.0
    assert image.gamma == 1.0
    assert image.beta == pytest.approx(10.0 / 11.0, rel=1e-14)
    assert image.delta == pytest.approx(7.0 / 4.0, rel=1e-14)


def test_swap_sixth_is_an_involution(rng):
    for _ in range(1000):
        p = random_point(rng)
        assert swap_sixth(swap_sixth(p)).relative_error(p) < 1e-10


def test_group_has_sixty_elements():
    group = symmetry_group()
    assert len(group) == GROUP_ORDER
    assert group[0].is_identity_word


def test_element_orders_match_the_icosahedral_group():
    orders = collections.Counter(element_order(g) for g in symmetry_group())
    assert orders == {1: 1, 2: 15, 3: 20, 5: 24}


def test_ordering_subgroup_has_ten_elements():
    assert len(generate_group([Generator.CYCLIC, Generator.INVERSION])) == 10


def test_group_is_not_abelian():
    cyc = GroupElement((Generator.CYCLIC,))
    swap = GroupElement((Generator.SWAP_SIXTH,))
    assert not actions_agree(cyc.then(swap), swap.then(cyc))


def test_orbit_stays_positive(rng):
    for _ in range(10):
        for image in orbit(random_point(rng)):
            assert min(image.as_tuple()) > 0


def test_canonical_representative_is_idempotent_and_orbit_invariant(rng):
    for _ in range(5):
        p = random_point(rng)
        canonical = canonical_representative(p)
        assert canonical_representative(canonical).relative_error(canonical) < 1e-9
        for image in orbit(p)[::7]:
            assert canonical_representative(image).relative_error(canonical) < 1e-8


def test_canonical_params_is_in_the_orbit():
    params = UpbParams(1.0, 2.0, 0.5, 3.0)
    canonical = ParamPoint.from_params(canonical_params(params))
    assert any(canonical.relative_error(image) < 1e-12 for image in orbit(ParamPoint.from_params(params)))


def test_param_point_validation_and_pickle():
    with pytest.raises(InvalidParametersError):
        ParamPoint(1.0, 0.0, 1.0, 1.0)
    with pytest.raises(AttributeError):
        ONES.alpha = 2.0
    assert pickle.loads(pickle.dumps(ONES)) == ONES
    assert ParamPoint.from_params(UpbParams(2.0, 1.0, 3.0, 1.0)).as_tuple() == (4.0, 1.0, 9.0, 1.0)


def test_permute_vectors_rejects_non_permutations():
    assert permute_vectors("abcdef", (4, 0, 1, 2, 3, 5)) == list("eabcdf")
    with pytest.raises(ValueError):
        permute_vectors("abcdef", (0, 0, 1, 2, 3, 4))


def test_group_element_layout():
    element = GroupElement((Generator.CYCLIC, Generator.SWAP_SIXTH))
    assert element.to_dict() == {"word": ["cyclic", "swap6"]}
    assert element(ONES) == swap_sixth(cyclic_shift(ONES))


@pytest.mark.parametrize("generator", list(Generator))
def test_ordering_moves_act_like_the_generators(generator, standard_six, generic_params):
    moved = permute_vectors(standard_six, ORDERING_MOVES[generator])
    recovered = ParamPoint.from_params(recover_parameters(compute_invariants(moved[:5])))
    expected = GENERATORS[generator](ParamPoint.from_params(generic_params))
    assert recovered.relative_error(expected) < 1e-9
