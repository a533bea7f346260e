"""
Tests for the determinant-ratio invariants and the ordering search
"""

import numpy as np
import pytest

from core.errors import DegenerateConfigurationError, InvalidParametersError
from construction.transform import map_kernel_vector, random_transform
from construction.upb import ProductVector, UpbParams, build_upb
from classification.invariants import (InvariantTuple, compute_invariants, find_positive_orderings,
                                       recover_parameters)
from classification.symmetry import ParamPoint, orbit
from tests.helpers import random_params, random_product_vectors


@pytest.mark.parametrize("values", [(1.0, 1.0, 1.0, 1.0), (2.0, 1.0, 3.0, 1.0), (0.3, 4.0, 1.7, 0.05)])
def test_standard_form_closed_forms(values):
    a, b, c, d = values
    s = compute_invariants(build_upb(UpbParams(*values)).vectors)
    expected = (a ** 2, b ** 2 / a ** 2, c ** 2, d ** 2 / c ** 2)
    np.testing.assert_allclose(s.values, expected, rtol=1e-12)


def test_column_rescaling_leaves_invariants_unchanged(rng, generic_upb):
    reference = compute_invariants(generic_upb.vectors)
    scaled = []
    for vector in generic_upb.vectors:
        s_phi, s_chi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        scaled.append(ProductVector(s_phi * vector.phi, s_chi * vector.chi))
    assert compute_invariants(scaled).relative_difference(reference) < 1e-12


def test_sl_images_leave_invariants_unchanged(generic_upb):
    reference = compute_invariants(generic_upb.vectors)
    for seed in range(10):
        transform = random_transform(seed)
        mapped = [map_kernel_vector(transform, v) for v in generic_upb.vectors]
        assert compute_invariants(mapped).relative_difference(reference) < 1e-9


def test_degenerate_triple_is_rejected(generic_upb):
    vectors = list(generic_upb.vectors)
    # phi_4 in the plane of phi_1 and phi_3, a denominator triple of s1
    vectors[3] = ProductVector(vectors[0].phi + vectors[2].phi, vectors[3].chi)
    with pytest.raises(DegenerateConfigurationError):
        compute_invariants(vectors)


def test_recover_examples():
    recovered = recover_parameters(InvariantTuple([4.0, 0.25, 9.0, 1.0 / 9.0]))
    assert recovered.relative_error(UpbParams(2.0, 1.0, 3.0, 1.0)) < 1e-15
    assert recover_parameters(InvariantTuple([1, 1, 1, 1])) == UpbParams(1, 1, 1, 1)


def test_recover_rejects_non_positive():
    with pytest.raises(InvalidParametersError):
        recover_parameters(InvariantTuple([4.0, -0.25, 9.0, 1.0]))
    with pytest.raises(InvalidParametersError):
        recover_parameters(InvariantTuple([4.0, 0.25 + 0.1j, 9.0, 1.0]))


def test_parameter_round_trip(rng):
    for _ in range(100):
        params = random_params(rng)
        recovered = recover_parameters(compute_invariants(build_upb(params).vectors))
        assert recovered.relative_error(params) < 1e-12


def test_sixty_admissible_orderings(standard_six):
    report = find_positive_orderings(standard_six)
    assert report.total_tested == 720
    assert report.count == 60
    assert set(report.per_excluded().values()) == {10}
    assert (0, 1, 2, 3, 4, 5) in report.admissible


def test_kernel_orderings_after_search(generic_kernel):
    report = find_positive_orderings(generic_kernel.vectors)
    assert report.count == 60
    assert all(count == 10 for count in report.per_excluded().values())


def test_recovered_parameters_form_one_orbit(standard_six, generic_params):
    report = find_positive_orderings(standard_six)
    recovered = [ParamPoint.from_params(recover_parameters(s)) for s in report.invariants]
    expected = orbit(ParamPoint.from_params(generic_params))
    for point in recovered:
        assert any(point.relative_error(image) < 1e-8 for image in expected)
    for image in expected:
        assert any(point.relative_error(image) < 1e-8 for point in recovered)


def test_random_product_vectors_have_no_admissible_ordering(rng):
    for _ in range(20):
        report = find_positive_orderings(random_product_vectors(rng, 6))
        assert report.count == 0


def test_report_layout(standard_six):
    payload = find_positive_orderings(standard_six).to_dict()
    assert len(payload["admissible_orderings"]) == 60
    assert payload["per_excluded"] == {str(k): 10 for k in range(6)}
