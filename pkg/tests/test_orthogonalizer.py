"""
Tests for the orthogonalizing transform and the classification pipeline
"""

import itertools

import numpy as np
import pytest

from core.density_matrix import DensityMatrix
from core.errors import AmbiguousNullSpaceError, NotInClassError, NotOrthogonalizableError
from classification.orthogonalizer import Stage, build_m_matrix, classify, orthogonalize, solve_null
from classification.symmetry import ParamPoint, canonical_params
from construction.transform import apply_to_state, random_transform
from construction.upb import build_state, build_upb
from utils.config_loader import SearchConfig
from tests.helpers import random_params


@pytest.fixture(scope="module")
def standard_report(generic_state, search_config):
    return classify(generic_state, search_config)


@pytest.fixture(scope="module")
def transformed_report(transformed_state, search_config):
    return classify(transformed_state, search_config)


def test_m_matrix_annihilates_the_identity(generic_upb):
    m = build_m_matrix(generic_upb.phis.T, generic_upb.phis.T)
    assert m.shape == (15, 9)
    np.testing.assert_allclose(m @ np.eye(3).reshape(-1), 0.0, atol=1e-15)


def test_solve_null_recovers_the_identity(generic_upb):
    matrix, gap = solve_null(build_m_matrix(generic_upb.chis.T, generic_upb.chis.T))
    np.testing.assert_allclose(matrix / matrix[0, 0], np.eye(3), atol=1e-12)
    assert gap > 1e4


def test_solve_null_is_scale_invariant(generic_upb):
    m = build_m_matrix(generic_upb.phis.T, generic_upb.phis.T)
    x, _ = solve_null(m)
    y, _ = solve_null(1e3 * m)
    np.testing.assert_allclose(y / y[0, 0], x / x[0, 0], atol=1e-12)


def test_solve_null_rejects_full_rank(rng):
    m = rng.standard_normal((15, 9)) + 1j * rng.standard_normal((15, 9))
    with pytest.raises(AmbiguousNullSpaceError):
        solve_null(m)


def test_orthogonalize_standard_upb_against_itself(generic_upb):
    fit = orthogonalize(generic_upb, generic_upb)
    assert fit.residual < 1e-12
    np.testing.assert_allclose(fit.d_matrix / fit.d_matrix[0, 0], np.eye(3), atol=1e-12)


def test_classify_standard_state(standard_report, generic_params):
    assert standard_report.residuals["reconstruction"] < 1e-9
    expected = ParamPoint.from_params(canonical_params(generic_params))
    assert ParamPoint.from_params(standard_report.canonical_params).relative_error(expected) < 1e-8
    assert standard_report.orderings.count == 60


def test_classify_transformed_state(transformed_report, generic_params):
    expected = ParamPoint.from_params(canonical_params(generic_params))
    assert ParamPoint.from_params(transformed_report.canonical_params).relative_error(expected) < 1e-6
    residuals = transformed_report.residuals
    assert residuals["sixth_parallel"] < 1e-6
    assert residuals["null_gap"] > 1e4
    assert residuals["det_va"] == pytest.approx(1.0, abs=1e-10)
    assert residuals["det_vb"] == pytest.approx(1.0, abs=1e-10)
    assert residuals["passed"] is True


def test_recovered_transform_rebuilds_the_state(transformed_report, transformed_state):
    rebuilt = apply_to_state(transformed_report.transform, build_state(build_upb(transformed_report.params)))
    assert rebuilt.distance(transformed_state) < 1e-7


def test_every_ordering_gives_the_same_canonical_point(transformed_state, transformed_report, search_config):
    expected = ParamPoint.from_params(transformed_report.canonical_params)
    for index in (7, 23, 59):
        ordering = transformed_report.orderings.admissible[index]
        report = classify(transformed_state, search_config, ordering=ordering)
        assert report.ordering == ordering
        assert ParamPoint.from_params(report.canonical_params).relative_error(expected) < 1e-6


def test_inadmissible_ordering_is_rejected(generic_state, standard_report, search_config):
    admissible = set(standard_report.orderings.admissible)
    bad = next(o for o in itertools.permutations(range(6)) if o not in admissible)
    with pytest.raises(NotOrthogonalizableError) as excinfo:
        classify(generic_state, search_config, ordering=bad)
    assert excinfo.value.stage == Stage.ORDERINGS


def test_maximally_mixed_state_fails_the_rank_stage():
    with pytest.raises(NotInClassError) as excinfo:
        classify(DensityMatrix.maximally_mixed())
    assert excinfo.value.stage == Stage.RANK
    assert excinfo.value.details["rank_pair"] == [9, 9]


def test_report_layout(standard_report):
    payload = standard_report.to_dict()
    assert set(payload) == {"invariants", "ordering", "admissible_orderings", "orderings", "params",
                            "canonical_params", "transform", "kernel_vectors", "residuals", "search",
                            "tolerances"}
    assert len(payload["kernel_vectors"]) == 6
    assert payload["orderings"]["admissible_count"] == 60


@pytest.mark.slow
@pytest.mark.parametrize("index", range(100))
def test_round_trip_over_random_states(index):
    params = random_params(np.random.default_rng(1000 + index))
    rho = apply_to_state(random_transform(index, 20.0), build_state(build_upb(params)))
    report = classify(rho, SearchConfig(seed=index))

    assert report.orderings.count == 60
    assert set(report.orderings.per_excluded().values()) == {10}
    expected = ParamPoint.from_params(canonical_params(params))
    assert ParamPoint.from_params(report.canonical_params).relative_error(expected) < 1e-6
    assert apply_to_state(report.transform, build_state(build_upb(report.params))).distance(rho) < 1e-7
    assert report.residuals["null_gap"] > 1e4
    assert report.residuals["sixth_parallel"] < 1e-6
    assert report.residuals["passed"] is True
