"""
Tests for the bipartite linear algebra substrate
"""

import numpy as np
import pytest

from core.density_matrix import DensityMatrix
from core.errors import StateValidationError
from core.tensor_core import (composite_index, herm_eig, hermitize, kron, normalize_phase, numerical_rank,
                              partial_trace, partial_transpose, projective_distance, range_projector, wedge_sine)
from tests.helpers import random_unitary


def random_matrix(rng, n=9):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_kron_uses_composite_index(rng):
    phi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    chi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    psi = kron(phi, chi)
    for i in range(3):
        for j in range(3):
            assert psi[composite_index(i, j)] == pytest.approx(phi[i] * chi[j], abs=1e-15)


def test_kron_is_bilinear_and_multiplies_norms(rng):
    phi, other, chi = (rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(3))
    a, b = 0.7 - 1.2j, 2.5j
    np.testing.assert_allclose(kron(a * phi + b * other, chi), a * kron(phi, chi) + b * kron(other, chi), atol=1e-12)
    np.testing.assert_allclose(kron(chi, a * phi + b * other), a * kron(chi, phi) + b * kron(chi, other), atol=1e-12)
    assert np.linalg.norm(kron(phi, chi)) == pytest.approx(np.linalg.norm(phi) * np.linalg.norm(chi), rel=1e-12)


def test_partial_transpose_entry_map(rng):
    rho = random_matrix(rng)
    pt = partial_transpose(rho)
    for i, j, k, l in [(0, 1, 2, 0), (1, 2, 0, 1), (2, 2, 1, 0)]:
        assert pt[3 * i + j, 3 * k + l] == rho[3 * i + l, 3 * k + j]


def test_partial_transpose_is_an_involution(rng):
    rho = random_matrix(rng)
    np.testing.assert_array_equal(partial_transpose(partial_transpose(rho)), rho)


def test_partial_transpose_of_product_conjugates_b(rng):
    a = random_matrix(rng, 3)
    b = random_matrix(rng, 3)
    np.testing.assert_allclose(partial_transpose(np.kron(a, b)), np.kron(a, b.T), atol=1e-14)


def test_partial_traces_of_product(rng):
    a = hermitize(random_matrix(rng, 3))
    b = hermitize(random_matrix(rng, 3))
    rho = np.kron(a, b)
    np.testing.assert_allclose(partial_trace(rho, keep="A"), a * np.trace(b), atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, keep="B"), b * np.trace(a), atol=1e-12)


def test_partial_trace_rejects_unknown_subsystem():
    with pytest.raises(ValueError):
        partial_trace(np.eye(9), keep="C")


def test_normalize_phase_makes_first_component_real_positive():
    vec = normalize_phase(np.array([0.0, 2j, 1.0]))
    assert np.isclose(np.linalg.norm(vec), 1.0)
    assert vec[0] == 0.0
    assert vec[1].imag == pytest.approx(0.0, abs=1e-15)
    assert vec[1].real > 0


def test_normalize_phase_rejects_zero():
    with pytest.raises(StateValidationError):
        normalize_phase(np.zeros(3))


def test_projective_distance_ignores_scale_and_phase(rng):
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert projective_distance(x, (2.5 - 1j) * x) < 1e-15
    assert projective_distance(np.array([1, 0, 0]), np.array([0, 1, 0])) == pytest.approx(1.0)


def test_wedge_sine_limits(rng):
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert wedge_sine(x, 1j * x) < 1e-15
    assert wedge_sine(np.array([1, 0, 0]), np.array([0, 0, 1])) == pytest.approx(1.0)


def test_herm_eig_rejects_non_hermitian(rng):
    with pytest.raises(StateValidationError):
        herm_eig(random_matrix(rng))


def test_herm_eig_reconstructs_with_unitary_vectors(rng):
    m = hermitize(random_matrix(rng))
    eigenvalues, q = herm_eig(m)
    assert np.all(np.diff(eigenvalues) >= 0)
    assert np.linalg.norm(m - q @ np.diag(eigenvalues) @ q.conj().T) < 1e-10 * np.linalg.norm(m)
    np.testing.assert_allclose(q.conj().T @ q, np.eye(9), atol=1e-10)


def test_herm_eig_spectrum_survives_unitary_conjugation(rng):
    m = hermitize(random_matrix(rng))
    u = random_unitary(rng, 9)
    before, _ = herm_eig(m)
    after, _ = herm_eig(u @ m @ u.conj().T)
    np.testing.assert_allclose(after, before, atol=1e-10 * np.abs(before).max())


def test_numerical_rank_and_range_projector(rng):
    basis, _ = np.linalg.qr(random_matrix(rng)[:, :4])
    rho = basis @ np.diag([0.4, 0.3, 0.2, 0.1]) @ basis.conj().T
    assert numerical_rank(rho) == 4
    projector = range_projector(rho)
    np.testing.assert_allclose(projector, basis @ basis.conj().T, atol=1e-12)
    assert numerical_rank(np.zeros((9, 9))) == 0


def test_density_matrix_validation():
    with pytest.raises(StateValidationError):
        DensityMatrix(np.eye(9))
    with pytest.raises(StateValidationError):
        DensityMatrix(np.eye(4) / 4)
    rho = DensityMatrix(np.eye(9), normalize=True)
    assert np.trace(rho.matrix).real == pytest.approx(1.0)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0.0


def test_density_matrix_round_trip():
    rho = DensityMatrix.from_pure(np.arange(9) + 1j)
    restored = DensityMatrix.from_dict(rho.to_dict())
    assert restored.distance(rho) == 0.0
