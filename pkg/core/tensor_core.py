"""
Dense complex linear algebra for the 3x3 bipartite system
Implements Kronecker products, partial transpose/trace, Hermitian eigensolver and rank
"""

from typing import Tuple

import numpy as np
import scipy.linalg

from core.errors import StateValidationError

DIM_A = 3
DIM_B = 3
DIM = DIM_A * DIM_B

# Magnitude below which a component is not used to fix the global phase
PHASE_EPS = 1e-10


def composite_index(i: int, j: int) -> int:
    """Composite index of (A-index i, B-index j); 3i+j throughout the toolkit"""
    return DIM_B * i + j


def kron(phi: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """
    Kronecker product of a subsystem-A and a subsystem-B vector

    Args:
        phi: Complex 3-vector of subsystem A
        chi: Complex 3-vector of subsystem B

    Returns:
        Complex 9-vector with result[3i+j] = phi[i]*chi[j]
    """
    return np.outer(phi, chi).reshape(-1)


def normalize_phase(vec: np.ndarray) -> np.ndarray:
    """
    Normalize to unit length and make the first significant component real positive

    Args:
        vec: Nonzero complex vector

    Returns:
        Phase-fixed unit vector
    """
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise StateValidationError("Cannot normalize a zero vector")
    unit = vec / norm
    for component in unit:
        if abs(component) > PHASE_EPS:
            return unit * (abs(component) / component)
    return unit


def projective_distance(x: np.ndarray, y: np.ndarray) -> float:
    """1 - |<x,y>|^2 / (|x|^2 |y|^2), zero iff x and y are parallel"""
    overlap = abs(np.vdot(x, y)) ** 2
    return float(max(0.0, 1.0 - overlap / (np.vdot(x, x).real * np.vdot(y, y).real)))


def wedge_sine(x: np.ndarray, y: np.ndarray) -> float:
    """
    Sine of the angle between two complex vectors, from the norm of x^y

    Accurate near zero, where 1 - cos^2 would lose half the digits.
    """
    outer = np.outer(x, y)
    wedge = outer - outer.T
    value = np.linalg.norm(wedge) / (np.sqrt(2.0) * np.linalg.norm(x) * np.linalg.norm(y))
    return float(min(1.0, value))


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    """Check m = m^dagger within an absolute tolerance scaled by max(1, |m|)"""
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol * scale)


def hermitize(m: np.ndarray) -> np.ndarray:
    """Symmetrize against roundoff"""
    return 0.5 * (m + m.conj().T)


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """
    Partial transpose on subsystem B

    Entry ((i,j),(i',j')) of the output is entry ((i,j'),(i',j)) of the input.

    Args:
        rho: 9x9 complex matrix

    Returns:
        Partially transposed 9x9 matrix
    """
    tensor = np.asarray(rho).reshape(DIM_A, DIM_B, DIM_A, DIM_B)
    return tensor.transpose(0, 3, 2, 1).reshape(DIM, DIM)


def partial_trace(rho: np.ndarray, keep: str = "A") -> np.ndarray:
    """
    Reduced density matrix of one subsystem

    Args:
        rho: 9x9 complex matrix
        keep: "A" to trace out B, "B" to trace out A

    Returns:
        3x3 reduced matrix
    """
    tensor = np.asarray(rho).reshape(DIM_A, DIM_B, DIM_A, DIM_B)
    if keep == "A":
        return np.einsum("ijkj->ik", tensor)
    if keep == "B":
        return np.einsum("ijil->jl", tensor)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def herm_eig(m: np.ndarray, herm_tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix

    Args:
        m: Square Hermitian matrix
        herm_tol: Allowed deviation from Hermiticity

    Returns:
        (eigenvalues ascending, eigenvectors as orthonormal columns)

    Raises:
        StateValidationError: if m is not square or not Hermitian
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateValidationError(f"Expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m, herm_tol):
        raise StateValidationError("Matrix is not Hermitian",
                                   details={"max_asymmetry": float(np.max(np.abs(m - m.conj().T)))})
    # LAPACK zheevd; deterministic for identical input bits
    eigenvalues, eigenvectors = scipy.linalg.eigh(hermitize(m))
    return eigenvalues, eigenvectors


def numerical_rank(m: np.ndarray, rel_tol: float = 1e-8, herm_tol: float = 1e-12) -> int:
    """
    Number of eigenvalues with |lambda| > rel_tol * max|lambda|

    Args:
        m: Hermitian matrix
        rel_tol: Relative threshold

    Returns:
        Numerical rank, 0 for the zero matrix
    """
    eigenvalues, _ = herm_eig(m, herm_tol)
    magnitudes = np.abs(eigenvalues)
    largest = magnitudes.max(initial=0.0)
    if largest == 0.0:
        return 0
    return int(np.count_nonzero(magnitudes > rel_tol * largest))


def range_projector(m: np.ndarray, rel_tol: float = 1e-8, herm_tol: float = 1e-12) -> np.ndarray:
    """Orthogonal projection onto the image of a Hermitian matrix"""
    eigenvalues, eigenvectors = herm_eig(m, herm_tol)
    magnitudes = np.abs(eigenvalues)
    largest = magnitudes.max(initial=0.0)
    if largest == 0.0:
        return np.zeros_like(eigenvectors)
    basis = eigenvectors[:, magnitudes > rel_tol * largest]
    return basis @ basis.conj().T


def span_basis(columns: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as columns) for the span of the given columns"""
    return scipy.linalg.orth(np.asarray(columns, dtype=complex), rcond=rel_tol)
