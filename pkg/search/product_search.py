"""
Product vector search in subspaces of the 3x3 system
Implements restarted see-saw minimization of psi^dagger Q psi over product vectors,
seeded with the exact rank-one points of five-dimensional kernels
"""

import itertools
from typing import Dict, Any, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.density_matrix import DensityMatrix
from core.errors import DegenerateConfigurationError, NonGenericSubspaceError, StateValidationError
from core.tensor_core import DIM, DIM_A, DIM_B, hermitize, kron, projective_distance
from construction.upb import ProductVector, Upb, span_projector
from utils.config_loader import SearchConfig
from utils.logger import get_logger

logger = get_logger(__name__)

# See-saw results below this objective are handed to the Newton polish
POLISH_THRESHOLD = 1e-6

# Looser match used when discarding the known members of a UPB
MEMBER_MATCH_TOL = 1e-6

# Eigenvalues of q/|q| below this span the kernel
KERNEL_REL_TOL = 1e-8

# A generic subspace of this dimension holds exactly six product vectors
FINITE_KERNEL_DIM = 5
RANK_ONE_COUNT = 6

# Required ratio between the last nonzero and the first zero singular value of the minor system
NULLITY_GAP = 1e3

# Step halvings tried before the Newton polish gives up
BACKTRACK_STEPS = 8

# Smallest singular value of the five Kronecker vectors for them to count as independent
INDEPENDENCE_TOL = 1e-8


class ProductVectorSet:
    """
    Deduplicated product vectors found in a subspace, with their objectives
    """
    def __init__(self,
                 vectors: Sequence[ProductVector],
                 objectives: Sequence[float],
                 restarts: int):
        self.vectors = list(vectors)
        self.objectives = [float(x) for x in objectives]
        self.restarts = restarts

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def to_dict(self) -> List[Dict[str, Any]]:
        """Convert to the vectors.json layout"""
        return [dict(vector.to_dict(), objective=objective)
                for vector, objective in zip(self.vectors, self.objectives)]


def _as_tensor(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    if q.shape != (DIM, DIM):
        raise StateValidationError(f"Expected a {DIM}x{DIM} matrix, got shape {q.shape}")
    return q.reshape(DIM_A, DIM_B, DIM_A, DIM_B)


def _lowest_eigenpair(m: np.ndarray) -> Tuple[float, np.ndarray]:
    eigenvalues, eigenvectors = np.linalg.eigh(hermitize(m))
    return float(eigenvalues[0]), eigenvectors[:, 0]


def _unit_scaled(q: np.ndarray) -> np.ndarray:
    """q divided by its spectral norm (unchanged when zero)"""
    q = np.asarray(q, dtype=complex)
    _as_tensor(q)
    scale = np.linalg.norm(q, 2)
    return q / scale if scale > 0.0 else q


def product_objective(q: np.ndarray, phi: np.ndarray, chi: np.ndarray) -> float:
    """psi^dagger q psi for psi = phi (x) chi"""
    psi = kron(phi, chi)
    return float(np.vdot(psi, q @ psi).real)


def random_product_vector(rng: np.random.Generator) -> ProductVector:
    """Complex-Gaussian factors, normalized"""
    phi = rng.standard_normal(DIM_A) + 1j * rng.standard_normal(DIM_A)
    chi = rng.standard_normal(DIM_B) + 1j * rng.standard_normal(DIM_B)
    return ProductVector(phi, chi)


def seesaw_minimize(q: np.ndarray,
                    config: SearchConfig,
                    start: ProductVector,
                    history: Optional[List[float]] = None) -> Tuple[ProductVector, float]:
    """
    Minimize psi^dagger q psi over normalized product vectors by alternation

    With chi fixed, phi becomes the lowest eigenvector of
    A_ii' = sum_jj' conj(chi_j) q_(i,j),(i',j') chi_j', and symmetrically for chi.

    Args:
        q: 9x9 positive semidefinite matrix
        config: Iteration limits and convergence tolerance
        start: Initial product vector
        history: Optional list that receives the objective after every sweep

    Returns:
        (final product vector, final objective)
    """
    tensor = _as_tensor(q)
    phi = np.array(start.phi)
    chi = np.array(start.chi)
    objective = product_objective(q, phi, chi)
    if history is not None:
        history.append(objective)

    for _ in range(config.max_iters):
        _, phi = _lowest_eigenpair(np.einsum("j,ijkl,l->ik", chi.conj(), tensor, chi))
        updated, chi = _lowest_eigenpair(np.einsum("i,ijkl,k->jl", phi.conj(), tensor, phi))
        decrease = objective - updated
        objective = updated
        if history is not None:
            history.append(objective)
        if decrease < config.conv_tol:
            break

    return ProductVector(phi, chi), objective


def polish_product_vector(q: np.ndarray,
                          vector: ProductVector,
                          max_iters: int = 30) -> Tuple[ProductVector, float]:
    """
    Gauss-Newton refinement of q psi = 0 over product vectors

    Steps live in the tangent space orthogonal to each factor, so the update
    is a 4-parameter complex least-squares problem. A step that does not shrink
    |q psi| is halved; the loop ends once no halving helps.

    Args:
        q: 9x9 positive semidefinite matrix
        vector: Starting product vector, typically a converged see-saw result
        max_iters: Newton step limit

    Returns:
        (refined product vector, objective)
    """
    q = np.asarray(q, dtype=complex)
    phi = np.array(vector.phi)
    chi = np.array(vector.chi)
    residual = q @ kron(phi, chi)
    best = np.linalg.norm(residual)

    for _ in range(max_iters):
        if best == 0.0:
            break
        tangent_phi = scipy.linalg.null_space(phi.conj()[np.newaxis, :])
        tangent_chi = scipy.linalg.null_space(chi.conj()[np.newaxis, :])
        jacobian = np.column_stack(
            [q @ kron(tangent_phi[:, a], chi) for a in range(tangent_phi.shape[1])]
            + [q @ kron(phi, tangent_chi[:, b]) for b in range(tangent_chi.shape[1])])
        step = np.linalg.lstsq(jacobian, -residual, rcond=None)[0]
        n_phi = tangent_phi.shape[1]

        improved = False
        for _ in range(BACKTRACK_STEPS):
            trial_phi = phi + tangent_phi @ step[:n_phi]
            trial_chi = chi + tangent_chi @ step[n_phi:]
            trial_phi /= np.linalg.norm(trial_phi)
            trial_chi /= np.linalg.norm(trial_chi)
            trial_residual = q @ kron(trial_phi, trial_chi)
            trial = np.linalg.norm(trial_residual)
            if trial < best:
                phi, chi, residual, best = trial_phi, trial_chi, trial_residual, trial
                improved = True
                break
            step = 0.5 * step
        if not improved:
            break

    return ProductVector(phi, chi), product_objective(q, phi, chi)


def kernel_basis(q: np.ndarray, rel_tol: float = KERNEL_REL_TOL) -> np.ndarray:
    """
    Orthonormal basis (as columns) of the numerical kernel of a PSD matrix

    Args:
        q: 9x9 positive semidefinite matrix
        rel_tol: Eigenvalues below rel_tol * |q| count as zero

    Returns:
        9 x k matrix, k = kernel dimension
    """
    eigenvalues, eigenvectors = np.linalg.eigh(hermitize(_unit_scaled(q)))
    return eigenvectors[:, np.abs(eigenvalues) < rel_tol]


def _minor_forms(basis: np.ndarray) -> List[np.ndarray]:
    """
    The 2x2 minors of X(c) = sum_l c_l K_l as bilinear forms in the coordinates c

    K_l is column l of the basis read as a 3x3 matrix, entry (i,j) at 3i+j.
    """
    slices = basis.T.reshape(-1, DIM_A, DIM_B)
    forms = []
    for r1, r2 in itertools.combinations(range(DIM_A), 2):
        for s1, s2 in itertools.combinations(range(DIM_B), 2):
            forms.append(np.outer(slices[:, r1, s1], slices[:, r2, s2])
                         - np.outer(slices[:, r1, s2], slices[:, r2, s1]))
    return forms


def _monomial(*indices: int) -> Tuple[int, ...]:
    return tuple(sorted(indices))


def _cubic_minor_system(basis: np.ndarray) -> Tuple[np.ndarray, Dict[Tuple[int, ...], int]]:
    """Every minor times every coordinate, as rows over the cubic monomials in c"""
    n = basis.shape[1]
    index = {m: k for k, m in enumerate(itertools.combinations_with_replacement(range(n), 3))}
    rows = []
    for form in _minor_forms(basis):
        for p in range(n):
            row = np.zeros(len(index), dtype=complex)
            for l, m in itertools.product(range(n), repeat=2):
                row[index[_monomial(p, l, m)]] += form[l, m]
            rows.append(row)
    return np.array(rows), index


def rank_one_candidates(basis: np.ndarray, seed: int = 0) -> List[ProductVector]:
    """
    Product vectors of a five-dimensional subspace from the vanishing of all 2x2 minors

    In coordinates c of the subspace the product vectors are the common zeros of
    nine quadrics. Multiplied by each coordinate these give a linear system on the
    cubic monomials whose null space is spanned by the monomial values at the six
    zeros; multiplication by a linear form acts diagonally there, so one 6x6
    eigenproblem separates the zeros. The results are starting points for the
    Newton polish, not final answers.

    Args:
        basis: 9x5 orthonormal basis of the subspace
        seed: Seed for the two random linear forms of the eigenproblem

    Returns:
        Up to six candidate product vectors; empty when the subspace is not
        five-dimensional or its minor system does not have the generic null space
    """
    n = basis.shape[1]
    if n != FINITE_KERNEL_DIM:
        return []
    system, index = _cubic_minor_system(basis)
    _, singular, vh = np.linalg.svd(system)
    rank = len(index) - RANK_ONE_COUNT
    floor = max(singular[rank], np.finfo(float).eps * singular[0])
    if singular[rank - 1] < NULLITY_GAP * floor:
        logger.debug("rank_one_system_not_generic", gap=float(singular[rank - 1] / floor))
        return []
    null = vh[rank:].conj().T

    rng = np.random.default_rng(seed)
    quadratic = list(itertools.combinations_with_replacement(range(n), 2))

    def shifted(weights: np.ndarray) -> np.ndarray:
        return np.array([sum(weights[i] * null[index[_monomial(i, *m)]] for i in range(n))
                         for m in quadratic])

    g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    pencil = np.linalg.lstsq(shifted(g), shifted(h), rcond=None)[0]
    _, eigenvectors = np.linalg.eig(pencil)

    candidates = []
    for z in eigenvectors.T:
        values = null @ z
        # c_i is proportional to the value of c_i c_a^2 for the dominant coordinate a
        a = int(np.argmax([abs(values[index[(i, i, i)]]) for i in range(n)]))
        coords = np.array([values[index[_monomial(i, a, a)]] for i in range(n)])
        u, s, vt = np.linalg.svd((basis @ coords).reshape(DIM_A, DIM_B))
        if s[0] > 0.0:
            candidates.append(ProductVector(u[:, 0], vt[0]))
    return candidates


def _same_vector(x: ProductVector, y: ProductVector, tol: float) -> bool:
    return projective_distance(x.phi, y.phi) < tol and projective_distance(x.chi, y.chi) < tol


def _deduplicate(found: List[Tuple[ProductVector, float]], tol: float) -> List[Tuple[ProductVector, float]]:
    kept: List[Tuple[ProductVector, float]] = []
    for vector, objective in sorted(found, key=lambda item: item[1]):
        if not any(_same_vector(vector, other, tol) for other, _ in kept):
            kept.append((vector, objective))
    return sorted(kept, key=lambda item: item[0].sort_key())


def find_product_vectors(q: np.ndarray, config: SearchConfig) -> ProductVectorSet:
    """
    All product vectors with q psi ~ 0, by restarted see-saw plus polish

    The search runs on q/|q|. When the kernel is five-dimensional its rank-one
    points are polished first, then the random restarts follow. A vector is kept
    only if |q psi|/|q| < residual_tol after polish, and only kept vectors are
    deduplicated.

    Args:
        q: 9x9 positive semidefinite matrix
        config: Restart count, seed and thresholds

    Returns:
        Deduplicated vectors in phase-fixed lexicographic order
    """
    q = np.asarray(q, dtype=complex)
    unit = _unit_scaled(q)
    rng = np.random.default_rng(config.seed)
    found: List[Tuple[ProductVector, float]] = []

    def accept(vector: ProductVector) -> None:
        residual = float(np.linalg.norm(unit @ vector.psi))
        objective = product_objective(unit, vector.phi, vector.chi)
        if residual < config.residual_tol and objective < config.accept_tol:
            found.append((vector, max(product_objective(q, vector.phi, vector.chi), 0.0)))

    seeds = rank_one_candidates(kernel_basis(unit), config.seed)
    for seed_vector in seeds:
        accept(polish_product_vector(unit, seed_vector, config.polish_iters)[0])

    for _ in range(config.restarts):
        vector, objective = seesaw_minimize(unit, config, random_product_vector(rng))
        if objective < POLISH_THRESHOLD:
            accept(polish_product_vector(unit, vector, config.polish_iters)[0])

    kept = _deduplicate(found, config.dedup_tol)
    logger.debug("product_search_done", restarts=config.restarts, seeds=len(seeds),
                 hits=len(found), distinct=len(kept))
    return ProductVectorSet([v for v, _ in kept], [o for _, o in kept], config.restarts)


def find_product_vectors_in_kernel(rho: DensityMatrix, config: SearchConfig) -> ProductVectorSet:
    """
    Product vectors in Ker rho, searched on Q = rho

    Args:
        rho: Positive semidefinite state
        config: Search configuration

    Returns:
        Deduplicated kernel product vectors (empty when the kernel has none)
    """
    vectors = find_product_vectors(rho.matrix, config)
    logger.info("kernel_vectors_found", count=len(vectors), seed=config.seed)
    return vectors


def find_sixth_vector(upb: Upb, config: SearchConfig) -> ProductVector:
    """
    The extra product vector in the span of five product vectors

    Args:
        upb: Five linearly independent product vectors
        config: Search configuration

    Returns:
        The unique product vector in the span distinct from the five inputs

    Raises:
        DegenerateConfigurationError: if the inputs are dependent or none is found
        NonGenericSubspaceError: if more than one is found
    """
    smallest = float(np.linalg.svd(upb.psis, compute_uv=False)[-1])
    if smallest < INDEPENDENCE_TOL:
        raise DegenerateConfigurationError("The five product vectors are linearly dependent",
                                           details={"smallest_singular_value": smallest})

    complement = np.eye(DIM, dtype=complex) - span_projector(upb.vectors)
    found = find_product_vectors(complement, config)
    extra = [v for v in found
             if not any(_same_vector(v, member, MEMBER_MATCH_TOL) for member in upb.vectors)]

    if not extra:
        raise DegenerateConfigurationError("No sixth product vector found in the span",
                                           details={"restarts": config.restarts, "found": len(found)})
    if len(extra) > 1:
        raise NonGenericSubspaceError("More than one extra product vector in the span",
                                      details={"extra": len(extra)})
    return extra[0]


def minimum_product_overlap(q: np.ndarray, config: SearchConfig) -> Tuple[ProductVector, float]:
    """
    Smallest psi^dagger q psi over product vectors found from the restarts

    Args:
        q: 9x9 positive semidefinite matrix
        config: Search configuration

    Returns:
        (minimizing product vector, minimum objective)
    """
    q = np.asarray(q, dtype=complex)
    rng = np.random.default_rng(config.seed)
    best_vector, best = None, np.inf
    for _ in range(config.restarts):
        vector, objective = seesaw_minimize(q, config, random_product_vector(rng))
        if objective < POLISH_THRESHOLD:
            vector, objective = polish_product_vector(q, vector, config.polish_iters)
        if objective < best:
            best_vector, best = vector, objective
    return best_vector, max(float(best), 0.0)
