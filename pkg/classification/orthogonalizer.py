"""
Orthogonalizing product transformations and the classification pipeline
Implements the wedge-constraint fit of C and D and the end-to-end classify
"""

from typing import Dict, Any, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.density_matrix import DensityMatrix, ensure_density_matrix
from core.errors import (AmbiguousNullSpaceError, NotInClassError, NotOrthogonalizableError,
                         NumericalDegeneracyError, UpbStateError)
from core.serialization import encode_array
from core.tensor_core import DIM, DIM_A, numerical_rank, partial_transpose, wedge_sine
from construction.transform import ProductTransform, apply_to_state
from construction.upb import ProductVector, Upb, UpbParams, UPB_SIZE, build_state, build_upb, span_projector
from classification.invariants import (InvariantTuple, OrderingReport, KERNEL_SIZE, find_positive_orderings,
                                       recover_parameters)
from classification.symmetry import canonical_params
from search.product_search import (ProductVectorSet, find_product_vectors_in_kernel, polish_product_vector,
                                   seesaw_minimize)
from utils.config_loader import SearchConfig, Tolerances
from utils.logger import get_logger

logger = get_logger(__name__)

EXPECTED_RANKS = (4, 4)

# Component pairs (p, q) of the antisymmetric product x^y
WEDGE_PAIRS = ((0, 1), (0, 2), (1, 2))


class Stage:
    """Pipeline stage names reported with failures"""
    RANK = "rank"
    KERNEL_SEARCH = "kernel_search"
    ORDERINGS = "orderings"
    ORTHOGONALIZE = "orthogonalize"
    RECONSTRUCT = "reconstruct"


class Orthogonalization:
    """
    Matrices with C u_k parallel to phi_k and D v_k parallel to chi_k
    """
    def __init__(self,
                 c_matrix: np.ndarray,
                 d_matrix: np.ndarray,
                 residual: float,
                 null_gap: float):
        self.c_matrix = c_matrix
        self.d_matrix = d_matrix
        self.residual = residual
        self.null_gap = null_gap

    def to_transform(self) -> ProductTransform:
        """V_A = (C^-1)^dagger, V_B = (D^-1)^dagger, rescaled to det 1"""
        va = np.linalg.inv(self.c_matrix).conj().T
        vb = np.linalg.inv(self.d_matrix).conj().T
        return ProductTransform(va, vb)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c_matrix": encode_array(self.c_matrix),
            "d_matrix": encode_array(self.d_matrix),
            "residual": self.residual,
            "null_gap": self.null_gap
        }


def build_m_matrix(targets: Sequence[np.ndarray], sources: Sequence[np.ndarray]) -> np.ndarray:
    """
    Linear constraints phi_k ^ (C u_k) = 0 on vec(C), C flattened row-major

    Args:
        targets: Five 3-vectors phi_k
        sources: Five 3-vectors u_k

    Returns:
        15x9 complex matrix, three rows per pair
    """
    if len(targets) != len(sources):
        raise ValueError("targets and sources must have the same length")
    rows = []
    for phi, u in zip(targets, sources):
        phi = np.asarray(phi, dtype=complex)
        u = np.asarray(u, dtype=complex)
        for p, q in WEDGE_PAIRS:
            # phi_p (Cu)_q - phi_q (Cu)_p
            row = np.zeros(DIM, dtype=complex)
            row[DIM_A * q:DIM_A * (q + 1)] += phi[p] * u
            row[DIM_A * p:DIM_A * (p + 1)] -= phi[q] * u
            rows.append(row)
    return np.array(rows)


def solve_null(m: np.ndarray, null_gap_min: float = 1e4) -> Tuple[np.ndarray, float]:
    """
    Lowest eigenvector of M^dagger M as a 3x3 matrix

    The eigenpairs of M^dagger M come from the SVD of M. The gap is
    lambda2 / max(lambda1, (eps * sigma_max)^2).

    Args:
        m: Constraint matrix with 9 columns
        null_gap_min: Smallest acceptable gap

    Returns:
        (3x3 matrix, null gap)

    Raises:
        AmbiguousNullSpaceError: if the gap is below null_gap_min
    """
    m = np.asarray(m, dtype=complex)
    _, sigma, vh = scipy.linalg.svd(m, full_matrices=False)
    if sigma[0] == 0.0:
        raise AmbiguousNullSpaceError("Constraint matrix is zero")
    floor = (np.finfo(float).eps * sigma[0]) ** 2
    null_gap = float(sigma[-2] ** 2 / max(sigma[-1] ** 2, floor))
    if null_gap < null_gap_min:
        raise AmbiguousNullSpaceError("No unique product transform solves the constraints",
                                      details={"null_gap": null_gap, "required": null_gap_min})
    vec = vh[-1].conj()
    return vec.reshape(DIM_A, DIM_A), null_gap


def _max_parallel_sine(matrix: np.ndarray, sources: np.ndarray, targets: np.ndarray) -> float:
    return max(wedge_sine(matrix @ sources[:, k], targets[:, k]) for k in range(sources.shape[1]))


def orthogonalize(kernel: Upb, standard: Upb, null_gap_min: float = 1e4) -> Orthogonalization:
    """
    Fit C and D mapping the standard vectors onto the kernel vectors

    Args:
        kernel: Five kernel product vectors in an admissible ordering
        standard: Standard-form UPB with the recovered parameters

    Returns:
        Orthogonalization with the worse of the two null gaps
    """
    c_matrix, c_gap = solve_null(build_m_matrix(kernel.phis.T, standard.phis.T), null_gap_min)
    d_matrix, d_gap = solve_null(build_m_matrix(kernel.chis.T, standard.chis.T), null_gap_min)
    residual = max(_max_parallel_sine(c_matrix, standard.phis, kernel.phis),
                   _max_parallel_sine(d_matrix, standard.chis, kernel.chis))
    logger.debug("orthogonalized", c_gap=c_gap, d_gap=d_gap, residual=residual)
    return Orthogonalization(c_matrix, d_matrix, float(residual), min(c_gap, d_gap))


def standard_sixth_vector(standard: Upb,
                          fit: Orthogonalization,
                          sixth: ProductVector,
                          config: SearchConfig) -> Tuple[ProductVector, float]:
    """
    Sixth product vector of the standard UPB, found from the pulled-back kernel vector

    The kernel's sixth vector mapped through C^-1 and D^-1 seeds a see-saw on
    1 - P_U of the standard UPB, followed by Newton polish.

    Returns:
        (standard sixth vector, its objective)
    """
    start = ProductVector(np.linalg.solve(fit.c_matrix, sixth.phi), np.linalg.solve(fit.d_matrix, sixth.chi))
    complement = np.eye(DIM, dtype=complex) - span_projector(standard.vectors)
    vector, _ = seesaw_minimize(complement, config, start)
    return polish_product_vector(complement, vector, config.polish_iters)


class ClassificationReport:
    """
    Outcome of classifying a state as SL-equivalent to an orthogonal UPB state
    """
    def __init__(self,
                 params: UpbParams,
                 canonical: UpbParams,
                 orderings: OrderingReport,
                 ordering: Tuple[int, ...],
                 invariants: InvariantTuple,
                 transform: ProductTransform,
                 kernel_vectors: ProductVectorSet,
                 residuals: Dict[str, Any],
                 search: SearchConfig,
                 tolerances: Tolerances):
        self.params = params
        self.canonical_params = canonical
        self.orderings = orderings
        self.ordering = ordering
        self.invariants = invariants
        self.transform = transform
        self.kernel_vectors = kernel_vectors
        self.residuals = residuals
        self.search = search
        self.tolerances = tolerances

    def to_dict(self) -> Dict[str, Any]:
        """Convert report to the classification.json layout"""
        return {
            "invariants": self.invariants.to_dict()["values"],
            "ordering": list(self.ordering),
            "admissible_orderings": [list(o) for o in self.orderings.admissible],
            "orderings": {k: v for k, v in self.orderings.to_dict().items() if k != "admissible_orderings"},
            "params": list(self.params.as_tuple()),
            "canonical_params": list(self.canonical_params.as_tuple()),
            "transform": self.transform.to_dict(),
            "kernel_vectors": self.kernel_vectors.to_dict(),
            "residuals": dict(self.residuals),
            "search": self.search.model_dump(),
            "tolerances": self.tolerances.model_dump()
        }


def _check_ranks(rho: DensityMatrix, tolerances: Tolerances) -> Tuple[int, int]:
    ranks = (numerical_rank(rho.matrix, tolerances.rank_rel_tol, tolerances.herm_tol),
             numerical_rank(partial_transpose(rho.matrix), tolerances.rank_rel_tol, tolerances.herm_tol))
    if ranks != EXPECTED_RANKS:
        raise NotInClassError(f"Rank pair {ranks} is not {EXPECTED_RANKS}", details={"rank_pair": list(ranks)})
    return ranks


def _run_stage(stage: str, func, *args, **kwargs):
    logger.debug("stage_started", stage=stage)
    try:
        return func(*args, **kwargs)
    except UpbStateError as e:
        raise e.with_stage(stage)
    except np.linalg.LinAlgError as e:
        raise NumericalDegeneracyError(f"Linear algebra failure: {e}", stage=stage) from e


def _kernel_search(rho: DensityMatrix, config: SearchConfig) -> ProductVectorSet:
    found = find_product_vectors_in_kernel(rho, config)
    if len(found) != KERNEL_SIZE:
        raise NotInClassError(f"Found {len(found)} kernel product vectors, expected {KERNEL_SIZE}",
                              details={"found": len(found), "restarts": config.restarts})
    return found


def _choose_ordering(vectors: List[ProductVector],
                     tolerances: Tolerances,
                     ordering: Optional[Sequence[int]]) -> Tuple[OrderingReport, Tuple[int, ...], InvariantTuple]:
    report = find_positive_orderings(vectors, tolerances)
    if report.count == 0:
        raise NotOrthogonalizableError("No ordering gives real positive invariants",
                                       details={"degenerate": report.degenerate})
    index = 0
    if ordering is not None:
        ordering = tuple(ordering)
        if ordering not in report.admissible:
            raise NotOrthogonalizableError(f"Ordering {list(ordering)} is not admissible")
        index = report.admissible.index(ordering)
    return report, report.admissible[index], report.invariants[index]


def _reconstruct(rho: DensityMatrix, transform: ProductTransform, standard: Upb, tolerances: Tolerances) -> float:
    rebuilt = apply_to_state(transform, build_state(standard))
    residual = rho.distance(rebuilt)
    if residual > tolerances.reconstruction_tol:
        raise NumericalDegeneracyError("State does not reconstruct from the standard form",
                                       details={"residual": residual, "tolerance": tolerances.reconstruction_tol})
    return residual


def classify(rho: Any,
             config: Optional[SearchConfig] = None,
             tolerances: Optional[Tolerances] = None,
             ordering: Optional[Sequence[int]] = None) -> ClassificationReport:
    """
    Classify a rank (4,4) PPT state by an SL-equivalent orthogonal UPB

    Stages: rank check, kernel product vector search, admissible orderings,
    parameter recovery, fit of C and D, reconstruction, canonical orbit point.

    Args:
        rho: Density matrix (DensityMatrix or 9x9 array)
        config: Product vector search configuration
        tolerances: Numerical thresholds
        ordering: Admissible ordering to use instead of the first one

    Returns:
        ClassificationReport

    Raises:
        NotInClassError: wrong rank pair or kernel product vector count
        NotOrthogonalizableError: no admissible ordering
        NumericalDegeneracyError: ambiguous null space or failed reconstruction
    """
    config = config or SearchConfig()
    tolerances = tolerances or Tolerances()
    rho = _run_stage(Stage.RANK, ensure_density_matrix, rho)
    _run_stage(Stage.RANK, _check_ranks, rho, tolerances)

    kernel = _run_stage(Stage.KERNEL_SEARCH, _kernel_search, rho, config)
    report, chosen, invariants = _run_stage(Stage.ORDERINGS, _choose_ordering, kernel.vectors, tolerances, ordering)
    params = _run_stage(Stage.ORDERINGS, recover_parameters, invariants,
                        tolerances.reality_tol, tolerances.positivity_tol)

    standard = build_upb(params)
    ordered = [kernel.vectors[i] for i in chosen]
    fit = _run_stage(Stage.ORTHOGONALIZE, orthogonalize, Upb(ordered[:UPB_SIZE]), standard, tolerances.null_gap_min)
    if fit.residual > tolerances.parallel_tol:
        raise NumericalDegeneracyError("Fitted transform does not map the standard vectors onto the kernel",
                                       stage=Stage.ORTHOGONALIZE, details={"residual": fit.residual})
    transform = _run_stage(Stage.ORTHOGONALIZE, fit.to_transform)

    sixth, sixth_objective = _run_stage(Stage.ORTHOGONALIZE, standard_sixth_vector,
                                        standard, fit, ordered[UPB_SIZE], config)
    sixth_sine = max(wedge_sine(fit.c_matrix @ sixth.phi, ordered[UPB_SIZE].phi),
                     wedge_sine(fit.d_matrix @ sixth.chi, ordered[UPB_SIZE].chi))
    if sixth_sine > tolerances.parallel_tol:
        logger.warning("sixth_vector_mismatch", sine=sixth_sine, tolerance=tolerances.parallel_tol)

    reconstruction = _run_stage(Stage.RECONSTRUCT, _reconstruct, rho, transform, standard, tolerances)
    canonical = canonical_params(params)

    residuals = {
        "reconstruction": reconstruction,
        "parallel": fit.residual,
        "null_gap": fit.null_gap,
        "sixth_parallel": float(sixth_sine),
        "sixth_objective": float(sixth_objective),
        "kernel_max_objective": max(kernel.objectives),
        "det_va": float(abs(np.linalg.det(transform.va))),
        "det_vb": float(abs(np.linalg.det(transform.vb))),
        "passed": bool(sixth_sine <= tolerances.parallel_tol)
    }
    logger.info("classified", params=list(params.as_tuple()), canonical=list(canonical.as_tuple()),
                reconstruction=reconstruction, null_gap=fit.null_gap)
    return ClassificationReport(params, canonical, report, chosen, invariants, transform, kernel,
                                residuals, config, tolerances)
