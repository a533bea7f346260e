"""
Certification predicates for bipartite 3x3 states
Implements PPT, rank, entanglement-by-image, unextendibility and extremality checks
"""

from enum import Enum
from typing import Dict, Any, List, Optional, Tuple

import numpy as np

from core.density_matrix import DensityMatrix, ensure_density_matrix
from core.errors import StateValidationError
from core.tensor_core import DIM, DIM_A, DIM_B, herm_eig, numerical_rank, partial_trace, partial_transpose, range_projector
from construction.upb import Upb, span_projector
from search.product_search import minimum_product_overlap
from utils.config_loader import SearchConfig, Tolerances
from utils.logger import get_logger

logger = get_logger(__name__)


class Verdict(Enum):
    """Outcome of a certification predicate"""
    YES = "yes"
    NO = "no"
    INDETERMINATE = "indeterminate"


class CheckResult:
    """
    A verdict backed by the numeric value it was decided on
    """
    def __init__(self, verdict: Verdict, witness: float, details: Optional[Dict[str, Any]] = None):
        self.verdict = verdict
        self.witness = float(witness)
        self.details = details or {}

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "witness": self.witness,
            **self.details
        }

    def __repr__(self) -> str:
        return f"CheckResult({self.verdict.value}, witness={self.witness:.3g})"


def is_ppt(rho: DensityMatrix, psd_tol: float = 1e-10) -> CheckResult:
    """
    Positive partial transpose test

    Args:
        rho: Hermitian unit-trace state
        psd_tol: Eigenvalues above -psd_tol count as nonnegative

    Returns:
        YES iff the smallest eigenvalue of rho^P exceeds -psd_tol; witness is that eigenvalue
    """
    rho = ensure_density_matrix(rho)
    eigenvalues, _ = herm_eig(partial_transpose(rho.matrix))
    smallest = float(eigenvalues[0])
    return CheckResult(Verdict.YES if smallest > -psd_tol else Verdict.NO, smallest)


def rank_pair(rho: DensityMatrix, rel_tol: float = 1e-8) -> Tuple[int, int]:
    """(rank rho, rank rho^P)"""
    rho = ensure_density_matrix(rho)
    return (numerical_rank(rho.matrix, rel_tol), numerical_rank(partial_transpose(rho.matrix), rel_tol))


def local_ranks(rho: DensityMatrix, rel_tol: float = 1e-8) -> Tuple[int, int]:
    """Ranks of the two reduced density matrices"""
    rho = ensure_density_matrix(rho)
    return (numerical_rank(partial_trace(rho.matrix, keep="A"), rel_tol),
            numerical_rank(partial_trace(rho.matrix, keep="B"), rel_tol))


def rank_bounds(dims: Tuple[int, int], m: int) -> bool:
    """
    max(N_A, N_B) < m < N - N_A - N_B + 2

    Necessary for an entangled PPT state of rank m with full local ranks and
    no product vectors in its image.
    """
    n_a, n_b = dims
    return max(n_a, n_b) < m < n_a * n_b - n_a - n_b + 2


def admissible_ranks(dims: Tuple[int, int] = (DIM_A, DIM_B)) -> List[int]:
    """All ranks allowed by rank_bounds"""
    return [m for m in range(1, dims[0] * dims[1] + 1) if rank_bounds(dims, m)]


def _overlap_verdict(minimum: float, tolerances: Tolerances, check: str) -> CheckResult:
    if minimum > tolerances.entangled_min:
        verdict = Verdict.YES
    elif minimum < tolerances.product_max:
        verdict = Verdict.NO
    else:
        verdict = Verdict.INDETERMINATE
        logger.warning("overlap_indeterminate", check=check, minimum=minimum)
    return CheckResult(verdict, minimum)


def is_entangled_by_image(rho: DensityMatrix,
                          config: Optional[SearchConfig] = None,
                          tolerances: Optional[Tolerances] = None) -> CheckResult:
    """
    Entanglement by absence of product vectors in Im rho

    Minimizes psi^dagger (1 - P_im) psi over product vectors. A minimum above
    entangled_min certifies entanglement; below product_max the image holds a
    product vector; anything between is indeterminate.

    Args:
        rho: Positive semidefinite state
        config: Search configuration
        tolerances: Decision thresholds

    Returns:
        CheckResult with the minimum as witness
    """
    rho = ensure_density_matrix(rho)
    config = config or SearchConfig()
    tolerances = tolerances or Tolerances()

    kernel_projector = np.eye(DIM, dtype=complex) - range_projector(rho.matrix, tolerances.rank_rel_tol)
    _, minimum = minimum_product_overlap(kernel_projector, config)
    return _overlap_verdict(minimum, tolerances, "entanglement")


def is_unextendible(upb: Upb,
                   config: Optional[SearchConfig] = None,
                   tolerances: Optional[Tolerances] = None) -> CheckResult:
    """
    No product vector is orthogonal to every member of the UPB

    The minimum of psi^dagger P_U psi over product psi must exceed entangled_min.

    Args:
        upb: Five linearly independent product vectors
        config: Search configuration
        tolerances: Decision thresholds

    Returns:
        CheckResult with the minimum overlap as witness
    """
    config = config or SearchConfig()
    tolerances = tolerances or Tolerances()
    _, minimum = minimum_product_overlap(span_projector(upb.vectors), config)
    return _overlap_verdict(minimum, tolerances, "unextendibility")


def _hermitian_basis(n: int) -> List[np.ndarray]:
    """Orthonormal real basis of the n x n Hermitian matrices"""
    basis = []
    for i in range(n):
        for j in range(n):
            h = np.zeros((n, n), dtype=complex)
            if i == j:
                h[i, i] = 1.0
            elif i < j:
                h[i, j] = h[j, i] = 1.0 / np.sqrt(2.0)
            else:
                h[j, i] = -1j / np.sqrt(2.0)
                h[i, j] = 1j / np.sqrt(2.0)
            basis.append(h)
    return basis


def extremality_constraints(rho: DensityMatrix, rank_rel_tol: float = 1e-8) -> np.ndarray:
    """
    Real matrix of H -> ((1 - P) H, (1 - Q) H^P) over a Hermitian basis

    P and Q project onto Im rho and Im rho^P. The kernel is the real space of
    Hermitian H with Im H in Im rho and Im H^P in Im rho^P.

    Returns:
        324x81 real matrix
    """
    outside = np.eye(DIM, dtype=complex) - range_projector(rho.matrix, rank_rel_tol)
    outside_pt = np.eye(DIM, dtype=complex) - range_projector(partial_transpose(rho.matrix), rank_rel_tol)
    columns = []
    for h in _hermitian_basis(DIM):
        image = np.concatenate([(outside @ h).ravel(), (outside_pt @ partial_transpose(h)).ravel()])
        columns.append(np.concatenate([image.real, image.imag]))
    return np.column_stack(columns)


def is_extremal(rho: DensityMatrix, tolerances: Optional[Tolerances] = None) -> CheckResult:
    """
    Extremality among PPT states

    A PPT state is extremal iff the only Hermitian matrices with image inside
    Im rho and partial-transpose image inside Im rho^P are multiples of rho.

    Args:
        rho: PPT state
        tolerances: Rank and nullity thresholds

    Returns:
        YES iff the constraint map has nullity 1; witness is the second-smallest
        singular value relative to the largest

    Raises:
        StateValidationError: if rho is not PPT
    """
    rho = ensure_density_matrix(rho)
    tolerances = tolerances or Tolerances()
    ppt = is_ppt(rho, tolerances.psd_tol)
    if not ppt:
        raise StateValidationError("Extremality is only defined for PPT states",
                                   details={"min_pt_eigenvalue": ppt.witness})

    sigma = np.linalg.svd(extremality_constraints(rho, tolerances.rank_rel_tol), compute_uv=False)
    largest = float(sigma[0])
    if largest == 0.0:
        nullity = sigma.size
        witness = 0.0
    else:
        nullity = int(np.count_nonzero(sigma <= tolerances.extremal_rel_tol * largest))
        witness = float(np.sort(sigma)[1] / largest)

    verdict = Verdict.YES if nullity == 1 else Verdict.NO
    return CheckResult(verdict, witness, details={"nullity": nullity})


class StateCertificate:
    """
    Certified properties of a state, each backed by a witness
    """
    def __init__(self,
                 ppt: CheckResult,
                 ranks: Tuple[int, int],
                 local: Tuple[int, int],
                 entangled: CheckResult,
                 extremal: CheckResult,
                 min_eigenvalue: float):
        self.ppt = ppt
        self.rank_pair = ranks
        self.local_ranks = local
        self.entangled = entangled
        self.extremal = extremal
        self.min_eigenvalue = min_eigenvalue

    @property
    def is_ppt(self) -> bool:
        return bool(self.ppt)

    @property
    def is_entangled(self) -> bool:
        return bool(self.entangled)

    @property
    def is_extremal(self) -> bool:
        return bool(self.extremal)

    @property
    def in_rank_bounds(self) -> bool:
        return rank_bounds((DIM_A, DIM_B), self.rank_pair[0])

    def to_dict(self) -> Dict[str, Any]:
        """Convert certificate to the certificate.json layout"""
        return {
            "is_ppt": self.is_ppt,
            "rank_pair": list(self.rank_pair),
            "local_ranks": list(self.local_ranks),
            "in_rank_bounds": self.in_rank_bounds,
            "entangled": self.entangled.verdict.value,
            "extremal": self.is_extremal,
            "witnesses": {
                "min_eigenvalue": self.min_eigenvalue,
                "ppt": self.ppt.to_dict(),
                "entangled": self.entangled.to_dict(),
                "extremal": self.extremal.to_dict()
            }
        }


def certify(rho: Any,
            config: Optional[SearchConfig] = None,
            tolerances: Optional[Tolerances] = None) -> StateCertificate:
    """
    Run every predicate on a state

    Args:
        rho: Density matrix (DensityMatrix or 9x9 array)
        config: Search configuration for the entanglement check
        tolerances: Numerical thresholds

    Returns:
        StateCertificate; non-PPT states are reported non-extremal
    """
    rho = ensure_density_matrix(rho)
    config = config or SearchConfig()
    tolerances = tolerances or Tolerances()

    eigenvalues, _ = herm_eig(rho.matrix)
    ppt = is_ppt(rho, tolerances.psd_tol)
    ranks = rank_pair(rho, tolerances.rank_rel_tol)
    local = local_ranks(rho, tolerances.rank_rel_tol)
    entangled = is_entangled_by_image(rho, config, tolerances)
    if ppt:
        extremal = is_extremal(rho, tolerances)
    else:
        extremal = CheckResult(Verdict.NO, 0.0, details={"reason": "not_ppt"})

    certificate = StateCertificate(ppt, ranks, local, entangled, extremal, float(eigenvalues[0]))
    logger.info("certified", ppt=certificate.is_ppt, rank_pair=list(ranks), local_ranks=list(local),
                entangled=entangled.verdict.value, extremal=certificate.is_extremal)
    return certificate
