"""
SL-invariant determinant ratios of five product vectors
Implements the four invariants, the ordering search and parameter recovery
"""

import itertools
from typing import Dict, Any, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DegenerateConfigurationError, InvalidParametersError, StateValidationError
from core.serialization import encode_complex
from construction.upb import ProductVector, UpbParams, UPB_SIZE
from utils.config_loader import Tolerances
from utils.logger import get_logger

logger = get_logger(__name__)

KERNEL_SIZE = UPB_SIZE + 1

Triple = Tuple[int, int, int]

# (sign, numerator triples, denominator triples) per invariant, 0-based columns
_PHI_RATIOS = (
    (-1.0, ((0, 1, 3), (0, 2, 4)), ((0, 1, 4), (0, 2, 3))),
    (-1.0, ((0, 1, 2), (1, 3, 4)), ((0, 1, 3), (1, 2, 4))),
)
_CHI_RATIOS = (
    (1.0, ((0, 1, 2), (0, 3, 4)), ((0, 1, 4), (0, 2, 3))),
    (1.0, ((0, 2, 4), (1, 2, 3)), ((0, 1, 2), (2, 3, 4))),
)


class InvariantTuple:
    """
    The invariants (s1, s2, s3, s4) of an ordered set of product vectors

    For the standard form they equal (a^2, b^2/a^2, c^2, d^2/c^2).
    """
    def __init__(self, values: Sequence[complex], ordering: Optional[Sequence[int]] = None):
        if len(values) != 4:
            raise ValueError(f"Expected four invariants, got {len(values)}")
        self.values = tuple(complex(v) for v in values)
        self.ordering = tuple(ordering) if ordering is not None else tuple(range(UPB_SIZE))

    @property
    def s1(self) -> complex:
        return self.values[0]

    @property
    def s2(self) -> complex:
        return self.values[1]

    @property
    def s3(self) -> complex:
        return self.values[2]

    @property
    def s4(self) -> complex:
        return self.values[3]

    def is_real_positive(self, reality_tol: float = 1e-8, positivity_tol: float = 1e-8) -> bool:
        """All four have |Im s| < reality_tol*(1+|s|) and Re s > positivity_tol"""
        return all(abs(s.imag) < reality_tol * (1.0 + abs(s)) and s.real > positivity_tol
                   for s in self.values)

    def relative_difference(self, other: "InvariantTuple") -> float:
        return max(abs(x - y) / max(abs(x), abs(y), 1e-300) for x, y in zip(self.values, other.values))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "values": [encode_complex(s) for s in self.values],
            "ordering": list(self.ordering)
        }

    def __repr__(self) -> str:
        return "InvariantTuple({})".format(", ".join(f"{s:.8g}" for s in self.values))


class OrderingReport:
    """
    Orderings of six kernel vectors whose first five give real positive invariants
    """
    def __init__(self,
                 admissible: List[Tuple[int, ...]],
                 invariants: List[InvariantTuple],
                 total_tested: int,
                 degenerate: int = 0):
        self.admissible = admissible
        self.invariants = invariants
        self.total_tested = total_tested
        self.degenerate = degenerate

    @property
    def count(self) -> int:
        return len(self.admissible)

    def per_excluded(self) -> Dict[int, int]:
        """Admissible count for each choice of the excluded sixth vector"""
        counts = {k: 0 for k in range(KERNEL_SIZE)}
        for ordering in self.admissible:
            counts[ordering[-1]] += 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "admissible_orderings": [list(o) for o in self.admissible],
            "admissible_count": self.count,
            "per_excluded": {str(k): v for k, v in self.per_excluded().items()},
            "total_tested": self.total_tested,
            "degenerate": self.degenerate
        }


def _normalized_columns(columns: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(columns, axis=0)
    if np.any(norms == 0.0):
        raise StateValidationError("Zero vector among the inputs")
    return columns / norms


def _triple_determinants(columns: np.ndarray) -> Dict[Triple, complex]:
    """det of every ordered triple of distinct columns"""
    dets: Dict[Triple, complex] = {}
    for triple in itertools.permutations(range(columns.shape[1]), 3):
        dets[triple] = complex(np.linalg.det(columns[:, list(triple)]))
    return dets


def _ratios(dets: Dict[Triple, complex],
            order: Sequence[int],
            table: Tuple,
            denominator_tol: float) -> List[complex]:
    values = []
    for sign, numerator, denominator in table:
        num = [dets[tuple(order[i] for i in t)] for t in numerator]
        den = [dets[tuple(order[i] for i in t)] for t in denominator]
        smallest = min(abs(x) for x in den)
        if smallest < denominator_tol:
            raise DegenerateConfigurationError("Near-zero determinant in an invariant denominator",
                                               details={"abs_det": smallest, "ordering": list(order)})
        values.append(sign * num[0] * num[1] / (den[0] * den[1]))
    return values


def _invariants_from_dets(phi_dets: Dict[Triple, complex],
                          chi_dets: Dict[Triple, complex],
                          order: Sequence[int],
                          denominator_tol: float) -> InvariantTuple:
    values = (_ratios(phi_dets, order, _PHI_RATIOS, denominator_tol)
              + _ratios(chi_dets, order, _CHI_RATIOS, denominator_tol))
    return InvariantTuple(values, ordering=order)


def compute_invariants(vectors: Sequence[ProductVector], denominator_tol: float = 1e-12) -> InvariantTuple:
    """
    Determinant-ratio invariants of five product vectors

    Args:
        vectors: Five product vectors, phi_k playing u_k and chi_k playing v_k
        denominator_tol: Smallest admissible |det| of a denominator triple

    Returns:
        InvariantTuple (s1, s2, s3, s4)

    Raises:
        DegenerateConfigurationError: if three phi or three chi are nearly coplanar
    """
    if len(vectors) != UPB_SIZE:
        raise StateValidationError(f"Invariants need {UPB_SIZE} product vectors, got {len(vectors)}")
    phis = _normalized_columns(np.column_stack([v.phi for v in vectors]))
    chis = _normalized_columns(np.column_stack([v.chi for v in vectors]))
    return _invariants_from_dets(_triple_determinants(phis), _triple_determinants(chis),
                                 tuple(range(UPB_SIZE)), denominator_tol)


def find_positive_orderings(vectors: Sequence[ProductVector],
                            tolerances: Optional[Tolerances] = None) -> OrderingReport:
    """
    Enumerate all 720 orderings of six product vectors

    An ordering is admissible when the invariants of its first five vectors are
    all real and positive. Orderings hitting a degenerate denominator are counted
    and skipped.

    Args:
        vectors: Six product vectors, any five linearly independent
        tolerances: Reality, positivity and denominator thresholds

    Returns:
        OrderingReport listing admissible orderings in lexicographic order
    """
    tolerances = tolerances or Tolerances()
    if len(vectors) != KERNEL_SIZE:
        raise StateValidationError(f"Ordering search needs {KERNEL_SIZE} product vectors, got {len(vectors)}")

    phi_dets = _triple_determinants(_normalized_columns(np.column_stack([v.phi for v in vectors])))
    chi_dets = _triple_determinants(_normalized_columns(np.column_stack([v.chi for v in vectors])))

    admissible: List[Tuple[int, ...]] = []
    invariants: List[InvariantTuple] = []
    degenerate = 0
    total = 0
    for order in itertools.permutations(range(KERNEL_SIZE)):
        total += 1
        try:
            s = _invariants_from_dets(phi_dets, chi_dets, order, tolerances.denominator_tol)
        except DegenerateConfigurationError:
            degenerate += 1
            continue
        if s.is_real_positive(tolerances.reality_tol, tolerances.positivity_tol):
            admissible.append(order)
            invariants.append(s)

    report = OrderingReport(admissible, invariants, total, degenerate)
    logger.info("orderings_enumerated", admissible=report.count, total=total, degenerate=degenerate)
    return report


def recover_parameters(s: InvariantTuple,
                       reality_tol: float = 1e-8,
                       positivity_tol: float = 1e-8) -> UpbParams:
    """
    Invert the invariants: a = sqrt(s1), b = sqrt(s1 s2), c = sqrt(s3), d = sqrt(s3 s4)

    Args:
        s: Real positive invariants
        reality_tol: Relative bound on imaginary parts
        positivity_tol: Lower bound on real parts

    Returns:
        Standard-form parameters

    Raises:
        InvalidParametersError: if any invariant is not real positive
    """
    if not s.is_real_positive(reality_tol, positivity_tol):
        raise InvalidParametersError("Invariants are not all real and positive",
                                     details={"invariants": [encode_complex(v) for v in s.values]})
    s1, s2, s3, s4 = (v.real for v in s.values)
    return UpbParams(np.sqrt(s1), np.sqrt(s1 * s2), np.sqrt(s3), np.sqrt(s3 * s4))
