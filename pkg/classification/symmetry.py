"""
Parameter symmetry group of the orthogonal UPB standard form
Implements the three generators on (alpha, beta, gamma, delta) = (a^2, b^2, c^2, d^2),
group closure by probe-point agreement and canonical orbit representatives
"""

import functools
import math
from enum import Enum
from typing import Callable, Dict, Any, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import GroupClosureError, InvalidParametersError
from construction.upb import UpbParams
from utils.logger import get_logger

logger = get_logger(__name__)

GROUP_ORDER = 60
MAX_COMPOSITIONS = 10000
PROBE_COUNT = 5
PROBE_SEED = 60
PROBE_RANGE = (0.5, 2.0)
PROBE_REL_TOL = 1e-9
TIE_REL_TOL = 1e-9


class Generator(Enum):
    """Generators of the parameter symmetry group"""
    CYCLIC = "cyclic"
    INVERSION = "inversion"
    SWAP_SIXTH = "swap6"


class ParamPoint:
    """
    Squared standard-form parameters (alpha, beta, gamma, delta), all > 0
    """
    __slots__ = ("alpha", "beta", "gamma", "delta")

    def __init__(self, alpha: float, beta: float, gamma: float, delta: float):
        for name, value in (("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)):
            if not (math.isfinite(value) and value > 0):
                raise InvalidParametersError(f"ParamPoint component {name} must be finite and positive, got {value!r}")
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "beta", float(beta))
        object.__setattr__(self, "gamma", float(gamma))
        object.__setattr__(self, "delta", float(delta))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("ParamPoint is immutable")

    def __reduce__(self):
        return (ParamPoint, self.as_tuple())

    @classmethod
    def from_params(cls, params: UpbParams) -> "ParamPoint":
        return cls(*params.squares)

    def to_params(self) -> UpbParams:
        return UpbParams.from_squares(*self.as_tuple())

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def relative_error(self, other: "ParamPoint") -> float:
        return max(abs(x - y) / max(abs(x), abs(y)) for x, y in zip(self.as_tuple(), other.as_tuple()))

    def is_close(self, other: "ParamPoint", rel_tol: float = 1e-9) -> bool:
        return all(math.isclose(x, y, rel_tol=rel_tol, abs_tol=0.0)
                   for x, y in zip(self.as_tuple(), other.as_tuple()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "squares": list(self.as_tuple()),
            "abcd": list(self.to_params().as_tuple())
        }

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ParamPoint) and self.as_tuple() == other.as_tuple()

    def __hash__(self) -> int:
        return hash(self.as_tuple())

    def __repr__(self) -> str:
        return "ParamPoint(alpha={:.10g}, beta={:.10g}, gamma={:.10g}, delta={:.10g})".format(*self.as_tuple())


def cyclic_shift(p: ParamPoint) -> ParamPoint:
    """
    Parameters of the ordering (psi5, psi1, psi2, psi3, psi4); period 5
    """
    a, b, g, d = p.as_tuple()
    return ParamPoint(b / (1.0 + a),
                      b / (a * (1.0 + a)),
                      1.0 / (g + d),
                      g * (1.0 + g + d) / (d * (g + d)))


def inversion(p: ParamPoint) -> ParamPoint:
    """
    Parameters of the ordering (psi1, psi5, psi4, psi3, psi2); an involution
    """
    a, b, g, d = p.as_tuple()
    return ParamPoint(a, a * (1.0 + a) / b, g, g * (1.0 + g) / d)


def swap_sixth(p: ParamPoint) -> ParamPoint:
    """
    Parameters of the ordering (psi6, psi5, psi3, psi4, psi2); an involution

    Exchanges alpha and gamma; beta and delta mix all four components.
    """
    a, b, g, d = p.as_tuple()
    beta = (b * (1.0 + g) * ((a + b) * (g + d) + d)
            / (a * (1.0 + a + b) * d + (1.0 + a) * (a + b) * (1.0 + g)))
    delta = ((1.0 + a) * (b * d + (a + b) * g * (1.0 + g + d))
             / ((1.0 + a + (1.0 + a + b) * (g + d)) * d))
    return ParamPoint(g, beta, a, delta)


GENERATORS: Dict[Generator, Callable[[ParamPoint], ParamPoint]] = {
    Generator.CYCLIC: cyclic_shift,
    Generator.INVERSION: inversion,
    Generator.SWAP_SIXTH: swap_sixth
}

# 0-based positions of the old kernel vectors in the new ordering of all six
ORDERING_MOVES: Dict[Generator, Tuple[int, ...]] = {
    Generator.CYCLIC: (4, 0, 1, 2, 3, 5),
    Generator.INVERSION: (0, 4, 3, 2, 1, 5),
    Generator.SWAP_SIXTH: (5, 4, 2, 3, 1, 0)
}


def permute_vectors(vectors: Sequence[Any], move: Sequence[int]) -> List[Any]:
    """New ordering with new[k] = old[move[k]]"""
    if sorted(move) != list(range(len(vectors))):
        raise ValueError(f"Move {tuple(move)} is not a permutation of {len(vectors)} items")
    return [vectors[i] for i in move]


class GroupElement:
    """
    A composed parameter map, identified by its action on probe points

    Generators in `word` are applied left to right.
    """
    def __init__(self, word: Tuple[Generator, ...] = ()):
        self.word = tuple(word)

    def apply(self, p: ParamPoint) -> ParamPoint:
        for label in self.word:
            p = GENERATORS[label](p)
        return p

    def __call__(self, p: ParamPoint) -> ParamPoint:
        return self.apply(p)

    def then(self, other: "GroupElement") -> "GroupElement":
        """The element applying self first, then other"""
        return GroupElement(self.word + other.word)

    @property
    def is_identity_word(self) -> bool:
        return not self.word

    def to_dict(self) -> Dict[str, Any]:
        return {"word": [label.value for label in self.word]}

    def __repr__(self) -> str:
        return "GroupElement({})".format(" . ".join(label.value for label in self.word) or "id")


def probe_points(count: int = PROBE_COUNT, seed: int = PROBE_SEED) -> List[ParamPoint]:
    """Seeded points log-uniform in [0.5, 2]^4"""
    rng = np.random.default_rng(seed)
    low, high = np.log(PROBE_RANGE[0]), np.log(PROBE_RANGE[1])
    return [ParamPoint(*np.exp(rng.uniform(low, high, size=4))) for _ in range(count)]


def _signature(points: Sequence[ParamPoint]) -> np.ndarray:
    return np.array([p.as_tuple() for p in points])


def _same_action(x: np.ndarray, y: np.ndarray, rel_tol: float = PROBE_REL_TOL) -> bool:
    return bool(np.allclose(x, y, rtol=rel_tol, atol=0.0))


def actions_agree(g: GroupElement, h: GroupElement, probes: Optional[Sequence[ParamPoint]] = None) -> bool:
    """Equality of group elements by their images of the probe points"""
    probes = probes if probes is not None else probe_points()
    return _same_action(_signature([g(p) for p in probes]), _signature([h(p) for p in probes]))


def generate_group(generators: Sequence[Generator] = tuple(Generator),
                   probes: Optional[Sequence[ParamPoint]] = None) -> List[GroupElement]:
    """
    Closure of the generators under composition, breadth first

    Args:
        generators: Generators to close over
        probes: Points on which element actions are compared

    Returns:
        Distinct elements, identity first, in discovery order

    Raises:
        GroupClosureError: if closure is not reached within 10000 compositions
    """
    probes = list(probes) if probes is not None else probe_points()
    elements = [GroupElement()]
    images = [list(probes)]
    frontier = [0]
    compositions = 0

    while frontier:
        next_frontier = []
        for index in frontier:
            for label in generators:
                compositions += 1
                if compositions > MAX_COMPOSITIONS:
                    raise GroupClosureError("Group closure not reached",
                                            details={"compositions": compositions, "elements": len(elements)})
                candidate_images = [GENERATORS[label](p) for p in images[index]]
                signature = _signature(candidate_images)
                if any(_same_action(signature, _signature(known)) for known in images):
                    continue
                elements.append(GroupElement(elements[index].word + (label,)))
                images.append(candidate_images)
                next_frontier.append(len(elements) - 1)
        frontier = next_frontier

    logger.debug("group_closed", order=len(elements), compositions=compositions,
                 generators=[g.value for g in generators])
    return elements


@functools.lru_cache(maxsize=None)
def symmetry_group() -> Tuple[GroupElement, ...]:
    """The full order-60 group, computed once"""
    group = tuple(generate_group())
    if len(group) != GROUP_ORDER:
        raise GroupClosureError(f"Symmetry group has {len(group)} elements, expected {GROUP_ORDER}")
    return group


def element_order(g: GroupElement, probes: Optional[Sequence[ParamPoint]] = None, limit: int = GROUP_ORDER) -> int:
    """Smallest n >= 1 with g^n acting as the identity on the probes"""
    probes = list(probes) if probes is not None else probe_points()
    start = _signature(probes)
    current = list(probes)
    for n in range(1, limit + 1):
        current = [g(p) for p in current]
        if _same_action(_signature(current), start):
            return n
    raise GroupClosureError(f"Element {g!r} has no order up to {limit}")


def orbit(p: ParamPoint) -> List[ParamPoint]:
    """Images of p under every group element, in group order"""
    return [g(p) for g in symmetry_group()]


def _compare(x: ParamPoint, y: ParamPoint) -> int:
    for u, v in zip(x.as_tuple(), y.as_tuple()):
        if math.isclose(u, v, rel_tol=TIE_REL_TOL, abs_tol=0.0):
            continue
        return -1 if u < v else 1
    return 0


def canonical_representative(p: ParamPoint) -> ParamPoint:
    """
    Lexicographically smallest point of the orbit of p

    Components within 1e-9 relative of each other count as ties.
    """
    return min(orbit(p), key=functools.cmp_to_key(_compare))


def canonical_params(params: UpbParams) -> UpbParams:
    """canonical_representative expressed in (a, b, c, d)"""
    return canonical_representative(ParamPoint.from_params(params)).to_params()
