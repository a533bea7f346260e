"""
Orthogonal UPBs of the 3x3 system in standard form
Implements the (a,b,c,d) parametrization, graph checks and the rank 4 PPT state
"""

import math
from typing import Dict, Any, Optional, Sequence, Tuple

import numpy as np

from core.density_matrix import DensityMatrix
from core.errors import InvalidParametersError, StateValidationError, MalformedInputError
from core.serialization import encode_array, decode_array
from core.tensor_core import DIM, DIM_A, kron, normalize_phase, span_basis
from utils.logger import get_logger

logger = get_logger(__name__)

UPB_SIZE = 5

# Orthogonality graph of the standard ordering: pentagon for A, pentagram for B
A_EDGES = tuple((k, (k + 1) % UPB_SIZE) for k in range(UPB_SIZE))
B_EDGES = tuple((k, (k + 2) % UPB_SIZE) for k in range(UPB_SIZE))

# Range outside which rank thresholds start to interact with conditioning
WELL_CONDITIONED_RANGE = (1e-3, 1e3)


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float, np.integer, np.floating)) and math.isfinite(value) and value > 0):
            raise InvalidParametersError(f"Parameter {name} must be a finite positive real, got {value!r}",
                                         details={name: repr(value)})


class UpbParams:
    """
    The four positive parameters (a,b,c,d) of the standard form
    """
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: float, b: float, c: float, d: float):
        _check_positive(a=a, b=b, c=c, d=d)
        object.__setattr__(self, "a", float(a))
        object.__setattr__(self, "b", float(b))
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "d", float(d))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("UpbParams is immutable")

    def __reduce__(self):
        return (UpbParams, self.as_tuple())

    @classmethod
    def from_squares(cls, alpha: float, beta: float, gamma: float, delta: float) -> "UpbParams":
        """Create from (alpha, beta, gamma, delta) = (a^2, b^2, c^2, d^2)"""
        _check_positive(alpha=alpha, beta=beta, gamma=gamma, delta=delta)
        return cls(math.sqrt(alpha), math.sqrt(beta), math.sqrt(gamma), math.sqrt(delta))

    @classmethod
    def parse(cls, text: str) -> "UpbParams":
        """Parse the CLI form 'a,b,c,d'"""
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 4:
            raise InvalidParametersError(f"Expected four comma-separated values, got {text!r}")
        try:
            values = [float(p) for p in parts]
        except ValueError as e:
            raise InvalidParametersError(f"Non-numeric parameter in {text!r}") from e
        return cls(*values)

    @property
    def squares(self) -> Tuple[float, float, float, float]:
        """(alpha, beta, gamma, delta)"""
        return (self.a ** 2, self.b ** 2, self.c ** 2, self.d ** 2)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def is_well_conditioned(self) -> bool:
        low, high = WELL_CONDITIONED_RANGE
        return all(low <= value <= high for value in self.as_tuple())

    def relative_error(self, other: "UpbParams") -> float:
        """Largest componentwise relative difference"""
        return max(abs(x - y) / max(abs(x), abs(y)) for x, y in zip(self.as_tuple(), other.as_tuple()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "abcd": list(self.as_tuple()),
            "squares": list(self.squares)
        }

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UpbParams) and self.as_tuple() == other.as_tuple()

    def __hash__(self) -> int:
        return hash(self.as_tuple())

    def __repr__(self) -> str:
        return "UpbParams(a={:.10g}, b={:.10g}, c={:.10g}, d={:.10g})".format(*self.as_tuple())


class ProductVector:
    """
    Product vector phi (x) chi with normalized, phase-fixed factors
    """
    __slots__ = ("phi", "chi", "psi")

    def __init__(self, phi: Sequence[complex], chi: Sequence[complex]):
        phi_arr = np.asarray(phi, dtype=complex).reshape(-1)
        chi_arr = np.asarray(chi, dtype=complex).reshape(-1)
        if phi_arr.shape != (DIM_A,) or chi_arr.shape != (DIM_A,):
            raise StateValidationError("Product vector factors must be complex 3-vectors")
        if not (np.all(np.isfinite(phi_arr)) and np.all(np.isfinite(chi_arr))):
            raise StateValidationError("Product vector has non-finite entries")

        phi_arr = normalize_phase(phi_arr)
        chi_arr = normalize_phase(chi_arr)
        psi_arr = kron(phi_arr, chi_arr)
        for arr in (phi_arr, chi_arr, psi_arr):
            arr.setflags(write=False)
        self.phi = phi_arr
        self.chi = chi_arr
        self.psi = psi_arr

    def sort_key(self) -> Tuple[float, ...]:
        """Lexicographic key on the phase-fixed components"""
        parts = np.concatenate([self.phi, self.chi])
        return tuple(np.round(np.concatenate([parts.real, parts.imag]), 12).tolist())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phi": encode_array(self.phi),
            "chi": encode_array(self.chi)
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProductVector":
        if not isinstance(data, dict) or "phi" not in data or "chi" not in data:
            raise MalformedInputError("Product vector entries need 'phi' and 'chi'")
        return cls(decode_array(data["phi"], (DIM_A,)), decode_array(data["chi"], (DIM_A,)))

    def __repr__(self) -> str:
        return f"ProductVector(phi={np.round(self.phi, 6)}, chi={np.round(self.chi, 6)})"


class Upb:
    """
    Ordered list of five product vectors, optionally tagged with its standard-form origin
    """
    def __init__(self,
                 vectors: Sequence[ProductVector],
                 origin: Optional[UpbParams] = None):
        if len(vectors) != UPB_SIZE:
            raise StateValidationError(f"A UPB of the 3x3 system has {UPB_SIZE} members, got {len(vectors)}")
        self.vectors = tuple(vectors)
        self.origin = origin

    @property
    def phis(self) -> np.ndarray:
        """3x5 matrix with the normalized phi_k as columns"""
        return np.column_stack([v.phi for v in self.vectors])

    @property
    def chis(self) -> np.ndarray:
        """3x5 matrix with the normalized chi_k as columns"""
        return np.column_stack([v.chi for v in self.vectors])

    @property
    def psis(self) -> np.ndarray:
        """9x5 matrix with the product vectors as columns"""
        return np.column_stack([v.psi for v in self.vectors])

    def to_dict(self) -> Dict[str, Any]:
        """Convert UPB to the upb.json layout"""
        return {
            "params": list(self.origin.as_tuple()) if self.origin else None,
            "vectors": [v.to_dict() for v in self.vectors]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Upb":
        if not isinstance(data, dict) or not isinstance(data.get("vectors"), list):
            raise MalformedInputError("UPB file must be an object with a 'vectors' list")
        origin = UpbParams(*data["params"]) if data.get("params") else None
        return cls([ProductVector.from_dict(v) for v in data["vectors"]], origin=origin)


class OrthogonalityReport:
    """
    Residuals of the ten orthogonality relations of the standard ordering
    """
    def __init__(self, a_residual: float, b_residual: float, tol: float):
        self.a_residual = a_residual
        self.b_residual = b_residual
        self.tol = tol

    @property
    def holds(self) -> bool:
        return self.a_residual < self.tol and self.b_residual < self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a_residual": self.a_residual,
            "b_residual": self.b_residual,
            "tolerance": self.tol,
            "holds": self.holds
        }


def build_u(a: float, b: float) -> np.ndarray:
    """
    Standard-form 3x5 matrix whose columns are the unnormalized phi_k

    Args:
        a: Positive parameter
        b: Positive parameter

    Returns:
        [[1,0,a,b,0],[0,1,0,1,a],[0,0,b,-a,1]]
    """
    _check_positive(a=a, b=b)
    return np.array([[1.0, 0.0, a, b, 0.0],
                     [0.0, 1.0, 0.0, 1.0, a],
                     [0.0, 0.0, b, -a, 1.0]], dtype=complex)


def build_v(c: float, d: float) -> np.ndarray:
    """
    Standard-form 3x5 matrix whose columns are the unnormalized chi_k

    Args:
        c: Positive parameter
        d: Positive parameter

    Returns:
        [[1,d,0,0,c],[0,1,1,c,0],[0,-c,0,1,d]]
    """
    _check_positive(c=c, d=d)
    return np.array([[1.0, d, 0.0, 0.0, c],
                     [0.0, 1.0, 1.0, c, 0.0],
                     [0.0, -c, 0.0, 1.0, d]], dtype=complex)


def build_upb(params: UpbParams) -> Upb:
    """
    Orthogonal UPB with phi_k, chi_k the columns of build_u and build_v

    Args:
        params: Standard-form parameters

    Returns:
        UPB tagged with its origin
    """
    u = build_u(params.a, params.b)
    v = build_v(params.c, params.d)
    vectors = [ProductVector(u[:, k], v[:, k]) for k in range(UPB_SIZE)]
    return Upb(vectors, origin=params)


def check_orthogonality_graph(upb: Upb, tol: float = 1e-12) -> OrthogonalityReport:
    """
    Check the pentagon (A) and pentagram (B) orthogonality relations

    Args:
        upb: UPB in the ordering to be checked
        tol: Threshold for the holds flag

    Returns:
        Report with the largest normalized overlap on each edge set
    """
    phis, chis = upb.phis, upb.chis
    a_residual = max(abs(np.vdot(phis[:, i], phis[:, j])) for i, j in A_EDGES)
    b_residual = max(abs(np.vdot(chis[:, i], chis[:, j])) for i, j in B_EDGES)
    return OrthogonalityReport(float(a_residual), float(b_residual), tol)


def conjugate_partner(upb: Upb) -> Upb:
    """
    The UPB {phi_k (x) conj(chi_k)}

    Its state equals the partial transpose of the state of an orthonormal UPB;
    when every chi_k is real the partner is the UPB itself.
    """
    return Upb([ProductVector(v.phi, v.chi.conj()) for v in upb.vectors], origin=upb.origin)


def span_projector(vectors: Sequence[ProductVector], expected_rank: int = UPB_SIZE) -> np.ndarray:
    """
    Orthogonal projection onto the span of product vectors

    Raises:
        StateValidationError: if the vectors span fewer than expected_rank dimensions
    """
    basis = span_basis(np.column_stack([v.psi for v in vectors]))
    if basis.shape[1] < expected_rank:
        raise StateValidationError(f"Product vectors span only {basis.shape[1]} dimensions",
                                   details={"expected": expected_rank})
    return basis @ basis.conj().T


def build_state(upb: Upb) -> DensityMatrix:
    """
    Rank 4 PPT state (1 - P_U)/(9 - 5) of a UPB

    Args:
        upb: Five product vectors spanning a 5-dimensional subspace

    Returns:
        Normalized state with the UPB in its kernel
    """
    projector = span_projector(upb.vectors)
    rho = (np.eye(DIM, dtype=complex) - projector) / (DIM - UPB_SIZE)
    logger.debug("upb_state_built", origin=repr(upb.origin))
    return DensityMatrix(rho)


def standard_state(params: UpbParams) -> DensityMatrix:
    """Shorthand for build_state(build_upb(params))"""
    return build_state(build_upb(params))
