"""
Density matrix container for the 3x3 bipartite system
"""

from typing import Dict, Any

import numpy as np

from core.errors import StateValidationError, MalformedInputError
from core.serialization import encode_array, decode_array
from core.tensor_core import DIM, DIM_A, DIM_B, hermitize, is_hermitian, partial_transpose


class DensityMatrix:
    """
    Hermitian unit-trace 9x9 matrix tagged with its bipartite dimensions (3,3)

    The matrix is stored symmetrized and read-only. Positivity is not checked
    here; the certification predicates report it.
    """
    def __init__(self,
                 matrix: np.ndarray,
                 herm_tol: float = 1e-12,
                 trace_tol: float = 1e-9,
                 normalize: bool = False):
        rho = np.array(matrix, dtype=complex)
        if rho.shape != (DIM, DIM):
            raise StateValidationError(f"Expected a {DIM}x{DIM} matrix, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise StateValidationError("Density matrix has non-finite entries")
        if not is_hermitian(rho, herm_tol):
            raise StateValidationError("Density matrix is not Hermitian",
                                       details={"max_asymmetry": float(np.max(np.abs(rho - rho.conj().T)))})
        rho = hermitize(rho)

        trace = float(np.trace(rho).real)
        if normalize:
            if trace <= 0.0:
                raise StateValidationError("Cannot normalize a matrix with non-positive trace",
                                           details={"trace": trace})
            rho = rho / trace
        elif abs(trace - 1.0) > trace_tol:
            raise StateValidationError("Density matrix does not have unit trace",
                                       details={"trace": trace})

        rho.setflags(write=False)
        self.matrix = rho
        self.dims = (DIM_A, DIM_B)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        """The state 1/9"""
        return cls(np.eye(DIM, dtype=complex) / DIM)

    @classmethod
    def from_pure(cls, psi: np.ndarray) -> "DensityMatrix":
        """Projector onto a (not necessarily normalized) 9-vector"""
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(psi, psi.conj()), normalize=True)

    def partial_transpose(self) -> np.ndarray:
        """Partial transpose on subsystem B"""
        return partial_transpose(self.matrix)

    def to_dict(self) -> Dict[str, Any]:
        """Convert state to the state.json layout"""
        return {
            "dim_a": self.dims[0],
            "dim_b": self.dims[1],
            "rho": encode_array(self.matrix)
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any],
                  herm_tol: float = 1e-12,
                  trace_tol: float = 1e-9) -> "DensityMatrix":
        """
        Create state from the state.json layout

        Args:
            data: Parsed JSON object with dim_a, dim_b and rho
            herm_tol: Hermiticity tolerance
            trace_tol: Unit-trace tolerance

        Returns:
            Validated density matrix
        """
        if not isinstance(data, dict) or "rho" not in data:
            raise MalformedInputError("State file must be an object with a 'rho' entry")
        dims = (data.get("dim_a", DIM_A), data.get("dim_b", DIM_B))
        if dims != (DIM_A, DIM_B):
            raise MalformedInputError(f"Only 3x3 systems are supported, got {dims}")
        return cls(decode_array(data["rho"], (DIM, DIM)), herm_tol=herm_tol, trace_tol=trace_tol)

    def distance(self, other: "DensityMatrix") -> float:
        """Frobenius distance to another state"""
        return float(np.linalg.norm(self.matrix - other.matrix))

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims}, trace={np.trace(self.matrix).real:.6g})"


def ensure_density_matrix(rho: Any, normalize: bool = False) -> DensityMatrix:
    """Wrap a raw array as a DensityMatrix; pass DensityMatrix values through"""
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(rho, normalize=normalize)

