"""
SL x SL product transformations
Implements state and kernel-vector maps plus seeded random test transforms
"""

from typing import Dict, Any

import numpy as np

from core.density_matrix import DensityMatrix
from core.errors import NumericalDegeneracyError, MalformedInputError
from core.serialization import encode_array, decode_array
from core.tensor_core import DIM_A, hermitize
from construction.upb import ProductVector, Upb
from utils.logger import get_logger

logger = get_logger(__name__)

# |det| below which a matrix is treated as singular
SINGULAR_DET = 1e-12

MAX_REJECTION_DRAWS = 1000


def sl_normalize(m: np.ndarray) -> np.ndarray:
    """
    Rescale a 3x3 matrix to determinant 1

    Raises:
        NumericalDegeneracyError: if |det| < 1e-12
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (DIM_A, DIM_A):
        raise MalformedInputError(f"Expected a 3x3 matrix, got shape {m.shape}")
    det = np.linalg.det(m)
    if abs(det) < SINGULAR_DET:
        raise NumericalDegeneracyError("Transform matrix is singular", details={"abs_det": float(abs(det))})
    return m * np.power(det, -1.0 / DIM_A)


class ProductTransform:
    """
    V = V_A (x) V_B with det V_A = det V_B = 1
    """
    def __init__(self, va: np.ndarray, vb: np.ndarray):
        self.va = sl_normalize(va)
        self.vb = sl_normalize(vb)
        self.va.setflags(write=False)
        self.vb.setflags(write=False)

    @classmethod
    def identity(cls) -> "ProductTransform":
        return cls(np.eye(DIM_A), np.eye(DIM_A))

    @property
    def matrix(self) -> np.ndarray:
        """The 9x9 operator V_A (x) V_B"""
        return np.kron(self.va, self.vb)

    def compose(self, first: "ProductTransform") -> "ProductTransform":
        """The transform that applies `first`, then self"""
        return ProductTransform(self.va @ first.va, self.vb @ first.vb)

    def inverse(self) -> "ProductTransform":
        return ProductTransform(np.linalg.inv(self.va), np.linalg.inv(self.vb))

    def partial_transpose_partner(self) -> "ProductTransform":
        """(V_A, conj(V_B)), the transform acting on partially transposed states"""
        return ProductTransform(self.va, self.vb.conj())

    def condition_numbers(self) -> Dict[str, float]:
        return {
            "va": float(np.linalg.cond(self.va)),
            "vb": float(np.linalg.cond(self.vb))
        }

    def to_dict(self) -> Dict[str, Any]:
        """Convert transform to the transform.json layout"""
        return {
            "va": encode_array(self.va),
            "vb": encode_array(self.vb)
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProductTransform":
        if not isinstance(data, dict) or "va" not in data or "vb" not in data:
            raise MalformedInputError("Transform file must be an object with 'va' and 'vb'")
        return cls(decode_array(data["va"], (DIM_A, DIM_A)), decode_array(data["vb"], (DIM_A, DIM_A)))


def apply_to_state(t: ProductTransform, rho: DensityMatrix) -> DensityMatrix:
    """
    rho2 = a2 V rho V^dagger with a2 fixing unit trace

    Args:
        t: Product transform
        rho: Input state

    Returns:
        Transformed state, symmetrized against roundoff
    """
    v = t.matrix
    image = hermitize(v @ rho.matrix @ v.conj().T)
    trace = float(np.trace(image).real)
    return DensityMatrix(image / trace)


def apply_to_kernel_vectors(t: ProductTransform, upb: Upb) -> Upb:
    """
    Map kernel product vectors by ((V_A^dagger)^-1 phi) (x) ((V_B^dagger)^-1 chi)

    Args:
        t: Product transform applied to the state
        upb: Product vectors in the kernel of the original state

    Returns:
        Renormalized, phase-fixed images (origin dropped)
    """
    return Upb([map_kernel_vector(t, v) for v in upb.vectors])


def map_kernel_vector(t: ProductTransform, vector: ProductVector) -> ProductVector:
    """Image of one kernel product vector"""
    phi = np.linalg.solve(t.va.conj().T, vector.phi)
    chi = np.linalg.solve(t.vb.conj().T, vector.chi)
    return ProductVector(phi, chi)


def _compress_spectrum(m: np.ndarray, cond_max: float) -> np.ndarray:
    """Geometrically shrink the singular spectrum so that cond(m) = cond_max"""
    left, sigma, right = np.linalg.svd(m)
    ratio = sigma[0] / sigma[-1]
    exponent = np.log(cond_max) / np.log(ratio) if ratio > 1.0 else 0.0
    compressed = sigma[0] * (sigma / sigma[0]) ** exponent
    return (left * compressed) @ right


def random_sl3(seed: int, cond_max: float = 20.0) -> np.ndarray:
    """
    Seeded random SL(3,C) matrix with bounded condition number

    Complex Gaussian draws are rejected while cond > cond_max; when the draw
    budget runs out (cond_max close to 1) the last draw has its spectrum compressed.

    Args:
        seed: Seed of the numpy Generator
        cond_max: Bound on sigma_max/sigma_min, at least 1

    Returns:
        3x3 complex matrix with det 1
    """
    if cond_max < 1.0:
        raise ValueError(f"cond_max must be >= 1, got {cond_max}")
    rng = np.random.default_rng(seed)
    draw = None
    for _ in range(MAX_REJECTION_DRAWS):
        draw = (rng.standard_normal((DIM_A, DIM_A)) + 1j * rng.standard_normal((DIM_A, DIM_A))) / np.sqrt(2.0)
        if np.linalg.cond(draw) <= cond_max:
            return sl_normalize(draw)
    logger.debug("random_sl3_compressed", seed=seed, cond_max=cond_max)
    return sl_normalize(_compress_spectrum(draw, cond_max))


def random_transform(seed: int, cond_max: float = 20.0) -> ProductTransform:
    """Random product transform; V_A and V_B come from two derived seeds"""
    seeds = np.random.SeedSequence(seed).generate_state(2)
    return ProductTransform(random_sl3(int(seeds[0]), cond_max), random_sl3(int(seeds[1]), cond_max))
