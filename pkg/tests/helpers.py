"""
Test helpers shared across modules
"""

import numpy as np

from construction.upb import ProductVector, UpbParams


def random_params(rng, low=0.1, high=10.0):
    """Log-uniform positive parameters"""
    return UpbParams(*np.exp(rng.uniform(np.log(low), np.log(high), size=4)))


def random_product_vectors(rng, count):
    return [ProductVector(rng.standard_normal(3) + 1j * rng.standard_normal(3),
                          rng.standard_normal(3) + 1j * rng.standard_normal(3))
            for _ in range(count)]


def random_unitary(rng, n=3):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def matches_projectively(x, y, tol=1e-7):
    """Same product vector up to phases of the factors"""
    phi = 1.0 - abs(np.vdot(x.phi, y.phi)) ** 2
    chi = 1.0 - abs(np.vdot(x.chi, y.chi)) ** 2
    return phi < tol and chi < tol
