"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from icpkit.core import AffineMap, IcpInstance, ZeroMap


def pair_instance(h: np.ndarray, f: np.ndarray) -> tuple[IcpInstance, np.ndarray]:
    """Instance and point realizing H(r) = h exactly and F(r) ~ f (to rounding).

    Uses A = I and the zero map, so H(r) = r and F(r) = r + (f - h); evaluating
    at r = h gives H = h bit-exactly and F within one rounding of f.  Lets a
    test target arbitrary sign regions of the (H, F) plane through the real
    evaluation path instead of synthetic values.
    """
    h = np.asarray(h, dtype=float)
    f = np.asarray(f, dtype=float)
    inst = IcpInstance(A=np.eye(h.size), b=f - h, f=ZeroMap())
    return inst, h


def random_instance(rng: np.random.Generator, n: int) -> IcpInstance:
    """Unstructured random instance (dense A, zero or affine f) for sweeps."""
    a = rng.uniform(-2.0, 2.0, (n, n))
    b = rng.uniform(-2.0, 2.0, n)
    if rng.integers(0, 2) == 0:
        return IcpInstance(A=a, b=b, f=ZeroMap())
    c = rng.uniform(-1.0, 1.0, (n, n))
    d = rng.uniform(-1.0, 1.0, n)
    return IcpInstance(A=a, b=b, f=AffineMap(c, d))


def diag_dominant(rng: np.random.Generator, n: int) -> np.ndarray:
    """Strictly diagonally dominant matrix with positive diagonal."""
    a = rng.uniform(-1.0, 1.0, (n, n))
    np.fill_diagonal(a, 0.0)
    np.fill_diagonal(a, np.sum(np.abs(a), axis=1) + rng.uniform(0.1, 1.0, n))
    return a
