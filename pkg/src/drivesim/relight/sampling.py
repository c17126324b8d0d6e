"""Counter-based RNG and hemisphere sampling.

Every random number is a pure function of (seed, pixel, sample, dim), so
renders are bit-reproducible and trivially data-parallel.
"""

from __future__ import annotations

import numpy as np

_PHI = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TO_UNIT = float(2.0 ** -53)


def _splitmix64(x):
    with np.errstate(over="ignore"):
        x = (x + _PHI).astype(np.uint64)
        x ^= x >> np.uint64(30)
        x = (x * _M1).astype(np.uint64)
        x ^= x >> np.uint64(27)
        x = (x * _M2).astype(np.uint64)
        x ^= x >> np.uint64(31)
    return x


def counter_hash(seed, *counters):
    """Mix integer counters (scalars or broadcastable arrays) into u64 states."""
    h = _splitmix64(np.asarray(seed, dtype=np.uint64))
    for c in counters:
        with np.errstate(over="ignore"):
            h = _splitmix64(h ^ (np.asarray(c, dtype=np.uint64) * _PHI))
    return h


def unit_float(seed, *counters) -> np.ndarray:
    """Uniform [0, 1) floats keyed by the counters."""
    h = counter_hash(seed, *counters)
    return (h >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def orthonormal_basis(n: np.ndarray):
    """Branchless tangent frame for unit normals (N, 3) -> (t1, t2)."""
    n = np.asarray(n, dtype=np.float64)
    sign = np.copysign(1.0, n[..., 2])
    a = -1.0 / (sign + n[..., 2])
    b = n[..., 0] * n[..., 1] * a
    t1 = np.stack([1.0 + sign * n[..., 0] ** 2 * a, sign * b,
                   -sign * n[..., 0]], axis=-1)
    t2 = np.stack([b, sign + n[..., 1] ** 2 * a, -n[..., 1]], axis=-1)
    return t1, t2


def cosine_hemisphere(n: np.ndarray, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Cosine-weighted directions about unit normals; pdf = cos(theta)/pi."""
    t1, t2 = orthonormal_basis(n)
    r = np.sqrt(u1)
    phi = 2.0 * np.pi * u2
    x = r * np.cos(phi)
    y = r * np.sin(phi)
    z = np.sqrt(np.maximum(1.0 - u1, 0.0))
    return (x[..., None] * t1 + y[..., None] * t2 + z[..., None] * n)
