"""Discrete algebraic Riccati equation by fixed-point iteration, and the
linearized bicycle channels the tracker feeds it.
"""

from __future__ import annotations

import numpy as np

from ..errors import RiccatiDivergence

P_TOL = 1e-9
MAX_ITERS = 100000


def solve_dare(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray,
               tol: float = P_TOL, max_iters: int = MAX_ITERS) -> np.ndarray:
    """Iterate P <- Q + A'PA - A'PB (R + B'PB)^-1 B'PA to a fixed point."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).reshape(a.shape[0], -1)
    q = np.atleast_2d(np.asarray(q, dtype=np.float64))
    r = np.atleast_2d(np.asarray(r, dtype=np.float64))
    p = q.copy()
    for _ in range(max_iters):
        btp = b.T @ p
        gain = np.linalg.solve(r + btp @ b, btp @ a)
        p_next = q + a.T @ p @ (a - b @ gain)
        if not np.all(np.isfinite(p_next)):
            raise RiccatiDivergence("Riccati iteration produced non-finite values")
        if np.abs(p_next - p).max() < tol:
            return p_next
        p = p_next
    raise RiccatiDivergence(f"Riccati iteration did not converge in {max_iters} steps")


def lqr_gains(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Stabilizing feedback K for u = -K x."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).reshape(a.shape[0], -1)
    q = np.atleast_2d(np.asarray(q, dtype=np.float64))
    r = np.atleast_2d(np.asarray(r, dtype=np.float64))
    p = solve_dare(a, b, q, r)
    btp = b.T @ p
    return np.linalg.solve(r + btp @ b, btp @ a)


def lateral_model(v: float, wheelbase: float, dt: float):
    """States (cross-track error, heading error); control is steering angle."""
    a = np.array([[1.0, dt * v], [0.0, 1.0]])
    b = np.array([[0.0], [dt * v / wheelbase]])
    return a, b


def longitudinal_model(dt: float):
    """States (station error, speed error); control is acceleration."""
    a = np.array([[1.0, dt], [0.0, 1.0]])
    b = np.array([[0.0], [dt]])
    return a, b
