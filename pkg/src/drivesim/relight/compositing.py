"""Foreground-over-background blend with ground shadow darkening."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


def composite(c_bg: np.ndarray, c_fg: np.ndarray, m_fg: np.ndarray,
              i_shadow: np.ndarray) -> np.ndarray:
    """Per pixel: C = C_bg * I * (1 - M_fg) + C_fg * M_fg, computed exactly."""
    c_bg = np.asarray(c_bg, dtype=np.float64)
    c_fg = np.asarray(c_fg, dtype=np.float64)
    m = np.asarray(m_fg, dtype=np.float64)
    i = np.asarray(i_shadow, dtype=np.float64)
    if c_bg.shape != c_fg.shape:
        raise ShapeMismatch(f"bg {c_bg.shape} vs fg {c_fg.shape}")
    if m.shape != c_bg.shape[:m.ndim] or i.shape != m.shape:
        raise ShapeMismatch(f"mask {m.shape} / shadow {i.shape} vs image {c_bg.shape}")
    if c_bg.ndim == m.ndim + 1:
        m = m[..., None]
        i = i[..., None]
    return c_bg * i * (1.0 - m) + c_fg * m
