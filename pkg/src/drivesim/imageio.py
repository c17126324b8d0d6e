"""PPM (P6) and PFM image files.

PFM rows are stored bottom-to-top with a negative scale marking little-endian
data, per the de-facto convention.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError


def save_ppm(rgb: np.ndarray, path) -> None:
    """rgb: (H, W, 3) floats in [0, 1]."""
    arr = np.clip(np.asarray(rgb, dtype=np.float64), 0.0, 1.0)
    data = (arr * 255.0 + 0.5).astype(np.uint8)
    h, w = data.shape[:2]
    with Path(path).open("wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(data.tobytes())


def load_ppm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P6":
        raise ParseError("not a P6 ppm", path=path)
    w, h = (int(x) for x in parts[1].split())
    data = np.frombuffer(parts[3], dtype=np.uint8, count=w * h * 3)
    return data.reshape(h, w, 3).astype(np.float64) / 255.0


def save_pfm(img: np.ndarray, path) -> None:
    """img: (H, W) grayscale or (H, W, 3) color, float32 on disk."""
    arr = np.asarray(img, dtype="<f4")
    color = arr.ndim == 3
    h, w = arr.shape[:2]
    with Path(path).open("wb") as f:
        f.write((b"PF\n" if color else b"Pf\n"))
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(arr[::-1].tobytes())  # bottom-to-top


def load_pfm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if len(parts) < 4 or parts[0] not in (b"PF", b"Pf"):
        raise ParseError("not a pfm", path=path)
    color = parts[0] == b"PF"
    w, h = (int(x) for x in parts[1].split())
    scale = float(parts[2])
    dtype = "<f4" if scale < 0 else ">f4"
    count = w * h * (3 if color else 1)
    data = np.frombuffer(parts[3], dtype=dtype, count=count)
    shape = (h, w, 3) if color else (h, w)
    return np.ascontiguousarray(data.reshape(shape)[::-1]).astype(np.float64)
