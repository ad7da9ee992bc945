"""Heatmaps written as binary PPM (P6) with a fixed colormap.

The colormap is a piecewise-linear ramp through the stops below, sampled
at 256 levels, so identical data always give identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

# dark -> purple -> red -> orange -> pale yellow
COLOR_STOPS = np.array(
    [
        [0, 0, 4],
        [87, 16, 110],
        [188, 55, 84],
        [249, 142, 9],
        [252, 255, 164],
    ],
    dtype=float,
)
NOT_APPLICABLE = (160, 160, 160)
NO_VIOLATION = (255, 255, 255)


def colormap(levels: int = 256) -> np.ndarray:
    x = np.linspace(0.0, 1.0, levels)
    xp = np.linspace(0.0, 1.0, len(COLOR_STOPS))
    lut = np.column_stack([np.interp(x, xp, COLOR_STOPS[:, c]) for c in range(3)])
    return np.round(lut).astype(np.uint8)


_LUT = colormap()


def to_rgb(values, vmax: float | None = None) -> np.ndarray:
    """Map a 2-D array onto the colormap; NaN becomes grey."""
    v = np.asarray(values, dtype=float)
    finite = np.isfinite(v)
    if vmax is None:
        vmax = float(np.max(v[finite])) if finite.any() else 1.0
    scale = vmax if vmax > 0 else 1.0
    idx = np.clip(np.where(finite, v, 0.0) / scale, 0.0, 1.0)
    rgb = _LUT[np.round(idx * (len(_LUT) - 1)).astype(int)]
    rgb[~finite] = NOT_APPLICABLE
    return rgb


def violation_rgb(strength, violated) -> np.ndarray:
    """Violating pairs coloured by strength, all others white, NaN grey."""
    s = np.asarray(strength, dtype=float)
    violated = np.asarray(violated, dtype=bool)
    shown = np.where(violated, s, np.nan)
    rgb = to_rgb(shown)
    rgb[~violated] = NO_VIOLATION
    rgb[~np.isfinite(s) & ~violated] = NOT_APPLICABLE
    return rgb


def ppm_bytes(rgb: np.ndarray) -> bytes:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()


def write_ppm(path, rgb: np.ndarray) -> None:
    Path(path).write_bytes(ppm_bytes(rgb))


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError(f"{path}: not a binary PPM")
    w, h = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
