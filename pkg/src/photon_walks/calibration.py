"""Least-squares fit of the coupling constant and effective length.

The model is a uniform-length array whose coupling profile is the
template's, rescaled so its mean equals C. The fit is a deterministic grid
search over (C, z) followed by shrinking grids around the best point.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError
from .evolution import propagators_over_z
from .lattice import LatticeSpec, build_single_hamiltonian


@dataclass(frozen=True)
class CalibrationResult:
    """Best (C, z) with its sum of squared errors.

    For a template with uniform beta the pattern depends on C and z only
    through C*z, so ``degenerate`` is set and only ``cz_product`` is
    meaningful unless one range was pinned.
    """

    c_fit: float
    z_eff_fit: float
    residual: float
    cz_product: float
    degenerate: bool
    boundary_warning: bool
    grid_trace: np.ndarray = field(repr=False)

    def spec(self, template: LatticeSpec) -> LatticeSpec:
        return replace(
            template, coupling=coupling_profile(template) * self.c_fit, length_mm=self.z_eff_fit
        )


def coupling_profile(template: LatticeSpec) -> np.ndarray:
    """Template couplings scaled to unit mean (all ones if the template has none)."""
    c = template.coupling
    if c.size == 0 or not np.any(c > 0):
        return np.ones_like(c)
    return c / c.mean()


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.array([lo]) if lo == hi else np.linspace(lo, hi, n)


def _check_range(name, rng) -> tuple[float, float]:
    lo, hi = (float(x) for x in rng)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo <= 0 or hi < lo:
        raise ValidationError(f"{name} must be a positive interval, got ({lo}, {hi})")
    return lo, hi


def sse_grid(measured, template, input_site, cs, zs) -> np.ndarray:
    """SSE of simulated vs measured output pattern on the (C, z) grid, shape (len(cs), len(zs))."""
    profile = coupling_profile(template)
    out = np.empty((len(cs), len(zs)))
    for i, c in enumerate(cs):
        spec = replace(template, coupling=profile * c)
        h = build_single_hamiltonian(spec)
        cols = propagators_over_z(h, zs)[:, :, input_site]
        p = np.abs(cols) ** 2
        out[i] = np.sum((p - measured) ** 2, axis=1)
    return out


def fit_coupling(
    measured,
    template: LatticeSpec,
    input_site: int,
    c_range=(1.0, 10.0),
    z_range=(0.1, 2.0),
    grid: int = 64,
    rounds: int = 6,
    shrink: float = 4.0,
) -> CalibrationResult:
    """Fit C (mm^-1) and z (mm) to a measured single-photon output pattern.

    ``measured`` is normalized to unit sum on ingest. A range with equal
    ends pins that parameter. Ties resolve to the smallest (C, z).
    """
    p = np.asarray(measured, dtype=float)
    if p.shape != (template.n_sites,):
        raise ValidationError(f"measured pattern needs {template.n_sites} entries, got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValidationError("measured pattern contains NaN or inf")
    if np.any(p < 0) or not p.sum() > 0:
        raise ValidationError("measured pattern must be nonnegative with positive sum")
    if not (0 <= input_site < template.n_sites):
        raise ValidationError(f"input site {input_site} outside 0..{template.n_sites - 1}")
    if grid < 2 or rounds < 0 or shrink <= 1:
        raise ValidationError("need grid >= 2, rounds >= 0 and shrink > 1")
    p = p / p.sum()
    c_lo, c_hi = _check_range("c_range", c_range)
    z_lo, z_hi = _check_range("z_range", z_range)

    trace = []
    best = (np.inf, c_lo, z_lo)
    c_win, z_win = (c_lo, c_hi), (z_lo, z_hi)
    c_step = z_step = 0.0
    for _ in range(rounds + 1):
        cs = _axis(*c_win, grid)
        zs = _axis(*z_win, grid)
        sse = sse_grid(p, template, input_site, cs, zs)
        cc, zz = np.meshgrid(cs, zs, indexing="ij")
        trace.append(np.column_stack([cc.ravel(), zz.ravel(), sse.ravel()]))
        # row-major argmin returns the smallest (C, z) among ties
        i, j = np.unravel_index(np.argmin(sse), sse.shape)
        if sse[i, j] < best[0]:
            best = (float(sse[i, j]), float(cs[i]), float(zs[j]))
        _, c_best, z_best = best
        c_step = (c_win[1] - c_win[0]) / max(len(cs) - 1, 1)
        z_step = (z_win[1] - z_win[0]) / max(len(zs) - 1, 1)
        c_half = (c_win[1] - c_win[0]) / (2 * shrink)
        z_half = (z_win[1] - z_win[0]) / (2 * shrink)
        c_win = (max(c_lo, c_best - c_half), min(c_hi, c_best + c_half))
        z_win = (max(z_lo, z_best - z_half), min(z_hi, z_best + z_half))

    residual, c_fit, z_fit = best
    on_edge = False
    if c_hi > c_lo:
        on_edge |= c_fit - c_lo <= c_step or c_hi - c_fit <= c_step
    if z_hi > z_lo:
        on_edge |= z_fit - z_lo <= z_step or z_hi - z_fit <= z_step
    degenerate = bool(np.all(template.beta == template.beta[0])) and c_hi > c_lo and z_hi > z_lo
    return CalibrationResult(
        c_fit=c_fit,
        z_eff_fit=z_fit,
        residual=residual,
        cz_product=c_fit * z_fit,
        degenerate=degenerate,
        boundary_warning=bool(on_edge),
        grid_trace=np.vstack(trace),
    )
