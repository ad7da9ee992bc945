"""Measured coincidence counts: corrections, Poisson errors and significance.

Counts matrices use -1 for output pairs that were not measured (the fibre
arrays reach only part of the output pairs). Such pairs stay absent (NaN)
through correction and normalization and are never treated as zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .correlations import CorrelationMatrix, ViolationMap, classical_limit
from .errors import ValidationError

ABSENT = -1
# diagonal events are seen only when a balanced fibre splitter sends the two
# photons to different detectors
SPLITTER_FACTOR = 2.0


def symmetrize_raw(raw) -> np.ndarray:
    """Fold a raw N x N count table into a symmetric one.

    (q, r) and (r, q) entries are summed; a pair is absent only if both
    entries are -1.
    """
    raw = np.asarray(raw)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise ValidationError(f"counts must be square, got shape {raw.shape}")
    if not np.all(raw == np.round(raw)):
        raise ValidationError("counts must be integers")
    raw = raw.astype(np.int64)
    if np.any(raw < ABSENT):
        raise ValidationError("counts must be >= 0 (or -1 for absent)")
    absent = raw == ABSENT
    present = np.where(absent, 0, raw)
    both_absent = absent & absent.T
    off = ~np.eye(raw.shape[0], dtype=bool)
    sym = np.where(off, present + present.T, present)
    sym[both_absent] = ABSENT
    return sym


@dataclass(frozen=True)
class CoincidenceCounts:
    """Symmetric coincidence counts with detector metadata.

    Build from a raw (possibly triangular) table with :meth:`from_raw`.
    """

    counts: np.ndarray
    singles: np.ndarray | None = None
    efficiency: np.ndarray | None = None
    integration_s: float = 3600.0

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValidationError(f"counts must be square, got shape {c.shape}")
        if not np.array_equal(c, c.T):
            raise ValidationError("counts must be symmetric; use CoincidenceCounts.from_raw")
        if np.any(c < ABSENT):
            raise ValidationError("counts must be >= 0 (or -1 for absent)")
        n = c.shape[0]
        eff = np.ones(n) if self.efficiency is None else np.array(self.efficiency, dtype=float)
        if eff.shape != (n,):
            raise ValidationError(f"efficiency must have {n} entries")
        if np.any(~(eff > 0)) or np.any(eff > 1):
            raise ValidationError("efficiencies must lie in (0, 1]")
        singles = None
        if self.singles is not None:
            singles = np.array(self.singles, dtype=np.int64)
            if singles.shape != (n,) or np.any(singles < 0):
                raise ValidationError(f"singles must be {n} nonnegative integers")
            singles.setflags(write=False)
        if not self.integration_s > 0:
            raise ValidationError("integration time must be positive")
        c.setflags(write=False)
        eff.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "efficiency", eff)
        object.__setattr__(self, "singles", singles)
        object.__setattr__(self, "integration_s", float(self.integration_s))

    @classmethod
    def from_raw(cls, raw, singles=None, efficiency=None, integration_s=3600.0):
        return cls(symmetrize_raw(raw), singles, efficiency, integration_s)

    @property
    def n_sites(self) -> int:
        return self.counts.shape[0]

    @property
    def present(self) -> np.ndarray:
        return self.counts != ABSENT

    def upper_triangle(self) -> np.ndarray:
        """Raw table with each pair stored once (upper triangle), -1 kept for absent."""
        c = np.triu(self.counts)
        c[np.tril(~self.present, -1)] = ABSENT
        return c


def correction_weights(raw: CoincidenceCounts, singles_correction: bool = False) -> np.ndarray:
    """Factor multiplying each raw count to give a corrected count."""
    eff = raw.efficiency
    w = 1.0 / np.outer(eff, eff)
    w[np.diag_indices_from(w)] *= SPLITTER_FACTOR
    if singles_correction:
        if raw.singles is None:
            raise ValidationError("singles correction requested but no singles given")
        s = raw.singles.astype(float)
        if np.any(s <= 0):
            raise ValidationError("singles correction needs positive singles counts")
        rel = s / s.mean()
        w = w / np.outer(rel, rel)
    return w


def correct_counts(raw: CoincidenceCounts, singles_correction: bool = False) -> np.ndarray:
    """Divide by detector efficiencies and undo the splitter loss on the diagonal.

    With ``singles_correction`` the counts are also divided by the singles
    rates of both outputs, each relative to the array mean. Absent pairs
    come back as NaN.
    """
    w = correction_weights(raw, singles_correction)
    out = raw.counts * w
    out[~raw.present] = np.nan
    return out


@dataclass(frozen=True)
class GammaEstimate:
    """Normalized correlations from counts, with first-order Poisson errors.

    ``low_statistics`` marks pairs with zero counts, whose variance was
    computed as if one count had been seen. ``degenerate`` is set when a
    single pair carries all counts, so normalization pins its value.
    ``counts`` and ``weights`` keep the raw inputs so that derived
    quantities can include the covariance from the shared normalization.
    """

    gamma: CorrelationMatrix
    sigma: np.ndarray
    low_statistics: np.ndarray
    degenerate: bool = False
    total: float = 0.0
    counts: np.ndarray | None = field(default=None, repr=False)
    weights: np.ndarray | None = field(default=None, repr=False)


def estimate_gamma(raw: CoincidenceCounts, singles_correction: bool = False) -> GammaEstimate:
    """Normalize corrected counts so sum_{q <= r} gamma = 1 and propagate sqrt(n) errors.

    With weights w and total T = sum_{q<=r} w n, each gamma_i = w_i n_i / T
    has variance

        (w_i^2 n_i / T^2) (1 - 2 gamma_i) + gamma_i^2 sum_j w_j^2 n_j / T^2

    to first order, the second term coming from the shared normalization.
    """
    w = correction_weights(raw, singles_correction)
    present = raw.present
    upper = np.triu(present)
    n = np.where(present, raw.counts, 0).astype(float)
    corrected = n * w
    total = float(np.sum(corrected[upper]))
    if not total > 0:
        raise ValidationError("no counts in any measured pair")
    gamma = corrected / total
    gamma[~present] = np.nan

    s2 = float(np.sum((w**2 * n)[upper]))
    g0 = np.where(present, gamma, 0.0)
    # zero-count guard applies to an entry's own term only
    var = (w**2 * np.maximum(n, 1.0) / total**2) * (1.0 - 2.0 * g0) + g0**2 * s2 / total**2
    sigma = np.sqrt(np.clip(var, 0.0, None))
    sigma[~present] = np.nan

    low = present & (n == 0)
    degenerate = int(np.count_nonzero(n[upper] > 0)) == 1
    sigma.setflags(write=False)
    low.setflags(write=False)
    n.setflags(write=False)
    w.setflags(write=False)
    return GammaEstimate(
        CorrelationMatrix(gamma, source="measured"), sigma, low, degenerate, total, n, w
    )


def _sigma_v_independent(g, sig, dq, dr):
    sq, sr = np.meshgrid(np.diag(sig), np.diag(sig), indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        var = sig**2 + (dr / dq) * sq**2 / 9.0 + (dq / dr) * sr**2 / 9.0
    return np.sqrt(var)


def _sigma_v_from_counts(est: GammaEstimate, v, dq, dr):
    # V as a function of every raw count n_m, linearized: with partials g_i
    # of V w.r.t. its three gamma entries and sum_i g_i gamma_i = V,
    #   dV/dn_m = w_m (g_m [m in pair] - V) / T
    n, w, total = est.counts, est.weights, est.total
    present = np.isfinite(est.gamma.gamma)
    s2 = float(np.sum(np.triu(w**2 * np.where(present, n, 0.0))))
    own = w**2 * np.maximum(n, 1.0)
    own_d = np.diag(own)
    n_d = np.diag(w**2 * n)
    oq, orr = np.meshgrid(own_d, own_d, indexing="ij")
    nq, nr = np.meshgrid(n_d, n_d, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        g_q = -np.sqrt(dr / dq) / 3.0
        g_r = -np.sqrt(dq / dr) / 3.0
        var = (
            s2 * v**2
            + own * (1.0 - v) ** 2 - w**2 * n * v**2
            + oq * (g_q - v) ** 2 - nq * v**2
            + orr * (g_r - v) ** 2 - nr * v**2
        ) / total**2
    return np.sqrt(np.clip(var, 0.0, None))


def violation_significance(est: GammaEstimate) -> ViolationMap:
    """Classical-limit values with propagated errors and violation significance.

    sigma_V follows from first-order propagation with partials 1,
    -(1/3) sqrt(g_rr/g_qq) and -(1/3) sqrt(g_qq/g_rr). When the estimate
    carries its raw counts the propagation runs from the counts, so the
    covariance induced by normalization is included; otherwise the entry
    errors are combined as independent:

        sigma_V^2 = sigma_qr^2 + (1/9)(g_rr/g_qq) sigma_qq^2 + (1/9)(g_qq/g_rr) sigma_rr^2

    n_sigma = -V / sigma_V where V < 0, otherwise 0. Pairs whose diagonal
    partner is zero have an unbounded derivative and are marked
    indeterminate (sigma_V NaN, n_sigma 0 since V >= 0 there).
    """
    g = est.gamma.gamma
    v = classical_limit(g)
    d = np.diag(g)
    off = ~np.eye(g.shape[0], dtype=bool)
    dq, dr = np.meshgrid(d, d, indexing="ij")
    if est.counts is not None and est.weights is not None:
        sigma_v = _sigma_v_from_counts(est, v, dq, dr)
    else:
        sigma_v = _sigma_v_independent(g, est.sigma, dq, dr)
    defined = off & np.isfinite(v)
    indeterminate = defined & ((dq == 0) | (dr == 0))
    sigma_v[~defined | indeterminate] = np.nan

    n_sigma = np.zeros_like(v)
    with np.errstate(invalid="ignore"):
        neg = defined & (v < 0)
    ok = neg & (sigma_v > 0)
    n_sigma[ok] = -v[ok] / sigma_v[ok]
    # V < 0 with zero spread has no finite significance
    flat = neg & ~(sigma_v > 0)
    n_sigma[flat] = np.nan
    indeterminate = indeterminate | flat
    n_sigma[~defined] = np.nan
    for arr in (v, sigma_v, n_sigma, indeterminate):
        arr.setflags(write=False)
    return ViolationMap(v, sigma_v, n_sigma, indeterminate)


def synthetic_counts(
    gamma,
    total_events: float,
    seed,
    efficiency=None,
    present=None,
    integration_s: float = 3600.0,
) -> CoincidenceCounts:
    """Draw Poisson coincidence counts whose corrected expectation follows ``gamma``.

    The expected raw count for pair (q, r) is total_events * gamma[q, r]
    * eff[q] * eff[r], halved on the diagonal for the splitter. ``present``
    optionally masks the pairs that are measured.
    """
    g = np.asarray(getattr(gamma, "gamma", gamma), dtype=float)
    n = g.shape[0]
    eff = np.ones(n) if efficiency is None else np.asarray(efficiency, dtype=float)
    mean = total_events * g * np.outer(eff, eff)
    mean[np.diag_indices(n)] /= SPLITTER_FACTOR
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n)
    draws = rng.poisson(mean[iu])
    counts = np.zeros((n, n), dtype=np.int64)
    counts[iu] = draws
    counts = counts + np.triu(counts, 1).T
    if present is not None:
        counts[~np.asarray(present, dtype=bool)] = ABSENT
    return CoincidenceCounts(counts, efficiency=eff, integration_s=integration_s)
