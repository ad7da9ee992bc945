"""Two-photon correlation matrices, similarity and the classical-limit test.

A correlation matrix is stored as a full symmetric N x N array whose (q, r)
entry is the probability of finding one photon at q and one at r as an
unordered pair, so a simulated matrix satisfies sum_{q <= r} gamma = 1.
Summed over the full matrix it gives 2 - trace. Unmeasured entries are NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .evolution import EvolutionOperator, evolve_two_photon

CLASSICAL_FACTOR = 2.0 / 3.0


@dataclass(frozen=True)
class CorrelationMatrix:
    gamma: np.ndarray
    input_pair: tuple[int, int] | None = None
    indistinguishable: bool | None = None
    source: str = "simulated"

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValidationError(f"gamma must be square, got shape {g.shape}")
        if np.any(g[np.isfinite(g)] < 0):
            raise ValidationError("gamma entries must be >= 0")
        if not np.array_equal(g, g.T, equal_nan=True):
            raise ValidationError("gamma must be symmetric")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        if self.input_pair is not None:
            object.__setattr__(self, "input_pair", tuple(int(s) for s in self.input_pair))

    @property
    def n_sites(self) -> int:
        return self.gamma.shape[0]

    @property
    def measured_mask(self) -> np.ndarray:
        return np.isfinite(self.gamma)

    def pair_total(self) -> float:
        """Sum over unordered pairs q <= r, skipping absent entries."""
        return float(np.nansum(np.triu(self.gamma)))


@dataclass(frozen=True)
class ViolationMap:
    """Per-pair V values; ``sigma_v``/``n_sigma`` are None for noiseless input.

    ``v`` is NaN on the diagonal (not applicable) and where any contributing
    entry is absent. ``indeterminate`` marks entries whose uncertainty could
    not be propagated.
    """

    v: np.ndarray
    sigma_v: np.ndarray | None = None
    n_sigma: np.ndarray | None = None
    indeterminate: np.ndarray | None = None

    @property
    def violated(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return self.v < 0

    def min_v(self) -> float:
        return float(np.nanmin(self.v))


def _check_input(u: EvolutionOperator, input_pair) -> tuple[int, int]:
    if len(input_pair) != 2:
        raise ValidationError(f"input must be a site pair, got {input_pair!r}")
    a, b = (int(s) for s in input_pair)
    n = u.dim
    for s in (a, b):
        if not (0 <= s < n):
            raise ValidationError(f"input site {s} outside 0..{n - 1}")
    u.check_unitary()
    # canonical order makes exchange symmetry exact, not just to rounding
    return min(a, b), max(a, b)


def quantum_correlation(u: EvolutionOperator, input_pair) -> CorrelationMatrix:
    """Correlations for two indistinguishable photons injected at ``input_pair``.

    gamma[q, r] = |U[q,a] U[r,b] + U[q,b] U[r,a]|^2 / ((1 + d_qr)(1 + d_ab)).
    The input factor only matters for both photons in one waveguide, where
    the input state (a^dag)^2 |0> needs a 1/sqrt(2) to be normalized.
    """
    a, b = _check_input(u, input_pair)
    ua = u.matrix[:, a]
    ub = u.matrix[:, b]
    amp = np.outer(ua, ub)
    amp = amp + amp.T
    gamma = np.abs(amp) ** 2
    gamma[np.diag_indices_from(gamma)] *= 0.5
    if a == b:
        gamma *= 0.5
    return CorrelationMatrix(gamma, (a, b), True, "simulated")


def distinguishable_correlation(u: EvolutionOperator, input_pair) -> CorrelationMatrix:
    """Correlations for two photons that do not interfere.

    gamma[q, r] = (|U[q,a] U[r,b]|^2 + |U[q,b] U[r,a]|^2) / (1 + d_qr).
    """
    a, b = _check_input(u, input_pair)
    joint = np.outer(np.abs(u.matrix[:, a]) ** 2, np.abs(u.matrix[:, b]) ** 2)
    gamma = joint + joint.T
    gamma[np.diag_indices_from(gamma)] *= 0.5
    return CorrelationMatrix(gamma, (a, b), False, "simulated")


def correlation_from_amplitudes(amplitudes: np.ndarray, n_sites: int) -> np.ndarray:
    """Unordered-pair probabilities from a two-photon Fock amplitude vector."""
    amplitudes = np.asarray(amplitudes)
    dim = n_sites * (n_sites + 1) // 2
    if amplitudes.shape != (dim,):
        raise ValidationError(f"expected {dim} amplitudes, got shape {amplitudes.shape}")
    iu = np.triu_indices(n_sites)
    gamma = np.zeros((n_sites, n_sites))
    # triu_indices walks rows left to right, which is the Fock order
    gamma[iu] = np.abs(amplitudes) ** 2
    gamma = gamma + np.triu(gamma, 1).T
    return gamma


def fock_correlation(h2, z: float, input_pair) -> CorrelationMatrix:
    """Correlation matrix by direct evolution on the two-photon Fock space."""
    amps = evolve_two_photon(h2, z, input_pair)
    a, b = sorted(int(s) for s in input_pair)
    return CorrelationMatrix(
        correlation_from_amplitudes(amps, h2.n_sites), (a, b), True, "simulated"
    )


def similarity(a, b) -> float:
    """Overlap S = (sum sqrt(a*b))^2 / (sum a * sum b) between two matrices.

    Accepts CorrelationMatrix objects or arrays. Entries absent (NaN) in
    either argument are dropped from both. S is 1 iff a and b are
    proportional and is unchanged by positive rescaling of either one.
    """
    ga = np.asarray(getattr(a, "gamma", a), dtype=float)
    gb = np.asarray(getattr(b, "gamma", b), dtype=float)
    if ga.shape != gb.shape:
        raise ValidationError(f"shape mismatch: {ga.shape} vs {gb.shape}")
    keep = np.isfinite(ga) & np.isfinite(gb)
    xa, xb = ga[keep], gb[keep]
    if np.any(xa < 0) or np.any(xb < 0):
        raise ValidationError("similarity needs nonnegative entries")
    sa, sb = xa.sum(), xb.sum()
    if sa <= 0 or sb <= 0:
        raise ValidationError("similarity is undefined for an all-zero matrix")
    s = np.sum(np.sqrt(xa * xb)) ** 2 / (sa * sb)
    return float(min(s, 1.0))


def classical_limit(gamma: np.ndarray) -> np.ndarray:
    """V[q, r] = gamma[q, r] - (2/3) sqrt(gamma[q, q] gamma[r, r]); NaN on the diagonal."""
    d = np.diag(gamma)
    v = gamma - CLASSICAL_FACTOR * np.sqrt(np.outer(d, d))
    v[np.diag_indices_from(v)] = np.nan
    return v


def violation_map(gamma) -> ViolationMap:
    """Noiseless classical-limit map; V < 0 certifies nonclassical correlations."""
    g = gamma.gamma if isinstance(gamma, CorrelationMatrix) else CorrelationMatrix(gamma).gamma
    v = classical_limit(g)
    v.setflags(write=False)
    return ViolationMap(v)
