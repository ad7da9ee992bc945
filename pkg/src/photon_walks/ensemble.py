"""Disorder-averaged walks on randomly perturbed arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlations import CorrelationMatrix, distinguishable_correlation, quantum_correlation
from .errors import ValidationError
from .evolution import propagator, single_photon_distribution
from .lattice import LatticeSpec, build_single_hamiltonian, sample_disordered_spec


def participation_ratio(p) -> float:
    """Effective number of occupied sites, 1 / sum p^2 for a normalized p."""
    p = np.asarray(p, dtype=float)
    return float(p.sum() ** 2 / np.sum(p**2))


@dataclass(frozen=True)
class EnsembleResult:
    gamma: CorrelationMatrix | None
    single_distribution: np.ndarray
    participation_ratio: float
    mean_participation_ratio: float
    trials: int


def disorder_seeds(seed: int, trials: int) -> list:
    """Independent per-trial seeds derived from one master seed."""
    return np.random.SeedSequence(seed).spawn(trials)


def ensemble_average(
    template: LatticeSpec,
    sigma_beta: float,
    sigma_coupling: float,
    trials: int,
    seed: int,
    single_input: int,
    input_pair=None,
    distinguishable: bool = False,
) -> EnsembleResult:
    """Average output statistics over ``trials`` disorder realizations.

    Returns the mean single-photon distribution for ``single_input``, the
    participation ratio of that mean, the mean of the per-trial
    participation ratios, and (if ``input_pair`` is given) the mean
    correlation matrix. Without disorder a single evaluation is returned.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    correlate = distinguishable_correlation if distinguishable else quantum_correlation

    def one(spec):
        u = propagator(build_single_hamiltonian(spec), spec.length_mm)
        p = single_photon_distribution(u, single_input)
        g = correlate(u, input_pair).gamma if input_pair is not None else None
        return p, g

    if sigma_beta == 0 and sigma_coupling == 0:
        p, g = one(template)
        pr = participation_ratio(p)
        gamma = None
        if g is not None:
            gamma = CorrelationMatrix(g, input_pair, not distinguishable, "ensemble")
        return EnsembleResult(gamma, p, pr, pr, trials)

    p_sum = np.zeros(template.n_sites)
    g_sum = np.zeros((template.n_sites,) * 2) if input_pair is not None else None
    pr_sum = 0.0
    for child in disorder_seeds(seed, trials):
        spec = sample_disordered_spec(template, sigma_beta, sigma_coupling, child)
        p, g = one(spec)
        p_sum += p
        pr_sum += participation_ratio(p)
        if g is not None:
            g_sum += g
    p_mean = p_sum / trials
    gamma = None
    if g_sum is not None:
        g_mean = g_sum / trials
        g_mean = 0.5 * (g_mean + g_mean.T)
        gamma = CorrelationMatrix(g_mean, input_pair, not distinguishable, "ensemble")
    return EnsembleResult(gamma, p_mean, participation_ratio(p_mean), pr_sum / trials, trials)
