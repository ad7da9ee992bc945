"""Continuous-time quantum walks of one and two photons in coupled waveguide arrays."""

from .errors import NumericalError, ResourceError, ValidationError
from .lattice import (
    LatticeSpec,
    SingleHamiltonian,
    TwoPhotonHamiltonian,
    build_single_hamiltonian,
    build_two_photon_hamiltonian,
    fock_index,
    fock_pair,
    hilbert_dim,
    sample_disordered_spec,
)
from .evolution import (
    EvolutionOperator,
    evolve_two_photon,
    propagator,
    single_photon_distribution,
)
from .correlations import (
    CorrelationMatrix,
    ViolationMap,
    distinguishable_correlation,
    fock_correlation,
    quantum_correlation,
    similarity,
    violation_map,
)
from .measurement import (
    CoincidenceCounts,
    GammaEstimate,
    correct_counts,
    estimate_gamma,
    synthetic_counts,
    violation_significance,
)
from .calibration import CalibrationResult, fit_coupling

__version__ = "0.1.0"
