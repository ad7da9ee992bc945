"""Unitary propagators exp(-i H z) and state evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .lattice import TwoPhotonHamiltonian, fock_index

SYMMETRY_TOL = 1e-12
UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class EvolutionOperator:
    """Propagator U = exp(-i H z) for a real symmetric H.

    ``eigenvalues`` is kept for diagnostics; it is None for the z = 0
    short-circuit.
    """

    matrix: np.ndarray
    z_mm: float
    eigenvalues: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def unitarity_error(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))

    def check_unitary(self, tol: float = UNITARITY_TOL) -> None:
        err = self.unitarity_error()
        if not err < tol:
            raise ValidationError(f"propagator is not unitary (max|U^dag U - I| = {err:.3g})")


def _as_matrix(h) -> np.ndarray:
    m = getattr(h, "matrix", h)
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"Hamiltonian must be square, got shape {m.shape}")
    return m


def propagator(h, z: float) -> EvolutionOperator:
    """Return exp(-i H z) via the spectral decomposition of the real symmetric H.

    Parameters
    ----------
    h : ndarray or Hamiltonian object with a ``matrix`` attribute
        Real symmetric matrix (mm^-1).
    z : float
        Propagation length (mm), z >= 0.
    """
    m = _as_matrix(h)
    z = float(z)
    if not np.isfinite(z) or z < 0:
        raise ValidationError(f"z must be finite and >= 0, got {z}")
    if not np.all(np.isfinite(m)):
        raise NumericalError("Hamiltonian has non-finite entries")
    if np.max(np.abs(m - m.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.max(np.abs(m))):
        raise ValidationError("Hamiltonian is not symmetric")
    if z == 0.0:
        u = np.eye(m.shape[0], dtype=complex)
        u.setflags(write=False)
        return EvolutionOperator(u, 0.0)
    try:
        lam, vec = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    u = (vec * np.exp(-1j * lam * z)) @ vec.T
    # H real symmetric => U = U^T; remove rounding asymmetry
    u = 0.5 * (u + u.T)
    if not np.all(np.isfinite(u)):
        raise NumericalError("propagator has non-finite entries")
    u.setflags(write=False)
    lam.setflags(write=False)
    return EvolutionOperator(u, z, lam)


def propagators_over_z(h, zs) -> np.ndarray:
    """Stack of exp(-i H z) for every z in ``zs``, shape (len(zs), n, n).

    Shares one eigendecomposition; used for propagation images and grid fits.
    """
    m = _as_matrix(h)
    lam, vec = np.linalg.eigh(m)
    phases = np.exp(-1j * np.multiply.outer(np.asarray(zs, dtype=float), lam))
    return np.einsum("ik,zk,jk->zij", vec, phases, vec)


def single_photon_distribution(u: EvolutionOperator, input_site: int) -> np.ndarray:
    """Output probabilities |U[q, input_site]|^2 for one photon."""
    n = u.dim
    if not (0 <= input_site < n):
        raise ValidationError(f"input site {input_site} outside 0..{n - 1}")
    return np.abs(u.matrix[:, input_site]) ** 2


def evolve_two_photon(h2: TwoPhotonHamiltonian, z: float, input_pair) -> np.ndarray:
    """Amplitudes U2 |j,k> over the two-photon Fock basis.

    ``input_pair`` is a site pair (j, k) in either order, or a linear Fock
    index.
    """
    n = h2.n_sites
    if np.ndim(input_pair) == 0:
        idx = int(input_pair)
        if not (0 <= idx < h2.dim):
            raise ValidationError(f"Fock index {idx} outside 0..{h2.dim - 1}")
    else:
        j, k = sorted(int(s) for s in input_pair)
        idx = fock_index(j, k, n)
    if h2.dim != n * (n + 1) // 2:
        raise ValidationError("Hamiltonian dimension does not match its basis")
    u2 = propagator(h2, z)
    return np.array(u2.matrix[:, idx])
