"""Device description, Hamiltonians and two-photon Fock indexing.

Sites are indexed 0..N-1 internally. The Hamiltonians use the sign
convention of the coupled-oscillator graph: site potential ``-beta[j]`` and
hopping amplitude ``-coupling[j]`` between sites j and j+1. All quantities
are in mm^-1 and lengths in mm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ResourceError, ValidationError

DEFAULT_MAX_DIM = 1_000_000
_INDEX_LIMIT = 2**63 - 1


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LatticeSpec:
    """A linear array of evanescently coupled waveguides.

    Parameters
    ----------
    n_sites : int
        Number of waveguides N.
    beta : array_like
        N propagation constants (mm^-1).
    coupling : array_like
        N-1 nearest-neighbour coupling constants (mm^-1), all >= 0.
    length_mm : float
        Propagation length z (mm).
    label_offset : int
        Added to internal indices for display only (``-10`` gives labels
        -10..10 for a 21-site array).
    """

    n_sites: int
    beta: np.ndarray
    coupling: np.ndarray
    length_mm: float = 0.0
    label_offset: int = 0

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or int(self.n_sites) != self.n_sites:
            raise ValidationError(f"n_sites must be an integer, got {self.n_sites!r}")
        n = int(self.n_sites)
        if n < 1:
            raise ValidationError(f"n_sites must be >= 1, got {n}")
        beta = _frozen(self.beta)
        coupling = _frozen(self.coupling)
        if beta.shape != (n,):
            raise ValidationError(f"beta must have {n} entries, got shape {beta.shape}")
        if coupling.shape != (n - 1,):
            raise ValidationError(
                f"coupling must have {n - 1} entries, got shape {coupling.shape}"
            )
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(coupling))):
            raise ValidationError("beta and coupling must be finite")
        if np.any(coupling < 0):
            raise ValidationError("coupling constants must be >= 0")
        length = float(self.length_mm)
        if not math.isfinite(length) or length < 0:
            raise ValidationError(f"length_mm must be finite and >= 0, got {length}")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "length_mm", length)
        object.__setattr__(self, "label_offset", int(self.label_offset))

    @classmethod
    def uniform(cls, n_sites, coupling, beta=0.0, length_mm=0.0, label_offset=0):
        """Array with identical propagation and coupling constants."""
        n = int(n_sites)
        if n < 1:
            raise ValidationError(f"n_sites must be >= 1, got {n}")
        return cls(
            n_sites=n,
            beta=np.full(n, float(beta)),
            coupling=np.full(n - 1, float(coupling)),
            length_mm=length_mm,
            label_offset=label_offset,
        )

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeSpec":
        """Build from the JSON layout; scalar beta/coupling broadcast."""
        try:
            n = data["n_sites"]
        except KeyError:
            raise ValidationError("spec is missing 'n_sites'") from None
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValidationError(f"n_sites must be an integer, got {n!r}")
        beta = data.get("beta", 0.0)
        coupling = data.get("coupling", 0.0)
        if np.isscalar(beta):
            beta = [float(beta)] * n
        if np.isscalar(coupling):
            coupling = [float(coupling)] * max(n - 1, 0)
        try:
            return cls(
                n_sites=n,
                beta=beta,
                coupling=coupling,
                length_mm=data.get("length_mm", 0.0),
                label_offset=data.get("label_offset", 0),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed spec: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "beta": self.beta.tolist(),
            "coupling": self.coupling.tolist(),
            "length_mm": self.length_mm,
            "label_offset": self.label_offset,
        }

    @classmethod
    def load(cls, path) -> "LatticeSpec":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ValidationError(f"{path}: expected a JSON object")
        return cls.from_dict(data)

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def with_length(self, length_mm: float) -> "LatticeSpec":
        return replace(self, length_mm=length_mm)

    def label(self, site: int) -> int:
        return site + self.label_offset

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.beta == self.beta[0])) and bool(
            self.coupling.size == 0 or np.all(self.coupling == self.coupling[0])
        )


@dataclass(frozen=True)
class SingleHamiltonian:
    matrix: np.ndarray


@dataclass(frozen=True)
class TwoPhotonHamiltonian:
    """H on the two-photon Fock space; ``basis[i]`` is the site pair (j, k), j <= k."""

    matrix: np.ndarray
    basis: tuple = field(repr=False)
    n_sites: int = 0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_single_hamiltonian(spec: LatticeSpec) -> SingleHamiltonian:
    """Tridiagonal single-photon Hamiltonian with ``-beta`` and ``-coupling`` entries."""
    n = spec.n_sites
    h = np.zeros((n, n))
    h[np.arange(n), np.arange(n)] = -spec.beta
    if n > 1:
        idx = np.arange(n - 1)
        h[idx, idx + 1] = -spec.coupling
        h[idx + 1, idx] = -spec.coupling
    h.setflags(write=False)
    return SingleHamiltonian(h)


def two_photon_dim(n_sites: int) -> int:
    return n_sites * (n_sites + 1) // 2


def fock_index(j: int, k: int, n_sites: int) -> int:
    """Linear index of the pair (j, k), j <= k, in row-major order over j <= k.

    >>> fock_index(0, 0, 2), fock_index(0, 1, 2), fock_index(1, 1, 2)
    (0, 1, 2)
    """
    if not (0 <= j <= k < n_sites):
        raise ValidationError(f"need 0 <= j <= k < {n_sites}, got ({j}, {k})")
    # rows 0..j-1 hold (n - r) entries each
    return j * n_sites - j * (j - 1) // 2 + (k - j)


def fock_pair(index: int, n_sites: int) -> tuple[int, int]:
    """Inverse of :func:`fock_index`."""
    dim = two_photon_dim(n_sites)
    if not (0 <= index < dim):
        raise ValidationError(f"index must be in [0, {dim}), got {index}")
    j = 0
    start = 0
    while start + (n_sites - j) <= index:
        start += n_sites - j
        j += 1
    return j, j + (index - start)


def two_photon_basis(n_sites: int) -> tuple[tuple[int, int], ...]:
    return tuple((j, k) for j in range(n_sites) for k in range(j, n_sites))


def build_two_photon_hamiltonian(
    spec: LatticeSpec, max_dim: int = DEFAULT_MAX_DIM
) -> TwoPhotonHamiltonian:
    """Two-photon Hamiltonian in the normalized Fock basis.

    A hop between two singly occupied configurations carries ``-C``; a hop
    into or out of a doubly occupied waveguide carries ``-sqrt(2) C`` from
    the bosonic sqrt(n) factors.
    """
    n = spec.n_sites
    dim = two_photon_dim(n)
    if dim > max_dim:
        raise ResourceError(f"two-photon dimension {dim} exceeds cap {max_dim}")
    basis = two_photon_basis(n)
    h = np.zeros((dim, dim))
    for a, (j, k) in enumerate(basis):
        h[a, a] = -(spec.beta[j] + spec.beta[k])
        # every edge of the pair lattice is reached exactly once by moving
        # one photon a step to the right
        movers = (j,) if j == k else (j, k)
        for src in movers:
            dst = src + 1
            if dst >= n:
                continue
            stay = k if src == j else j
            p, q = sorted((stay, dst))
            amp = -spec.coupling[src]
            if j == k or p == q:
                amp *= math.sqrt(2.0)
            b = fock_index(p, q, n)
            h[a, b] = h[b, a] = amp
    h.setflags(write=False)
    return TwoPhotonHamiltonian(matrix=h, basis=basis, n_sites=n)


def hilbert_dim(n_photons: int, n_sites: int, distinguishable: bool = False) -> int:
    """Dimension of the n-photon state space on N waveguides.

    N**n for distinguishable photons, C(N + n - 1, n) for indistinguishable.
    """
    if n_photons < 1 or n_sites < 1:
        raise ValidationError("n_photons and n_sites must be >= 1")
    if distinguishable:
        dim = n_sites**n_photons
    else:
        dim = math.comb(n_sites + n_photons - 1, n_photons)
    if dim > _INDEX_LIMIT:
        raise ResourceError(f"dimension {dim} does not fit a 64-bit index")
    return dim


def sample_disordered_spec(
    template: LatticeSpec,
    sigma_beta: float,
    sigma_coupling: float,
    seed,
) -> LatticeSpec:
    """Perturb each beta and coupling by independent uniform noise on [-sigma, sigma].

    Negative couplings are clamped to zero. ``seed`` may be an int or a
    ``numpy.random.SeedSequence``; equal seeds give equal specs.
    """
    if sigma_beta < 0 or sigma_coupling < 0:
        raise ValidationError("disorder widths must be >= 0")
    rng = np.random.default_rng(seed)
    beta = template.beta + rng.uniform(-1.0, 1.0, template.n_sites) * sigma_beta
    coupling = template.coupling + (
        rng.uniform(-1.0, 1.0, template.n_sites - 1) * sigma_coupling
    )
    if sigma_beta == 0:
        beta = template.beta
    if sigma_coupling == 0:
        coupling = template.coupling
    return replace(template, beta=beta, coupling=np.maximum(coupling, 0.0))
