import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photon_walks import (
    CorrelationMatrix,
    LatticeSpec,
    ValidationError,
    build_single_hamiltonian,
    build_two_photon_hamiltonian,
    distinguishable_correlation,
    fock_correlation,
    propagator,
    quantum_correlation,
    similarity,
    violation_map,
)
from photon_walks.correlations import correlation_from_amplitudes
from photon_walks.evolution import EvolutionOperator

import oracles


def hom_u(c=1.0):
    return propagator(build_single_hamiltonian(LatticeSpec.uniform(2, c)), math.pi / 4 / c)


def random_case(data, max_sites=9):
    n = data.draw(st.integers(1, max_sites))
    beta = data.draw(st.lists(st.floats(-4, 4), min_size=n, max_size=n))
    coupling = data.draw(st.lists(st.floats(0, 6), min_size=n - 1, max_size=n - 1))
    spec = LatticeSpec(n, beta, coupling, data.draw(st.floats(0, 2)))
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1))
    return spec, (a, b)


class TestQuantum:
    def test_zero_length(self):
        u = propagator(build_single_hamiltonian(LatticeSpec.uniform(4, 1.0)), 0.0)
        g = quantum_correlation(u, (0, 1)).gamma
        expected = np.zeros((4, 4))
        expected[0, 1] = expected[1, 0] = 1
        assert np.array_equal(g, expected)

    def test_hong_ou_mandel(self):
        g = quantum_correlation(hom_u(), (0, 1)).gamma
        assert g[0, 1] < 1e-12
        assert g[0, 0] == pytest.approx(0.5, abs=1e-12)
        assert g[1, 1] == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("cz", [0.2, 0.6, 1.3])
    def test_two_site_coincidence_curve(self, cz):
        u = propagator(build_single_hamiltonian(LatticeSpec.uniform(2, 1.0)), cz)
        assert quantum_correlation(u, (0, 1)).gamma[0, 1] == pytest.approx(math.cos(2 * cz) ** 2, abs=1e-12)

    def test_rejects_non_unitary(self):
        bad = EvolutionOperator(np.array([[1.0, 0.1], [0.1, 1.0]], dtype=complex), 0.1)
        with pytest.raises(ValidationError):
            quantum_correlation(bad, (0, 1))

    def test_rejects_bad_site(self, device_u):
        with pytest.raises(ValidationError):
            quantum_correlation(device_u, (0, 21))

    @pytest.mark.parametrize("pair", [(10, 11), (9, 11), (0, 20), (5, 5)])
    def test_matches_fock_space_on_device(self, device, device_u, pair):
        h2 = build_two_photon_hamiltonian(device)
        ref = fock_correlation(h2, device.length_mm, pair).gamma
        assert np.max(np.abs(quantum_correlation(device_u, pair).gamma - ref)) < 1e-10

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_matches_fock_space_random(self, data):
        spec, pair = random_case(data, max_sites=7)
        u = propagator(build_single_hamiltonian(spec), spec.length_mm)
        h2 = build_two_photon_hamiltonian(spec)
        ref = fock_correlation(h2, spec.length_mm, pair).gamma
        assert np.max(np.abs(quantum_correlation(u, pair).gamma - ref)) < 1e-10

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_normalized_and_exchange_symmetric(self, data):
        spec, (a, b) = random_case(data)
        u = propagator(build_single_hamiltonian(spec), spec.length_mm)
        for fn in (quantum_correlation, distinguishable_correlation):
            g = fn(u, (a, b))
            assert abs(g.pair_total() - 1) < 1e-10
            assert np.array_equal(g.gamma, fn(u, (b, a)).gamma)
            assert np.array_equal(g.gamma, g.gamma.T)
            assert np.all(g.gamma >= 0)


class TestDistinguishable:
    def test_zero_length(self):
        u = propagator(build_single_hamiltonian(LatticeSpec.uniform(3, 1.0)), 0.0)
        g = distinguishable_correlation(u, (0, 1)).gamma
        assert g[0, 1] == 1 and g.sum() == 2

    def test_hong_ou_mandel_limit(self):
        g = distinguishable_correlation(hom_u(), (0, 1)).gamma
        assert g[0, 1] == pytest.approx(0.5, abs=1e-12)
        assert g[0, 0] == pytest.approx(0.25, abs=1e-12)
        assert g[1, 1] == pytest.approx(0.25, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_independent_walk_oracle(self, data):
        spec, (a, b) = random_case(data)
        u = propagator(build_single_hamiltonian(spec), spec.length_mm)
        ref = oracles.independent_walks(u.matrix, a, b)
        assert np.max(np.abs(distinguishable_correlation(u, (a, b)).gamma - ref)) < 1e-12


def test_correlation_from_amplitudes_layout():
    amps = np.sqrt(np.array([0.1, 0.2, 0.3, 0.15, 0.05, 0.2]))
    g = correlation_from_amplitudes(amps, 3)
    assert g[0, 0] == pytest.approx(0.1)
    assert g[0, 2] == g[2, 0] == pytest.approx(0.3)
    assert g[1, 2] == pytest.approx(0.05)
    with pytest.raises(ValidationError):
        correlation_from_amplitudes(amps[:5], 3)


class TestSimilarity:
    def test_self(self, device_u):
        g = quantum_correlation(device_u, (10, 11))
        assert similarity(g, g) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint(self):
        a = np.diag([1.0, 0.0])
        b = np.diag([0.0, 1.0])
        assert similarity(a, b) == 0.0

    def test_scale_invariant(self, device_u):
        g = quantum_correlation(device_u, (10, 11)).gamma
        d = distinguishable_correlation(device_u, (10, 11)).gamma
        assert similarity(g, 3 * g) == pytest.approx(1.0, abs=1e-12)
        assert similarity(3 * g, 0.2 * d) == pytest.approx(similarity(g, d), abs=1e-12)

    def test_device_regression(self, device_u):
        # quantum vs distinguishable for adjacent central inputs; frozen on first run
        s = similarity(quantum_correlation(device_u, (10, 11)), distinguishable_correlation(device_u, (10, 11)))
        assert s == pytest.approx(0.7592369797, abs=1e-9)

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 10), min_size=9, max_size=9), st.lists(st.floats(0, 10), min_size=9, max_size=9))
    def test_bounded(self, xs, ys):
        a = np.array(xs).reshape(3, 3)
        b = np.array(ys).reshape(3, 3)
        if a.sum() == 0 or b.sum() == 0:
            return
        assert 0.0 <= similarity(a, b) <= 1.0

    def test_absent_entries_excluded(self):
        a = np.array([[1.0, np.nan], [np.nan, 1.0]])
        b = np.array([[2.0, 5.0], [5.0, 2.0]])
        assert similarity(a, b) == pytest.approx(1.0)

    def test_errors(self):
        with pytest.raises(ValidationError):
            similarity(np.zeros((2, 2)), np.eye(2))
        with pytest.raises(ValidationError):
            similarity(np.eye(2), np.eye(3))


class TestViolationMap:
    def test_uniform(self):
        c = 0.1
        v = violation_map(np.full((4, 4), c)).v
        off = ~np.eye(4, dtype=bool)
        assert np.allclose(v[off], c / 3)
        assert np.all(np.isnan(np.diag(v)))

    def test_hom_quantum(self):
        v = violation_map(quantum_correlation(hom_u(), (0, 1))).v
        assert v[0, 1] == pytest.approx(-1 / 3, abs=1e-12)

    def test_hom_distinguishable(self):
        v = violation_map(distinguishable_correlation(hom_u(), (0, 1))).v
        assert v[0, 1] == pytest.approx(1 / 3, abs=1e-12)

    def test_noiseless_has_no_errors(self):
        vm = violation_map(np.eye(2) * 0.5)
        assert vm.sigma_v is None and vm.n_sigma is None

    @pytest.mark.parametrize("n", [3, 8, 21])
    def test_distinguishable_never_violates(self, n):
        h = build_single_hamiltonian(LatticeSpec.uniform(n, 5.0))
        for z in np.linspace(0.05, 1.5, 7):
            u = propagator(h, z)
            for a in range(n):
                for b in range(a, n):
                    assert violation_map(distinguishable_correlation(u, (a, b))).min_v() >= -1e-10

    @pytest.mark.parametrize("pair", [(10, 11), (9, 11)])
    def test_quantum_violates_on_device(self, device_u, pair):
        assert violation_map(quantum_correlation(device_u, pair)).min_v() < 0


def test_correlation_matrix_validation():
    with pytest.raises(ValidationError):
        CorrelationMatrix(np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValidationError):
        CorrelationMatrix(-np.eye(2))


def test_adjacent_input_lobe_structure_regression(device_u):
    g = quantum_correlation(device_u, (10, 11)).gamma
    left, right = slice(0, 11), slice(11, 21)
    assert g[left, left].sum() == pytest.approx(0.6735967476, abs=1e-9)
    assert g[right, right].sum() == pytest.approx(0.6735739035, abs=1e-9)
    assert g[left, right].sum() == pytest.approx(0.2709816470, abs=1e-9)
    inner = g[1:, 1:]
    assert np.max(np.abs(inner - inner[::-1, ::-1])) == pytest.approx(1.16769e-3, rel=1e-4)
    g9 = quantum_correlation(device_u, (9, 11)).gamma
    assert g9[10, 17] == pytest.approx(8.352910e-4, rel=1e-6)
    assert g9[10, 17] == pytest.approx(g9[10, 3], abs=1e-15)
