import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xychain.model import (
    CapacityError,
    ModelParams,
    MomentumLayout,
    annihilation_operators,
    apply_creation,
    bogoliubov_angle,
    build_hamiltonian,
    dispersion,
    exact_spectrum,
    ground_energy,
    ground_state,
    momentum_mode,
)

GRID = [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0), (1.5, 1.0), (1.0, 0.5)]


def parity(n):
    return np.diag([(-1) ** bin(i).count("1") for i in range(2 ** n)])


class TestModelParams:
    @pytest.mark.parametrize("n", [0, 1, 3, 7, -2])
    def test_rejects_bad_n(self, n):
        with pytest.raises(ValueError):
            ModelParams(n)

    def test_rejects_negative_beta(self):
        with pytest.raises(ValueError):
            ModelParams(4, beta=-1)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            ModelParams(4, lam=np.nan)

    def test_power_of_two_flag(self):
        assert ModelParams(8).is_power_of_two
        assert not ModelParams(12).is_power_of_two


class TestMomentumLayout:
    def test_canonical_n8(self):
        assert MomentumLayout.canonical(8).labels == (1, 7, 2, 6, 3, 5, 0, 4)

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 16])
    def test_pairs_adjacent(self, n):
        lay = MomentumLayout.canonical(n)
        assert sorted(lay.labels) == list(range(n))
        for q in range(0, n - 2, 2):
            assert lay.labels[q + 1] == lay.pair(lay.labels[q])
        assert set(lay.labels[-2:]) == {0, n // 2}
        fixed = [k for k in range(n) if lay.pair(k) == k]
        assert fixed == [0, n // 2]
        assert all(lay.pair(lay.pair(k)) == k for k in range(n))
        assert all(lay.labels[lay.qubit_of_k[k]] == k for k in range(n))

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            MomentumLayout((0, 1, 1, 3))


class TestDispersion:
    def test_field_only(self):
        p = np.linspace(0, 1, 9, endpoint=False)
        np.testing.assert_allclose(dispersion(ModelParams(8, lam=0.0), p), 1.0)

    def test_zone_boundary(self):
        assert dispersion(ModelParams(8), 0.5) == pytest.approx(2.0, abs=1e-14)

    def test_eighth(self):
        w = dispersion(ModelParams(8), 1 / 8)
        assert w == pytest.approx(2 * np.sin(np.pi / 8), abs=1e-14)
        assert w == pytest.approx(0.7653669, abs=1e-7)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-3, 3), st.floats(-2, 2), st.sampled_from([4, 8, 16]))
    def test_symmetric(self, lam, gamma, n):
        params = ModelParams(n, lam, gamma)
        p = params.momenta
        np.testing.assert_allclose(dispersion(params, p), dispersion(params, (1 - p) % 1), atol=1e-12)
        assert np.all(dispersion(params, p) >= 0)


class TestBogoliubovAngle:
    def test_field_only(self):
        assert bogoliubov_angle(ModelParams(8, lam=0.0), 0.3) == pytest.approx(np.pi)

    def test_quarter(self):
        assert bogoliubov_angle(ModelParams(8), 0.25) == pytest.approx(3 * np.pi / 4, abs=1e-12)
        assert bogoliubov_angle(ModelParams(8), 0.25) == pytest.approx(2.3561945, abs=1e-7)

    def test_gapless_point(self):
        assert bogoliubov_angle(ModelParams(8), 0.0) == np.pi

    def test_left_limit(self):
        assert bogoliubov_angle(ModelParams(8, lam=1 - 1e-9), 0.0) == pytest.approx(np.pi)

    def test_range(self):
        params = ModelParams(16, lam=0.7, gamma=-1.3)
        theta = bogoliubov_angle(params, params.momenta)
        assert np.all((theta >= 0) & (theta <= np.pi))


class TestHamiltonian:
    def test_field_only_n2(self):
        h = build_hamiltonian(ModelParams(2, lam=0.0))
        np.testing.assert_allclose(np.linalg.eigvalsh(h), [0, 1, 1, 2], atol=1e-12)

    @pytest.mark.parametrize("form", ["fermionic", "pauli"])
    @pytest.mark.parametrize("lam, gamma", GRID)
    def test_hermitian_and_parity(self, form, lam, gamma):
        h = build_hamiltonian(ModelParams(4, lam, gamma), form)
        assert np.max(np.abs(h - h.conj().T)) < 1e-12
        pi = parity(4)
        assert np.max(np.abs(h @ pi - pi @ h)) < 1e-10

    def test_anticommutation(self):
        c = [op.toarray() for op in annihilation_operators(3)]
        for i, j in itertools.product(range(3), repeat=2):
            acomm = c[i] @ c[j].conj().T + c[j].conj().T @ c[i]
            np.testing.assert_allclose(acomm, np.eye(8) * (i == j), atol=1e-15)
            np.testing.assert_allclose(c[i] @ c[j] + c[j] @ c[i], 0, atol=1e-15)

    def test_field_term_counts_holes(self):
        # -sum c+c shifted to a zero minimum is n minus the particle number
        h = build_hamiltonian(ModelParams(4, lam=0.0))
        holes = [4 - bin(i).count("1") for i in range(16)]
        np.testing.assert_allclose(h, np.diag(holes), atol=1e-12)

    def test_pauli_and_fermionic_agree_without_coupling(self):
        params = ModelParams(4, lam=0.0)
        hp = build_hamiltonian(params, "pauli")
        hf = build_hamiltonian(params, "fermionic")
        # Z_j - 1/2 = 1/2 - 2 n_j while the shifted fermionic H is n - N
        np.testing.assert_allclose(hp, 2 * hf - 1.5 * 4 * np.eye(16), atol=1e-12)

    @pytest.mark.parametrize("lam, gamma", GRID + [(-0.8, 1.7)])
    def test_open_chain_bulk_equivalence(self, lam, gamma):
        params = ModelParams(6, lam, gamma)
        hp = build_hamiltonian(params, "pauli", boundary="open")
        hf = build_hamiltonian(params, "fermionic", boundary="open")
        np.testing.assert_allclose(hp, 2 * hf + 0.5 * 6 * np.eye(64), atol=1e-12)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            build_hamiltonian(ModelParams(14))

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            build_hamiltonian(ModelParams(4), "majorana")


class TestExactSpectrum:
    def test_field_only(self):
        np.testing.assert_allclose(exact_spectrum(ModelParams(2, lam=0.0)), [0, 1, 1, 2])

    def test_minimum_zero(self):
        assert exact_spectrum(ModelParams(8, 0.3, 0.2))[0] == 0.0

    def test_n4_critical(self):
        params = ModelParams(4)
        w = dispersion(params, params.momenta)
        np.testing.assert_allclose(w, [0, np.sqrt(2), 2, np.sqrt(2)], atol=1e-14)
        ref = sorted(sum(s) for r in range(5) for s in itertools.combinations(w, r))
        np.testing.assert_allclose(exact_spectrum(params), ref, atol=1e-14)
        assert exact_spectrum(params).size == 16

    @pytest.mark.parametrize("n", [2, 4, 8])
    @pytest.mark.parametrize("lam, gamma", GRID)
    def test_matches_dense(self, n, lam, gamma):
        params = ModelParams(n, lam, gamma)
        dense = np.linalg.eigvalsh(build_hamiltonian(params))
        dense -= dense[0]
        np.testing.assert_allclose(dense, exact_spectrum(params), atol=1e-8)

    def test_shift_is_analytic_ground_energy(self):
        params = ModelParams(8, 0.6, 0.9)
        raw = np.linalg.eigvalsh(build_hamiltonian(params, shift=False))
        assert raw[0] == pytest.approx(ground_energy(params), abs=1e-10)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            exact_spectrum(ModelParams(22))


class TestGroundState:
    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    @pytest.mark.parametrize("lam, gamma", GRID + [(-1.5, 1.0), (-0.5, 0.7)])
    def test_is_ground_state(self, n, lam, gamma):
        params = ModelParams(n, lam, gamma)
        h = build_hamiltonian(params)
        psi = ground_state(params).amplitudes
        assert np.linalg.norm(h @ psi) < 1e-9

    def test_momentum_mode_creation(self):
        n = 4
        vac = np.zeros(16, complex)
        vac[0] = 1
        cdag = [op.conj().T.toarray() for op in annihilation_operators(n)]
        for k in range(n):
            u = momentum_mode(n, k)
            ref = sum(u[j] * cdag[j] for j in range(n)) @ vac
            np.testing.assert_allclose(apply_creation(vac, u), ref, atol=1e-15)

    def test_creation_on_occupied_states(self, rng):
        n = 4
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        cdag = [op.conj().T.toarray() for op in annihilation_operators(n)]
        for j in range(n):
            np.testing.assert_allclose(apply_creation(psi, np.eye(n)[j]), cdag[j] @ psi, atol=1e-14)
