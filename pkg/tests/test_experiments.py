import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xychain.circuits import build_udis, coarse_grain
from xychain.experiments import (
    EntropyCurve,
    SpacetimeGrid,
    critical_fit,
    csv_text,
    dense_evolution,
    format_float,
    manifest,
    oracle_expz_spacetime,
    run_entropy_curve,
    run_expz_coarse,
    run_expz_spacetime,
    run_tfd_entropy_vs_beta,
    thermal_state_oracle,
    write_csv,
)
from xychain.model import CapacityError, ModelParams, build_hamiltonian, ground_state
from xychain.sim import apply_circuit, basis_state, circuit_to_unitary
from xychain.verify import below_cutoff_state

TIMES = np.linspace(0.0, 6.0, 13)


class TestSpacetime:
    def test_initial_profile(self):
        grid = run_expz_spacetime(ModelParams(8, 1.0), 3, [0.0])
        expected = np.ones(8)
        expected[3] = -1
        np.testing.assert_allclose(grid.values[0], expected, atol=1e-12)

    def test_no_hopping_is_stationary(self):
        grid = run_expz_spacetime(ModelParams(4, 0.0), 1, TIMES)
        np.testing.assert_allclose(grid.values, np.tile(grid.values[0], (TIMES.size, 1)), atol=1e-12)

    @pytest.mark.parametrize("lam, gamma", [(1.0, 1.0), (0.6, 0.2), (1.4, 0.0), (-0.9, 0.7)])
    def test_matches_oracle(self, lam, gamma):
        params = ModelParams(8, lam, gamma)
        fast = run_expz_spacetime(params, 2, TIMES)
        ref = oracle_expz_spacetime(params, 2, TIMES)
        assert np.max(np.abs(fast.values - ref.values)) < 1e-8

    def test_particle_number_conserved_without_pairing(self):
        grid = run_expz_spacetime(ModelParams(8, 1.0, 0.0), 0, TIMES)
        np.testing.assert_allclose(np.sum((1 - grid.values) / 2, axis=1), 1.0, atol=1e-10)

    def test_rows(self):
        grid = run_expz_spacetime(ModelParams(2, 1.0), 0, [0.0, 1.0])
        rows = list(grid.rows())
        assert len(rows) == 4 and rows[0][:2] == (0.0, 0)

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            SpacetimeGrid([0.0], [0, 1], np.zeros((2, 2)))

    def test_nonfinite_times(self):
        with pytest.raises(ValueError):
            run_expz_spacetime(ModelParams(4), 0, [np.nan])

    def test_dense_evolution_norm(self, rng):
        from conftest import random_state

        psi = dense_evolution(ModelParams(4, 1.1, 0.3), random_state(4, rng), 3.3)
        assert psi.norm == pytest.approx(1, abs=1e-12)


class TestCoarseSpacetime:
    def test_vacuum_stays_put(self):
        # without pairing the empty chain is an eigenstate
        params = ModelParams(8, 1.0, 0.0)
        grid = run_expz_coarse(params, 0.25, basis_state(8, 0), TIMES)
        np.testing.assert_allclose(grid.values, 1.0, atol=1e-12)

    def test_matches_coarse_chain(self, rng):
        params = ModelParams(8, 1.0, 0.0)
        state = below_cutoff_state(8, 4, rng)
        grid = run_expz_coarse(params, 0.25, state, TIMES)
        assert grid.values.shape == (TIMES.size, 4)
        rho = coarse_grain(state, params, 0.25).entries
        coarse = ModelParams(4, 1.0, 0.0)
        evals, evecs = np.linalg.eigh(build_hamiltonian(coarse))
        z = [np.diag(1 - 2 * ((np.arange(16) >> (3 - i)) & 1)) for i in range(4)]
        for t, row in zip(TIMES, grid.values):
            u = (evecs * np.exp(-0.5j * evals * t)) @ evecs.conj().T
            rho_t = u @ rho @ u.conj().T
            ref = [np.real(np.trace(rho_t @ zi)) for zi in z]
            np.testing.assert_allclose(row, ref, atol=1e-10)


class TestEntropy:
    @pytest.mark.parametrize("lam", [0.5, 1.0, 1.5])
    def test_symmetric_and_bounded(self, lam):
        curve = run_entropy_curve(ground_state(ModelParams(8, lam)))
        s = curve.entropies
        assert s[0] == 0 and s[-1] == pytest.approx(0, abs=1e-9)
        np.testing.assert_allclose(s, s[::-1], atol=1e-9)
        assert np.all(s <= np.minimum(curve.lengths, 8 - curve.lengths) + 1e-9)

    def test_critical_curve_is_concave(self):
        s = run_entropy_curve(ground_state(ModelParams(8, 1.0))).entropies
        assert np.all(np.diff(s, 2) <= 1e-9)

    def test_product_state_has_no_entanglement(self):
        curve = run_entropy_curve(basis_state(6, "101100"))
        np.testing.assert_allclose(curve.entropies, 0, atol=1e-12)

    def test_block_subset(self):
        curve = run_entropy_curve(ground_state(ModelParams(4)), [0, 1])
        assert curve.size == 2 and curve.lengths.tolist() == [0, 1, 2]

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.1, 2.0), st.floats(-0.5, 1.0), st.integers(8, 32))
    def test_fit_recovers_synthetic_log_curve(self, c, c1, total):
        ell = np.arange(total + 1)
        s = np.zeros(total + 1)
        s[1:total] = c / 3 * np.log2(total / np.pi * np.sin(np.pi * ell[1:total] / total)) + c1
        s = np.clip(s, 0, None)
        if np.any(s[1:total] == 0):
            return
        fit = critical_fit(EntropyCurve(ell, s))
        assert fit.c_fit == pytest.approx(c, abs=1e-9)
        assert fit.c1 == pytest.approx(c1, abs=1e-9)
        assert fit.r_squared_log == pytest.approx(1, abs=1e-12)

    def test_fit_recovers_line(self):
        ell = np.arange(17)
        s = 0.3 + 0.5 * np.minimum(ell, 16 - ell)
        fit = critical_fit(EntropyCurve(ell, s), model="linear")
        assert fit.model == "linear"
        assert fit.slope == pytest.approx(0.5) and fit.intercept == pytest.approx(0.3)
        assert fit.r_squared_linear == pytest.approx(1)

    def test_fit_needs_points(self):
        with pytest.raises(ValueError):
            critical_fit(EntropyCurve(np.arange(5), np.array([0, 1, 1.2, 1, 0.0])))

    def test_fit_unknown_model(self):
        with pytest.raises(ValueError):
            critical_fit(EntropyCurve(np.arange(9), np.ones(9)), model="power")


class TestThermalOracle:
    def test_infinite_temperature(self):
        rho = thermal_state_oracle(ModelParams(4, 1.0), beta=0.0)
        np.testing.assert_allclose(rho.entries, np.eye(16) / 16, atol=1e-14)

    @pytest.mark.parametrize("basis", ["energy", "position"])
    def test_commutes_with_hamiltonian(self, basis):
        params = ModelParams(4, 0.7, 0.4)
        rho = thermal_state_oracle(params, 1.2, basis=basis).entries
        h = build_hamiltonian(params)
        if basis == "energy":
            u = circuit_to_unitary(build_udis(params))
            h = u.conj().T @ h @ u
        assert np.max(np.abs(rho @ h - h @ rho)) < 1e-10
        assert np.real(np.trace(rho)) == pytest.approx(1)

    def test_low_temperature_is_ground_state(self):
        params = ModelParams(4, 1.5)
        rho = thermal_state_oracle(params, 200.0, basis="position").entries
        psi = ground_state(params).amplitudes
        assert np.real(np.vdot(psi, rho @ psi)) == pytest.approx(1, abs=1e-10)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            thermal_state_oracle(ModelParams(12))

    def test_bad_basis(self):
        with pytest.raises(ValueError):
            thermal_state_oracle(ModelParams(4), basis="momentum")


class TestTfdTable:
    def test_limits(self):
        table = run_tfd_entropy_vs_beta(ModelParams(4, 1.5), [0.0, 1.0, 50.0])
        assert table.half_cut[0] == pytest.approx(4, abs=1e-10)
        assert table.half_cut[-1] < 1e-6
        assert np.all(np.diff(table.half_cut) < 0)
        assert len(table.curves) == 3

    def test_infinite_temperature_curve_is_linear(self):
        table = run_tfd_entropy_vs_beta(ModelParams(4, 1.0), [0.0])
        np.testing.assert_allclose(table.curves[0].entropies, np.arange(5), atol=1e-10)
        assert table.curves[0].entropies[-1] == pytest.approx(table.half_cut[0])

    def test_rows(self):
        table = run_tfd_entropy_vs_beta(ModelParams(2), [0.5, 1.0])
        assert len(list(table.rows())) == 6

    def test_negative_beta(self):
        with pytest.raises(ValueError):
            run_tfd_entropy_vs_beta(ModelParams(2), [-1.0])


class TestOutput:
    @pytest.mark.parametrize("x", [0.1, 1 / 3, np.pi, -2.5e-17, 1e300])
    def test_float_round_trip(self, x):
        assert float(format_float(x)) == x

    def test_csv_layout(self):
        text = csv_text(["t", "site", "z"], [(0.1, 2, np.float64(1 / 3))])
        assert text == "t,site,z\n0.10000000000000001,2,0.33333333333333331\n"

    def test_write_csv_stream(self):
        buf = io.StringIO()
        write_csv(buf, ["a"], [(1,), (2,)])
        assert buf.getvalue() == "a\n1\n2\n"

    def test_manifest_deterministic(self):
        a = manifest({"n": 4, "lam": 1.0}, seed=3)
        b = manifest({"lam": 1.0, "n": 4}, seed=3)
        assert a == b
        doc = json.loads(a)
        assert doc["version"].startswith("v")
        assert doc["tolerances"]["unitary"] == 1e-10
        assert doc["seed"] == 3

    def test_manifest_numpy_values(self):
        doc = json.loads(manifest({"times": np.array([0.0, 1.0]), "n": np.int64(4)}))
        assert doc["parameters"] == {"n": 4, "times": [0.0, 1.0]}
