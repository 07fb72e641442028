"""Oracle suite: every circuit construction compared against a dense
reference at one parameter point. Used by ``xychain verify``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gates
from .circuits import (
    build_fourier,
    build_rg,
    build_tfd,
    build_time_evolution,
    build_udis,
    coarse_grain,
    dft_matrix,
    energy_frequencies,
    kept_count,
    single_particle_matrix,
)
from .experiments import dense_evolution, thermal_state_oracle
from .model import (
    ModelParams,
    MomentumLayout,
    apply_creation,
    build_hamiltonian,
    exact_spectrum,
    ground_state,
    momentum_mode,
)
from .sim import (
    StateVector,
    apply_circuit,
    basis_state,
    circuit_to_unitary,
    partial_trace,
    purity,
    trace_distance,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value < self.threshold)


def occupation_bits(n: int) -> np.ndarray:
    """Row ``b`` holds the bits of basis index ``b`` (qubit 0 first)."""
    return (np.arange(2 ** n)[:, None] >> (n - 1 - np.arange(n))) & 1


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return StateVector(n, v / np.linalg.norm(v))


def below_cutoff_state(n: int, keep: int, rng: np.random.Generator) -> StateVector:
    """Random superposition of Fock states built only from modes with ``|p| <= keep/(2n)``."""
    low = [k % n for k in range(-keep // 2 + 1, keep // 2 + 1)]
    vac = basis_state(n, 0).amplitudes
    out = np.zeros(2 ** n, dtype=complex)
    for r in range(len(low) + 1):
        for subset in itertools.combinations(low, r):
            v = vac
            for k in subset:
                v = apply_creation(v, momentum_mode(n, k))
            out += complex(rng.normal(), rng.normal()) * v
    return StateVector(n, out / np.linalg.norm(out))


def check_spectrum(params):
    dense = np.linalg.eigvalsh(build_hamiltonian(params))
    return CheckResult("spectrum", float(np.max(np.abs(dense - exact_spectrum(params)))), 1e-8)


def check_diagonalization(params):
    u = circuit_to_unitary(build_udis(params))
    d = u.conj().T @ build_hamiltonian(params) @ u
    target = occupation_bits(params.n) @ energy_frequencies(params)
    return CheckResult("udis_diagonalizes", float(np.max(np.abs(d - np.diag(target)))), 1e-8)


def check_ground_state(params):
    psi = apply_circuit(basis_state(params.n, 0), build_udis(params))
    dev = 1 - abs(psi.overlap(ground_state(params)))
    return CheckResult("udis_ground_state", float(dev), 1e-8)


def check_fourier(params):
    n = params.n
    m = single_particle_matrix(build_fourier(n))
    dev = np.max(np.abs(m - dft_matrix(MomentumLayout.canonical(n).labels)))
    return CheckResult("fourier_dft", float(dev), 1e-8)


def check_decompositions(rng):
    worst = 0.0
    for axis, sign in itertools.product(gates.AXES, gates.SIGNS):
        for theta in rng.uniform(-2 * np.pi, 2 * np.pi, 20):
            a = circuit_to_unitary(gates.u_pm_circuit(axis, sign, theta))
            b = gates.u_pm_dense(axis, sign, theta)
            worst = max(worst, abs(abs(np.trace(a.conj().T @ b)) - 4))
    return CheckResult("su2_decompositions", worst, 1e-9)


def check_time_evolution(params, rng):
    psi = random_state(params.n, rng)
    udis = build_udis(params)
    psi_e = apply_circuit(psi, udis.inverse())
    worst = 0.0
    for t in (0.1, 1.0, 10.0, 100.0):
        out = apply_circuit(apply_circuit(psi_e, build_time_evolution(params, t)), udis)
        ref = dense_evolution(params, psi, t)
        worst = max(worst, abs(1 - abs(out.overlap(ref))))
    return CheckResult("time_evolution", worst, 1e-8)


def check_tfd(params):
    n = params.n
    worst = 0.0
    for beta in (0.0, 0.5, 1.0, 2.0, 10.0):
        tfd = apply_circuit(basis_state(2 * n, 0), build_tfd(params, beta))
        rho = partial_trace(tfd, range(n))
        worst = max(worst, trace_distance(rho, thermal_state_oracle(params, beta)))
    return CheckResult("tfd_gibbs", worst, 1e-8)


def check_rg(params, rng, pairs: int = 5):
    n = params.n
    if n < 4:
        return CheckResult("rg_isometry", 0.0, 1e-8)
    cutoff = 0.25
    keep = kept_count(n, cutoff)
    worst = 0.0
    for _ in range(pairs):
        a, b = below_cutoff_state(n, keep, rng), below_cutoff_state(n, keep, rng)
        ra, rb = coarse_grain(a, params, cutoff), coarse_grain(b, params, cutoff)
        lhs = float(np.real(np.trace(ra.entries @ rb.entries)))
        worst = max(worst, abs(lhs - abs(a.overlap(b)) ** 2), 1 - purity(ra))
    vac = apply_circuit(basis_state(n, 0), build_rg(params, cutoff))
    worst = max(worst, 1 - abs(vac.amplitudes[0]))
    return CheckResult("rg_isometry", worst, 1e-8)


def run_all(params: ModelParams, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_spectrum(params),
        check_diagonalization(params),
        check_ground_state(params),
        check_fourier(params),
        check_decompositions(rng),
        check_time_evolution(params, rng),
        check_tfd(params),
        check_rg(params, rng),
    ]
