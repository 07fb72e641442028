"""Experiment runners: spacetime grids of <Z_i>, entropy curves and fits,
Gibbs-state oracle and thermofield-double entropy tables, plus CSV/JSON
emitters for their results.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .circuits import (
    build_rg,
    build_tfd,
    build_time_evolution,
    build_udis,
    coarse_grain,
    kept_count,
)
from .model import CapacityError, ModelParams, build_hamiltonian
from .sim import (
    DensityMatrix,
    StateVector,
    apply_circuit,
    basis_state,
    circuit_to_unitary,
    expectation_pauli,
    hermitian_eigensystem,
    partial_trace,
    von_neumann_entropy,
)
from .tolerances import TOL

__all__ = [
    "SpacetimeGrid",
    "EntropyCurve",
    "FitResult",
    "TfdEntropyTable",
    "dense_evolution",
    "oracle_expz_spacetime",
    "run_expz_spacetime",
    "run_expz_coarse",
    "run_entropy_curve",
    "critical_fit",
    "thermal_state_oracle",
    "run_tfd_entropy_vs_beta",
    "format_float",
    "write_csv",
    "manifest",
]

MAX_ORACLE_MODES = 10


@dataclass(frozen=True)
class SpacetimeGrid:
    """``values[t_index, site_index] = <Z_site>(t)``."""

    times: np.ndarray
    sites: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        sites = np.asarray(self.sites, dtype=int)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (times.size, sites.size):
            raise ValueError(f"values shape {values.shape} != {(times.size, sites.size)}")
        if values.size and np.max(np.abs(values)) > 1 + 1e-9:
            raise ValueError("Z expectation outside [-1, 1]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "values", values)

    def rows(self):
        for i, t in enumerate(self.times):
            for j, s in enumerate(self.sites):
                yield (t, int(s), self.values[i, j])


@dataclass(frozen=True)
class EntropyCurve:
    """Block entropies ``S(l)`` in bits for ``l = 0..L``."""

    lengths: np.ndarray
    entropies: np.ndarray

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=int)
        ent = np.asarray(self.entropies, dtype=float)
        if lengths.shape != ent.shape:
            raise ValueError("lengths and entropies differ in size")
        if ent.size and np.min(ent) < -1e-9:
            raise ValueError("negative entropy")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "entropies", ent)

    @property
    def size(self) -> int:
        """Total length ``L``."""
        return int(self.lengths[-1])


@dataclass(frozen=True)
class FitResult:
    """Both scaling fits of an entropy curve.

    ``c_fit`` and ``c1`` come from ``S = (c/3) log2((L/pi) sin(pi l/L)) + c1``
    on ``l = 1..L-1``; ``slope`` and ``intercept`` from ``S = a + b l`` on
    ``l = 1..floor(L/2)``. ``model`` records which fit was requested.
    """

    model: str
    c_fit: float
    c1: float
    slope: float
    intercept: float
    r_squared_log: float
    r_squared_linear: float


@dataclass(frozen=True)
class TfdEntropyTable:
    """Per-beta half-cut entropy and L-side position-space block curves."""

    betas: np.ndarray
    half_cut: np.ndarray
    curves: list[EntropyCurve] = field(default_factory=list)

    def rows(self):
        for beta, curve in zip(self.betas, self.curves):
            for ell, s in zip(curve.lengths, curve.entropies):
                yield (beta, int(ell), s)


def dense_evolution(params: ModelParams, state: StateVector, t: float) -> StateVector:
    """``exp(-(i/2) H t) |psi>`` from a dense diagonalization of the fermionic H."""
    evals, evecs = hermitian_eigensystem(build_hamiltonian(params))
    coeff = evecs.conj().T @ state.amplitudes
    return StateVector(state.num_qubits, evecs @ (np.exp(-0.5j * evals * t) * coeff))


def _z_profile(state: StateVector) -> np.ndarray:
    return np.array([expectation_pauli(state, [(i, "Z")]) for i in range(state.num_qubits)])


def oracle_expz_spacetime(params: ModelParams, initial_site: int, times: Sequence[float]) -> SpacetimeGrid:
    """Dense-exponential reference for :func:`run_expz_spacetime`."""
    evals, evecs = hermitian_eigensystem(build_hamiltonian(params))
    psi0 = basis_state(params.n, [initial_site]).amplitudes
    coeff = evecs.conj().T @ psi0
    values = []
    for t in times:
        psi = StateVector(params.n, evecs @ (np.exp(-0.5j * evals * t) * coeff))
        values.append(_z_profile(psi))
    return SpacetimeGrid(times, np.arange(params.n), np.array(values).reshape(len(times), params.n))


def run_expz_spacetime(params: ModelParams, initial_site: int, times: Sequence[float]) -> SpacetimeGrid:
    """``<Z_i>(t)`` after exciting ``initial_site``, evolved by circuits.

    The state is moved to the energy basis once; each time point then costs
    one phase layer and one ``U_Dis``.
    """
    times = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    udis = build_udis(params)
    psi_e = apply_circuit(basis_state(params.n, [initial_site]), udis.inverse())
    values = np.empty((times.size, params.n))
    for i, t in enumerate(times):
        psi = apply_circuit(apply_circuit(psi_e, build_time_evolution(params, t)), udis)
        values[i] = _z_profile(psi)
    return SpacetimeGrid(times, np.arange(params.n), values)


def run_expz_coarse(
    params: ModelParams, cutoff: float, initial_state: StateVector, times: Sequence[float]
) -> SpacetimeGrid:
    """``Tr(rho_IR(t) Z_i)`` on the coarse chain.

    ``rho_IR`` is :func:`coarse_grain` of the initial state; it is evolved
    with the diagonalizing and phase circuits of the ``m``-site chain with the
    same couplings, where ``m`` is the number of kept modes.
    """
    times = np.asarray(times, dtype=float)
    m = kept_count(params.n, cutoff)
    rho = coarse_grain(initial_state, params, cutoff).entries
    coarse = params.with_n(m)
    udis = circuit_to_unitary(build_udis(coarse))
    rho_e = udis.conj().T @ rho @ udis
    zdiag = 1 - 2 * ((np.arange(2 ** m)[:, None] >> (m - 1 - np.arange(m))) & 1)
    values = np.empty((times.size, m))
    for i, t in enumerate(times):
        phases = np.diag(circuit_to_unitary(build_time_evolution(coarse, t)))
        rho_t = udis @ (phases[:, None] * rho_e * phases.conj()[None, :]) @ udis.conj().T
        values[i] = np.real(np.diag(rho_t)) @ zdiag
    return SpacetimeGrid(times, np.arange(m), values)


def run_entropy_curve(state: StateVector, block_qubits: Sequence[int] | None = None) -> EntropyCurve:
    """``S(l)`` of the first ``l`` qubits of ``block_qubits`` for ``l = 0..L``."""
    n = state.num_qubits
    sites = list(range(n) if block_qubits is None else block_qubits)
    ent = [0.0]
    for ell in range(1, len(sites) + 1):
        block = sites[:ell]
        if 2 * ell > n:
            # pure state: the complement has the same spectrum and is smaller
            block = [q for q in range(n) if q not in block]
        ent.append(von_neumann_entropy(partial_trace(state, block)) if block else 0.0)
    return EntropyCurve(np.arange(len(sites) + 1), np.array(ent))


def _r_squared(y: np.ndarray, yhat: np.ndarray) -> float:
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot <= 1e-30:
        return 1.0 if ss_res <= 1e-30 else 0.0
    return float(np.clip(1 - ss_res / ss_tot, 0.0, 1.0))


def critical_fit(curve: EntropyCurve, model: str = "log") -> FitResult:
    """Fit a block-entropy curve by the chord-length log form and by a line.

    Raises
    ------
    ValueError
        If the curve has fewer than four interior points or ``model`` is not
        ``"log"`` or ``"linear"``.
    """
    if model not in ("log", "linear"):
        raise ValueError(f"unknown model {model!r}")
    total = curve.size
    ell = np.arange(1, total)
    if ell.size < 4:
        raise ValueError("critical_fit needs at least 4 interior points")
    s = curve.entropies[1:total]
    x = np.log2(total / np.pi * np.sin(np.pi * ell / total)) / 3
    a = np.column_stack([x, np.ones_like(x)])
    (c_fit, c1), *_ = np.linalg.lstsq(a, s, rcond=None)
    r2_log = _r_squared(s, a @ np.array([c_fit, c1]))
    half = ell <= total // 2
    b = np.column_stack([ell[half], np.ones(half.sum())])
    (slope, intercept), *_ = np.linalg.lstsq(b, s[half], rcond=None)
    r2_lin = _r_squared(s[half], b @ np.array([slope, intercept]))
    return FitResult(model, float(c_fit), float(c1), float(slope), float(intercept), r2_log, r2_lin)


def thermal_state_oracle(params: ModelParams, beta: float | None = None, basis: str = "energy") -> DensityMatrix:
    """Dense Gibbs state ``exp(-beta H)/Z``.

    In the energy basis ``H`` is ``U_Dis^dagger H U_Dis``; the position-basis
    state is that matrix conjugated back with ``U_Dis``.
    """
    beta = params.beta if beta is None else beta
    if params.n > MAX_ORACLE_MODES:
        raise CapacityError(f"thermal oracle limited to {MAX_ORACLE_MODES} modes")
    if basis not in ("energy", "position"):
        raise ValueError(f"unknown basis {basis!r}")
    udis = circuit_to_unitary(build_udis(params))
    h_e = udis.conj().T @ build_hamiltonian(params) @ udis
    evals, evecs = hermitian_eigensystem(h_e)
    weights = np.exp(-beta * (evals - evals[0]))
    weights /= weights.sum()
    rho = (evecs * weights) @ evecs.conj().T
    if basis == "position":
        rho = udis @ rho @ udis.conj().T
    return DensityMatrix(params.n, 0.5 * (rho + rho.conj().T))


def run_tfd_entropy_vs_beta(params: ModelParams, betas: Iterable[float]) -> TfdEntropyTable:
    """Half-cut entropy and L-side block curves of the TFD for each ``beta``.

    The block curve uses ``l`` contiguous position-space sites of the L copy,
    obtained by applying ``U_Dis`` to the L register.
    """
    betas = np.asarray(list(betas), dtype=float)
    if np.any(betas < 0):
        raise ValueError("betas must be >= 0")
    n = params.n
    udis = build_udis(params)
    half, curves = [], []
    for beta in betas:
        tfd = apply_circuit(basis_state(2 * n, 0), build_tfd(params, beta))
        half.append(von_neumann_entropy(partial_trace(tfd, range(n))))
        rotated = tfd
        for offset in (0, n):
            rotated = apply_circuit(rotated, _shifted(udis, offset, 2 * n))
        curves.append(run_entropy_curve(rotated, range(n)))
    return TfdEntropyTable(betas, np.array(half), curves)


def _shifted(circuit, offset, size):
    from .ir import Circuit

    return Circuit(size).extend(circuit, offset=offset)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Comma-separated table; floats printed with 17 significant digits."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(v) if isinstance(v, (float, np.floating)) else v for v in row]
        )


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()


def manifest(parameters: dict, **extra) -> str:
    """JSON record of run parameters, package version and tolerances."""
    from . import version_string

    doc = {
        "version": version_string(),
        "parameters": parameters,
        "tolerances": asdict(TOL),
    }
    doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
