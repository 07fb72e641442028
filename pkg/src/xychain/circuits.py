"""Circuit builders: fermionic Fourier transform, Bogoliubov layer,
diagonalizing circuit, exact time evolution, momentum-space coarse graining,
Laplacian state and thermofield double.

Momentum convention: after :func:`build_fourier` qubit ``q`` of the
canonical layout holds the mode ``c~_{k_q/n} = n^{-1/2} sum_j e^{2 pi i k_q j / n} c_j``
with no extra phase, i.e. the one-particle matrix of the circuit is exactly
``P[q, j] = e^{2 pi i k_q j / n} / sqrt(n)``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .ir import Circuit, GateOp
from .model import (
    ModelParams,
    MomentumLayout,
    dispersion,
    fixed_mode_filled,
    signed_bogoliubov_angle,
)
from .sim import StateVector, DensityMatrix, apply_circuit, basis_state, partial_trace

__all__ = [
    "single_particle_matrix",
    "dft_matrix",
    "fourier_kernel",
    "build_fourier",
    "momentum_reorder_network",
    "build_bog_layer",
    "energy_frequencies",
    "build_udis",
    "build_time_evolution",
    "evolve_position_state",
    "rg_layout",
    "kept_count",
    "build_rg",
    "coarse_grain",
    "build_laplacian",
    "build_tfd",
]

SUPPORTED_FT_SIZES = (2, 4, 8, 16)


def _require_power_of_two(n: int, what: str = "n") -> None:
    if n < 2 or n & (n - 1):
        raise ValueError(f"{what} must be a power of two >= 2, got {n}")


def single_particle_matrix(circuit: Circuit) -> np.ndarray:
    """One-particle action of a number-conserving circuit.

    Returns ``M`` with ``U c+_j U^dagger = sum_q M[q, j] c+_q``. Only gates
    that fix the vacuum are accepted: diagonal one-qubit gates with
    ``<0|G|0> = 1`` and number-conserving gates on adjacent qubits.
    """
    n = circuit.num_qubits
    m = np.eye(n, dtype=complex)
    for op in circuit:
        g = op.matrix()
        e = np.eye(n, dtype=complex)
        if len(op.targets) == 1:
            (q,) = op.targets
            if abs(g[0, 1]) > 1e-12 or abs(g[1, 0]) > 1e-12 or abs(g[0, 0] - 1) > 1e-12:
                raise ValueError(f"{op.kind} does not conserve particle number with fixed vacuum")
            e[q, q] = g[1, 1]
        else:
            a, b = op.targets
            if abs(a - b) != 1:
                raise ValueError(f"{op.kind} on non-adjacent qubits {op.targets}")
            if abs(g[0, 0] - 1) > 1e-12 or np.max(np.abs(g[[1, 2, 3], 0])) > 1e-12 or np.max(np.abs(g[0, [1, 2, 3]])) > 1e-12:
                raise ValueError(f"{op.kind} does not fix the vacuum")
            # one-particle block in (first target, second target) order
            blk = np.array([[g[2, 2], g[2, 1]], [g[1, 2], g[1, 1]]])
            if abs(g[3, 3] - np.linalg.det(blk)) > 1e-12:
                raise ValueError(f"{op.kind} is not a fermionic Gaussian gate")
            idx = [a, b]
            e[np.ix_(idx, idx)] = blk
        m = e @ m
    return m


def dft_matrix(labels: Sequence[int]) -> np.ndarray:
    """``P[q, j] = exp(2 pi i labels[q] j / n) / sqrt(n)``."""
    n = len(labels)
    k = np.asarray(labels)[:, None]
    j = np.arange(n)[None, :]
    return np.exp(2j * np.pi * k * j / n) / np.sqrt(n)


def _block_exchange(offset: int, size: int) -> list[int]:
    """Adjacent transpositions that swap blocks ``[o, o+s)`` and ``[o+s, o+2s)``.

    Returned as the lower index of each transposition, in a diamond pattern
    of ``s^2`` swaps.
    """
    ops = []
    for layer in range(2 * size - 1):
        for k in range(layer + 1):
            i = (size - 1) - layer + 2 * k
            if 0 <= i <= 2 * size - 2 and abs(i - (size - 1)) <= min(layer, 2 * size - 2 - layer):
                ops.append(offset + i)
    return ops


def _riffle(offset: int, m: int) -> list[int]:
    """Transpositions interleaving ``[0..h) , [h..m)`` into ``0, h, 1, h+1, ...``."""
    if m <= 2:
        return []
    h = m // 2
    q = h // 2
    ops = _block_exchange(offset + q, q) if h >= 2 else []
    return ops + _riffle(offset, h) + _riffle(offset + h, h)


@lru_cache(maxsize=None)
def _kernel_ops(n: int) -> tuple[GateOp, ...]:
    ops: list[GateOp] = []
    blocks = [(0, n)]
    while blocks[0][1] > 1:
        m = blocks[0][1]
        h = m // 2
        # bring element j next to element j + h within every block
        for o, _ in blocks:
            ops += [GateOp("fswap", (i, i + 1)) for i in _riffle(o, m)]
        for o, _ in blocks:
            ops += [GateOp("fourier", (o + 2 * j, o + 2 * j + 1), (j / m,)) for j in range(h)]
        for o, _ in blocks:
            ops += [GateOp("fswap", (i, i + 1)) for i in reversed(_riffle(o, m))]
        blocks = [b for o, _ in blocks for b in ((o, h), (o + h, h))]
    return tuple(ops)


def fourier_kernel(n: int) -> Circuit:
    """Radix-2 decimation-in-frequency network of F_p butterflies and fswaps.

    Each stage splits every block of size ``m`` into element pairs
    ``(j, j + h)``, moves them next to each other with fswaps, applies
    ``F_{j/m}`` and moves them back. Its one-particle action is a DFT with
    rows in bit-reversal-like order and signs of +-1; :func:`build_fourier`
    appends the fix-up to the canonical layout.
    """
    _require_power_of_two(n)
    if n not in SUPPORTED_FT_SIZES:
        raise ValueError(f"Fourier circuit supports n in {SUPPORTED_FT_SIZES}, got {n}")
    return Circuit(n, list(_kernel_ops(n)))


def _identify_rows(m: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Momentum label and unit phase of every row of a permuted, rephased DFT."""
    n = m.shape[0]
    overlaps = m @ dft_matrix(range(n)).conj().T
    labels = [int(np.argmax(np.abs(row))) for row in overlaps]
    phases = np.array([overlaps[q, labels[q]] for q in range(n)])
    if sorted(labels) != list(range(n)) or np.max(np.abs(np.abs(phases) - 1)) > 1e-9:
        raise RuntimeError("circuit does not act as a permuted DFT")
    return labels, phases


def _append_phase_fixes(circuit: Circuit, target: Sequence[int], num_modes: int | None = None) -> Circuit:
    """Append one-qubit phases so the one-particle action is exactly ``dft_matrix(target)``."""
    m = single_particle_matrix(circuit)
    n = len(target)
    overlap = np.sum(m * dft_matrix(target).conj(), axis=1)
    for q in range(n):
        ph = overlap[q]
        if abs(abs(ph) - 1) > 1e-9:
            raise RuntimeError(f"qubit {q} does not hold momentum {target[q]}")
        angle = -np.angle(ph)
        if abs(angle) < 1e-12:
            continue
        if abs(abs(angle) - np.pi) < 1e-12:
            circuit.add("z", q)
        else:
            circuit.add("phase", q, params=(angle,))
    return circuit


def momentum_reorder_network(src: MomentumLayout | Sequence[int], dst: MomentumLayout | Sequence[int]) -> Circuit:
    """Bubble-sort network of adjacent fswaps taking layout ``src`` to ``dst``.

    Uses the minimal number of adjacent transpositions (the inversion count).
    Every fswap multiplies both exchanged one-particle amplitudes by -1.
    """
    a = list(src.labels if isinstance(src, MomentumLayout) else src)
    b = list(dst.labels if isinstance(dst, MomentumLayout) else dst)
    if sorted(a) != sorted(b):
        raise ValueError("layouts hold different momenta")
    n = len(a)
    pos = {k: i for i, k in enumerate(b)}
    c = Circuit(max(n, 1))
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if pos[a[i]] > pos[a[i + 1]]:
                a[i], a[i + 1] = a[i + 1], a[i]
                c.add("fswap", i, i + 1)
                changed = True
    return c


@lru_cache(maxsize=None)
def _fourier_ops(n: int) -> tuple[GateOp, ...]:
    kernel = fourier_kernel(n)
    raw, _ = _identify_rows(single_particle_matrix(kernel))
    target = MomentumLayout.canonical(n).labels
    circ = kernel + momentum_reorder_network(raw, target)
    _append_phase_fixes(circ, target)
    return tuple(circ.ops)


def build_fourier(n: int) -> Circuit:
    """Position-to-momentum Fourier circuit with canonical output layout.

    Kernel of F_p butterflies and fswaps followed by an fswap sort into
    :meth:`MomentumLayout.canonical` and sign fixes, so that the one-particle
    action equals ``dft_matrix(MomentumLayout.canonical(n).labels)``.
    """
    fourier_kernel(n)  # validates n
    return Circuit(n, list(_fourier_ops(n)))


def _mode_pairs(layout: MomentumLayout) -> list[tuple[int, int]]:
    n = layout.n
    pairs = []
    for q in range(0, n, 2):
        ku, kl = layout.labels[q], layout.labels[q + 1]
        fixed = {0, n // 2}
        if {ku, kl} != fixed and kl != layout.pair(ku):
            raise ValueError(f"qubits {q}, {q + 1} hold unpaired momenta {ku}, {kl}")
        pairs.append((q, q + 1))
    return pairs


def build_bog_layer(params: ModelParams, layout: MomentumLayout | None = None) -> Circuit:
    """Bogoliubov rotations mapping the energy vacuum to the momentum ground state.

    One ``bog`` gate per ``(p, -p)`` pair with the signed angle. The pair
    ``(0, n/2)`` gets ``bog(pi)`` when both modes have non-positive kinetic
    energy (``|lam| <= 1``) and otherwise a single ``x`` on the one filled mode.
    """
    n = params.n
    layout = MomentumLayout.canonical(n) if layout is None else layout
    if layout.n != n:
        raise ValueError("layout size does not match params")
    c = Circuit(n)
    for qu, ql in _mode_pairs(layout):
        ku, kl = layout.labels[qu], layout.labels[ql]
        if {ku, kl} == {0, n // 2}:
            filled = [q for q, k in ((qu, ku), (ql, kl)) if fixed_mode_filled(params, k)]
            if len(filled) == 2:
                c.add("bog", qu, ql, params=(np.pi,))
            else:
                c.add("x", filled[0])
        else:
            c.add("bog", qu, ql, params=(signed_bogoliubov_angle(params, ku / n),))
    return c


def energy_frequencies(params: ModelParams, layout: MomentumLayout | None = None) -> np.ndarray:
    """Quasiparticle energy carried by each energy-basis qubit.

    For the doubly filled ``(0, n/2)`` pair an excitation on a wire removes
    the particle of the *other* mode, so the two energies are exchanged.
    """
    n = params.n
    layout = MomentumLayout.canonical(n) if layout is None else layout
    w = np.array([dispersion(params, k / n) for k in layout.labels])
    out = w.copy()
    for qu, ql in _mode_pairs(layout):
        ks = {layout.labels[qu], layout.labels[ql]}
        if ks == {0, n // 2} and all(fixed_mode_filled(params, k) for k in ks):
            out[qu], out[ql] = w[ql], w[qu]
    return out


def build_udis(params: ModelParams) -> Circuit:
    """Energy-to-position circuit: Bogoliubov layer, then inverse Fourier.

    ``U^dagger H U`` is diagonal with entry ``sum_q w_q b_q`` on the basis
    state with bits ``b``, where ``w`` is :func:`energy_frequencies`.
    """
    _require_power_of_two(params.n)
    return build_bog_layer(params) + build_fourier(params.n).inverse()


def build_time_evolution(params: ModelParams, t: float) -> Circuit:
    """``exp(-(i/2) H~ t)`` in the energy basis: one phase per mode qubit."""
    c = Circuit(params.n)
    for q, w in enumerate(energy_frequencies(params)):
        c.add("phase", q, params=(-0.5 * w * t,))
    return c


def evolve_position_state(params: ModelParams, site: int, t: float) -> StateVector:
    """Evolve the single particle at ``site`` with ``U_Dis T(t) U_Dis^dagger``."""
    if not 0 <= site < params.n:
        raise IndexError(f"site {site} out of range")
    udis = build_udis(params)
    circ = udis.inverse() + build_time_evolution(params, t) + udis
    return apply_circuit(basis_state(params.n, [site]), circ)


def kept_count(n: int, cutoff: float) -> int:
    """Number of modes with ``-cutoff < p <= cutoff`` on the ``n``-point grid."""
    keep = 2 * cutoff * n
    m = int(round(keep))
    if abs(keep - m) > 1e-9 or m < 2 or m > n or m & (m - 1):
        raise ValueError(f"cutoff {cutoff} keeps {keep} modes; need a power of two in [2, {n}]")
    return m


def rg_layout(n: int, keep: int) -> MomentumLayout:
    """Fine layout whose first ``keep`` qubits hold the low momenta.

    The low modes ``k`` with ``-keep/2 < k <= keep/2`` sit where the coarse
    canonical layout of ``keep`` modes holds ``k mod keep``; discarded modes
    follow in their canonical order.
    """
    coarse = MomentumLayout.canonical(keep).labels
    low = [k if k <= keep // 2 else n - (keep - k) for k in coarse]
    rest = [k for k in MomentumLayout.canonical(n).labels if k not in low]
    return MomentumLayout(tuple(low + rest))


def build_rg(params: ModelParams, cutoff: float) -> Circuit:
    """Coarse-graining circuit on ``n`` qubits.

    Fourier transform, fswap reordering of the low modes onto qubits
    ``0..m-1`` (with sign fixes) and an ``m``-point inverse Fourier transform
    on that block. Tracing out qubits ``m..n-1`` afterwards discards the
    modes above the cutoff.
    """
    n = params.n
    _require_power_of_two(n)
    m = kept_count(n, cutoff)
    target = rg_layout(n, m).labels
    c = build_fourier(n) + momentum_reorder_network(MomentumLayout.canonical(n), target)
    _append_phase_fixes(c, target)
    c.extend(build_fourier(m).inverse())
    return c


def coarse_grain(state: StateVector, params: ModelParams, cutoff: float) -> DensityMatrix:
    """Reduced state of the kept block after :func:`build_rg`."""
    if state.num_qubits != params.n:
        raise ValueError("state size does not match params")
    m = kept_count(params.n, cutoff)
    out = apply_circuit(state, build_rg(params, cutoff))
    return partial_trace(out, range(m))


def build_laplacian(params: ModelParams, beta: float | None = None) -> Circuit:
    """Product state with amplitudes ``e^{-beta E / 2} / sqrt(Z)`` in the energy basis.

    ``L(b, w)|0>`` has occupied-to-empty amplitude ratio ``e^{-b w}``, so each
    energy-basis qubit gets ``L(beta / 2, w_q)``.
    """
    beta = params.beta if beta is None else beta
    if beta < 0:
        raise ValueError("beta must be >= 0")
    c = Circuit(params.n)
    for q, w in enumerate(energy_frequencies(params)):
        c.add("laplace", q, params=(beta / 2, w))
    return c


def build_tfd(params: ModelParams, beta: float | None = None) -> Circuit:
    """Thermofield double on ``2n`` qubits in the energy basis.

    Qubits ``0..n-1`` are the L copy, ``n..2n-1`` the R copy. The Laplacian
    state is prepared on L and copied to R with CNOTs, giving
    ``sum_E sqrt(e^{-beta E}/Z) |E>_L |E>_R``.
    """
    n = params.n
    c = Circuit(2 * n)
    c.extend(build_laplacian(params, beta))
    for q in range(n):
        c.add("cnot", q, n + q)
    return c
