"""XY chain parameters, momentum bookkeeping, dispersion and dense oracles.

Fermion conventions: ``|1>`` on qubit ``j`` is an occupied site,
``c_j = Z_0 ... Z_{j-1} sigma^-_j`` and momentum modes are
``c~_p = n^{-1/2} sum_j e^{2 pi i p j} c_j`` on the grid ``p = k/n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .sim import StateVector

__all__ = [
    "CapacityError",
    "ModelParams",
    "MomentumLayout",
    "dispersion",
    "bogoliubov_angle",
    "single_particle_energy",
    "ground_energy",
    "annihilation_operators",
    "build_hamiltonian",
    "exact_spectrum",
    "momentum_mode",
    "apply_creation",
    "ground_state",
    "fixed_mode_filled",
    "signed_bogoliubov_angle",
]

MAX_DENSE_SITES = 12
MAX_ENUMERATION_SITES = 20
W_ZERO = 1e-12


class CapacityError(ValueError):
    """Requested size exceeds what the dense oracles support."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the periodic XY chain.

    Parameters
    ----------
    n : int
        Number of sites, even and at least 2. Circuit builders additionally
        require a power of two.
    lam : float
        Coupling ratio between the spin interaction and the transverse field.
    gamma : float
        Anisotropy; 1 is the transverse-field Ising chain, 0 the XX chain.
    beta : float
        Inverse temperature, used as the default by thermal routines.
    """

    n: int
    lam: float = 1.0
    gamma: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 2 or self.n % 2:
            raise ValueError(f"n must be even and >= 2, got {self.n}")
        for name in ("lam", "gamma", "beta"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.beta < 0:
            raise ValueError("beta must be >= 0")

    @property
    def is_power_of_two(self) -> bool:
        return self.n & (self.n - 1) == 0

    def with_n(self, n: int) -> "ModelParams":
        return ModelParams(n, self.lam, self.gamma, self.beta)

    @property
    def momenta(self) -> np.ndarray:
        return np.arange(self.n) / self.n


@dataclass(frozen=True)
class MomentumLayout:
    """Assignment of momentum labels ``k`` (``p = k/n``) to qubits.

    ``labels[q]`` is the momentum label stored on qubit ``q``.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(k) for k in self.labels)
        if sorted(labels) != list(range(len(labels))):
            raise ValueError(f"labels {labels} are not a permutation of 0..n-1")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def canonical(cls, n: int) -> "MomentumLayout":
        """``(1, n-1, 2, n-2, ..., n/2-1, n/2+1, 0, n/2)``.

        Opposite momenta share the adjacent pair ``(2j, 2j+1)`` with the
        positive momentum on the even qubit; the two self-paired modes sit on
        the last pair.
        """
        if n < 2 or n % 2:
            raise ValueError(f"n must be even and >= 2, got {n}")
        labels = []
        for k in range(1, n // 2):
            labels += [k, n - k]
        return cls(tuple(labels + [0, n // 2]))

    def pair(self, k: int) -> int:
        return (self.n - k) % self.n

    def qubit_of(self, k: int) -> int:
        return self.labels.index(k)

    @property
    def qubit_of_k(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for q, k in enumerate(self.labels):
            inv[k] = q
        return tuple(inv)


def _angles(params: ModelParams, p):
    phi = 2 * np.pi * np.asarray(p, dtype=float)
    return -1 + params.lam * np.cos(phi), params.lam * params.gamma * np.sin(phi)


def single_particle_energy(params: ModelParams, p):
    """Diagonal kinetic term ``eps_p = -1 + lam cos(2 pi p)``."""
    return _angles(params, p)[0]


def dispersion(params: ModelParams, p):
    """Quasiparticle energy ``w_p = |(-1 + lam cos 2 pi p) + i lam gamma sin 2 pi p|``."""
    eps, delta = _angles(params, p)
    return np.hypot(eps, delta)


def bogoliubov_angle(params: ModelParams, p):
    """``arccos(eps_p / w_p)`` in ``[0, pi]``, with ``pi`` where ``w_p`` vanishes."""
    eps, delta = _angles(params, p)
    w = np.hypot(eps, delta)
    safe = np.where(w > W_ZERO, w, 1.0)
    theta = np.arccos(np.clip(eps / safe, -1.0, 1.0))
    theta = np.where(w > W_ZERO, theta, np.pi)
    return theta if theta.ndim else float(theta)


def ground_energy(params: ModelParams) -> float:
    """Ground energy of the unshifted fermionic Hamiltonian."""
    p = params.momenta
    return float(np.sum(single_particle_energy(params, p) - dispersion(params, p)) / 2)


def annihilation_operators(n: int) -> list[sp.csr_matrix]:
    """Sparse Jordan-Wigner operators ``c_0, ..., c_{n-1}``."""
    zs = sp.csr_matrix(np.diag([1.0, -1.0]))
    low = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    eye = sp.identity(2, format="csr")
    ops = []
    for j in range(n):
        factors = [zs] * j + [low] + [eye] * (n - j - 1)
        ops.append(reduce(lambda a, b: sp.kron(a, b, format="csr"), factors))
    return ops


def _pauli_string(n: int, terms: dict[int, np.ndarray]) -> sp.csr_matrix:
    eye = sp.identity(2, format="csr")
    factors = [sp.csr_matrix(terms[q]) if q in terms else eye for q in range(n)]
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)


def build_hamiltonian(
    params: ModelParams,
    form: str = "fermionic",
    boundary: str = "periodic",
    shift: bool = True,
) -> np.ndarray:
    """Dense Hamiltonian of the chain.

    Parameters
    ----------
    params : ModelParams
    form : {"fermionic", "pauli"}
        ``"fermionic"`` is
        ``sum_j [lam/2 (c+_j c_{j+1} + h.c.) + lam gamma/2 (c+_j c+_{j+1} + h.c.)
        - c+_j c_j]`` with ``c_n = c_0``. ``"pauli"`` is
        ``sum_j [lam ((1+gamma)/2 X_j X_{j+1} + (1-gamma)/2 Y_j Y_{j+1})
        + Z_j - 1/2]`` with ``X_n = X_0``.
    boundary : {"periodic", "open"}
        Open drops the bond between sites ``n-1`` and ``0``.
    shift : bool
        For the periodic fermionic form, subtract the analytic ground energy
        so the spectrum starts at 0.
    """
    n = params.n
    if n > MAX_DENSE_SITES:
        raise CapacityError(f"dense Hamiltonian limited to n <= {MAX_DENSE_SITES}")
    if boundary not in ("periodic", "open"):
        raise ValueError(f"unknown boundary {boundary!r}")
    bonds = range(n if boundary == "periodic" else n - 1)
    lam, gam = params.lam, params.gamma
    dim = 2 ** n
    h = sp.csr_matrix((dim, dim), dtype=complex)
    if form == "fermionic":
        c = annihilation_operators(n)
        cd = [op.T.conj().tocsr() for op in c]
        for j in bonds:
            k = (j + 1) % n
            hop = cd[j] @ c[k]
            pair = cd[j] @ cd[k]
            h = h + 0.5 * lam * (hop + hop.T.conj()) + 0.5 * lam * gam * (pair + pair.T.conj())
        for j in range(n):
            h = h - cd[j] @ c[j]
        dense = h.toarray()
        if shift and boundary == "periodic":
            dense -= ground_energy(params) * np.eye(dim)
    elif form == "pauli":
        X = np.array([[0, 1], [1, 0]], dtype=complex)
        Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
        Z = np.diag([1.0, -1.0]).astype(complex)
        for j in bonds:
            k = (j + 1) % n
            h = h + lam * (0.5 * (1 + gam) * _pauli_string(n, {j: X}) @ _pauli_string(n, {k: X})
                           + 0.5 * (1 - gam) * _pauli_string(n, {j: Y}) @ _pauli_string(n, {k: Y}))
        for j in range(n):
            h = h + _pauli_string(n, {j: Z})
        dense = h.toarray() - 0.5 * n * np.eye(dim)
    else:
        raise ValueError(f"unknown form {form!r}")
    return 0.5 * (dense + dense.conj().T)


def exact_spectrum(params: ModelParams) -> np.ndarray:
    """All ``2**n`` sums of subsets of ``{w_{k/n}}``, sorted ascending."""
    if params.n > MAX_ENUMERATION_SITES:
        raise CapacityError(f"spectrum enumeration limited to n <= {MAX_ENUMERATION_SITES}")
    levels = np.zeros(1)
    for w in dispersion(params, params.momenta):
        levels = np.concatenate([levels, levels + w])
    return np.sort(levels)


def momentum_mode(n: int, k: int) -> np.ndarray:
    """Position coefficients ``u_j`` with ``c~+_{k/n} = sum_j u_j c+_j``."""
    return np.exp(-2j * np.pi * k * np.arange(n) / n) / np.sqrt(n)


def apply_creation(amplitudes: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Apply ``sum_j coeffs[j] c+_j`` to a state given by its amplitudes."""
    coeffs = np.asarray(coeffs)
    n = coeffs.size
    idx = np.arange(2 ** n)
    out = np.zeros_like(amplitudes, dtype=complex)
    for j, u in enumerate(coeffs):
        if u == 0:
            continue
        bit = n - 1 - j
        empty = idx[(idx >> bit) & 1 == 0]
        # Jordan-Wigner sign counts occupied sites with smaller index
        sign = 1 - 2 * (np.bitwise_count(empty >> (bit + 1)).astype(np.int64) & 1)
        out[empty | (1 << bit)] += u * sign * amplitudes[empty]
    return out


def ground_state(params: ModelParams) -> StateVector:
    """Ground state built directly in second quantization.

    Each pair ``(k, n-k)`` contributes ``cos(t/2) + i sin(t/2) c~+_k c~+_{n-k}``
    with the signed Bogoliubov angle ``t``; ``k = 0`` and ``k = n/2`` are
    filled when their kinetic energy is negative. Works for any even ``n``
    and is independent of the circuit constructions.
    """
    n = params.n
    if n > 16:
        raise CapacityError("ground_state limited to n <= 16")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    for k in (0, n // 2):
        if fixed_mode_filled(params, k):
            psi = apply_creation(psi, momentum_mode(n, k))
    for k in range(1, n // 2):
        t = signed_bogoliubov_angle(params, k / n)
        pair = apply_creation(apply_creation(psi, momentum_mode(n, n - k)), momentum_mode(n, k))
        psi = np.cos(t / 2) * psi + 1j * np.sin(t / 2) * pair
    return StateVector(n, psi / np.linalg.norm(psi))


def fixed_mode_filled(params: ModelParams, k: int) -> bool:
    """Whether the unpaired mode ``k`` (0 or n/2) is filled in the ground state.

    A zero-energy mode counts as filled, matching the ``theta = pi``
    convention at ``w = 0``.
    """
    return bool(single_particle_energy(params, k / params.n) <= 0)


def signed_bogoliubov_angle(params: ModelParams, p: float) -> float:
    """Bogoliubov angle of the pair whose first mode has momentum ``p``.

    Equal to :func:`bogoliubov_angle` when ``lam gamma sin(2 pi p) >= 0`` and
    to its negative otherwise, so the rotation lands on the ground state.
    """
    theta = bogoliubov_angle(params, p)
    _, delta = _angles(params, p)
    return float(-theta if delta < 0 else theta)
