"""Gate zoo: Majorana gamma matrices, the two commuting su(2) algebras on a
qubit pair, their rotations in dense and decomposed form, and the named
fermionic two-qubit gates.

Two-qubit matrices use the first target as the more significant slot, i.e.
basis order ``|00>, |01>, |10>, |11>`` with the left bit on the upper wire.
``|1>`` is an occupied fermion mode.
"""

from __future__ import annotations

from functools import reduce
from typing import Callable

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
SDG = S.conj().T
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

AXES = ("X", "Y", "Z")
SIGNS = ("+", "-")


def kron(*mats: np.ndarray) -> np.ndarray:
    return reduce(np.kron, mats)


def rz(phi: float) -> np.ndarray:
    """``exp(-i phi Z / 2)``."""
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def phase(phi: float) -> np.ndarray:
    """``diag(1, e^{i phi})``: phase on the occupied state."""
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


def gamma_matrices(n: int) -> list[np.ndarray]:
    """Majorana operators on ``n`` qubits with ``{g_i, g_j} = 2 delta_ij``.

    The two-qubit set is ``(I X, I Y, X Z, Y Z)``. Larger sets put the
    smaller set on the last ``n - 2`` qubits and append the two-qubit set on
    the first pair, padded with a ``Z`` string over the remaining qubits.
    """
    if n < 2 or n % 2:
        raise ValueError(f"gamma matrices need an even qubit count >= 2, got {n}")
    base = [kron(I2, X), kron(I2, Y), kron(X, Z), kron(Y, Z)]
    if n == 2:
        return base
    inner = gamma_matrices(n - 2)
    zstring = kron(*([Z] * (n - 2)))
    eye4 = np.eye(4, dtype=complex)
    return [np.kron(eye4, g) for g in inner] + [np.kron(g, zstring) for g in base]


def _parse_axis(axis: str, sign: str | int) -> tuple[str, str]:
    axis = axis.upper()
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    if sign in (1, "+", "p", "plus"):
        return axis, "+"
    if sign in (-1, "-", "m", "minus"):
        return axis, "-"
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def sigma_pm(axis: str, sign: str | int) -> np.ndarray:
    """Generator of one of the two commuting su(2) algebras on a qubit pair.

    ``+`` generators act on ``span{|00>, |11>}`` (they change the fermion
    number by two), ``-`` generators on ``span{|01>, |10>}``.
    """
    axis, sign = _parse_axis(axis, sign)
    s = 1.0 if sign == "+" else -1.0
    if axis == "X":
        return 0.5 * (-kron(X, X) + s * kron(Y, Y))
    if axis == "Y":
        return 0.5 * (kron(Y, X) + s * kron(X, Y))
    return 0.5 * (kron(Z, I2) + s * kron(I2, Z))


def u_pm_dense(axis: str, sign: str | int, theta: float) -> np.ndarray:
    """``exp(-i theta Sigma / 2)`` in closed form.

    ``Sigma`` has eigenvalues in ``{-1, 0, 1}``, so ``Sigma^2`` is the
    projector onto its active block and the exponential is quadratic in it.
    """
    sig = sigma_pm(axis, sign)
    proj = sig @ sig
    return (
        np.eye(4)
        - proj
        + np.cos(theta / 2) * proj
        - 1j * np.sin(theta / 2) * sig
    )


def bog_gate(theta: float) -> np.ndarray:
    """Bogoliubov rotation of a ``(p, -p)`` mode pair."""
    c, s = np.cos(theta / 2), 1j * np.sin(theta / 2)
    return np.array(
        [[c, 0, 0, s], [0, 1, 0, 0], [0, 0, 1, 0], [s, 0, 0, c]], dtype=complex
    )


def phase_gate_r(theta: float) -> np.ndarray:
    """``e^{i theta/2} U_Z^+(theta) U_Z^-(theta)`` = phase on an occupied upper wire."""
    return (
        np.exp(0.5j * theta)
        * u_pm_dense("Z", "+", theta)
        @ u_pm_dense("Z", "-", theta)
    )


def fourier_gate(p: float) -> np.ndarray:
    """Two-mode Fourier butterfly: ``U_Y^-(pi/2)`` followed by ``R(2 pi p + pi)``."""
    return phase_gate_r(2 * np.pi * p + np.pi) @ u_pm_dense("Y", "-", np.pi / 2)


def fswap_gate() -> np.ndarray:
    """Fermionic swap: ``U_Y^-(pi)`` followed by ``R(pi)``."""
    return phase_gate_r(np.pi) @ u_pm_dense("Y", "-", np.pi)


def laplace_gate(beta: float, w: float) -> np.ndarray:
    """``(e^{-beta w/2} X + e^{beta w/2} Z) / norm``.

    Applied to ``|0>`` it gives ``(|0> + e^{-beta w} |1>) / norm``, so the
    excited state is suppressed. Evaluated through ``r = e^{-beta w}`` so
    large ``beta w`` does not overflow.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    x = beta * w
    if x >= 0:
        r = np.exp(-x)
        return (r * X + Z) / np.sqrt(r * r + 1)
    r = np.exp(x)
    return (X + r * Z) / np.sqrt(r * r + 1)


def u_pm_circuit(axis: str, sign: str | int, theta: float):
    """Decomposition of ``U^{pm}_{axis}(theta)`` into H, S, S^dagger, CNOT and rz.

    The X and Y rotations are products of two commuting two-body pieces.
    Each piece is a CNOT-conjugated ``rz`` on the lower wire (an ``exp(-i a
    Z Z / 2)`` rotation) dressed by Hadamard and S basis changes. The Z
    rotation needs only single-qubit ``rz`` gates. The result equals
    :func:`u_pm_dense` exactly, without a global phase.
    """
    from .ir import Circuit

    axis, sign = _parse_axis(axis, sign)
    s = 1.0 if sign == "+" else -1.0
    c = Circuit(2)
    if axis == "Z":
        c.add("rz", 0, params=(theta / 2,))
        c.add("rz", 1, params=(s * theta / 2,))
        return c

    def zz(angle):
        c.add("cnot", 0, 1)
        c.add("rz", 1, params=(angle,))
        c.add("cnot", 0, 1)

    def layer(upper, lower):
        for kind in upper:
            c.add(kind, 0)
        for kind in lower:
            c.add(kind, 1)

    if axis == "X":
        # Y Y piece (S then H maps Z to -Y on each wire), then X X piece
        layer(("s", "h"), ("s", "h"))
        zz(s * theta / 2)
        layer(("h", "sdg", "h"), ("h", "sdg", "h"))
        zz(-theta / 2)
        layer(("h",), ("h",))
    else:
        # X (-Y) piece, then (-Y) X piece
        layer(("h",), ("s", "h"))
        zz(-s * theta / 2)
        layer(("h", "s", "h"), ("h", "sdg", "h"))
        zz(-theta / 2)
        layer(("h", "sdg"), ("h",))
    return c


# kind -> (number of real parameters, arity, matrix factory)
GATE_KINDS: dict[str, tuple[int, int, Callable[..., np.ndarray]]] = {
    "x": (0, 1, lambda: X),
    "y": (0, 1, lambda: Y),
    "z": (0, 1, lambda: Z),
    "h": (0, 1, lambda: H),
    "s": (0, 1, lambda: S),
    "sdg": (0, 1, lambda: SDG),
    "rz": (1, 1, rz),
    "phase": (1, 1, phase),
    "laplace": (2, 1, laplace_gate),
    "cnot": (0, 2, lambda: CNOT),
    "bog": (1, 2, bog_gate),
    "fourier": (1, 2, fourier_gate),
    "fswap": (0, 2, fswap_gate),
    "phase_r": (1, 2, phase_gate_r),
}
for _axis in AXES:
    for _sign, _tag in (("+", "p"), ("-", "m")):
        GATE_KINDS[f"u{_axis.lower()}{_tag}"] = (
            1,
            2,
            (lambda a, s: lambda theta: u_pm_dense(a, s, theta))(_axis, _sign),
        )

# kinds equal to their own inverse
SELF_INVERSE = frozenset({"x", "y", "z", "h", "cnot", "fswap", "laplace"})


def gate_matrix(kind: str, params: tuple = ()) -> np.ndarray:
    """Matrix of a named gate."""
    try:
        nparams, _, factory = GATE_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown gate kind {kind!r}") from None
    if len(params) != nparams:
        raise ValueError(f"{kind} takes {nparams} parameters, got {len(params)}")
    return np.asarray(factory(*params), dtype=complex)
