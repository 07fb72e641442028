"""Dense statevector and density-matrix kernels.

Bit ordering: qubit 0 is the most significant bit of the amplitude index, so
the ket ``|s_0 s_1 ... s_{n-1}>`` reads left to right as qubit 0, 1, ...

Gate application works on a view of the amplitude array reshaped to
``(2,) * n + batch``, so the same kernel evolves a single state or a stack of
columns (used to assemble full circuit unitaries).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .tolerances import TOL

__all__ = [
    "StateVector",
    "DensityMatrix",
    "ValidationError",
    "NumericError",
    "basis_state",
    "check_unitary",
    "apply_gate",
    "apply_one_qubit",
    "apply_two_qubit",
    "apply_circuit",
    "expectation_pauli",
    "partial_trace",
    "von_neumann_entropy",
    "purity",
    "trace_distance",
    "circuit_to_unitary",
    "hermitian_eigensystem",
    "jacobi_eigensystem",
]

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ValidationError(ValueError):
    """An input violates a structural invariant (unitarity, Hermiticity, ...)."""


class NumericError(ArithmeticError):
    """An iterative routine failed to converge."""


@dataclass(frozen=True)
class StateVector:
    """Pure state of ``num_qubits`` qubits.

    Parameters
    ----------
    num_qubits : int
        Number of qubits, at least 1.
    amplitudes : ndarray
        Complex array of length ``2**num_qubits``.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if int(self.num_qubits) < 1:
            raise ValueError("num_qubits must be >= 1")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.num_qubits:
            raise ValueError(
                f"expected {2 ** self.num_qubits} amplitudes, got {amps.size}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.num_qubits, self.amplitudes / nrm)

    def overlap(self, other: "StateVector") -> complex:
        """Return ``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(
            self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj())
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state of ``num_qubits`` qubits.

    Construction validates Hermiticity and unit trace; positivity is checked
    lazily by :meth:`validate` because it needs a diagonalization.
    """

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        dim = 2 ** self.num_qubits
        if rho.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > TOL.hermitian:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > TOL.trace:
            raise ValidationError(f"density matrix trace {np.trace(rho).real} != 1")
        object.__setattr__(self, "entries", rho)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def validate(self) -> "DensityMatrix":
        """Check positive semidefiniteness and return ``self``."""
        if self.eigenvalues()[0] < -TOL.psd:
            raise ValidationError("density matrix has a negative eigenvalue")
        return self


def basis_state(num_qubits: int, bits: int | str | Sequence[int]) -> StateVector:
    """Computational basis state.

    ``bits`` may be the integer index, a bit string such as ``"0110"`` or a
    sequence of occupied qubit indices (when given as a list or tuple).
    """
    if isinstance(bits, str):
        if len(bits) != num_qubits or set(bits) - {"0", "1"}:
            raise ValueError(f"bad bit string {bits!r}")
        index = int(bits, 2)
    elif isinstance(bits, (list, tuple)):
        index = 0
        for q in bits:
            _check_qubit(q, num_qubits)
            index |= 1 << (num_qubits - 1 - q)
    else:
        index = int(bits)
    if not 0 <= index < 2 ** num_qubits:
        raise ValueError(f"basis index {index} out of range")
    amps = np.zeros(2 ** num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise IndexError(f"qubit {q} out of range for {n} qubits")


def check_unitary(gate: np.ndarray, tol: float = TOL.unitary) -> np.ndarray:
    """Return ``gate`` as a complex array, raising if it is not unitary."""
    g = np.asarray(gate, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValidationError(f"gate must be square, got shape {g.shape}")
    dev = np.max(np.abs(g.conj().T @ g - np.eye(g.shape[0])))
    if dev > tol:
        raise ValidationError(f"gate is not unitary (deviation {dev:.3g})")
    return g


def apply_gate(
    amplitudes: np.ndarray, gate: np.ndarray, targets: Sequence[int], n: int
) -> np.ndarray:
    """Apply a ``k``-qubit matrix to the given target slots.

    ``amplitudes`` has leading dimension ``2**n``; any trailing dimensions are
    treated as a batch. ``targets[0]`` is the most significant slot of the
    gate. No unitarity check is done here.
    """
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"repeated target in {tuple(targets)}")
    for q in targets:
        _check_qubit(q, n)
    batch = amplitudes.shape[1:]
    psi = amplitudes.reshape((2,) * n + batch)
    g = np.asarray(gate, dtype=complex).reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the gate's output axes first; move them back in place.
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(amplitudes.shape)


def apply_one_qubit(state: StateVector, gate: np.ndarray, q: int) -> StateVector:
    """Apply a 2x2 unitary to qubit ``q``."""
    g = check_unitary(gate)
    if g.shape != (2, 2):
        raise ValidationError("one-qubit gate must be 2x2")
    _check_qubit(q, state.num_qubits)
    return StateVector(
        state.num_qubits, apply_gate(state.amplitudes, g, (q,), state.num_qubits)
    )


def apply_two_qubit(
    state: StateVector, gate: np.ndarray, q1: int, q2: int
) -> StateVector:
    """Apply a 4x4 unitary with ``q1`` as the more significant slot."""
    if q1 == q2:
        raise ValueError("two-qubit gate needs distinct qubits")
    g = check_unitary(gate)
    if g.shape != (4, 4):
        raise ValidationError("two-qubit gate must be 4x4")
    _check_qubit(q1, state.num_qubits)
    _check_qubit(q2, state.num_qubits)
    return StateVector(
        state.num_qubits, apply_gate(state.amplitudes, g, (q1, q2), state.num_qubits)
    )


def apply_circuit(state: StateVector, circuit) -> StateVector:
    """Run every operation of ``circuit`` on ``state`` in order."""
    n = state.num_qubits
    if circuit.num_qubits > n:
        raise ValueError(
            f"circuit acts on {circuit.num_qubits} qubits, state has {n}"
        )
    amps = state.amplitudes
    for op in circuit:
        amps = apply_gate(amps, op.matrix(), op.targets, n)
    return StateVector(n, amps)


def circuit_to_unitary(circuit, n: int | None = None) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of ``circuit`` (later gates act last)."""
    n = circuit.num_qubits if n is None else n
    for op in circuit:
        for q in op.targets:
            _check_qubit(q, n)
    u = np.eye(2 ** n, dtype=complex)
    for op in circuit:
        u = apply_gate(u, op.matrix(), op.targets, n)
    return u


def expectation_pauli(
    state: StateVector, ops: Iterable[tuple[int, str]]
) -> float:
    """Expectation value of a Pauli string given as ``[(site, axis), ...]``."""
    ops = list(ops)
    sites = [s for s, _ in ops]
    if len(set(sites)) != len(sites):
        raise ValueError("duplicate site in Pauli string")
    n = state.num_qubits
    amps = state.amplitudes
    for site, axis in ops:
        axis = axis.upper()
        if axis not in ("X", "Y", "Z"):
            raise ValueError(f"unknown Pauli axis {axis!r}")
        amps = apply_gate(amps, PAULI[axis], (site,), n)
    value = np.vdot(state.amplitudes, amps)
    if abs(value.imag) > TOL.imag:
        raise ValidationError(f"Pauli expectation has imaginary part {value.imag}")
    return float(value.real)


def partial_trace(source, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (basis order follows ``keep``)."""
    keep = list(keep)
    n = source.num_qubits
    if not keep:
        raise ValueError("keep must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError("duplicate qubit in keep")
    for q in keep:
        _check_qubit(q, n)
    rest = [q for q in range(n) if q not in keep]
    k = len(keep)
    if isinstance(source, StateVector):
        psi = source.amplitudes.reshape((2,) * n).transpose(keep + rest)
        a = psi.reshape(2 ** k, 2 ** (n - k))
        rho = a @ a.conj().T
    else:
        t = source.entries.reshape((2,) * (2 * n))
        t = t.transpose(keep + rest + [n + q for q in keep] + [n + q for q in rest])
        t = t.reshape(2 ** k, 2 ** (n - k), 2 ** k, 2 ** (n - k))
        rho = np.einsum("ajbj->ab", t)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(k, rho)


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """Entropy ``-Tr rho log2 rho`` in bits."""
    if isinstance(rho, DensityMatrix):
        m, mat = rho.num_qubits, rho.entries
    else:
        mat = np.asarray(rho, dtype=complex)
        m = int(np.log2(mat.shape[0]))
    evals, _ = hermitian_eigensystem(mat, vectors=False)
    p = evals[evals > TOL.eig_cutoff]
    s = float(-np.sum(p * np.log2(p)))
    return min(max(s, 0.0), float(m))


def purity(rho: DensityMatrix) -> float:
    """``Tr rho^2``."""
    return float(np.real(np.vdot(rho.entries, rho.entries)))


def trace_distance(rho: DensityMatrix | np.ndarray, sigma: DensityMatrix | np.ndarray) -> float:
    """Half the sum of absolute eigenvalues of ``rho - sigma``."""
    a = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    b = sigma.entries if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    diff = a - b
    evals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.sum(np.abs(evals)))


def _require_hermitian(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if np.max(np.abs(a - a.conj().T), initial=0.0) > TOL.hermitian * scale:
        raise ValidationError("matrix is not Hermitian")
    return 0.5 * (a + a.conj().T)


def hermitian_eigensystem(
    matrix: np.ndarray, *, method: str = "lapack", vectors: bool = True
):
    """Eigen-decomposition of a Hermitian matrix.

    Parameters
    ----------
    matrix : array_like
        Hermitian within ``TOL.hermitian`` (relative to its largest entry).
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"jacobi"`` runs the cyclic
        complex Jacobi iteration of :func:`jacobi_eigensystem`.
    vectors : bool
        When False only eigenvalues are computed and ``None`` is returned in
        place of the eigenvector matrix.

    Returns
    -------
    evals : ndarray
        Real eigenvalues in ascending order.
    evecs : ndarray or None
        Columns are the matching orthonormal eigenvectors.

    Raises
    ------
    ValidationError
        If the input is not Hermitian.
    NumericError
        If the residual check fails or Jacobi does not converge.
    """
    a = _require_hermitian(matrix)
    if method == "jacobi":
        evals, evecs = jacobi_eigensystem(a)
    elif method == "lapack":
        if not vectors:
            return np.linalg.eigvalsh(a), None
        evals, evecs = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown method {method!r}")
    scale = max(1.0, float(np.linalg.norm(a, ord=np.inf)))
    resid = np.max(np.abs(a @ evecs - evecs * evals), initial=0.0)
    if resid > TOL.eig_residual * scale:
        raise NumericError(f"eigen-residual {resid:.3g} too large")
    return evals, (evecs if vectors else None)


def jacobi_eigensystem(a: np.ndarray, max_sweeps: int = 100):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the real symmetric Jacobi rotation, so the pivot is annihilated
    exactly. Intended for modest dimensions; cost is ``O(d^3)`` per sweep.
    """
    a = np.array(a, dtype=complex)
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= TOL.jacobi_offdiag * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2 * mag)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # columns p, q of the rotation; J^dagger A J kills a[p, q]
                jp = c, -s * np.conj(phase)
                jq = s * phase, c
                colp = a[:, p] * jp[0] + a[:, q] * jp[1]
                colq = a[:, p] * jq[0] + a[:, q] * jq[1]
                a[:, p], a[:, q] = colp, colq
                rowp = np.conj(jp[0]) * a[p, :] + np.conj(jp[1]) * a[q, :]
                rowq = np.conj(jq[0]) * a[p, :] + np.conj(jq[1]) * a[q, :]
                a[p, :], a[q, :] = rowp, rowq
                vp = v[:, p] * jp[0] + v[:, q] * jp[1]
                vq = v[:, p] * jq[0] + v[:, q] * jq[1]
                v[:, p], v[:, q] = vp, vq
    else:
        raise NumericError(f"Jacobi did not converge in {max_sweeps} sweeps")
    evals = np.real(np.diag(a))
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]
