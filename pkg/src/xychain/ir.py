"""Circuit intermediate representation and its text serialization.

A :class:`Circuit` is an ordered list of :class:`GateOp` records; the first
op acts first. Ops refer to gates by kind name (see ``gates.GATE_KINDS``) so
a circuit can be written to and read back from a plain text netlist::

    qubits 4
    fourier 0.25 0 1
    fswap 1 2
    bog_dg 2.356194490192345 2 3
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .gates import GATE_KINDS, SELF_INVERSE, gate_matrix

__all__ = ["GateOp", "Circuit", "CircuitParseError"]


class CircuitParseError(ValueError):
    """Malformed circuit text."""


@dataclass(frozen=True)
class GateOp:
    """A named gate on an ordered tuple of target qubits.

    ``targets[0]`` is the more significant slot of a two-qubit gate.
    ``adjoint`` marks the Hermitian conjugate of the named gate.
    """

    kind: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()
    adjoint: bool = False

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        nparams, arity, _ = GATE_KINDS[self.kind]
        targets = tuple(int(q) for q in self.targets)
        params = tuple(float(x) for x in self.params)
        if len(targets) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubits, got {targets}")
        if len(set(targets)) != arity or min(targets) < 0:
            raise ValueError(f"invalid targets {targets} for {self.kind}")
        if len(params) != nparams:
            raise ValueError(f"{self.kind} takes {nparams} parameters, got {params}")
        if not all(np.isfinite(params)):
            raise ValueError(f"non-finite parameter in {params}")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "params", params)

    def matrix(self) -> np.ndarray:
        m = gate_matrix(self.kind, self.params)
        return m.conj().T if self.adjoint else m

    def inverse(self) -> "GateOp":
        if self.kind in SELF_INVERSE:
            return self
        return GateOp(self.kind, self.targets, self.params, not self.adjoint)

    def remap(self, mapping: Mapping[int, int] | Sequence[int]) -> "GateOp":
        return GateOp(
            self.kind, tuple(mapping[q] for q in self.targets), self.params, self.adjoint
        )

    def to_text(self) -> str:
        name = self.kind + ("_dg" if self.adjoint else "")
        fields = [name, *(repr(x) for x in self.params), *(str(q) for q in self.targets)]
        return " ".join(fields)


@dataclass
class Circuit:
    """Ordered gate list on ``num_qubits`` qubits."""

    num_qubits: int
    ops: list[GateOp] = field(default_factory=list)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        ops, self.ops = list(self.ops), []
        for op in ops:
            self.append(op)

    def append(self, op: GateOp) -> "Circuit":
        if max(op.targets) >= self.num_qubits:
            raise IndexError(
                f"{op.kind} targets {op.targets} outside {self.num_qubits} qubits"
            )
        self.ops.append(op)
        return self

    def add(self, kind: str, *targets: int, params: Sequence[float] = (), adjoint: bool = False) -> "Circuit":
        return self.append(GateOp(kind, tuple(targets), tuple(params), adjoint))

    def extend(self, other: "Circuit | Iterable[GateOp]", offset: int = 0) -> "Circuit":
        """Append ops of ``other``, shifting its qubit indices by ``offset``."""
        for op in other:
            if offset:
                op = GateOp(op.kind, tuple(q + offset for q in op.targets), op.params, op.adjoint)
            self.append(op)
        return self

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [op.inverse() for op in reversed(self.ops)])

    def remap(self, mapping: Mapping[int, int] | Sequence[int], num_qubits: int | None = None) -> "Circuit":
        """Relabel qubits: ``q -> mapping[q]``."""
        size = self.num_qubits if num_qubits is None else num_qubits
        return Circuit(size, [op.remap(mapping) for op in self.ops])

    def count(self, kind: str | None = None) -> int:
        if kind is None:
            return len(self.ops)
        return sum(op.kind == kind for op in self.ops)

    def __iter__(self) -> Iterator[GateOp]:
        return iter(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        out = Circuit(max(self.num_qubits, other.num_qubits), list(self.ops))
        return out.extend(other)

    def to_text(self) -> str:
        lines = [f"qubits {self.num_qubits}"]
        lines += [op.to_text() for op in self.ops]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        circuit = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                if circuit is None:
                    if fields[0] != "qubits" or len(fields) != 2:
                        raise CircuitParseError("first statement must be 'qubits <n>'")
                    circuit = cls(int(fields[1]))
                    continue
                name, rest = fields[0], fields[1:]
                adjoint = name.endswith("_dg")
                kind = name[:-3] if adjoint else name
                if kind not in GATE_KINDS:
                    raise CircuitParseError(f"unknown gate {name!r}")
                nparams, arity, _ = GATE_KINDS[kind]
                if len(rest) != nparams + arity:
                    raise CircuitParseError(
                        f"{kind} expects {nparams} params and {arity} targets"
                    )
                params = tuple(float(x) for x in rest[:nparams])
                targets = tuple(int(x) for x in rest[nparams:])
                circuit.append(GateOp(kind, targets, params, adjoint))
            except CircuitParseError as exc:
                raise CircuitParseError(f"line {lineno}: {exc}") from None
            except (ValueError, IndexError) as exc:
                raise CircuitParseError(f"line {lineno}: {exc}") from None
        if circuit is None:
            raise CircuitParseError("empty circuit text")
        return circuit
