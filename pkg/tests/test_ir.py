import numpy as np
import pytest

from xychain.circuits import build_udis
from xychain.ir import Circuit, CircuitParseError, GateOp
from xychain.model import ModelParams
from xychain.sim import circuit_to_unitary


class TestGateOp:
    def test_arity_checked(self):
        with pytest.raises(ValueError):
            GateOp("cnot", (0,))

    def test_param_count_checked(self):
        with pytest.raises(ValueError):
            GateOp("bog", (0, 1))

    def test_nonfinite_param(self):
        with pytest.raises(ValueError):
            GateOp("rz", (0,), (np.inf,))

    def test_duplicate_targets(self):
        with pytest.raises(ValueError):
            GateOp("fswap", (1, 1))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            GateOp("toffoli", (0, 1))

    def test_adjoint_matrix(self):
        op = GateOp("fourier", (0, 1), (0.125,))
        np.testing.assert_allclose(op.inverse().matrix() @ op.matrix(), np.eye(4), atol=1e-12)

    def test_self_inverse_kinds_keep_name(self):
        assert GateOp("fswap", (0, 1)).inverse().to_text() == "fswap 0 1"


class TestCircuit:
    def test_out_of_range(self):
        with pytest.raises(IndexError):
            Circuit(2).add("x", 2)

    def test_inverse(self):
        c = build_udis(ModelParams(4, 0.7, 0.4))
        u = circuit_to_unitary(c)
        np.testing.assert_allclose(circuit_to_unitary(c.inverse()), u.conj().T, atol=1e-12)

    def test_extend_with_offset(self):
        c = Circuit(4).extend(Circuit(2).add("cnot", 0, 1), offset=2)
        assert c.ops[0].targets == (2, 3)

    def test_remap(self):
        c = Circuit(3).add("cnot", 0, 2).remap([2, 1, 0])
        assert c.ops[0].targets == (2, 0)


class TestSerialization:
    def test_format(self):
        c = Circuit(3).add("fourier", 0, 1, params=(0.125,)).add("fswap", 1, 2)
        c.add("bog", 1, 2, params=(2.5,), adjoint=True)
        assert c.to_text() == "qubits 3\nfourier 0.125 0 1\nfswap 1 2\nbog_dg 2.5 1 2\n"

    def test_round_trip_is_exact(self):
        c = build_udis(ModelParams(8, 1.3, 0.6))
        back = Circuit.from_text(c.to_text())
        assert back.to_text() == c.to_text()
        assert back.ops == c.ops
        np.testing.assert_array_equal(circuit_to_unitary(back), circuit_to_unitary(c))

    def test_comments_and_blank_lines(self):
        c = Circuit.from_text("# header\n\nqubits 2\nh 0  # hadamard\ncnot 0 1\n")
        assert [op.kind for op in c] == ["h", "cnot"]

    @pytest.mark.parametrize(
        "text",
        ["", "h 0\n", "qubits 2\nfoo 0\n", "qubits 2\ncnot 0\n", "qubits 2\nrz x 0\n", "qubits 2\nh 5\n"],
    )
    def test_malformed(self, text):
        with pytest.raises(CircuitParseError):
            Circuit.from_text(text)
