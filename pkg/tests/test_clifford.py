"""Tests for Clifford maps and the gate registry."""

import numpy as np
import pytest

from stabilizer_ft.clifford import (
    CliffordMap,
    base_gate,
    canonical_gate_name,
    compose,
    invert,
    named_gate,
    parse_gate_text,
    random_clifford,
    single_qubit_cliffords,
    to_unitary,
)
from stabilizer_ft.exceptions import (
    FormatError,
    InvalidCliffordError,
    SizeLimitError,
    UnknownGateError,
)
from stabilizer_ft.pauli import PauliOperator, all_paulis
from tests.conftest import T_GATE_TEXT

NAMED_GATES = [
    "I", "X", "Y", "Z", "R", "P", "PDG", "Q", "QDG", "T", "TDG",
    "CNOT", "CZ", "SWAP", "T3", "G4", "G6",
]


class TestApply:
    """Images of single Paulis, with phases."""

    def test_hadamard_negates_y(self):
        assert str(base_gate("R").apply(PauliOperator.parse("Y"))) == "-Y"

    def test_phase_gate(self):
        assert str(base_gate("P").apply(PauliOperator.parse("X"))) == "iY"
        assert str(base_gate("P").apply(PauliOperator.parse("iY"))) == "-X"

    def test_t_cycles_the_axes(self):
        t = base_gate("T")
        assert str(t.apply(PauliOperator.parse("X"))) == "iY"
        assert str(t.apply(PauliOperator.parse("iY"))) == "Z"
        assert str(t.apply(PauliOperator.parse("Z"))) == "X"

    def test_g4_images(self):
        g4 = base_gate("G4")
        assert str(g4.apply(PauliOperator.parse("XIII"))) == "XXXI"
        assert str(g4.apply(PauliOperator.parse("IZII"))) == "IZZZ"

    def test_apply_is_a_homomorphism(self, rng):
        c = random_clifford(4, 11)
        for _ in range(50):
            a = PauliOperator(4, int(rng.integers(16)), int(rng.integers(16)), int(rng.integers(4)))
            b = PauliOperator(4, int(rng.integers(16)), int(rng.integers(16)), int(rng.integers(4)))
            assert c.apply(a * b) == c.apply(a) * c.apply(b)


class TestComposition:
    def test_hadamard_from_phase_gates(self):
        p, qdg, r = base_gate("P"), base_gate("QDG"), base_gate("R")
        assert compose(p, compose(qdg, p)) == r

    def test_t_from_p_and_qdg(self):
        assert compose(base_gate("P"), base_gate("QDG")) == base_gate("T")

    def test_t_squared(self):
        t = base_gate("T")
        assert compose(t, t) == base_gate("TDG")
        assert compose(t, compose(t, t)).is_identity()

    def test_then_is_compose_reversed(self):
        p, r = base_gate("P"), base_gate("R")
        assert p.then(r) == compose(r, p)

    def test_inverse(self):
        for name in NAMED_GATES:
            gate = base_gate(name)
            assert compose(gate, gate.inverse()).is_identity()
            assert compose(gate.inverse(), gate).is_identity()

    def test_random_inverse(self):
        for seed in range(20):
            c = random_clifford(5, seed)
            assert compose(invert(c), c).is_identity()

    def test_size_mismatch(self):
        with pytest.raises(InvalidCliffordError):
            compose(base_gate("R"), base_gate("CNOT"))

    def test_non_invertible(self):
        with pytest.raises(InvalidCliffordError):
            invert(CliffordMap.from_strings(["X"], ["X"]))


class TestValidation:
    @pytest.mark.parametrize("name", NAMED_GATES)
    def test_registry_is_valid(self, name):
        assert base_gate(name).validate() == []

    def test_commutation_violation(self):
        issues = CliffordMap.from_strings(["X"], ["X"]).validate()
        assert "Images of X1 and Z1 break the commutation relations" in issues

    def test_non_hermitian_image(self):
        c = CliffordMap.from_strings(["Y"], ["Z"])
        assert "Image of X1 (Y) is not Hermitian" in c.validate()
        with pytest.raises(InvalidCliffordError):
            c.require_valid()

    def test_shape(self):
        with pytest.raises(InvalidCliffordError):
            CliffordMap(2, (PauliOperator.parse("XI"),), (PauliOperator.parse("ZI"),))

    def test_random_cliffords_are_valid_and_seeded(self):
        for seed in range(10):
            c = random_clifford(4, seed)
            assert c.validate() == []
            assert c == random_clifford(4, seed)


class TestRegistry:
    @pytest.mark.parametrize(
        "alias,canonical",
        [("h", "R"), ("S", "P"), ("SDG", "PDG"), ("T2", "TDG"), ("cx", "CNOT"), ("g8", "G8")],
    )
    def test_aliases(self, alias, canonical):
        assert canonical_gate_name(alias) == canonical

    def test_unknown(self):
        with pytest.raises(UnknownGateError):
            canonical_gate_name("FOO")
        with pytest.raises(UnknownGateError):
            base_gate("G5")

    def test_embed(self):
        cnot = named_gate("CNOT", 3, [2, 0])
        assert str(cnot.apply(PauliOperator.parse("IIX"))) == "XIX"
        assert str(cnot.apply(PauliOperator.parse("ZII"))) == "ZIZ"
        assert str(cnot.apply(PauliOperator.parse("IXI"))) == "IXI"

    def test_embed_errors(self):
        with pytest.raises(InvalidCliffordError):
            named_gate("CNOT", 3, [1, 1])
        with pytest.raises(InvalidCliffordError):
            named_gate("CNOT", 3, [0])
        with pytest.raises(InvalidCliffordError):
            named_gate("R", 2, [2])

    def test_permutation_is_swap(self):
        assert CliffordMap.permutation([1, 0]) == base_gate("SWAP")
        with pytest.raises(InvalidCliffordError):
            CliffordMap.permutation([0, 0])

    def test_tensor(self):
        assert base_gate("R").tensor(base_gate("I")) == named_gate("R", 2, [0])

    def test_single_qubit_group(self):
        entries = single_qubit_cliffords()
        assert len(entries) == 24
        labels = {label for label, _ in entries}
        assert {"I", "R", "P", "T", "TDG"} <= labels
        maps = {c for _, c in entries}
        assert len(maps) == 24

    def test_table_rows(self):
        assert base_gate("T").table_rows() == ["X1 -> iY", "Z1 -> X"]


class TestUnitary:
    def test_t(self):
        expected = np.array([[1, -1j], [1, 1j]]) / np.sqrt(2)
        assert np.allclose(to_unitary(base_gate("T")), expected)

    def test_hadamard(self):
        expected = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert np.allclose(base_gate("R").to_unitary(), expected)

    @pytest.mark.parametrize("name", NAMED_GATES)
    def test_conjugation_matches_images(self, name):
        gate = base_gate(name)
        u = to_unitary(gate)
        assert np.allclose(u @ u.conj().T, np.eye(1 << gate.n))
        for j in range(gate.n):
            for letter, images in (("X", gate.x_images), ("Z", gate.z_images)):
                sigma = PauliOperator.single(gate.n, j, letter).to_matrix()
                assert np.allclose(u @ sigma @ u.conj().T, images[j].to_matrix())

    def test_every_two_qubit_pauli(self):
        c = random_clifford(2, 3)
        u = c.to_unitary()
        for p in all_paulis(2):
            assert np.allclose(u @ p.to_matrix() @ u.conj().T, c.apply(p).to_matrix())

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            to_unitary(CliffordMap.identity(3), max_n=2)


class TestGateText:
    def test_parse_t(self):
        assert parse_gate_text(T_GATE_TEXT) == base_gate("T")

    def test_round_trip(self):
        cnot = base_gate("CNOT")
        assert parse_gate_text(cnot.to_gate_text()) == cnot

    @pytest.mark.parametrize(
        "text",
        [
            "X1 = Z\nZ1 -> X\n",
            "X1 -> Z\n",
            "X1 -> Z\nX1 -> Z\nZ1 -> X\n",
            "X1 -> Q\nZ1 -> X\n",
            "X1 -> ZZ\nZ1 -> X\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(FormatError):
            parse_gate_text(text)
