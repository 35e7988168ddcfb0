"""Tests for single-fault propagation and block-weight reports."""

import numpy as np
import pytest

from stabilizer_ft.circuit import Circuit
from stabilizer_ft.clifford import gate_arity
from stabilizer_ft.codes import builtin_code
from stabilizer_ft.dense import equal_up_to_phase
from stabilizer_ft.exceptions import CircuitError, FormatError
from stabilizer_ft.faults import (
    BlockLayout,
    _coset_weight,
    fault_injection,
    fault_locations,
    location_faults,
    propagate_fault,
)
from stabilizer_ft.pauli import PauliOperator, random_pauli


def _bitwise_cnot(n: int) -> Circuit:
    circuit = Circuit(2 * n)
    for p in range(n):
        circuit.gate("CNOT", p, n + p)
    return circuit


class TestBlockLayout:
    def test_parse_ranges(self):
        layout = BlockLayout.parse("1-7;8-14")
        assert layout == BlockLayout.contiguous(7, 2)
        assert layout.blocks[1][0] == 7

    def test_parse_lists(self):
        layout = BlockLayout.parse("1,3; 2,4-5")
        assert layout.blocks == ((0, 2), (1, 3, 4))
        assert str(layout) == "1,3;2,4,5"

    @pytest.mark.parametrize("text", ["", ";", "1-a", "3-1", "0-2", "1-3;2-4"])
    def test_invalid(self, text):
        with pytest.raises(FormatError):
            BlockLayout.parse(text)

    def test_check(self):
        BlockLayout.contiguous(2, 2).check(4)
        with pytest.raises(CircuitError):
            BlockLayout.contiguous(2, 2).check(3)


class TestLocations:
    def test_locations(self):
        circuit = Circuit(3).gate("CNOT", 0, 2).measure("XXX", 0)
        locations = fault_locations(circuit)
        assert [loc.kind for loc in locations] == ["gate", "measure"]
        assert locations[0].support == (0, 2)
        assert locations[1].support == (0, 1, 2)
        assert locations[0].label == "GATE CNOT 1 3"

    def test_fault_counts(self):
        circuit = Circuit(3).gate("CNOT", 0, 2).measure("XXX", 0)
        gate_loc, measure_loc = fault_locations(circuit)
        gate_faults = list(location_faults(gate_loc, 3))
        assert len(gate_faults) == 15
        assert all((f.support & 0b010) == 0 for f in gate_faults)
        assert len(list(location_faults(measure_loc, 3))) == 9


class TestPropagate:
    def test_cnot_copies_x_forward(self):
        circuit = Circuit(2).gate("CNOT", 0, 1)
        final, flipped = propagate_fault(circuit, -1, PauliOperator.parse("XI"))
        assert str(final) == "XX"
        assert flipped == ()

    def test_fault_after_last_step_is_unchanged(self):
        circuit = Circuit(2).gate("CNOT", 0, 1)
        final, _ = propagate_fault(circuit, 0, PauliOperator.parse("XI"))
        assert str(final) == "XI"

    def test_measurement_flip_pulls_in_correction(self):
        circuit = Circuit(1).measure("Z", 0, correction="X")
        final, flipped = propagate_fault(circuit, -1, PauliOperator.parse("X"))
        assert final.is_identity
        assert flipped == (0,)

    def test_conditional_pauli_follows_flipped_bit(self):
        circuit = Circuit(2).measure("ZI", 0).conditional(0, "X", 1)
        final, flipped = propagate_fault(circuit, -1, PauliOperator.parse("XI"))
        assert str(final) == "XX"
        assert flipped == (0,)

    def test_conditional_clifford_cannot_be_tracked(self):
        circuit = Circuit(1).measure("Z", 0).conditional(0, "R", 0)
        with pytest.raises(CircuitError):
            propagate_fault(circuit, -1, PauliOperator.parse("X"))

    def test_matches_dense_conjugation(self):
        names = ["R", "P", "PDG", "Q", "T", "TDG", "X", "Z", "CNOT", "CZ", "SWAP", "T3"]
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(1, 4))
            choices = [name for name in names if gate_arity(name) <= n]
            circuit = Circuit(n)
            for _ in range(8):
                name = choices[int(rng.integers(len(choices)))]
                circuit.gate(name, *[int(t) for t in rng.choice(n, size=gate_arity(name), replace=False)])
            start = int(rng.integers(-1, len(circuit)))
            fault = random_pauli(n, rng)
            final, flipped = propagate_fault(circuit, start, fault)
            u = Circuit(n, circuit.steps[start + 1:]).to_unitary()
            conjugated = u @ fault.to_matrix() @ u.conj().T
            assert flipped == ()
            assert equal_up_to_phase(conjugated, final.to_matrix())


class TestFaultInjection:
    def test_bitwise_cnot_is_fault_tolerant(self):
        report = fault_injection(_bitwise_cnot(7), BlockLayout.contiguous(7, 2), builtin_code("steane7"))
        assert report.fault_tolerant
        assert len(report.outcomes) == 7 * 15
        assert all(o.reduced_weights is not None for o in report.outcomes)

    def test_swap_inside_a_block_is_flagged(self):
        report = fault_injection(Circuit(2).gate("SWAP", 0, 1), BlockLayout(((0, 1),)))
        assert not report.fault_tolerant
        assert any(str(o.fault) == "XX" for o in report.violations)

    def test_spreading_inside_a_block(self):
        circuit = Circuit(2).gate("R", 0).gate("CNOT", 0, 1)
        report = fault_injection(circuit, BlockLayout(((0, 1),)))
        first = next(o for o in report.outcomes if o.location.index == 0 and str(o.fault) == "XI")
        assert first.raw_weights == (2,)
        assert first.violation

    def test_code_must_fit_blocks(self):
        with pytest.raises(CircuitError):
            fault_injection(_bitwise_cnot(2), BlockLayout.contiguous(2, 2), builtin_code("steane7"))

    def test_coset_reduction_skipped_for_large_blocks(self):
        report = fault_injection(
            _bitwise_cnot(7), BlockLayout.contiguous(7, 2), builtin_code("steane7"), max_block_n=5
        )
        assert all(o.reduced_weights is None for o in report.outcomes)

    def test_report_documents(self):
        report = fault_injection(Circuit(2).gate("SWAP", 0, 1), BlockLayout(((0, 1),)))
        document = report.to_dict()
        assert document["layout"] == "1,2"
        assert document["faults"] == 15
        assert document["fault_tolerant"] is False
        assert document["outcomes"][0]["step"] == 1
        rows = report.table_rows()
        assert len(rows) == 15
        assert rows[0].startswith("1\tGATE SWAP 1 2\t")


class TestCosetWeight:
    def test_stabilizer_reduces_to_zero(self):
        steane = builtin_code("steane7")
        assert _coset_weight(steane.generators[0], steane) == 0
        assert _coset_weight(PauliOperator.single(7, 0, "X"), steane) == 1

    def test_weight_two_representative(self):
        steane = builtin_code("steane7")
        # XXXIIII times M1 is IIIXIII
        assert _coset_weight(PauliOperator.parse("XXXIIII"), steane) == 1
