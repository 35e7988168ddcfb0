"""Circuits of Clifford gates, Pauli measurements and classically controlled gates."""

from __future__ import annotations

import logging
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .clifford import CliffordMap, base_gate, canonical_gate_name, compose, gate_arity, named_gate
from .dense import DENSE_MAX_N, apply_unitary, check_size
from .exceptions import CircuitError, FormatError, PauliError, StabilizerFtError
from .pauli import PauliOperator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GateStep:
    """A named gate, or a custom map, on zero-based ``targets``."""

    name: str
    targets: tuple[int, ...]
    custom: CliffordMap | None = None

    def clifford(self, n: int) -> CliffordMap:
        """The gate embedded in an ``n``-qubit register."""
        if self.custom is not None:
            return self.custom.embed(n, self.targets)
        return named_gate(self.name, n, self.targets)

    def local(self) -> CliffordMap:
        """The gate on its own qubits, before embedding."""
        return self.custom if self.custom is not None else base_gate(self.name)

    @property
    def arity(self) -> int:
        return self.custom.n if self.custom is not None else gate_arity(self.name)

    def __str__(self) -> str:
        return f"GATE {self.name} " + " ".join(str(t + 1) for t in self.targets)


@dataclass(frozen=True)
class MeasureStep:
    """Measure a Hermitian Pauli into bit ``bit``; apply ``correction`` on outcome -1."""

    pauli: PauliOperator
    bit: int
    correction: PauliOperator | None = None

    def __str__(self) -> str:
        text = f"MEASURE {self.pauli}"
        if self.correction is not None:
            text += f" CORRECT {self.correction}"
        return text + f" -> b{self.bit}"


@dataclass(frozen=True)
class ConditionalStep:
    """Apply ``gate`` when classical bit ``bit`` reads 1 (outcome -1)."""

    gate: GateStep
    bit: int

    def __str__(self) -> str:
        return f"IF b{self.bit} {self.gate}"


Step = Union[GateStep, MeasureStep, ConditionalStep]


@dataclass
class Circuit:
    n: int
    steps: list[Step] = field(default_factory=list)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def gate(self, name: str, *targets: int) -> Circuit:
        """Append a named gate; ``targets`` are zero-based."""
        self.steps.append(GateStep(canonical_gate_name(name), tuple(targets)))
        return self

    def custom(self, name: str, clifford: CliffordMap, *targets: int) -> Circuit:
        self.steps.append(GateStep(name, tuple(targets), clifford))
        return self

    def measure(
        self, pauli: PauliOperator | str, bit: int, correction: PauliOperator | str | None = None
    ) -> Circuit:
        """
        Append a Pauli measurement.

        Args:
            pauli: Hermitian operator on all ``n`` qubits, or its text
            bit: Classical bit the outcome is written to
            correction: Pauli applied on outcome -1; it must anticommute with
                ``pauli``

        Returns:
            This circuit, for chaining
        """
        if isinstance(pauli, str):
            pauli = PauliOperator.parse(pauli)
        if isinstance(correction, str):
            correction = PauliOperator.parse(correction)
        self.steps.append(MeasureStep(pauli, bit, correction))
        return self

    def conditional(self, bit: int, name: str, *targets: int) -> Circuit:
        """Append a named gate that runs when ``bit`` reads 1."""
        self.steps.append(ConditionalStep(GateStep(canonical_gate_name(name), tuple(targets)), bit))
        return self

    def extend(self, other: Circuit) -> Circuit:
        """Append the steps of ``other``, which must be on the same register."""
        if other.n != self.n:
            raise CircuitError(f"Cannot join circuits on {self.n} and {other.n} qubits")
        self.steps.extend(other.steps)
        return self

    def measured_bits(self) -> list[int]:
        return [s.bit for s in self.steps if isinstance(s, MeasureStep)]

    def is_unitary(self) -> bool:
        """True when every step is a gate."""
        return all(isinstance(s, GateStep) for s in self.steps)

    def validate(self) -> list[str]:
        """
        List what is wrong with the circuit.

        Gates need the right number of distinct in-range targets, measured
        operators must be Hermitian on ``n`` qubits with an anticommuting
        correction, and a conditional may only read a bit measured earlier.

        Returns:
            One message per problem, empty for a valid circuit
        """
        issues = []
        seen_bits: set[int] = set()
        for index, step in enumerate(self.steps, 1):
            gate = step.gate if isinstance(step, ConditionalStep) else step
            if isinstance(gate, GateStep):
                try:
                    arity = gate.arity
                except StabilizerFtError as e:
                    issues.append(f"step {index}: {e}")
                    continue
                if len(gate.targets) != arity:
                    issues.append(f"step {index}: {gate.name} needs {arity} targets")
                if len(set(gate.targets)) != len(gate.targets):
                    issues.append(f"step {index}: repeated target")
                if any(not 0 <= t < self.n for t in gate.targets):
                    issues.append(f"step {index}: target out of range for {self.n} qubits")
            if isinstance(step, ConditionalStep) and step.bit not in seen_bits:
                issues.append(f"step {index}: b{step.bit} is read before it is measured")
            if isinstance(step, MeasureStep):
                if step.pauli.n != self.n:
                    issues.append(f"step {index}: {step.pauli} is not on {self.n} qubits")
                elif not step.pauli.is_hermitian():
                    issues.append(f"step {index}: {step.pauli} is not Hermitian")
                if step.correction is not None and (
                    step.correction.n != self.n or step.correction.commutes(step.pauli)
                ):
                    issues.append(f"step {index}: correction must anticommute with {step.pauli}")
                seen_bits.add(step.bit)
        return issues

    def require_valid(self) -> None:
        issues = self.validate()
        if issues:
            raise CircuitError("; ".join(issues))

    def to_clifford(self) -> CliffordMap:
        """Replay a gate-only circuit into one map."""
        if not self.is_unitary():
            raise CircuitError("Only gate steps can be replayed into a Clifford map")
        current = CliffordMap.identity(self.n)
        for step in self.steps:
            assert isinstance(step, GateStep)
            current = compose(step.clifford(self.n), current)
        return current

    def to_unitary(self, max_n: int = DENSE_MAX_N) -> np.ndarray:
        """Dense unitary of a gate-only circuit, multiplied out gate by gate.

        Does not go through the tableau replay of :meth:`to_clifford`.

        Args:
            max_n: Largest register the dense product is built for

        Returns:
            The ``2**n`` square matrix, defined up to a global phase

        Raises:
            CircuitError: If the circuit contains measurements
            SizeLimitError: If ``n`` exceeds ``max_n``
        """
        if not self.is_unitary():
            raise CircuitError("Only gate steps have a dense unitary")
        check_size(self.n, max_n)
        dim = 1 << self.n
        gates = [
            (step.local().to_unitary(), step.targets)
            for step in self.steps
            if isinstance(step, GateStep)
        ]
        u = np.zeros((dim, dim), dtype=complex)
        for column in range(dim):
            psi = np.zeros(dim, dtype=complex)
            psi[column] = 1.0
            for gate, targets in gates:
                psi = apply_unitary(psi, gate, targets, self.n)
            u[:, column] = psi
        return u

    def to_text(self) -> str:
        """Render as ``.circ`` text; custom gates have no text form."""
        for step in self.steps:
            gate = step.gate if isinstance(step, ConditionalStep) else step
            if isinstance(gate, GateStep) and gate.custom is not None:
                raise CircuitError(f"Custom gate '{gate.name}' has no text form")
        lines = [f"QUBITS {self.n}"] + [str(s) for s in self.steps]
        return "\n".join(lines) + "\n"


_QUBITS = re.compile(r"^QUBITS\s+(\d+)$", re.IGNORECASE)
_GATE = re.compile(r"^GATE\s+(\S+)((?:\s+\d+)+)$", re.IGNORECASE)
_MEASURE = re.compile(
    r"^MEASURE\s+(\S+)(?:\s+CORRECT\s+(\S+))?\s*->\s*b(\d+)$", re.IGNORECASE
)
_IF = re.compile(r"^IF\s+b(\d+)\s+(GATE\s+.+)$", re.IGNORECASE)


def _parse_gate(text: str, lineno: int) -> GateStep:
    match = _GATE.match(text)
    if match is None:
        raise FormatError(f"line {lineno}: expected 'GATE <name> <targets>'")
    try:
        name = canonical_gate_name(match.group(1))
    except StabilizerFtError as e:
        raise FormatError(f"line {lineno}: {e}")
    targets = tuple(int(t) - 1 for t in match.group(2).split())
    if any(t < 0 for t in targets):
        raise FormatError(f"line {lineno}: qubit indices start at 1")
    return GateStep(name, targets)


def parse_circuit(text: str, n: int | None = None) -> Circuit:
    """
    Parse ``.circ`` text.

    Args:
        text: File contents; ``#`` starts a comment and qubits count from 1
        n: Register size; overrides ``QUBITS`` and, when both are missing, is
            inferred from the widest step

    Returns:
        The validated circuit

    Raises:
        FormatError: If a line cannot be parsed or the circuit is malformed
    """
    steps: list[Step] = []
    declared: int | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        qubits = _QUBITS.match(line)
        if qubits:
            declared = int(qubits.group(1))
            continue
        conditional = _IF.match(line)
        if conditional:
            steps.append(ConditionalStep(_parse_gate(conditional.group(2), lineno), int(conditional.group(1))))
            continue
        measure = _MEASURE.match(line)
        if measure:
            try:
                pauli = PauliOperator.parse(measure.group(1))
                correction = PauliOperator.parse(measure.group(2)) if measure.group(2) else None
            except PauliError as e:
                raise FormatError(f"line {lineno}: {e}")
            steps.append(MeasureStep(pauli, int(measure.group(3)), correction))
            continue
        if line.upper().startswith("GATE"):
            steps.append(_parse_gate(line, lineno))
            continue
        raise FormatError(f"line {lineno}: cannot parse '{line}'")

    size = n if n is not None else declared
    if size is None:
        widths = [1]
        for step in steps:
            if isinstance(step, MeasureStep):
                widths.append(step.pauli.n)
            else:
                gate = step.gate if isinstance(step, ConditionalStep) else step
                widths.append(max(gate.targets) + 1)
        size = max(widths)
    circuit = Circuit(size, steps)
    issues = circuit.validate()
    if issues:
        raise FormatError("; ".join(issues))
    return circuit


def circuit_from_gates(n: int, gates: Sequence[tuple[str, Sequence[int]]]) -> Circuit:
    circuit = Circuit(n)
    for name, targets in gates:
        circuit.gate(name, *targets)
    return circuit
