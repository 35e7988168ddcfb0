"""Single-fault propagation through circuits over encoded blocks.

A fault is a Pauli error placed right after one circuit location. It is
pushed through every later step as a Pauli frame: gates conjugate it,
measurements it anticommutes with flip their bit (and pull in the
correction), and flipped bits toggle classically controlled Pauli gates.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Any

from .circuit import Circuit, ConditionalStep, GateStep, MeasureStep
from .codes import StabilizerCode
from .exceptions import CircuitError, FormatError
from .pauli import PauliOperator

logger = logging.getLogger(__name__)

COSET_MAX_N = 10
PAULI_GATES = ("I", "X", "Y", "Z")

_RANGE = re.compile(r"^(\d+)(?:-(\d+))?$")


@dataclass(frozen=True)
class BlockLayout:
    """Zero-based qubit lists, one per encoded block. Qubits in no block are ignored."""

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def parse(cls, text: str) -> BlockLayout:
        """Parse ``"1-7;8-14"`` or ``"1,2;3-5"`` (1-based, inclusive ranges)."""
        blocks = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            qubits: list[int] = []
            for part in chunk.split(","):
                match = _RANGE.match(part.strip())
                if match is None:
                    raise FormatError(f"Invalid block range '{part.strip()}' in layout '{text}'")
                start = int(match.group(1))
                stop = int(match.group(2) or start)
                if start < 1 or stop < start:
                    raise FormatError(f"Invalid block range '{part.strip()}' in layout '{text}'")
                qubits.extend(range(start - 1, stop))
            blocks.append(tuple(qubits))
        if not blocks:
            raise FormatError("Layout names no blocks")
        flat = [q for block in blocks for q in block]
        if len(flat) != len(set(flat)):
            raise FormatError(f"Blocks overlap in layout '{text}'")
        return cls(tuple(blocks))

    @classmethod
    def contiguous(cls, block_size: int, count: int) -> BlockLayout:
        """``count`` blocks of ``block_size`` consecutive qubits."""
        return cls(tuple(tuple(range(b * block_size, (b + 1) * block_size)) for b in range(count)))

    def check(self, n: int) -> None:
        """Raise CircuitError if a block names a qubit past ``n``."""
        for block in self.blocks:
            if any(q >= n for q in block):
                raise CircuitError(f"Layout uses qubit {max(block) + 1} but the circuit has {n}")

    def __str__(self) -> str:
        return ";".join(",".join(str(q + 1) for q in block) for block in self.blocks)


@dataclass(frozen=True)
class FaultLocation:
    index: int
    kind: str
    support: tuple[int, ...]
    label: str


@dataclass(frozen=True)
class FaultOutcome:
    location: FaultLocation
    fault: PauliOperator
    final_error: PauliOperator
    flipped_bits: tuple[int, ...]
    raw_weights: tuple[int, ...]
    reduced_weights: tuple[int, ...] | None

    @property
    def violation(self) -> bool:
        """True when the fault ends with weight 2 or more in some block."""
        return any(w >= 2 for w in self.raw_weights)

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": self.location.index + 1,
            "location": self.location.label,
            "fault": str(self.fault),
            "final_error": str(self.final_error),
            "flipped_bits": [f"b{b}" for b in self.flipped_bits],
            "raw_weights": list(self.raw_weights),
            "reduced_weights": None if self.reduced_weights is None else list(self.reduced_weights),
            "violation": self.violation,
        }


@dataclass
class FaultReport:
    layout: BlockLayout
    outcomes: list[FaultOutcome] = field(default_factory=list)

    @property
    def violations(self) -> list[FaultOutcome]:
        return [o for o in self.outcomes if o.violation]

    @property
    def fault_tolerant(self) -> bool:
        return not self.violations

    def table_rows(self) -> list[str]:
        rows = []
        for o in self.outcomes:
            reduced = "-" if o.reduced_weights is None else ",".join(map(str, o.reduced_weights))
            flag = "VIOLATION" if o.violation else "ok"
            rows.append(
                f"{o.location.index + 1}\t{o.location.label}\t{o.fault}\t{o.final_error}\t"
                f"{','.join(map(str, o.raw_weights))}\t{reduced}\t{flag}"
            )
        return rows

    def to_dict(self) -> dict[str, Any]:
        return {
            "layout": str(self.layout),
            "faults": len(self.outcomes),
            "violations": len(self.violations),
            "fault_tolerant": self.fault_tolerant,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }


def fault_locations(circuit: Circuit) -> list[FaultLocation]:
    """Every gate and measurement, with the qubits a fault there may touch."""
    out = []
    for index, step in enumerate(circuit):
        if isinstance(step, MeasureStep):
            support = tuple(q for q in range(circuit.n) if (step.pauli.support >> q) & 1)
            out.append(FaultLocation(index, "measure", support, str(step)))
        else:
            gate = step.gate if isinstance(step, ConditionalStep) else step
            out.append(FaultLocation(index, "gate", gate.targets, str(step)))
    return out


def location_faults(location: FaultLocation, n: int) -> Iterator[PauliOperator]:
    """Gate locations get every nonidentity Pauli on the support; measurements get single-qubit faults."""
    if location.kind == "measure":
        for q in location.support:
            for letter in "XYZ":
                yield PauliOperator.single(n, q, letter)
        return
    for letters in cartesian("IXZY", repeat=len(location.support)):
        if all(letter == "I" for letter in letters):
            continue
        yield PauliOperator.parse("".join(letters)).without_phase().embed(n, location.support)


def propagate_fault(
    circuit: Circuit, start: int, error: PauliOperator
) -> tuple[PauliOperator, tuple[int, ...]]:
    """Push ``error`` (present after step ``start``) to the end of the circuit.

    Gates conjugate the error. A measurement it anticommutes with flips that
    bit, which also applies the correction and toggles any Pauli the bit
    controls later on.

    Args:
        circuit: Circuit the fault happens in
        start: Zero-based index of the step the fault follows
        error: Fault on all ``circuit.n`` qubits

    Returns:
        The final error, phase dropped, and the bits whose value it flipped

    Raises:
        CircuitError: If a flipped bit controls a gate that is not a Pauli
    """
    flipped: set[int] = set()
    for step in circuit.steps[start + 1:]:
        if isinstance(step, GateStep):
            error = step.clifford(circuit.n).apply(error)
        elif isinstance(step, MeasureStep):
            if not error.commutes(step.pauli):
                flipped ^= {step.bit}
                if step.correction is not None:
                    error = error.multiply(step.correction)
        elif step.bit in flipped:
            gate = step.gate
            if gate.custom is not None or gate.name not in PAULI_GATES:
                raise CircuitError(
                    f"A flipped b{step.bit} controls the non-Pauli gate {gate.name}; it cannot be tracked as a frame"
                )
            error = error.multiply(PauliOperator.single(circuit.n, gate.targets[0], gate.name))
    return error.without_phase(), tuple(sorted(flipped))


def _block_weight(error: PauliOperator, block: Sequence[int]) -> int:
    return error.restrict(block).weight()


def _coset_weight(error: PauliOperator, code: StabilizerCode) -> int:
    """Minimum weight of ``error * s`` over the stabilizer ``s`` of ``code``."""
    best = error.weight()
    gens = [(g.x, g.z) for g in code.generators]
    for combo in range(1, 1 << len(gens)):
        x, z = error.x, error.z
        for i, (gx, gz) in enumerate(gens):
            if (combo >> i) & 1:
                x ^= gx
                z ^= gz
        best = min(best, (x | z).bit_count())
    return best


def fault_injection(
    circuit: Circuit,
    layout: BlockLayout,
    code: StabilizerCode | None = None,
    max_block_n: int = COSET_MAX_N,
) -> FaultReport:
    """Inject every single fault and report per-block weights of the final error.

    Args:
        circuit: Circuit to analyse
        layout: Qubits of each code block
        code: Code of every block; enables the coset-reduced weights
        max_block_n: Largest block the coset reduction enumerates

    Returns:
        One outcome per fault, flagged when some block ends with weight 2 or more

    Raises:
        CircuitError: If the circuit is malformed, the layout does not fit it,
            or a block size differs from ``code.n``
    """
    circuit.require_valid()
    layout.check(circuit.n)
    reduce_with = None
    if code is not None:
        if any(len(block) != code.n for block in layout.blocks):
            raise CircuitError(f"Every block must have {code.n} qubits to reduce modulo '{code.name}'")
        if code.n <= max_block_n:
            reduce_with = code
        else:
            logger.info("Skipping coset reduction: block size %d exceeds %d", code.n, max_block_n)

    report = FaultReport(layout)
    for location in fault_locations(circuit):
        for fault in location_faults(location, circuit.n):
            final, flipped = propagate_fault(circuit, location.index, fault)
            raw = tuple(_block_weight(final, block) for block in layout.blocks)
            reduced = None
            if reduce_with is not None:
                reduced = tuple(
                    _coset_weight(final.restrict(block), reduce_with) for block in layout.blocks
                )
            outcome = FaultOutcome(location, fault, final, flipped, raw, reduced)
            if outcome.violation:
                logger.debug("Fault %s after step %d spreads to %s", fault, location.index + 1, raw)
            report.outcomes.append(outcome)
    logger.info(
        "Injected %d faults at %d locations: %d violations",
        len(report.outcomes), len(circuit), len(report.violations),
    )
    return report
