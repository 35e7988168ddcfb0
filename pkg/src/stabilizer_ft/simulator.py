"""Stabilizer-state simulation: gates, Pauli measurements and logical-frame tracking."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .circuit import Circuit, ConditionalStep, GateStep, MeasureStep
from .clifford import CliffordMap
from .codes import StabilizerCode
from .dense import DENSE_MAX_N, DenseSimulator, stabilizer_state_vector
from .exceptions import SimulationError
from .pauli import PauliOperator
from .symplectic import PauliGroup

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: int
    deterministic: bool
    corrected: bool = False

    @property
    def bit(self) -> int:
        """Classical bit: 0 for outcome +1, 1 for -1."""
        return 0 if self.outcome == 1 else 1


def _conjugate_by_pauli(g: PauliOperator, p: PauliOperator) -> PauliOperator:
    return g if g.commutes(p) else -g


@dataclass(frozen=True)
class StabilizerState:
    """Pure state given by n independent, commuting, signed generators."""

    n: int
    generators: tuple[PauliOperator, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.n != self.n:
                raise SimulationError(f"Generator {g} is not on {self.n} qubits")

    @classmethod
    def basis_state(cls, bits: Sequence[int]) -> StabilizerState:
        """The computational basis state, qubit 1 first."""
        n = len(bits)
        return cls(n, tuple(PauliOperator.single(n, j, "Z").scaled(2 * (int(b) & 1)) for j, b in enumerate(bits)))

    @classmethod
    def zero(cls, n: int) -> StabilizerState:
        return cls.basis_state([0] * n)

    @classmethod
    def from_strings(cls, generators: Sequence[str]) -> StabilizerState:
        ops = [PauliOperator.parse(g) for g in generators]
        return cls(ops[0].n, tuple(ops))

    def group(self) -> PauliGroup:
        return PauliGroup(self.n, self.generators)

    def validate(self) -> list[str]:
        issues = []
        if len(self.generators) != self.n:
            issues.append(f"Expected {self.n} generators, found {len(self.generators)}")
        for i, g in enumerate(self.generators):
            if not g.is_hermitian():
                issues.append(f"Generator {i + 1} ({g}) is not Hermitian")
            for h in self.generators[i + 1:]:
                if not g.commutes(h):
                    issues.append(f"Generators {g} and {h} anticommute")
        if self.group().rank != len(self.generators):
            issues.append("Generators are not independent")
        return issues

    def contains(self, p: PauliOperator) -> bool:
        """Whether ``p`` (with its sign) stabilizes the state."""
        return self.group().phase_of(p) == 0

    def same_state(self, other: StabilizerState) -> bool:
        """True when both generator lists stabilize the same state, signs included."""
        return self.n == other.n and all(self.contains(g) for g in other.generators)

    # Evolution

    def apply_gate(self, c: CliffordMap, targets: Sequence[int] | None = None) -> StabilizerState:
        """Conjugate every generator by ``c``, embedded on ``targets`` when given."""
        full = c if targets is None else c.embed(self.n, targets)
        if full.n != self.n:
            raise SimulationError(f"Map on {full.n} qubits applied to {self.n}-qubit state")
        return StabilizerState(self.n, tuple(full.apply(g) for g in self.generators))

    def apply_pauli(self, p: PauliOperator) -> StabilizerState:
        """Flip the sign of every generator that anticommutes with ``p``."""
        return StabilizerState(self.n, tuple(_conjugate_by_pauli(g, p) for g in self.generators))

    def measure(
        self, a: PauliOperator, rng: np.random.Generator, forced: int | None = None
    ) -> tuple[MeasurementRecord, StabilizerState]:
        """
        Measure a Hermitian Pauli and collapse the state.

        A deterministic outcome is read off the stabilizer group. Otherwise the
        first anticommuting generator is replaced by ``+-a`` and the others that
        anticommute are multiplied by it, and one coin is drawn from ``rng``.

        Args:
            a: Hermitian operator on ``n`` qubits
            rng: Source of the coin for a random outcome
            forced: Outcome (+1 or -1) to take instead of drawing one

        Returns:
            The measurement record and the post-measurement state

        Raises:
            SimulationError: If ``a`` is the wrong size or not Hermitian, or
                ``forced`` disagrees with a deterministic outcome
        """
        if a.n != self.n:
            raise SimulationError(f"Cannot measure {a.n}-qubit {a} on {self.n} qubits")
        if not a.is_hermitian():
            raise SimulationError(f"Cannot measure non-Hermitian {a}")
        anticommuting = [i for i, g in enumerate(self.generators) if not g.commutes(a)]
        if not anticommuting:
            phase = self.group().phase_of(a)
            if phase is None:
                raise SimulationError("Generators do not describe a pure state")
            outcome = 1 if phase == 0 else -1
            if forced is not None and forced != outcome:
                raise SimulationError(f"Outcome of {a} is fixed to {outcome:+d}")
            return MeasurementRecord(outcome, True), self

        pivot = anticommuting[0]
        generators = list(self.generators)
        for j in anticommuting[1:]:
            generators[j] = generators[pivot].multiply(generators[j])
        if forced is None:
            outcome = 1 - 2 * int(rng.integers(2))
        else:
            outcome = forced
        generators[pivot] = a if outcome == 1 else -a
        return MeasurementRecord(outcome, False), StabilizerState(self.n, tuple(generators))

    def measure_and_correct(
        self,
        a: PauliOperator,
        correction: PauliOperator,
        rng: np.random.Generator,
        forced: int | None = None,
    ) -> tuple[MeasurementRecord, StabilizerState]:
        """Measure ``a`` and apply ``correction`` on -1, leaving ``+a`` in the stabilizer."""
        if correction.commutes(a):
            raise SimulationError(f"Correction {correction} must anticommute with {a}")
        record, state = self.measure(a, rng, forced)
        if record.outcome == -1:
            state = state.apply_pauli(correction)
            record = MeasurementRecord(record.outcome, record.deterministic, True)
        return record, state

    def discard_qubit(self, q: int) -> StabilizerState:
        """Drop qubit ``q`` (zero-based); it must be unentangled from the rest."""
        group = self.group()
        single = None
        for letter in "XZY":
            candidate = PauliOperator.single(self.n, q, letter).hermitian()
            combo = group.decompose(candidate)
            if combo is not None:
                single = group.product(combo)
                break
        if single is None:
            raise SimulationError(f"Qubit {q + 1} is entangled with the rest of the register")

        rest = []
        for g in self.generators:
            if g.letter_at(q) != "I":
                g = g.multiply(single)
            if not g.is_identity:
                rest.append(g)
        keep = [p for p in range(self.n) if p != q]
        reduced: list[PauliOperator] = []
        for g in rest:
            r = g.restrict(keep)
            if PauliGroup(self.n - 1, reduced + [r]).independent:
                reduced.append(r)
        if len(reduced) != self.n - 1:
            raise SimulationError(f"Could not separate qubit {q + 1}")
        return StabilizerState(self.n - 1, tuple(reduced))

    def discard_qubits(self, qubits: Sequence[int]) -> StabilizerState:
        state = self
        for q in sorted(qubits, reverse=True):
            state = state.discard_qubit(q)
        return state

    def to_vector(self, max_n: int = DENSE_MAX_N) -> np.ndarray:
        """Dense state vector, qubit 1 most significant, up to global phase."""
        if self.n > max_n:
            raise SimulationError(f"Dense view is limited to n <= {max_n}")
        return stabilizer_state_vector(self.generators)


def basis_state(bits: Sequence[int]) -> StabilizerState:
    return StabilizerState.basis_state(bits)


@dataclass
class RunResult:
    state: StabilizerState
    records: dict[int, MeasurementRecord] = field(default_factory=dict)
    oracle_probabilities: dict[int, float] = field(default_factory=dict)
    oracle_fidelity: float | None = None
    dense_state: np.ndarray | None = None

    @property
    def bits(self) -> dict[int, int]:
        return {b: r.bit for b, r in self.records.items()}

    def to_dict(self) -> dict[str, Any]:
        return {
            "final_generators": [str(g) for g in self.state.generators],
            "measurements": [
                {
                    "bit": f"b{b}",
                    "outcome": r.outcome,
                    "deterministic": r.deterministic,
                    "corrected": r.corrected,
                    **({"oracle_probability": self.oracle_probabilities[b]} if b in self.oracle_probabilities else {}),
                }
                for b, r in sorted(self.records.items())
            ],
            "oracle_fidelity": self.oracle_fidelity,
        }


def run_circuit(
    circuit: Circuit,
    state: StabilizerState,
    rng: np.random.Generator,
    oracle: bool = False,
    max_n_dense: int = DENSE_MAX_N,
) -> RunResult:
    """
    Execute a circuit on a stabilizer state.

    Gates conjugate the generators, measurements collapse the state and
    record a bit, and conditional gates fire when their bit reads 1.

    Args:
        circuit: Circuit to run; it is validated first
        state: Initial state on ``circuit.n`` qubits
        rng: Source of the coins for random outcomes
        oracle: Follow the same branch on a dense state vector and compare
        max_n_dense: Largest register the oracle runs on

    Returns:
        Final state and measurement records, plus the oracle probabilities
        and fidelity when ``oracle`` is set

    Raises:
        CircuitError: If the circuit is malformed
        SimulationError: If the sizes differ, the register is too large for
            the oracle, or the oracle disagrees on a deterministic outcome
    """
    circuit.require_valid()
    if circuit.n != state.n:
        raise SimulationError(f"Circuit on {circuit.n} qubits, state on {state.n}")
    dense = DenseSimulator(state.to_vector(max_n_dense), max_n_dense) if oracle else None
    result = RunResult(state)
    for step in circuit:
        if isinstance(step, ConditionalStep):
            if result.records[step.bit].bit == 0:
                continue
            step_gate: GateStep = step.gate
        elif isinstance(step, MeasureStep):
            if step.correction is None:
                record, result.state = result.state.measure(step.pauli, rng)
            else:
                record, result.state = result.state.measure_and_correct(step.pauli, step.correction, rng)
            result.records[step.bit] = record
            if dense is not None:
                probability = dense.probabilities(step.pauli)[record.outcome]
                result.oracle_probabilities[step.bit] = probability
                if record.deterministic != (abs(probability - 1) < 1e-9):
                    raise SimulationError(
                        f"Oracle disagrees on b{step.bit}: probability {probability:.6f}"
                    )
                dense.measure(step.pauli, record.outcome)
                if record.corrected and step.correction is not None:
                    dense.apply_pauli(step.correction)
            continue
        else:
            step_gate = step
        gate_map = step_gate.clifford(circuit.n)
        result.state = result.state.apply_gate(gate_map)
        if dense is not None:
            dense.apply_unitary(step_gate.local().to_unitary(), step_gate.targets)
    if dense is not None:
        expected = result.state.to_vector(max_n_dense)
        result.oracle_fidelity = float(abs(np.vdot(expected, dense.psi)) ** 2)
        result.dense_state = dense.psi
    return result


# Logical frame tracking


@dataclass(frozen=True)
class TrackResult:
    frame: CodeFrame
    reveals_logical: bool = False
    deterministic: bool = False
    branch_independent: bool = True


@dataclass(frozen=True)
class CodeFrame:
    """Stabilizer plus tracked logical operators, updated through gates and measurements."""

    n: int
    stabilizers: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]

    def __post_init__(self) -> None:
        for name in ("stabilizers", "logical_x", "logical_z"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @classmethod
    def from_code(cls, code: StabilizerCode) -> CodeFrame:
        """Start tracking the generators and logical frame of ``code``."""
        return cls(code.n, tuple(code.generators), tuple(code.logical_x), tuple(code.logical_z))

    def as_code(self, name: str = "frame") -> StabilizerCode:
        return StabilizerCode(
            name=name, n=self.n, k=len(self.logical_x),
            generators=list(self.stabilizers), logical_x=list(self.logical_x), logical_z=list(self.logical_z),
        )

    def apply_gate(self, c: CliffordMap, targets: Sequence[int] | None = None) -> CodeFrame:
        full = c if targets is None else c.embed(self.n, targets)
        return CodeFrame(
            self.n,
            tuple(full.apply(p) for p in self.stabilizers),
            tuple(full.apply(p) for p in self.logical_x),
            tuple(full.apply(p) for p in self.logical_z),
        )

    def track_logical(self, a: PauliOperator, correction: PauliOperator | None = None) -> TrackResult:
        """
        Update the frame for measuring ``a`` and correcting to its +1 eigenspace.

        Tracked operators that anticommute with ``a`` are multiplied by the
        first anticommuting stabilizer, which ``a`` then replaces.

        Args:
            a: Hermitian operator being measured
            correction: Pauli applied on outcome -1, checked for commuting
                with everything else that is tracked

        Returns:
            The new frame, with flags for a measurement that is deterministic,
            one that reveals logical information, and whether the correction
            leaves the tracked operators alone
        """
        anticommuting = [i for i, g in enumerate(self.stabilizers) if not g.commutes(a)]
        if not anticommuting:
            group = PauliGroup(self.n, self.stabilizers)
            if group.decompose(a) is None:
                logger.warning("Measuring %s reveals logical information", a)
                return TrackResult(self, reveals_logical=True)
            return TrackResult(self, deterministic=True)

        pivot = anticommuting[0]
        m1 = self.stabilizers[pivot]
        stabilizers = list(self.stabilizers)
        for j in anticommuting[1:]:
            stabilizers[j] = m1.multiply(stabilizers[j])
        stabilizers[pivot] = a

        def update(p: PauliOperator) -> PauliOperator:
            return p if p.commutes(a) else m1.multiply(p)

        frame = CodeFrame(
            self.n,
            tuple(stabilizers),
            tuple(update(p) for p in self.logical_x),
            tuple(update(p) for p in self.logical_z),
        )
        independent = True
        if correction is not None:
            others = [s for i, s in enumerate(frame.stabilizers) if i != pivot]
            independent = all(
                correction.commutes(p) for p in others + list(frame.logical_x) + list(frame.logical_z)
            )
        return TrackResult(frame, branch_independent=independent)

    def discard_qubit(self, q: int) -> CodeFrame:
        """Drop an unentangled qubit, clearing its factor from every tracked operator."""
        group = PauliGroup(self.n, self.stabilizers)
        single = None
        for letter in "XZY":
            candidate = PauliOperator.single(self.n, q, letter).hermitian()
            combo = group.decompose(candidate)
            if combo is not None:
                single = group.product(combo)
                break
        if single is None:
            raise SimulationError(f"Qubit {q + 1} is entangled with the tracked frame")
        keep = [p for p in range(self.n) if p != q]

        def clear(p: PauliOperator) -> PauliOperator:
            if p.letter_at(q) == "I":
                return p
            if not p.commutes(single):
                raise SimulationError(f"{p} acts on discarded qubit {q + 1}")
            return p.multiply(single)

        stabilizers: list[PauliOperator] = []
        for s in self.stabilizers:
            r = clear(s).restrict(keep)
            if not r.is_identity and PauliGroup(self.n - 1, stabilizers + [r]).independent:
                stabilizers.append(r)
        return CodeFrame(
            self.n - 1,
            tuple(stabilizers),
            tuple(clear(p).restrict(keep) for p in self.logical_x),
            tuple(clear(p).restrict(keep) for p in self.logical_z),
        )

    def logical_map(self, reference: Sequence[tuple[PauliOperator, PauliOperator]] | None = None) -> CliffordMap:
        """Read the tracked frame as a map on the logical qubits.

        With no ``reference`` the frame operators must already be single-qubit
        X and Z patterns on qubits 1..k, up to sign and stabilizer factors.
        """
        k = len(self.logical_x)
        if reference is None:
            reference = [
                (PauliOperator.single(self.n, i, "X"), PauliOperator.single(self.n, i, "Z"))
                for i in range(k)
            ]
        code = StabilizerCode(
            name="reference", n=self.n, k=k, generators=list(self.stabilizers),
            logical_x=[r[0] for r in reference], logical_z=[r[1] for r in reference],
        )
        # tracked X_i equals U X_i U^dagger read in the reference frame
        xs = tuple(code.reduce_logical(p).logical_operator() for p in self.logical_x)
        zs = tuple(code.reduce_logical(p).logical_operator() for p in self.logical_z)
        return CliffordMap(k, xs, zs)


def run_dense(
    circuit: Circuit, psi: np.ndarray, rng: np.random.Generator, max_n_dense: int = DENSE_MAX_N
) -> tuple[np.ndarray, dict[int, int]]:
    """State-vector-only run; random outcomes draw one coin each, like the tableau."""
    circuit.require_valid()
    dense = DenseSimulator(psi, max_n_dense)
    if dense.n != circuit.n:
        raise SimulationError(f"Circuit on {circuit.n} qubits, state on {dense.n}")
    bits: dict[int, int] = {}
    for step in circuit:
        if isinstance(step, MeasureStep):
            p_plus = dense.probabilities(step.pauli)[1]
            if p_plus > 1 - 1e-9:
                outcome = 1
            elif p_plus < 1e-9:
                outcome = -1
            else:
                outcome = 1 - 2 * int(rng.integers(2))
            dense.measure(step.pauli, outcome)
            if outcome == -1 and step.correction is not None:
                dense.apply_pauli(step.correction)
            bits[step.bit] = 0 if outcome == 1 else 1
            continue
        if isinstance(step, ConditionalStep):
            if bits[step.bit] == 0:
                continue
            gate = step.gate
        else:
            gate = step
        dense.apply_unitary(gate.local().to_unitary(), gate.targets)
    return dense.psi, bits
