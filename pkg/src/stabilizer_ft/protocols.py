"""Measurement-based constructions of Clifford gates, each checked end to end.

A protocol is data: a circuit, the stabilizers of its ancillas, where its
encoded inputs and outputs live, and the map it should implement. Running
one entangles every input with a reference qubit, executes the circuit on a
random branch and checks that the final state carries the target map from
the references to the outputs.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .circuit import Circuit, ConditionalStep, GateStep, MeasureStep
from .clifford import CliffordMap, named_gate
from .codes import StabilizerCode, resolve_builtin
from .dense import DENSE_MAX_N, apply_pauli_to_state, discard_qubits, equal_up_to_phase, expectation
from .exceptions import ProtocolError, SimulationError, StabilizerFtError
from .faults import BlockLayout
from .pauli import PauliOperator, product
from .simulator import CodeFrame, StabilizerState, run_circuit, run_dense

logger = logging.getLogger(__name__)

DENSE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Port:
    """Where one logical qubit lives: its X and Z operators."""

    x: PauliOperator
    z: PauliOperator

    @classmethod
    def physical(cls, n: int, qubit: int) -> Port:
        """Bare X and Z on one physical qubit."""
        return cls(PauliOperator.single(n, qubit, "X"), PauliOperator.single(n, qubit, "Z"))

    @property
    def qubit(self) -> int | None:
        """The physical qubit, when the port is a bare X/Z pair on one qubit."""
        if self.x.weight() != 1 or self.x.support != self.z.support:
            return None
        q = self.x.support.bit_length() - 1
        if self.x == PauliOperator.single(self.x.n, q, "X") and self.z == PauliOperator.single(self.x.n, q, "Z"):
            return q
        return None


@dataclass
class Protocol:
    """A measurement-based circuit with the ports it carries and the map it should realise."""

    name: str
    description: str
    circuit: Circuit
    prepared: list[PauliOperator]
    inputs: list[Port]
    outputs: list[Port]
    target: CliffordMap | None
    retained: list[PauliOperator] = field(default_factory=list)
    layout: BlockLayout | None = None

    @property
    def n(self) -> int:
        return self.circuit.n

    @property
    def k(self) -> int:
        return len(self.inputs)

    def validate(self) -> list[str]:
        """Circuit problems plus port, target and register size mismatches."""
        issues = self.circuit.validate()
        if len(self.prepared) + self.k != self.n:
            issues.append(
                f"{len(self.prepared)} prepared stabilizers and {self.k} inputs do not fix {self.n} qubits"
            )
        if len(self.outputs) != self.k:
            issues.append(f"{self.k} inputs but {len(self.outputs)} outputs")
        if self.target is not None and self.target.n != self.k:
            issues.append(f"Target acts on {self.target.n} qubits, protocol carries {self.k}")
        for op in self.prepared + self.retained + [p for port in self.inputs + self.outputs for p in (port.x, port.z)]:
            if op.n != self.n:
                issues.append(f"{op} is not on {self.n} qubits")
        return issues

    def require_valid(self) -> None:
        issues = self.validate()
        if issues:
            raise ProtocolError(f"Protocol '{self.name}' is malformed: " + "; ".join(issues))

    # Reference-qubit construction

    def lift_output(self, logical: PauliOperator) -> PauliOperator:
        """``i**c X^x Z^z`` on the logical qubits, written with the output ports."""
        xs = [port.x for i, port in enumerate(self.outputs) if (logical.x >> i) & 1]
        zs = [port.z for i, port in enumerate(self.outputs) if (logical.z >> i) & 1]
        return product(xs + zs, self.n).scaled(logical.phase)

    def initial_state(self) -> StabilizerState:
        """Ancillas prepared, every input maximally entangled with a reference qubit."""
        k = self.k
        spare = PauliOperator.identity(k)
        generators = [p.tensor(spare) for p in self.prepared]
        for i, port in enumerate(self.inputs):
            generators.append(port.x.tensor(PauliOperator.single(k, i, "X")))
            generators.append(port.z.tensor(PauliOperator.single(k, i, "Z")))
        state = StabilizerState(self.n + k, tuple(generators))
        issues = state.validate()
        if issues:
            raise ProtocolError(f"Protocol '{self.name}' has an inconsistent start: " + "; ".join(issues))
        return state

    def expected_operators(self) -> list[PauliOperator]:
        """Operators that must stabilize the final state with the reference qubits attached."""
        k = self.k
        spare = PauliOperator.identity(k)
        expected = [p.tensor(spare) for p in self.retained]
        if self.target is not None:
            for i in range(k):
                expected.append(self.lift_output(self.target.x_images[i]).tensor(PauliOperator.single(k, i, "X")))
                expected.append(self.lift_output(self.target.z_images[i]).tensor(PauliOperator.single(k, i, "Z")))
        return expected

    def widened(self) -> Circuit:
        """The circuit on the register plus reference qubits."""
        spare = PauliOperator.identity(self.k)
        steps = []
        for step in self.circuit:
            if isinstance(step, MeasureStep):
                correction = None if step.correction is None else step.correction.tensor(spare)
                steps.append(MeasureStep(step.pauli.tensor(spare), step.bit, correction))
            else:
                steps.append(step)
        return Circuit(self.n + self.k, steps)

    # Frame tracking along the all-(+1) branch

    def tracked_map(self) -> CliffordMap:
        """
        Follow the logical frame through the all-(+1) branch.

        Returns:
            The map the circuit applies from the input ports to the output ports

        Raises:
            ProtocolError: If a measurement reveals logical information or a
                correction disturbs the tracked operators
        """
        frame = CodeFrame(self.n, tuple(self.prepared), tuple(p.x for p in self.inputs), tuple(p.z for p in self.inputs))
        for step in self.circuit:
            if isinstance(step, GateStep):
                frame = frame.apply_gate(step.clifford(self.n))
            elif isinstance(step, MeasureStep):
                tracked = frame.track_logical(step.pauli, step.correction)
                if tracked.reveals_logical:
                    raise ProtocolError(f"Measuring {step.pauli} reveals logical information")
                if not tracked.branch_independent:
                    raise ProtocolError(f"Correction {step.correction} disturbs the logical frame")
                frame = tracked.frame
        return frame.logical_map([(p.x, p.z) for p in self.outputs])

    def to_text(self) -> str:
        """The circuit in ``.circ`` form under a comment header."""
        header = [f"# protocol: {self.name}", f"# {self.description}"]
        if self.layout is not None:
            header.append(f"# layout: {self.layout}")
        return "\n".join(header) + "\n" + self.circuit.to_text()


@dataclass
class ProtocolResult:
    name: str
    passed: bool
    method: str
    target: CliffordMap | None = None
    achieved: CliffordMap | None = None
    outcomes: dict[int, int] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "method": self.method,
            "target": None if self.target is None else self.target.table_rows(),
            "achieved": None if self.achieved is None else self.achieved.table_rows(),
            "outcomes": {f"b{b}": 1 - 2 * v for b, v in sorted(self.outcomes.items())},
            "failures": self.failures,
        }


def verify_protocol(
    protocol: Protocol, rng: np.random.Generator, max_n_dense: int = DENSE_MAX_N
) -> ProtocolResult:
    """
    Run one random branch and check it against the target.

    Each input is entangled with a reference qubit, so the final state holds
    the whole map. Every retained and expected operator must stabilize it, and
    the dense replay must agree when the widened register fits in
    ``max_n_dense``.

    Args:
        protocol: Protocol to check
        rng: Source of the measurement outcomes
        max_n_dense: Largest widened register the dense check runs on

    Returns:
        Pass or fail, the achieved map along the tracked branch, the outcomes
        drawn and any failure messages

    Raises:
        ProtocolError: If the protocol is malformed
    """
    protocol.require_valid()
    total = protocol.n + protocol.k
    use_dense = total <= max_n_dense
    result = ProtocolResult(protocol.name, False, "both" if use_dense else "tableau", protocol.target)

    try:
        run = run_circuit(protocol.widened(), protocol.initial_state(), rng, oracle=use_dense, max_n_dense=max_n_dense)
    except SimulationError as e:
        result.failures.append(str(e))
        return result
    result.outcomes = run.bits

    expected = protocol.expected_operators()
    for op in expected:
        if not run.state.contains(op):
            result.failures.append(f"{op} does not stabilize the final state")
    if use_dense and run.dense_state is not None:
        if run.oracle_fidelity is None or run.oracle_fidelity < 1 - DENSE_TOLERANCE:
            result.failures.append(f"Dense run disagrees with the tableau (fidelity {run.oracle_fidelity})")
        for op in expected:
            value = expectation(run.dense_state, op)
            if abs(value - 1) > DENSE_TOLERANCE:
                result.failures.append(f"Dense <{op}> = {value.real:.6f}")

    if protocol.k:
        try:
            result.achieved = protocol.tracked_map()
        except StabilizerFtError as e:
            result.failures.append(str(e))
        else:
            if protocol.target is not None and result.achieved != protocol.target:
                result.failures.append("Tracked logical map differs from the target")

    result.passed = not result.failures
    logger.info("Protocol %s: %s (%s)", protocol.name, "pass" if result.passed else "FAIL", result.method)
    return result


def run_on_input(
    protocol: Protocol, psi_in: np.ndarray, rng: np.random.Generator, max_n_dense: int = DENSE_MAX_N
) -> np.ndarray:
    """Feed a dense input state through an unencoded protocol; returns the output-port state."""
    protocol.require_valid()
    in_qubits = [port.qubit for port in protocol.inputs]
    out_qubits = [port.qubit for port in protocol.outputs]
    if None in in_qubits or None in out_qubits:
        raise ProtocolError(f"Protocol '{protocol.name}' has encoded ports; dense inputs need physical ones")
    n, k = protocol.n, protocol.k
    if psi_in.shape[0] != 1 << k:
        raise ProtocolError(f"Input must be a {k}-qubit state")

    others = [q for q in range(n) if q not in in_qubits]
    psi = None
    for index in range(1 << len(others)):
        ancilla = np.zeros(1 << len(others), dtype=complex)
        ancilla[index] = 1.0
        full = np.multiply.outer(psi_in.reshape((2,) * k), ancilla.reshape((2,) * len(others)))
        candidate = np.moveaxis(full, list(range(n)), in_qubits + others).reshape(-1)
        for g in protocol.prepared:
            candidate = 0.5 * (candidate + apply_pauli_to_state(candidate, g))
        norm = np.linalg.norm(candidate)
        if norm > DENSE_TOLERANCE:
            psi = candidate / norm
            break
    if psi is None:
        raise ProtocolError(f"Prepared stabilizers of '{protocol.name}' fix no state")

    final, _ = run_dense(protocol.circuit, psi, rng, max_n_dense)
    drop = [q for q in range(n) if q not in out_qubits]
    kept = sorted(out_qubits)
    reduced = discard_qubits(final, drop, n) if drop else final
    order = [kept.index(q) for q in out_qubits]
    return np.transpose(reduced.reshape((2,) * k), order).reshape(-1)


def implements_target(protocol: Protocol, psi_in: np.ndarray, rng: np.random.Generator) -> bool:
    """Dense check that ``psi_in`` comes out as ``target |psi_in>`` up to global phase."""
    if protocol.target is None:
        raise ProtocolError(f"Protocol '{protocol.name}' has no target map")
    out = run_on_input(protocol, psi_in, rng)
    return equal_up_to_phase(out, protocol.target.to_unitary() @ psi_in)


# Construction helpers


def _block(p: PauliOperator, block: int, total: int) -> PauliOperator:
    return p.embed(total, range(block * p.n, (block + 1) * p.n))


def _conditional_pauli(circuit: Circuit, bit: int, p: PauliOperator) -> None:
    """Apply ``p`` (up to phase) one qubit at a time when ``bit`` reads 1."""
    for q in range(p.n):
        letter = p.letter_at(q)
        if letter != "I":
            circuit.conditional(bit, letter, q)


def _ops(*texts: str) -> list[PauliOperator]:
    return [PauliOperator.parse(t) for t in texts]


def _code_param(value: str | StabilizerCode) -> StabilizerCode:
    if isinstance(value, StabilizerCode):
        return value
    code = resolve_builtin(value)
    if code is None:
        raise ProtocolError(f"Protocols take built-in codes; '{value}' is not one")
    return code


def _slot(code: StabilizerCode, index: int, label: str) -> int:
    if not 1 <= index <= code.k:
        raise ProtocolError(f"{label}={index} is out of range for '{code.name}' (k={code.k})")
    return index - 1


def encode(protocol: Protocol, code: StabilizerCode) -> Protocol:
    """Run ``protocol`` on blocks of a one-qubit code: gates bitwise, Paulis as logical operators.

    Only valid when every gate of the circuit is transversal on ``code`` with
    itself as logical action; the checks in ``verify_protocol`` catch the rest.
    """
    if code.k != 1:
        raise ProtocolError(f"Encoding needs a code with one logical qubit, '{code.name}' has {code.k}")
    m, nb = protocol.n, code.n
    big = code.repeated(m)

    def lift(p: PauliOperator) -> PauliOperator:
        return big.logical_operator(p)

    circuit = Circuit(big.n)
    for step in protocol.circuit:
        if isinstance(step, GateStep):
            if step.custom is not None:
                raise ProtocolError("Custom gates cannot be applied bitwise")
            for p in range(nb):
                circuit.gate(step.name, *(t * nb + p for t in step.targets))
        elif isinstance(step, MeasureStep):
            correction = None if step.correction is None else lift(step.correction)
            circuit.measure(lift(step.pauli), step.bit, correction)
        else:
            gate = step.gate
            if gate.custom is not None or gate.name not in ("X", "Y", "Z"):
                raise ProtocolError(f"Only Pauli gates can be controlled in an encoded protocol, got {gate.name}")
            _conditional_pauli(circuit, step.bit, lift(PauliOperator.single(m, gate.targets[0], gate.name)))

    return Protocol(
        name=f"{protocol.name}:{code.name}",
        description=f"{protocol.description} (blocks of {code.name})",
        circuit=circuit,
        prepared=list(big.generators) + [lift(p) for p in protocol.prepared],
        inputs=[Port(lift(p.x), lift(p.z)) for p in protocol.inputs],
        outputs=[Port(lift(p.x), lift(p.z)) for p in protocol.outputs],
        target=protocol.target,
        retained=list(big.generators) + [lift(p) for p in protocol.retained],
        layout=BlockLayout.contiguous(nb, m),
    )


# Unencoded constructions


def p_dagger_from_cnot() -> Protocol:
    circuit = Circuit(2).gate("CNOT", 0, 1).measure("iIY", 0, "ZZ")
    return Protocol(
        name="p_dagger_from_cnot",
        description="CNOT onto a |0> ancilla, measure iY on it: P-dagger on the data",
        circuit=circuit,
        prepared=_ops("IZ"),
        inputs=[Port.physical(2, 0)],
        outputs=[Port.physical(2, 0)],
        target=named_gate("PDG"),
        retained=_ops("iIY"),
    )


def q_from_cnot_p() -> Protocol:
    circuit = Circuit(2).gate("CNOT", 1, 0).gate("P", 1).measure("IX", 0, "iXY")
    return Protocol(
        name="q_from_cnot_p",
        description="CNOT from a |+> ancilla, P on it, measure X: Q on the data",
        circuit=circuit,
        prepared=_ops("IX"),
        inputs=[Port.physical(2, 0)],
        outputs=[Port.physical(2, 0)],
        target=named_gate("Q"),
        retained=_ops("IX"),
    )


def r_from_pqp() -> Protocol:
    # P = P-dagger after Z, Q-dagger = Q after X, each with a fresh ancilla
    c = Circuit(4)
    c.gate("Z", 0).gate("CNOT", 0, 1).measure("iIYII", 0, "ZZII")
    c.gate("X", 0).gate("CNOT", 2, 0).gate("P", 2).measure("IIXI", 1, "iXIYI")
    c.gate("Z", 0).gate("CNOT", 0, 3).measure("iIIIY", 2, "ZIIZ")
    return Protocol(
        name="r_from_pqp",
        description="R as P, then Q-dagger, then P, every factor built from measurements",
        circuit=c,
        prepared=_ops("IZII", "IIXI", "IIIZ"),
        inputs=[Port.physical(4, 0)],
        outputs=[Port.physical(4, 0)],
        target=named_gate("R"),
        retained=_ops("iIYII", "IIXI", "iIIIY"),
    )


def teleport() -> Protocol:
    c = Circuit(3).gate("CNOT", 0, 1).measure("XII", 0)
    c.conditional(0, "Z", 1).conditional(0, "Z", 2)
    c.measure("IZI", 1).conditional(1, "X", 2)
    return Protocol(
        name="teleport",
        description="Teleport qubit 1 to qubit 3 through a Bell pair on qubits 2 and 3",
        circuit=c,
        prepared=_ops("IXX", "IZZ"),
        inputs=[Port.physical(3, 0)],
        outputs=[Port.physical(3, 2)],
        target=CliffordMap.identity(1),
    )


def cnot_from_g4() -> Protocol:
    c = Circuit(4).gate("G4", 0, 1, 2, 3)
    c.measure("IIXI", 0, "ZIZZ").measure("IIIX", 1, "ZZIZ")
    return Protocol(
        name="cnot_from_g4",
        description="G4 with two |0> ancillas, then measure X on both ancillas: CNOT",
        circuit=c,
        prepared=_ops("IIZI", "IIIZ"),
        inputs=[Port.physical(4, 0), Port.physical(4, 1)],
        outputs=[Port.physical(4, 0), Port.physical(4, 1)],
        target=named_gate("CNOT"),
        retained=_ops("IIXI", "IIIX"),
    )


def p_from_t3() -> Protocol:
    c = Circuit(3).gate("T3", 0, 1, 2)
    c.measure("IZI", 0, "iZXY").measure("IIZ", 1, "iXZY")
    return Protocol(
        name="p_from_t3",
        description="T3 with the data on qubit 3 and |00> ancillas, measure Z on qubits 2 and 3: P",
        circuit=c,
        prepared=_ops("ZII", "IZI"),
        inputs=[Port.physical(3, 2)],
        outputs=[Port.physical(3, 0)],
        target=named_gate("P"),
        retained=_ops("IZI", "IIZ"),
    )


TWO_QUBIT_T3_MAP = CliffordMap.from_strings(["iYI", "iYZ"], ["iZY", "iYX"])


def twoqubit_from_t3() -> Protocol:
    c = Circuit(3).gate("T3", 0, 1, 2).measure("IXI", 0, "ZZZ")
    return Protocol(
        name="twoqubit_from_t3",
        description="T3 with a |0> ancilla as qubit 3, measure X on qubit 2; data ends on qubits 1 and 3",
        circuit=c,
        prepared=_ops("IIZ"),
        inputs=[Port.physical(3, 0), Port.physical(3, 1)],
        outputs=[Port.physical(3, 0), Port.physical(3, 2)],
        target=TWO_QUBIT_T3_MAP,
        retained=_ops("IXI"),
    )


def cnot_from_t3() -> Protocol:
    """The two-qubit T3 map is (P x T^2) . CNOT(2->1) . (I x Q); undo the one-qubit parts."""
    inner = twoqubit_from_t3()
    c = Circuit(3).gate("QDG", 1)
    c.extend(inner.circuit)
    c.gate("PDG", 0).gate("T", 2)
    return Protocol(
        name="cnot_from_t3",
        description="twoqubit_from_t3 between Q-dagger and P-dagger x T: CNOT with control on output 2",
        circuit=c,
        prepared=inner.prepared,
        inputs=inner.inputs,
        outputs=inner.outputs,
        target=named_gate("CNOT", 2, [1, 0]),
        retained=inner.retained,
    )


def safe_swap() -> Protocol:
    c = Circuit(3).gate("SWAP", 0, 2).gate("SWAP", 0, 1).gate("SWAP", 1, 2)
    return Protocol(
        name="safe_swap",
        description="Exchange spots 1 and 2 through spot 3 so no single swap touches both",
        circuit=c,
        prepared=_ops("IIZ"),
        inputs=[Port.physical(3, 0), Port.physical(3, 1)],
        outputs=[Port.physical(3, 1), Port.physical(3, 0)],
        target=CliffordMap.identity(2),
        retained=_ops("IIZ"),
        layout=BlockLayout(((0, 1),)),
    )


# Encoded constructions on one or two blocks


def qubit_switch(code: str | StabilizerCode = "distance2:4", j: int = 1) -> Protocol:
    """Move encoded qubit ``j`` of the data block into a fresh block."""
    code = _code_param(code)
    slot = _slot(code, j, "j")
    n, total = code.n, 2 * code.n
    c = Circuit(total)
    for p in range(n):
        c.gate("CNOT", n + p, p)
    data_x, data_z = _block(code.logical_x[slot], 0, total), _block(code.logical_z[slot], 0, total)
    fresh_x = _block(code.logical_x[slot], 1, total)
    c.measure(data_z, 0, fresh_x.multiply(data_x))

    gens = [_block(g, b, total) for b in range(2) for g in code.generators]
    others = [l for l in range(code.k) if l != slot]
    outputs = [
        Port(_block(code.logical_x[l], 1 if l == slot else 0, total), _block(code.logical_z[l], 1 if l == slot else 0, total))
        for l in range(code.k)
    ]
    return Protocol(
        name="qubit_switch",
        description=f"Switch encoded qubit {j} of {code.name} out of the data block",
        circuit=c,
        prepared=gens + [_block(code.logical_z[l], 1, total) for l in others] + [fresh_x],
        inputs=[Port(_block(code.logical_x[l], 0, total), _block(code.logical_z[l], 0, total)) for l in range(code.k)],
        outputs=outputs,
        target=CliffordMap.identity(code.k),
        retained=gens + [data_z] + [_block(code.logical_z[l], 1, total) for l in others],
        layout=BlockLayout.contiguous(n, 2),
    )


def bell_prep_inblock(code: str | StabilizerCode = "distance2:4", i: int = 1, j: int = 2) -> Protocol:
    """Entangle encoded qubits ``i`` and ``j`` of one block into a Bell pair."""
    code = _code_param(code)
    a, b = _slot(code, i, "i"), _slot(code, j, "j")
    if a == b:
        raise ProtocolError("i and j must differ")
    xa, xb = code.logical_x[a], code.logical_x[b]
    za, zb = code.logical_z[a], code.logical_z[b]
    c = Circuit(code.n).measure(xa.multiply(xb), 0, za)
    zeros = list(code.logical_z)
    rest = [z for l, z in enumerate(zeros) if l not in (a, b)]
    return Protocol(
        name="bell_prep_inblock",
        description=f"Bell pair on encoded qubits {i} and {j} of {code.name}",
        circuit=c,
        prepared=list(code.generators) + zeros,
        inputs=[],
        outputs=[],
        target=None,
        retained=list(code.generators) + [xa.multiply(xb), za.multiply(zb)] + rest,
        layout=BlockLayout.contiguous(code.n, 1),
    )


def inblock_teleport(code: str | StabilizerCode = "distance2:4", i: int = 1, j: int = 2) -> Protocol:
    """Move encoded qubit ``i`` of one block into slot ``j`` of a second block.

    The second block starts with every encoded qubit in logical ``|0>``. Its
    slots ``i`` and ``j`` are first joined into a Bell pair by measuring
    ``Xbar_i Xbar_j``, then a transversal CNOT and two logical measurements
    finish the teleport.

    Args:
        code: Block code, as a code or a built-in name. Needs ``k >= 2``.
        i: One-based source slot, also the Bell partner of ``j``.
        j: One-based destination slot in the second block.

    Returns:
        The protocol, with target the identity from slot ``i`` of block 1 to
        slot ``j`` of block 2.

    Raises:
        ProtocolError: If a slot is out of range or ``i == j``.
    """
    code = _code_param(code)
    a, b = _slot(code, i, "i"), _slot(code, j, "j")
    if a == b:
        raise ProtocolError("i and j must differ")
    n, total = code.n, 2 * code.n

    def lx(slot: int, block: int) -> PauliOperator:
        return _block(code.logical_x[slot], block, total)

    def lz(slot: int, block: int) -> PauliOperator:
        return _block(code.logical_z[slot], block, total)

    c = Circuit(total)
    # Bell pair on slots a and b of the second block
    c.measure(lx(a, 1).multiply(lx(b, 1)), 0, lz(a, 1))
    for p in range(n):
        c.gate("CNOT", p, n + p)
    c.measure(lx(a, 0), 1)
    _conditional_pauli(c, 1, lz(a, 1).multiply(lz(b, 1)))
    c.measure(lz(a, 1), 2)
    _conditional_pauli(c, 2, lx(b, 1))

    gens = [_block(g, blk, total) for blk in range(2) for g in code.generators]
    empty = [lz(l, 0) for l in range(code.k) if l != a]
    zeros = [lz(l, 1) for l in range(code.k)]
    spare = [lz(l, 1) for l in range(code.k) if l not in (a, b)]
    return Protocol(
        name="inblock_teleport",
        description=f"Bell pair on slots {i} and {j} of a second {code.name} block, then teleport qubit {i} into slot {j}",
        circuit=c,
        prepared=gens + empty + zeros,
        inputs=[Port(lx(a, 0), lz(a, 0))],
        outputs=[Port(lx(b, 1), lz(b, 1))],
        target=CliffordMap.identity(1),
        retained=gens + empty + spare,
        layout=BlockLayout.contiguous(n, 2),
    )


def encoded_zero_prep(code: str | StabilizerCode = "steane7") -> Protocol:
    """From |0...0>, measure every generator and then every logical Z, correcting each to +1."""
    code = _code_param(code)
    c = Circuit(code.n)
    bit = 0
    for g, d in zip(code.generators, code.destabilizers()):
        c.measure(g, bit, d)
        bit += 1
    for x, z in zip(code.logical_x, code.logical_z):
        c.measure(z, bit, x)
        bit += 1
    return Protocol(
        name="encoded_zero_prep",
        description=f"Encoded |0...0> of {code.name} by measurement",
        circuit=c,
        prepared=[PauliOperator.single(code.n, q, "Z") for q in range(code.n)],
        inputs=[],
        outputs=[],
        target=None,
        retained=list(code.generators) + list(code.logical_z),
        layout=BlockLayout.contiguous(code.n, 1),
    )


def cnot_from_g4_encoded(code: str | StabilizerCode | None = None) -> Protocol:
    base = cnot_from_g4()
    if code is None:
        return base
    return encode(base, _code_param(code))


# Registry


@dataclass(frozen=True)
class ProtocolEntry:
    name: str
    summary: str
    builder: Callable[..., Protocol]
    defaults: dict[str, Any] = field(default_factory=dict)


PROTOCOLS: dict[str, ProtocolEntry] = {
    entry.name: entry
    for entry in (
        ProtocolEntry("p_dagger_from_cnot", "P-dagger from CNOT and a Y measurement", p_dagger_from_cnot),
        ProtocolEntry("q_from_cnot_p", "Q from CNOT, P and an X measurement", q_from_cnot_p),
        ProtocolEntry("r_from_pqp", "R as P . Q-dagger . P", r_from_pqp),
        ProtocolEntry("teleport", "Teleportation with classically controlled fixes", teleport),
        ProtocolEntry("cnot_from_g4", "CNOT from G4 and two ancillas", cnot_from_g4_encoded, {"code": None}),
        ProtocolEntry("p_from_t3", "P from T3 and two ancillas", p_from_t3),
        ProtocolEntry("twoqubit_from_t3", "Two-qubit Clifford from T3 and one ancilla", twoqubit_from_t3),
        ProtocolEntry("cnot_from_t3", "CNOT from T3 and one-qubit gates", cnot_from_t3),
        ProtocolEntry("qubit_switch", "Move encoded qubit j into a new block", qubit_switch, {"code": "distance2:4", "j": 1}),
        ProtocolEntry("bell_prep_inblock", "Encoded Bell pair inside one block", bell_prep_inblock, {"code": "distance2:4", "i": 1, "j": 2}),
        ProtocolEntry("inblock_teleport", "Teleport between slots of two blocks", inblock_teleport, {"code": "distance2:4", "i": 1, "j": 2}),
        ProtocolEntry("safe_swap", "Swap two spots through an ancilla spot", safe_swap),
        ProtocolEntry("encoded_zero_prep", "Encoded zero by measurement", encoded_zero_prep, {"code": "steane7"}),
    )
}


def available_protocols() -> list[ProtocolEntry]:
    return list(PROTOCOLS.values())


def build_protocol(name: str, params: dict[str, Any] | None = None) -> Protocol:
    """
    Build a registered protocol.

    Args:
        name: Registry name, e.g. ``teleport``
        params: Overrides for the entry's defaults; integer parameters accept
            their string form

    Returns:
        The validated protocol

    Raises:
        ProtocolError: If the name or a parameter is unknown, a value is not
            an integer where one is needed, or the built circuit is malformed
    """
    entry = PROTOCOLS.get(name)
    if entry is None:
        raise ProtocolError(f"Unknown protocol '{name}'. Available: {', '.join(PROTOCOLS)}")
    kwargs = dict(entry.defaults)
    for key, value in (params or {}).items():
        if key not in entry.defaults:
            raise ProtocolError(f"Protocol '{name}' takes no parameter '{key}'")
        if isinstance(entry.defaults[key], int) and not isinstance(value, int):
            try:
                value = int(value)
            except (TypeError, ValueError):
                raise ProtocolError(f"Parameter '{key}' must be an integer, got '{value}'")
        kwargs[key] = value
    protocol = entry.builder(**kwargs)
    protocol.require_valid()
    return protocol


def run_protocol(
    name: str,
    params: dict[str, Any] | None = None,
    rng: np.random.Generator | None = None,
    max_n_dense: int = DENSE_MAX_N,
) -> ProtocolResult:
    """
    Build a protocol and verify it against its target map.

    Args:
        name: Registry name
        params: Overrides for the entry's defaults
        rng: Source of measurement outcomes; seeded with 0 when omitted
        max_n_dense: Register size up to which the dense check also runs

    Returns:
        The verdict, with the achieved map and the outcomes drawn
    """
    protocol = build_protocol(name, params)
    return verify_protocol(protocol, rng if rng is not None else np.random.default_rng(0), max_n_dense)


def dump_protocol(name: str, params: dict[str, Any] | None = None) -> str:
    """The built circuit as ``.circ`` text."""
    return build_protocol(name, params).to_text()


def seed_sweep(
    name: str, seeds: Sequence[int], params: dict[str, Any] | None = None, max_n_dense: int = DENSE_MAX_N
) -> list[ProtocolResult]:
    """Verify one built protocol once per seed."""
    protocol = build_protocol(name, params)
    return [verify_protocol(protocol, np.random.default_rng(seed), max_n_dense) for seed in seeds]
