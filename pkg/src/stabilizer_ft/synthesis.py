"""Decompose a Clifford map into R, P, P-dagger, CNOT and Pauli gates.

Qubits are cleared one at a time: gates are pushed onto the map from the
left until ``X_q`` and ``Z_q`` map to themselves, touching only qubits not
yet cleared. For ``X_q`` the image is rotated to X-form on the remaining
qubits and a CNOT fan-out from ``q`` removes every X factor but the one on
``q``; this fan-out is the controlled step of the usual induction over
qubits, written as plain CNOTs. ``Z_q`` is then rotated to Z-form and
cleared by CNOTs into ``q``, and X or Z on ``q`` fixes the signs. The
circuit is the inverse of that reduction.
"""

from __future__ import annotations

import logging

from .circuit import Circuit
from .clifford import CliffordMap, compose, inverse_gate_name, named_gate
from .exceptions import InvalidCliffordError
from .pauli import PauliOperator

logger = logging.getLogger(__name__)


class _Reducer:
    """Map being cleared, and the gates pushed onto it so far."""

    def __init__(self, c: CliffordMap):
        self.n = c.n
        self.current = c
        self.applied: list[tuple[str, tuple[int, ...]]] = []

    def push(self, name: str, *targets: int) -> None:
        """Apply gate ``name`` after the current map."""
        self.current = compose(named_gate(name, self.n, targets), self.current)
        self.applied.append((name, targets))

    def x_image(self, q: int) -> PauliOperator:
        return self.current.x_images[q]

    def z_image(self, q: int) -> PauliOperator:
        return self.current.z_images[q]

    def to_x(self, p: PauliOperator, j: int) -> None:
        """Turn the factor of ``p`` on qubit ``j`` into X."""
        letter = p.letter_at(j)
        if letter == "Z":
            self.push("R", j)
        elif letter == "Y":
            self.push("PDG", j)

    def to_z(self, p: PauliOperator, j: int) -> None:
        letter = p.letter_at(j)
        if letter == "X":
            self.push("R", j)
        elif letter == "Y":
            self.push("PDG", j)
            self.push("R", j)

    def clear(self, q: int) -> None:
        """Reduce the images of ``X_q`` and ``Z_q`` to themselves."""
        # X_q image -> X_q
        a = self.x_image(q)
        for j in range(q, self.n):
            self.to_x(a, j)
        a = self.x_image(q)
        if not (a.x >> q) & 1:
            j = next(j for j in range(q + 1, self.n) if (a.x >> j) & 1)
            self.push("CNOT", j, q)
        a = self.x_image(q)
        for j in range(q + 1, self.n):
            if (a.x >> j) & 1:
                self.push("CNOT", q, j)

        # Z_q image -> Z_q, keeping X_q fixed
        b = self.z_image(q)
        if b.letter_at(q) == "Y":
            for name in ("PDG", "R", "PDG"):
                self.push(name, q)
        b = self.z_image(q)
        for j in range(q + 1, self.n):
            self.to_z(b, j)
        b = self.z_image(q)
        for j in range(q + 1, self.n):
            if (b.z >> j) & 1:
                self.push("CNOT", j, q)

        if self.x_image(q).phase:
            self.push("Z", q)
        if self.z_image(q).phase:
            self.push("X", q)
        if self.x_image(q) != PauliOperator.single(self.n, q, "X") or self.z_image(
            q
        ) != PauliOperator.single(self.n, q, "Z"):
            raise InvalidCliffordError(f"Could not clear qubit {q + 1}; the map is not valid")


def synthesize(c: CliffordMap) -> Circuit:
    """
    Decompose a Clifford map into gates.

    Args:
        c: Valid map on any number of qubits

    Returns:
        A circuit of R, P, PDG, CNOT, X and Z whose replay equals ``c``
        exactly, phases included

    Raises:
        InvalidCliffordError: If ``c`` breaks the commutation relations or has
            a non-Hermitian image
    """
    c.require_valid()
    reducer = _Reducer(c)
    for q in range(c.n):
        reducer.clear(q)
    circuit = Circuit(c.n)
    for name, targets in reversed(reducer.applied):
        circuit.gate(inverse_gate_name(name), *targets)
    logger.debug("Synthesized %d-qubit map into %d gates", c.n, len(circuit))
    return circuit
