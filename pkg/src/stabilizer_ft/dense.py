"""Dense state-vector reference simulation for small registers.

Index convention: qubit 1 is the most significant bit of a basis index, so
``PauliOperator.to_matrix`` and every function here agree.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from .exceptions import SimulationError, SizeLimitError
from .pauli import PauliOperator

logger = logging.getLogger(__name__)

DENSE_MAX_N = 10
PROBABILITY_TOLERANCE = 1e-9


def _index_mask(bits: int, n: int) -> int:
    return sum(1 << (n - 1 - j) for j in range(n) if (bits >> j) & 1)


def _parity(indices: np.ndarray, mask: int) -> np.ndarray:
    parity = np.zeros(indices.shape, dtype=np.int64)
    bit = 0
    while mask >> bit:
        if (mask >> bit) & 1:
            parity ^= (indices >> bit) & 1
        bit += 1
    return parity


def check_size(n: int, max_n: int = DENSE_MAX_N) -> None:
    """Raise SizeLimitError when ``n`` qubits exceed ``max_n``."""
    if n > max_n:
        raise SizeLimitError(f"Dense simulation is limited to n <= {max_n} (got n={n})")


def basis_vector(bits: Sequence[int]) -> np.ndarray:
    """``|b_1 b_2 ... b_n>`` as a vector."""
    n = len(bits)
    check_size(n)
    index = sum(int(b) << (n - 1 - j) for j, b in enumerate(bits))
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def apply_pauli_to_state(psi: np.ndarray, p: PauliOperator) -> np.ndarray:
    """``p |psi>`` by index permutation and sign flips."""
    dim = psi.shape[0]
    if dim != 1 << p.n:
        raise SimulationError(f"State of dimension {dim} does not match {p.n} qubits")
    indices = np.arange(dim)
    x_mask = _index_mask(p.x, p.n)
    z_mask = _index_mask(p.z, p.n)
    # X^x Z^z |b> = (-1)^(z.b) |b xor x>
    signs = 1 - 2 * _parity(indices, z_mask)
    out = np.empty_like(psi)
    out[indices ^ x_mask] = (1j ** p.phase) * signs * psi
    return out


def apply_unitary(psi: np.ndarray, u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Apply a ``2**k`` unitary to ``targets`` (zero-based, in gate order)."""
    k = len(targets)
    tensor = psi.reshape((2,) * n)
    gate = u.reshape((2,) * (2 * k))
    moved = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the gate outputs first
    return np.moveaxis(moved, list(range(k)), list(targets)).reshape(-1)


def expectation(psi: np.ndarray, p: PauliOperator) -> complex:
    """``<psi|p|psi>``."""
    return complex(np.vdot(psi, apply_pauli_to_state(psi, p)))


def project(psi: np.ndarray, p: PauliOperator, sign: int) -> tuple[float, np.ndarray]:
    """Probability of outcome ``sign`` and the renormalised post-measurement state."""
    projected = 0.5 * (psi + sign * apply_pauli_to_state(psi, p))
    probability = float(np.real(np.vdot(projected, projected)))
    if probability < PROBABILITY_TOLERANCE:
        return 0.0, projected
    return probability, projected / np.sqrt(probability)


def outcome_probabilities(psi: np.ndarray, p: PauliOperator) -> dict[int, float]:
    """Exact ``{+1: p_plus, -1: p_minus}`` for a Hermitian Pauli."""
    if not p.is_hermitian():
        raise SimulationError(f"Cannot measure non-Hermitian {p}")
    mean = float(np.real(expectation(psi, p)))
    return {1: (1 + mean) / 2, -1: (1 - mean) / 2}


def stabilizer_state_vector(generators: Sequence[PauliOperator]) -> np.ndarray:
    """The unique state fixed by ``generators``, global phase chosen so the first nonzero amplitude is positive."""
    if not generators:
        raise SimulationError("Need at least one generator")
    n = generators[0].n
    check_size(n)
    dim = 1 << n
    for b in range(dim):
        psi = np.zeros(dim, dtype=complex)
        psi[b] = 1.0
        for g in generators:
            psi = 0.5 * (psi + apply_pauli_to_state(psi, g))
        norm = np.linalg.norm(psi)
        if norm > 1e-9:
            psi = psi / norm
            first = psi[np.flatnonzero(np.abs(psi) > 1e-12)[0]]
            return psi * (abs(first) / first)
    raise SimulationError("Generators do not stabilize any state")


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|^2`` for normalised vectors."""
    return float(abs(np.vdot(a, b)) ** 2)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Matrices or vectors equal up to one global phase."""
    flat_a = a.reshape(-1)
    flat_b = b.reshape(-1)
    pivot = int(np.argmax(np.abs(flat_a)))
    if abs(flat_b[pivot]) < tol:
        return bool(np.allclose(flat_a, 0, atol=tol) and np.allclose(flat_b, 0, atol=tol))
    phase = flat_a[pivot] / flat_b[pivot]
    if abs(abs(phase) - 1) > tol:
        return False
    return bool(np.allclose(flat_a, phase * flat_b, atol=tol))


def reduced_density_matrix(psi: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Partial trace onto ``keep`` (zero-based, in the given order)."""
    tensor = psi.reshape((2,) * n)
    rest = [q for q in range(n) if q not in keep]
    ordered = np.transpose(tensor, list(keep) + rest).reshape(1 << len(keep), -1)
    return ordered @ ordered.conj().T


def discard_qubits(psi: np.ndarray, drop: Sequence[int], n: int) -> np.ndarray:
    """Remove qubits that are in a product state with the rest; returns the remaining vector."""
    keep = [q for q in range(n) if q not in drop]
    rho = reduced_density_matrix(psi, keep, n)
    values, vectors = np.linalg.eigh(rho)
    if abs(values[-1] - 1) > 1e-9:
        raise SimulationError(f"Qubits {[q + 1 for q in drop]} are entangled with the rest")
    out = vectors[:, -1]
    first = out[np.flatnonzero(np.abs(out) > 1e-12)[0]]
    return out * (abs(first) / first)


class DenseSimulator:
    """State vector with exact Pauli measurements, for cross-checking tableau runs."""

    def __init__(self, psi: np.ndarray, max_n: int = DENSE_MAX_N):
        dim = psi.shape[0]
        n = dim.bit_length() - 1
        if dim != 1 << n:
            raise SimulationError(f"State dimension {dim} is not a power of two")
        check_size(n, max_n)
        self.n = n
        self.psi = psi.astype(complex)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> DenseSimulator:
        return cls(basis_vector(bits))

    def apply_pauli(self, p: PauliOperator) -> None:
        self.psi = apply_pauli_to_state(self.psi, p)

    def apply_unitary(self, u: np.ndarray, targets: Sequence[int]) -> None:
        self.psi = apply_unitary(self.psi, u, targets, self.n)

    def probabilities(self, p: PauliOperator) -> dict[int, float]:
        """Probability of each outcome, keyed +1 and -1."""
        return outcome_probabilities(self.psi, p)

    def measure(self, p: PauliOperator, outcome: int) -> float:
        """Project onto ``outcome``; returns its probability."""
        probability, post = project(self.psi, p, outcome)
        if probability == 0.0:
            raise SimulationError(f"Outcome {outcome:+d} of {p} has probability zero")
        self.psi = post
        return probability
