"""Exact arithmetic in the n-qubit Pauli group.

An operator is stored as ``i**phase * X^x * Z^z`` where ``x`` and ``z`` are
integer bitmasks (bit ``j`` is qubit ``j``, zero-based) and every X factor sits
to the left of every Z factor. A single-qubit ``Y`` is the product ``X*Z`` with
no phase of its own, so the Hermitian Pauli-Y matrix is written ``iY``.

Text I/O is one-based and left-to-right, matching the usual table notation:
``"XZZXI"`` puts ``X`` on qubits 1 and 4.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .exceptions import PauliError

_SIGN_TOKENS = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_PHASE_PREFIX = ("", "i", "-", "-i")
_PAULI_PATTERN = re.compile(r"^\s*([+-]?i?)([IXYZ]+)\s*$")

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}

_SINGLE_QUBIT_MATRICES = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    # Y = X @ Z
    (1, 1): np.array([[0, -1], [1, 0]], dtype=complex),
}


@dataclass(frozen=True, slots=True)
class PauliOperator:
    """A phase-tracked element of the n-qubit Pauli group."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise PauliError(f"Qubit count must be non-negative, got {self.n}")
        if self.x < 0 or self.z < 0 or (self.x | self.z) >> self.n:
            raise PauliError(f"Bit pattern does not fit in {self.n} qubits")
        if not 0 <= self.phase < 4:
            object.__setattr__(self, "phase", self.phase % 4)

    # Construction

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        """Build the operator with ``letter`` on ``qubit`` (zero-based) and I elsewhere."""
        if not 0 <= qubit < n:
            raise PauliError(f"Qubit {qubit} out of range for {n} qubits")
        try:
            xb, zb = _LETTER_BITS[letter]
        except KeyError:
            raise PauliError(f"Unknown Pauli letter '{letter}'")
        return cls(n, xb << qubit, zb << qubit)

    @classmethod
    def from_bits(
        cls, x_bits: Sequence[int], z_bits: Sequence[int], phase: int = 0
    ) -> PauliOperator:
        """Build an operator from per-qubit 0/1 sequences."""
        if len(x_bits) != len(z_bits):
            raise PauliError("X and Z bit vectors must have equal length")
        x = sum(1 << j for j, bit in enumerate(x_bits) if int(bit) % 2)
        z = sum(1 << j for j, bit in enumerate(z_bits) if int(bit) % 2)
        return cls(len(x_bits), x, z, phase)

    @classmethod
    def parse(cls, text: str) -> PauliOperator:
        """
        Parse a signed Pauli string such as ``"-iXYZ"``.

        Args:
            text: Optional sign (``+``, ``-``, ``i``, ``+i``, ``-i``) followed by
                one letter from ``IXYZ`` per qubit, qubit 1 first

        Returns:
            The operator, with ``Y`` read as ``X*Z``

        Raises:
            PauliError: If the string is empty or has an unknown letter or sign
        """
        if not text or not text.strip():
            raise PauliError("Empty Pauli string")
        match = _PAULI_PATTERN.match(text)
        if match is None:
            raise PauliError(f"Invalid Pauli string '{text}'")
        sign, letters = match.groups()
        x = z = 0
        for j, letter in enumerate(letters):
            xb, zb = _LETTER_BITS[letter]
            x |= xb << j
            z |= zb << j
        return cls(len(letters), x, z, _SIGN_TOKENS[sign])

    # Views

    def letters(self) -> str:
        out = []
        for j in range(self.n):
            xb = (self.x >> j) & 1
            zb = (self.z >> j) & 1
            out.append("IXZY"[xb | (zb << 1)])
        return "".join(out)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters()

    def x_bits(self) -> list[int]:
        return [(self.x >> j) & 1 for j in range(self.n)]

    def z_bits(self) -> list[int]:
        return [(self.z >> j) & 1 for j in range(self.n)]

    def letter_at(self, qubit: int) -> str:
        """The letter on zero-based ``qubit``, ignoring the phase."""
        xb = (self.x >> qubit) & 1
        zb = (self.z >> qubit) & 1
        return "IXZY"[xb | (zb << 1)]

    @property
    def support(self) -> int:
        """Bitmask of qubits where the operator acts non-trivially."""
        return self.x | self.z

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    # Group law

    def multiply(self, other: PauliOperator) -> PauliOperator:
        """
        Return ``self * other`` in canonical form.

        Moving the Z factors of ``self`` past the X factors of ``other``
        contributes ``(-1)**(z_self . x_other)`` to the phase.

        Args:
            other: Right-hand factor on the same number of qubits

        Returns:
            The exact product, phase included

        Raises:
            PauliError: If the operators act on different numbers of qubits
        """
        self._check_size(other)
        phase = self.phase + other.phase + 2 * ((self.z & other.x).bit_count() & 1)
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, phase % 4)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return self.multiply(other)

    def scaled(self, k: int) -> PauliOperator:
        """Multiply by ``i**k``."""
        return PauliOperator(self.n, self.x, self.z, (self.phase + k) % 4)

    def __neg__(self) -> PauliOperator:
        return self.scaled(2)

    def inverse(self) -> PauliOperator:
        """The group inverse; equal to ``self`` for Hermitian operators."""
        # (X^x Z^z)^-1 = Z^z X^x = (-1)^(x.z) X^x Z^z
        phase = -self.phase + 2 * (self.x & self.z).bit_count()
        return PauliOperator(self.n, self.x, self.z, phase % 4)

    def commutes(self, other: PauliOperator) -> bool:
        """
        Check whether two operators commute.

        Args:
            other: Operator on the same number of qubits

        Returns:
            True when the symplectic product of the bit patterns is zero

        Raises:
            PauliError: If the operators act on different numbers of qubits
        """
        self._check_size(other)
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def weight(self) -> int:
        """Number of qubits with a non-identity factor."""
        return (self.x | self.z).bit_count()

    def tensor(self, other: PauliOperator) -> PauliOperator:
        """Concatenate ``other`` after ``self`` on ``self.n + other.n`` qubits."""
        return PauliOperator(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            (self.phase + other.phase) % 4,
        )

    def is_hermitian(self) -> bool:
        """True when the phase parity matches the number of Y factors."""
        return self.phase % 2 == (self.x & self.z).bit_count() % 2

    def hermitian(self) -> PauliOperator:
        """The +1-signed Hermitian operator with this bit pattern."""
        return PauliOperator(self.n, self.x, self.z, (self.x & self.z).bit_count() % 2)

    def equal_up_to_phase(self, other: PauliOperator) -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def without_phase(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, 0)

    # Qubit relabelling

    def embed(self, n: int, qubits: Sequence[int]) -> PauliOperator:
        """
        Place this operator on ``qubits`` (zero-based) of an ``n``-qubit register.

        Args:
            n: Size of the larger register
            qubits: Destination of each factor, one entry per qubit of ``self``

        Returns:
            The operator on ``n`` qubits with identity elsewhere and the same phase

        Raises:
            PauliError: If ``qubits`` has the wrong length or an entry is out of range
        """
        if len(qubits) != self.n:
            raise PauliError(
                f"Need {self.n} target qubits, got {len(qubits)}"
            )
        x = z = 0
        for j, q in enumerate(qubits):
            if not 0 <= q < n:
                raise PauliError(f"Qubit {q} out of range for {n} qubits")
            x |= ((self.x >> j) & 1) << q
            z |= ((self.z >> j) & 1) << q
        return PauliOperator(n, x, z, self.phase)

    def restrict(self, qubits: Sequence[int]) -> PauliOperator:
        """Keep only ``qubits`` (in the given order); the phase is carried over."""
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << j
            z |= ((self.z >> q) & 1) << j
        return PauliOperator(len(qubits), x, z, self.phase)

    def permute(self, perm: Sequence[int]) -> PauliOperator:
        """Move the factor on qubit ``j`` to qubit ``perm[j]``."""
        return self.embed(self.n, perm)

    # Dense view

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix, qubit 1 being the most significant factor."""
        factors = [
            _SINGLE_QUBIT_MATRICES[((self.x >> j) & 1, (self.z >> j) & 1)]
            for j in range(self.n)
        ]
        matrix = reduce(np.kron, factors, np.eye(1, dtype=complex))
        return (1j ** self.phase) * matrix

    def _check_size(self, other: PauliOperator) -> None:
        if self.n != other.n:
            raise PauliError(f"Size mismatch: {self.n} vs {other.n} qubits")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """``a * b`` with exact phase."""
    return a.multiply(b)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return a.commutes(b)


def weight(a: PauliOperator) -> int:
    return a.weight()


def tensor(*operators: PauliOperator) -> PauliOperator:
    """
    Tensor product, the first operator on the lowest-numbered qubits.

    Args:
        *operators: Factors in qubit order

    Returns:
        One operator on the summed number of qubits, phases added

    Raises:
        PauliError: If no operator is given
    """
    if not operators:
        raise PauliError("tensor needs at least one operator")
    return reduce(PauliOperator.tensor, operators)


def parse_pauli(text: str) -> PauliOperator:
    return PauliOperator.parse(text)


def format_pauli(p: PauliOperator) -> str:
    return str(p)


def product(operators: Iterable[PauliOperator], n: int) -> PauliOperator:
    """Ordered product of ``operators``; the identity when empty."""
    return reduce(PauliOperator.multiply, operators, PauliOperator.identity(n))


def all_paulis(n: int) -> Iterable[PauliOperator]:
    """Every phase-0 bit pattern on ``n`` qubits."""
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliOperator(n, x, z)


def random_mask(n: int, rng: np.random.Generator) -> int:
    """Uniform n-bit mask; safe for n beyond the int64 range."""
    bits = rng.integers(0, 2, size=n)
    return sum(1 << j for j, bit in enumerate(bits) if bit)


def random_pauli(n: int, rng: np.random.Generator, hermitian: bool = False) -> PauliOperator:
    """
    Draw a uniformly random bit pattern and phase.

    Args:
        n: Number of qubits
        rng: Source of randomness
        hermitian: Restrict the phase to a random sign on the Hermitian form

    Returns:
        A random operator, possibly the identity
    """
    x = random_mask(n, rng)
    z = random_mask(n, rng)
    if hermitian:
        return PauliOperator(n, x, z).hermitian().scaled(2 * int(rng.integers(2)))
    return PauliOperator(n, x, z, int(rng.integers(4)))
