"""Bit-packed GF(2) linear algebra on symplectic Pauli vectors.

A Pauli on n qubits maps to the 2n-bit integer ``x | z << n``. Rows are plain
Python ints so elimination is word-parallel XOR.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence

from .exceptions import PauliError
from .pauli import PauliOperator, product

logger = logging.getLogger(__name__)


def symplectic_vector(p: PauliOperator) -> int:
    """Pack ``p`` as ``x | z << n``, dropping the phase."""
    return p.x | (p.z << p.n)


def symplectic_row(p: PauliOperator) -> int:
    """Row ``r`` such that ``popcount(r & v) % 2`` is the symplectic form with ``v``."""
    return p.z | (p.x << p.n)


def vector_to_pauli(v: int, n: int, hermitian: bool = True) -> PauliOperator:
    p = PauliOperator(n, v & ((1 << n) - 1), v >> n)
    return p.hermitian() if hermitian else p


def inner(row: int, v: int) -> int:
    return (row & v).bit_count() & 1


def rref(rows: Sequence[int], width: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form.

    Returns all rows (pivot rows first, in pivot order) and the pivot columns.
    """
    work = list(rows)
    pivots: list[int] = []
    r = 0
    for col in range(width):
        sel = next((i for i in range(r, len(work)) if (work[i] >> col) & 1), None)
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        for i in range(len(work)):
            if i != r and (work[i] >> col) & 1:
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
    return work, pivots


def gf2_rank(rows: Iterable[int]) -> int:
    basis = GF2Basis()
    for v in rows:
        basis.add(v)
    return len(basis)


def nullspace(rows: Sequence[int], width: int) -> list[int]:
    """Basis of ``{v : popcount(row & v) even for every row}``."""
    reduced, pivots = rref(rows, width)
    pivot_set = set(pivots)
    basis = []
    for free in range(width):
        if free in pivot_set:
            continue
        v = 1 << free
        for row, col in zip(reduced, pivots):
            if (row >> free) & 1:
                v |= 1 << col
        basis.append(v)
    return basis


def solve_linear_system(rows: Sequence[int], rhs: Sequence[int], width: int) -> int | None:
    """Find ``v`` with ``popcount(rows[i] & v) % 2 == rhs[i]``; free variables are 0."""
    if len(rows) != len(rhs):
        raise ValueError("rows and rhs must have equal length")
    augmented = [row | ((b & 1) << width) for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, width)
    v = 0
    for row, col in zip(reduced, pivots):
        if (row >> width) & 1:
            v |= 1 << col
    for row in reduced[len(pivots):]:
        # 0 = 1
        if row >> width:
            return None
    return v


class GF2Basis:
    """Incremental echelon basis that remembers which inputs built each row."""

    def __init__(self) -> None:
        self._rows: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(residual, combination)``; residual 0 means ``v`` is in the span."""
        combo = 0
        while v:
            top = v.bit_length() - 1
            entry = self._rows.get(top)
            if entry is None:
                break
            v ^= entry[0]
            combo ^= entry[1]
        return v, combo

    def add(self, v: int, combo: int = 0) -> bool:
        """
        Add a vector to the span.

        Args:
            v: Vector to add
            combo: Label of ``v``; row labels are XORed as rows are combined

        Returns:
            False when ``v`` was already in the span
        """
        residual, used = self.reduce(v)
        if residual == 0:
            return False
        self._rows[residual.bit_length() - 1] = (residual, combo ^ used)
        return True

    def solve(self, v: int) -> int | None:
        """XOR of the labels that build ``v``, or None when ``v`` is outside the span."""
        residual, combo = self.reduce(v)
        return combo if residual == 0 else None


class PauliGroup:
    """Group generated by a list of Paulis with exact, phase-aware membership."""

    def __init__(self, n: int, generators: Sequence[PauliOperator]):
        self.n = n
        self.generators = tuple(generators)
        for g in self.generators:
            if g.n != n:
                raise PauliError(f"Generator {g} is not on {n} qubits")
        self._basis = GF2Basis()
        self.independent = True
        for i, g in enumerate(self.generators):
            if not self._basis.add(symplectic_vector(g), 1 << i):
                self.independent = False
        logger.debug(
            "Built group on %d qubits: %d generators, rank %d",
            n, len(self.generators), len(self._basis),
        )

    @property
    def rank(self) -> int:
        return len(self._basis)

    def decompose(self, p: PauliOperator) -> int | None:
        """Bitmask of generators whose product equals ``p`` up to phase."""
        if p.n != self.n:
            raise PauliError(f"Size mismatch: {p.n} vs {self.n} qubits")
        return self._basis.solve(symplectic_vector(p))

    def product(self, combo: int) -> PauliOperator:
        """Ordered product of the generators selected by ``combo``."""
        return product(
            (g for i, g in enumerate(self.generators) if (combo >> i) & 1), self.n
        )

    def phase_of(self, p: PauliOperator) -> int | None:
        """``phi`` with ``p == i**phi * (product of generators)``, or None."""
        combo = self.decompose(p)
        if combo is None:
            return None
        return (p.phase - self.product(combo).phase) % 4

    def contains(self, p: PauliOperator) -> bool:
        """True when ``p`` is in the group with its exact phase."""
        return self.phase_of(p) == 0

    def contains_up_to_phase(self, p: PauliOperator) -> bool:
        return self.decompose(p) is not None
