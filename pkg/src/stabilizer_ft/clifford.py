"""Clifford maps stored as the images of every ``X_j`` and ``Z_j``.

A map carries no global phase: two maps are equal when their image tables
are equal. ``compose(outer, inner)`` means "first inner, then outer".
"""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dense import apply_pauli_to_state
from .exceptions import FormatError, InvalidCliffordError, PauliError, SizeLimitError, UnknownGateError
from .pauli import PauliOperator
from .symplectic import GF2Basis, symplectic_vector

logger = logging.getLogger(__name__)

UNITARY_MAX_N = 10


@dataclass(frozen=True)
class CliffordMap:
    """Conjugation action ``P -> U P U^dagger`` given on the generators."""

    n: int
    x_images: tuple[PauliOperator, ...]
    z_images: tuple[PauliOperator, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_images", tuple(self.x_images))
        object.__setattr__(self, "z_images", tuple(self.z_images))
        if len(self.x_images) != self.n or len(self.z_images) != self.n:
            raise InvalidCliffordError(f"Need {self.n} X and Z images")
        for image in self.x_images + self.z_images:
            if image.n != self.n:
                raise InvalidCliffordError(f"Image {image} is not on {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> CliffordMap:
        """The map fixing every ``X_j`` and ``Z_j``."""
        return cls(
            n,
            tuple(PauliOperator.single(n, j, "X") for j in range(n)),
            tuple(PauliOperator.single(n, j, "Z") for j in range(n)),
        )

    @classmethod
    def from_strings(cls, x_images: Sequence[str], z_images: Sequence[str]) -> CliffordMap:
        """Build a map from the Pauli strings of the X and Z images, qubit 1 first."""
        xs = [PauliOperator.parse(s) for s in x_images]
        zs = [PauliOperator.parse(s) for s in z_images]
        return cls(len(xs), tuple(xs), tuple(zs))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> CliffordMap:
        """Wire relabelling that carries qubit ``j`` to ``perm[j]`` (zero-based)."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise InvalidCliffordError(f"Not a permutation of {n} wires: {list(perm)}")
        return cls(
            n,
            tuple(PauliOperator.single(n, perm[j], "X") for j in range(n)),
            tuple(PauliOperator.single(n, perm[j], "Z") for j in range(n)),
        )

    # Action

    def apply(self, p: PauliOperator) -> PauliOperator:
        """Image of ``p``, exact including phase."""
        if p.n != self.n:
            raise PauliError(f"Size mismatch: map on {self.n} qubits, operator on {p.n}")
        result = PauliOperator.identity(self.n).scaled(p.phase)
        for j in range(self.n):
            if (p.x >> j) & 1:
                result = result.multiply(self.x_images[j])
        for j in range(self.n):
            if (p.z >> j) & 1:
                result = result.multiply(self.z_images[j])
        return result

    def __call__(self, p: PauliOperator) -> PauliOperator:
        return self.apply(p)

    def then(self, outer: CliffordMap) -> CliffordMap:
        return compose(outer, self)

    def inverse(self) -> CliffordMap:
        return invert(self)

    def embed(self, n: int, targets: Sequence[int]) -> CliffordMap:
        """Act on ``targets`` (zero-based) of an ``n``-qubit register."""
        if len(targets) != self.n:
            raise InvalidCliffordError(f"Gate acts on {self.n} qubits, got {len(targets)} targets")
        if len(set(targets)) != len(targets):
            raise InvalidCliffordError(f"Repeated target in {list(targets)}")
        xs = [PauliOperator.single(n, j, "X") for j in range(n)]
        zs = [PauliOperator.single(n, j, "Z") for j in range(n)]
        for j, t in enumerate(targets):
            if not 0 <= t < n:
                raise InvalidCliffordError(f"Target {t + 1} out of range for {n} qubits")
            xs[t] = self.x_images[j].embed(n, targets)
            zs[t] = self.z_images[j].embed(n, targets)
        return CliffordMap(n, tuple(xs), tuple(zs))

    def tensor(self, other: CliffordMap) -> CliffordMap:
        """``self`` on the first qubits, ``other`` on the ones after."""
        n = self.n + other.n
        left = range(self.n)
        right = range(self.n, n)
        return CliffordMap(
            n,
            tuple(p.embed(n, left) for p in self.x_images)
            + tuple(p.embed(n, right) for p in other.x_images),
            tuple(p.embed(n, left) for p in self.z_images)
            + tuple(p.embed(n, right) for p in other.z_images),
        )

    def is_identity(self) -> bool:
        return self == CliffordMap.identity(self.n)

    def validate(self) -> list[str]:
        """Return the list of violated map invariants."""
        issues = []
        labelled = [(f"X{j + 1}", p) for j, p in enumerate(self.x_images)] + [
            (f"Z{j + 1}", p) for j, p in enumerate(self.z_images)
        ]
        for label, p in labelled:
            if not p.is_hermitian():
                issues.append(f"Image of {label} ({p}) is not Hermitian")
        for (la, a), (lb, b) in itertools.combinations(labelled, 2):
            should_anticommute = la[0] != lb[0] and la[1:] == lb[1:]
            if a.commutes(b) == should_anticommute:
                issues.append(f"Images of {la} and {lb} break the commutation relations")
        return issues

    def require_valid(self) -> None:
        issues = self.validate()
        if issues:
            raise InvalidCliffordError("; ".join(issues))

    # Text

    def table_rows(self) -> list[str]:
        """One ``X1 -> image`` line per generator, the ``.gate`` file layout."""
        rows = [f"X{j + 1} -> {p}" for j, p in enumerate(self.x_images)]
        rows += [f"Z{j + 1} -> {p}" for j, p in enumerate(self.z_images)]
        return rows

    def to_gate_text(self) -> str:
        return "\n".join(self.table_rows()) + "\n"

    def to_unitary(self, max_n: int = UNITARY_MAX_N) -> np.ndarray:
        """Dense unitary realising this map, normalised so column 0 starts positive real."""
        return to_unitary(self, max_n)


def compose(outer: CliffordMap, inner: CliffordMap) -> CliffordMap:
    """The map of "first ``inner``, then ``outer``"."""
    if outer.n != inner.n:
        raise InvalidCliffordError(f"Size mismatch: {outer.n} vs {inner.n} qubits")
    return CliffordMap(
        inner.n,
        tuple(outer.apply(p) for p in inner.x_images),
        tuple(outer.apply(p) for p in inner.z_images),
    )


def invert(c: CliffordMap) -> CliffordMap:
    """
    Compute the inverse map.

    Each ``X_j`` and ``Z_j`` is written as a product of images by solving over
    GF(2), then the phase of the preimage is fixed so ``c`` carries it back
    exactly.

    Args:
        c: Map to invert

    Returns:
        The map ``d`` with ``compose(c, d)`` and ``compose(d, c)`` the identity

    Raises:
        InvalidCliffordError: If the images are not independent
    """
    n = c.n
    basis = GF2Basis()
    for j, p in enumerate(c.x_images):
        basis.add(symplectic_vector(p), 1 << j)
    for j, p in enumerate(c.z_images):
        basis.add(symplectic_vector(p), 1 << (n + j))
    if len(basis) != 2 * n:
        raise InvalidCliffordError("Images are not independent; the map is not invertible")

    def preimage(target: PauliOperator) -> PauliOperator:
        combo = basis.solve(symplectic_vector(target))
        assert combo is not None
        source = PauliOperator(n, combo & ((1 << n) - 1), combo >> n)
        return source.scaled(target.phase - c.apply(source).phase)

    return CliffordMap(
        n,
        tuple(preimage(PauliOperator.single(n, j, "X")) for j in range(n)),
        tuple(preimage(PauliOperator.single(n, j, "Z")) for j in range(n)),
    )


def to_unitary(c: CliffordMap, max_n: int = UNITARY_MAX_N) -> np.ndarray:
    """Build ``U`` column by column from the stabilized state of the Z images."""
    if c.n > max_n:
        raise SizeLimitError(f"Dense unitaries are limited to n <= {max_n} (map has n={c.n})")
    dim = 1 << c.n
    zero_image = None
    for b in range(dim):
        psi = np.zeros(dim, dtype=complex)
        psi[b] = 1.0
        for z in c.z_images:
            psi = 0.5 * (psi + apply_pauli_to_state(psi, z))
        norm = np.linalg.norm(psi)
        if norm > 1e-9:
            zero_image = psi / norm
            break
    if zero_image is None:
        raise InvalidCliffordError("Z images do not stabilize a state")

    u = np.zeros((dim, dim), dtype=complex)
    for v in range(dim):
        col = zero_image
        for j in range(c.n):
            # qubit 1 is the most significant index bit
            if (v >> (c.n - 1 - j)) & 1:
                col = apply_pauli_to_state(col, c.x_images[j])
        u[:, v] = col
    first = u[np.flatnonzero(np.abs(u[:, 0]) > 1e-12)[0], 0]
    return u * (abs(first) / first)


# Gate registry

_GATE_TABLES: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "I": (("X",), ("Z",)),
    "X": (("X",), ("-Z",)),
    "Y": (("-X",), ("-Z",)),
    "Z": (("-X",), ("Z",)),
    "R": (("Z",), ("X",)),
    "P": (("iY",), ("Z",)),
    "PDG": (("-iY",), ("Z",)),
    "Q": (("X",), ("iY",)),
    "QDG": (("X",), ("-iY",)),
    "T": (("iY",), ("X",)),
    "TDG": (("Z",), ("iY",)),
    "CNOT": (("XX", "IX"), ("ZI", "ZZ")),
    "CZ": (("XZ", "ZX"), ("ZI", "IZ")),
    "SWAP": (("IX", "XI"), ("IZ", "ZI")),
    "T3": (("iXYZ", "iYXZ", "XXX"), ("iZXY", "iXZY", "ZZZ")),
}

GATE_ALIASES = {
    "H": "R",
    "S": "P",
    "P†": "PDG",
    "SDG": "PDG",
    "Q†": "QDG",
    "T†": "TDG",
    "T2": "TDG",
    "CX": "CNOT",
}

GATE_INVERSES = {
    "P": "PDG",
    "PDG": "P",
    "Q": "QDG",
    "QDG": "Q",
    "T": "TDG",
    "TDG": "T",
}

_G_FAMILY = re.compile(r"^G(\d+)$")


def canonical_gate_name(name: str) -> str:
    """
    Resolve a gate name or alias to its table key.

    Args:
        name: Gate name in any case, e.g. ``h``, ``Sdg`` or ``g6``

    Returns:
        The canonical upper-case name

    Raises:
        UnknownGateError: If the name is neither a known gate nor ``G<m>``
    """
    key = name.strip().upper()
    key = GATE_ALIASES.get(key, key)
    if key in _GATE_TABLES or _G_FAMILY.match(key):
        return key
    raise UnknownGateError(
        f"Unknown gate '{name}'. Available: {', '.join(available_gates())}"
    )


def available_gates() -> list[str]:
    return list(_GATE_TABLES) + ["G4", "G<m> (even m >= 4)"]


def inverse_gate_name(name: str) -> str:
    """Name of the inverse gate; self-inverse gates map to themselves."""
    canonical = canonical_gate_name(name)
    return GATE_INVERSES.get(canonical, canonical)


def all_but_one_gate(m: int) -> CliffordMap:
    """``X_j -> prod of X_l over l != j-1`` and likewise for Z, on an even number of qubits."""
    if m < 4 or m % 2:
        raise UnknownGateError(f"G{m} needs an even qubit count of at least 4")
    full = (1 << m) - 1
    xs = tuple(PauliOperator(m, full & ~(1 << ((j - 1) % m)), 0) for j in range(m))
    zs = tuple(PauliOperator(m, 0, full & ~(1 << ((j - 1) % m))) for j in range(m))
    return CliffordMap(m, xs, zs)


@lru_cache(maxsize=None)
def base_gate(name: str) -> CliffordMap:
    """The gate on its own qubits."""
    canonical = canonical_gate_name(name)
    family = _G_FAMILY.match(canonical)
    if family:
        return all_but_one_gate(int(family.group(1)))
    xs, zs = _GATE_TABLES[canonical]
    return CliffordMap.from_strings(xs, zs)


def gate_arity(name: str) -> int:
    """Number of qubits gate ``name`` acts on."""
    return base_gate(name).n


def named_gate(name: str, n: int | None = None, targets: Sequence[int] | None = None) -> CliffordMap:
    """Gate ``name`` acting on ``targets`` (zero-based) of an ``n``-qubit register."""
    gate = base_gate(name)
    if n is None:
        return gate
    if targets is None:
        targets = list(range(gate.n))
    if len(targets) != gate.n:
        raise InvalidCliffordError(
            f"Gate {name} acts on {gate.n} qubits, got {len(targets)} targets"
        )
    return gate.embed(n, targets)


def random_clifford(n: int, seed: int | np.random.Generator) -> CliffordMap:
    """Seeded map built from a random sequence of R, P, CNOT, X and Z.

    Deterministic in ``seed`` but not uniformly distributed over the group.
    """
    if n < 1:
        raise InvalidCliffordError("Need at least one qubit")
    rng = np.random.default_rng(seed)
    names = ["R", "P", "X", "Z"] + (["CNOT", "CNOT"] if n > 1 else [])
    current = CliffordMap.identity(n)
    for _ in range(4 * n * n + 4):
        name = names[int(rng.integers(len(names)))]
        if name == "CNOT":
            targets = [int(t) for t in rng.choice(n, size=2, replace=False)]
        else:
            targets = [int(rng.integers(n))]
        current = compose(named_gate(name, n, targets), current)
    return current


_SINGLE_QUBIT_NAMES = ("I", "X", "Y", "Z", "R", "P", "PDG", "Q", "QDG", "T", "TDG")


@lru_cache(maxsize=1)
def single_qubit_cliffords() -> tuple[tuple[str, CliffordMap], ...]:
    """The 24 single-qubit Clifford maps, labelled by a shortest registry word.

    A two-letter label ``"A*B"`` means B first, then A.
    """
    found: dict[CliffordMap, str] = {}
    for name in _SINGLE_QUBIT_NAMES:
        found.setdefault(base_gate(name), name)
    for outer, inner in itertools.product(_SINGLE_QUBIT_NAMES, repeat=2):
        found.setdefault(compose(base_gate(outer), base_gate(inner)), f"{outer}*{inner}")
    if len(found) != 24:
        raise InvalidCliffordError(f"Expected 24 single-qubit maps, found {len(found)}")
    return tuple((label, c) for c, label in found.items())


# .gate files

_GATE_LINE = re.compile(r"^([XZ])(\d+)\s*->\s*(\S+)$")


def parse_gate_text(text: str) -> CliffordMap:
    """Parse lines ``X<i> -> <pauli>`` and ``Z<i> -> <pauli>``."""
    images: dict[tuple[str, int], PauliOperator] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _GATE_LINE.match(line)
        if match is None:
            raise FormatError(f"line {lineno}: expected 'X<i> -> <pauli>' or 'Z<i> -> <pauli>'")
        key = (match.group(1), int(match.group(2)))
        if key in images:
            raise FormatError(f"line {lineno}: duplicate {key[0]}{key[1]}")
        try:
            images[key] = PauliOperator.parse(match.group(3))
        except PauliError as e:
            raise FormatError(f"line {lineno}: {e}")
    n = len(images) // 2
    expected = {(kind, i) for kind in "XZ" for i in range(1, n + 1)}
    if set(images) != expected:
        raise FormatError(f"Gate table must list X1..X{n} and Z1..Z{n}")
    try:
        return CliffordMap(
            n,
            tuple(images[("X", i)] for i in range(1, n + 1)),
            tuple(images[("Z", i)] for i in range(1, n + 1)),
        )
    except InvalidCliffordError as e:
        raise FormatError(str(e))
