"""Stabilizer codes, their normalizers, logical operators and syndromes."""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any

import numpy as np
from pydantic import (
    BaseModel,
    Field,
    PlainSerializer,
    PlainValidator,
    PrivateAttr,
    field_validator,
    model_validator,
)

from .exceptions import (
    CodeNotFoundError,
    FormatError,
    InvalidCodeError,
    NotCssError,
    NotInNormalizerError,
    PauliError,
    SizeLimitError,
)
from .pauli import PauliOperator, product, random_mask
from .symplectic import (
    GF2Basis,
    PauliGroup,
    nullspace,
    solve_linear_system,
    symplectic_row,
    symplectic_vector,
    vector_to_pauli,
)

logger = logging.getLogger(__name__)

DISTANCE_MAX_N = 14
SECTOR_MAX_RANK = 20


def _coerce_pauli(value: Any) -> PauliOperator:
    if isinstance(value, PauliOperator):
        return value
    if isinstance(value, str):
        return PauliOperator.parse(value)
    raise ValueError(f"Expected a Pauli string, got {type(value).__name__}")


PauliField = Annotated[
    PauliOperator,
    PlainValidator(_coerce_pauli),
    PlainSerializer(str, return_type=str),
]


@dataclass(frozen=True)
class Syndrome:
    """Anticommutation bits of an error against each generator."""

    bits: tuple[int, ...]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def is_trivial(self) -> bool:
        return not any(self.bits)

    def __xor__(self, other: Syndrome) -> Syndrome:
        return Syndrome(tuple(a ^ b for a, b in zip(self.bits, other.bits)))


@dataclass(frozen=True)
class LogicalDecomposition:
    """``p == i**phase * L(logical) * prod(selected generators)``.

    ``logical`` is a phase-free pattern on the k encoded qubits and
    ``stabilizer_part`` is a bitmask over the code's generators.
    """

    logical: PauliOperator
    phase: int
    stabilizer_part: int

    def logical_operator(self) -> PauliOperator:
        """The encoded Pauli including its phase, on k qubits."""
        return self.logical.scaled(self.phase)

    def selected(self) -> list[int]:
        return [i for i in range(self.stabilizer_part.bit_length()) if (self.stabilizer_part >> i) & 1]


@dataclass(frozen=True)
class CssStructure:
    x_sector: tuple[PauliOperator, ...]
    z_sector: tuple[PauliOperator, ...]


class CssReport(BaseModel):
    """Self-duality and doubly-even flags of a CSS code."""

    self_dual: bool
    doubly_even: bool
    x_sector_rank: int
    z_sector_rank: int
    x_sector_weights: list[int] = Field(default_factory=list)


class StabilizerCode(BaseModel):
    """An [[n, k]] stabilizer code with an explicit logical frame."""

    name: str = "custom"
    n: int = Field(ge=1)
    k: int = Field(ge=0)
    generators: list[PauliField] = Field(default_factory=list)
    logical_x: list[PauliField] = Field(default_factory=list)
    logical_z: list[PauliField] = Field(default_factory=list)

    _group: PauliGroup | None = PrivateAttr(default=None)

    @field_validator("generators", "logical_x", "logical_z", mode="before")
    @classmethod
    def split_strings(cls, v: Any) -> Any:
        """Accept a single whitespace-separated string as a list."""
        if isinstance(v, str):
            return v.split()
        return v

    @model_validator(mode="after")
    def check_shapes(self) -> StabilizerCode:
        if self.k > self.n:
            raise ValueError(f"k={self.k} exceeds n={self.n}")
        for label, ops in (
            ("generator", self.generators),
            ("logical X", self.logical_x),
            ("logical Z", self.logical_z),
        ):
            for op in ops:
                if op.n != self.n:
                    raise ValueError(f"{label} {op} acts on {op.n} qubits, expected {self.n}")
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise ValueError(
                f"Expected {self.k} logical X and Z operators, got "
                f"{len(self.logical_x)} and {len(self.logical_z)}"
            )
        return self

    # Group views

    def stabilizer_group(self) -> PauliGroup:
        """The group of the generators, built once."""
        if self._group is None:
            self._group = PauliGroup(self.n, self.generators)
        return self._group

    def validate_code(self) -> list[str]:
        """Check every code invariant and return a list of violations."""
        issues: list[str] = []
        expected = self.n - self.k
        if len(self.generators) != expected:
            issues.append(
                f"Expected n-k={expected} generators, found {len(self.generators)}"
            )
        for i, g in enumerate(self.generators, 1):
            if not g.is_hermitian():
                issues.append(f"M{i} = {g} is not Hermitian")
        for (i, a), (j, b) in itertools.combinations(enumerate(self.generators, 1), 2):
            if not a.commutes(b):
                issues.append(f"M{i} and M{j} anticommute")
        if not self.stabilizer_group().independent:
            issues.append("Generators are not independent")

        logicals = [("X", i, op) for i, op in enumerate(self.logical_x, 1)] + [
            ("Z", i, op) for i, op in enumerate(self.logical_z, 1)
        ]
        for kind, i, op in logicals:
            if not op.is_hermitian():
                issues.append(f"{kind}{i} = {op} is not Hermitian")
            for j, g in enumerate(self.generators, 1):
                if not op.commutes(g):
                    issues.append(f"{kind}{i} anticommutes with M{j}")
        for (ka, i, a), (kb, j, b) in itertools.combinations(logicals, 2):
            should_anticommute = ka != kb and i == j
            if a.commutes(b) == should_anticommute:
                relation = "commute" if should_anticommute else "anticommute"
                issues.append(f"{ka}{i} and {kb}{j} should not {relation}")
        return issues

    def is_valid(self) -> bool:
        return not self.validate_code()

    def require_valid(self) -> None:
        """Raise InvalidCodeError listing every violated code invariant."""
        issues = self.validate_code()
        if issues:
            raise InvalidCodeError(f"Code '{self.name}' is invalid: " + "; ".join(issues))

    # Queries

    def _check(self, p: PauliOperator) -> None:
        if p.n != self.n:
            raise PauliError(f"Size mismatch: operator on {p.n} qubits, code on {self.n}")

    def syndrome(self, e: PauliOperator) -> Syndrome:
        """
        Measure which generators anticommute with an error.

        Args:
            e: Error on the ``n`` physical qubits

        Returns:
            One bit per generator, 1 where the generator anticommutes with ``e``

        Raises:
            PauliError: If ``e`` is not on ``n`` qubits
        """
        self._check(e)
        return Syndrome(tuple(0 if g.commutes(e) else 1 for g in self.generators))

    def in_stabilizer(self, p: PauliOperator) -> int | None:
        """Phase ``phi`` with ``p == i**phi * (product of generators)``, or None."""
        self._check(p)
        return self.stabilizer_group().phase_of(p)

    def in_normalizer(self, p: PauliOperator) -> bool:
        """True when ``p`` commutes with every generator."""
        self._check(p)
        return all(g.commutes(p) for g in self.generators)

    def logical_operator(self, logical: PauliOperator) -> PauliOperator:
        """Lift ``i**c X^x Z^z`` on k encoded qubits to ``i**c prod(Xbar^x) prod(Zbar^z)``."""
        if logical.n != self.k:
            raise PauliError(f"Logical operator must act on {self.k} qubits")
        xs = [op for i, op in enumerate(self.logical_x) if (logical.x >> i) & 1]
        zs = [op for i, op in enumerate(self.logical_z) if (logical.z >> i) & 1]
        return product(xs + zs, self.n).scaled(logical.phase)

    def reduce_logical(self, p: PauliOperator) -> LogicalDecomposition:
        """Split a normalizer element into an encoded Pauli and a stabilizer element."""
        if not self.in_normalizer(p):
            raise NotInNormalizerError(f"{p} does not commute with the stabilizer of '{self.name}'")
        x = sum(1 << i for i, zbar in enumerate(self.logical_z) if not p.commutes(zbar))
        z = sum(1 << i for i, xbar in enumerate(self.logical_x) if not p.commutes(xbar))
        logical = PauliOperator(self.k, x, z)
        residue = self.logical_operator(logical).inverse().multiply(p)
        group = self.stabilizer_group()
        combo = group.decompose(residue)
        if combo is None:
            raise InvalidCodeError(
                f"Logical frame of '{self.name}' does not span the normalizer"
            )
        phase = (residue.phase - group.product(combo).phase) % 4
        return LogicalDecomposition(logical, phase, combo)

    def reassemble(self, decomposition: LogicalDecomposition) -> PauliOperator:
        """Inverse of :meth:`reduce_logical`."""
        lifted = self.logical_operator(decomposition.logical)
        return lifted.multiply(
            self.stabilizer_group().product(decomposition.stabilizer_part)
        ).scaled(decomposition.phase)

    def distance(self, max_n: int = DISTANCE_MAX_N) -> int:
        """Exact minimum weight of a non-trivial logical operator."""
        if self.n > max_n:
            raise SizeLimitError(
                f"Distance search is limited to n <= {max_n} (code has n={self.n})"
            )
        if self.k == 0:
            raise InvalidCodeError("Distance is undefined for a code with k=0")
        rows = [symplectic_row(g) for g in self.generators]
        group = self.stabilizer_group()
        letters = ((1, 0), (0, 1), (1, 1))
        for w in range(1, self.n + 1):
            for support in itertools.combinations(range(self.n), w):
                for choice in itertools.product(letters, repeat=w):
                    x = z = 0
                    for q, (xb, zb) in zip(support, choice):
                        x |= xb << q
                        z |= zb << q
                    v = x | (z << self.n)
                    if any((row & v).bit_count() & 1 for row in rows):
                        continue
                    if group.decompose(PauliOperator(self.n, x, z)) is None:
                        logger.debug("Distance witness for %s: %s", self.name, PauliOperator(self.n, x, z))
                        return w
        raise InvalidCodeError(f"No non-trivial logical operator found for '{self.name}'")

    def css_structure(self) -> CssStructure | None:
        """X-only and Z-only sectors when they generate the whole stabilizer."""
        m = len(self.generators)
        if m == 0:
            return CssStructure((), ())
        group = self.stabilizer_group()
        sectors = []
        for part in ("z", "x"):
            rows = [
                sum(1 << i for i, g in enumerate(self.generators) if (getattr(g, part) >> q) & 1)
                for q in range(self.n)
            ]
            sectors.append(tuple(group.product(c) for c in nullspace(rows, m)))
        x_sector, z_sector = sectors
        if len(x_sector) + len(z_sector) != group.rank:
            return None
        return CssStructure(x_sector, z_sector)

    def doubly_even_self_dual_check(self) -> CssReport:
        """
        Check the conditions under which bitwise R and P are transversal.

        Returns:
            Whether the Z sector spans the same space as the X sector, whether
            every element of the X sector has weight divisible by 4, and the
            sector ranks and weights seen

        Raises:
            NotCssError: If the code has no CSS structure
            SizeLimitError: If the X sector is too large to enumerate
        """
        structure = self.css_structure()
        if structure is None:
            raise NotCssError(f"Code '{self.name}' has no CSS structure")
        if len(self.generators) > SECTOR_MAX_RANK:
            raise SizeLimitError(
                f"Sector enumeration is limited to n-k <= {SECTOR_MAX_RANK}"
            )
        x_rows = [p.x for p in structure.x_sector]
        z_rows = [p.z for p in structure.z_sector]
        x_span = GF2Basis()
        for v in x_rows:
            x_span.add(v)
        self_dual = len(x_rows) == len(z_rows) and all(
            x_span.solve(v) is not None for v in z_rows
        )
        weights = []
        doubly_even = True
        for bits in range(1, 1 << len(x_rows)):
            v = 0
            for i, row in enumerate(x_rows):
                if (bits >> i) & 1:
                    v ^= row
            w = v.bit_count()
            weights.append(w)
            if w % 4:
                doubly_even = False
        return CssReport(
            self_dual=self_dual,
            doubly_even=doubly_even,
            x_sector_rank=len(x_rows),
            z_sector_rank=len(z_rows),
            x_sector_weights=sorted(set(weights)),
        )

    # Constructions

    def repeated(self, m: int) -> StabilizerCode:
        """The code ``S x S x ... x S`` on m blocks, block-major qubit order."""
        if m < 1:
            raise InvalidCodeError("Block count must be positive")
        total = self.n * m

        def lift(ops: Sequence[PauliOperator]) -> list[PauliOperator]:
            return [
                op.embed(total, range(b * self.n, (b + 1) * self.n))
                for b in range(m)
                for op in ops
            ]

        return StabilizerCode(
            name=self.name if m == 1 else f"{self.name}^{m}",
            n=total,
            k=self.k * m,
            generators=lift(self.generators),
            logical_x=lift(self.logical_x),
            logical_z=lift(self.logical_z),
        )

    def destabilizers(self) -> list[PauliOperator]:
        """For each generator, a Pauli anticommuting with it alone and commuting with the logicals."""
        constraints = list(self.generators) + list(self.logical_x) + list(self.logical_z)
        rows = [symplectic_row(op) for op in constraints]
        out = []
        for i in range(len(self.generators)):
            rhs = [1 if j == i else 0 for j in range(len(constraints))]
            v = solve_linear_system(rows, rhs, 2 * self.n)
            if v is None:
                raise InvalidCodeError(f"No destabilizer exists for M{i + 1}")
            out.append(vector_to_pauli(v, self.n))
        return out

    def describe(self) -> dict[str, Any]:
        """Info document: sizes, operators and CSS flags."""
        info: dict[str, Any] = {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "generators": [str(g) for g in self.generators],
            "logical_x": [str(p) for p in self.logical_x],
            "logical_z": [str(p) for p in self.logical_z],
        }
        structure = self.css_structure()
        info["css"] = structure is not None
        if structure is not None and len(self.generators) <= SECTOR_MAX_RANK:
            report = self.doubly_even_self_dual_check()
            info["self_dual"] = report.self_dual
            info["doubly_even"] = report.doubly_even
        return info

    # .stab text format

    def to_text(self) -> str:
        """Render as ``.stab`` text that :func:`parse_stab` reads back."""
        lines = [f"# {self.name}", f"n={self.n} k={self.k}"]
        lines += [f"M{i}: {g}" for i, g in enumerate(self.generators, 1)]
        lines += [f"X{i}: {p}" for i, p in enumerate(self.logical_x, 1)]
        lines += [f"Z{i}: {p}" for i, p in enumerate(self.logical_z, 1)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "custom") -> StabilizerCode:
        return parse_stab(text, name)

    @classmethod
    def from_file(cls, file_path: Path, name: str | None = None) -> StabilizerCode:
        """
        Load a ``.stab`` file.

        Args:
            file_path: Path to the file
            name: Code name; defaults to the file stem

        Returns:
            The parsed code

        Raises:
            CodeNotFoundError: If the file does not exist
            FormatError: If the file cannot be parsed
        """
        try:
            text = Path(file_path).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise CodeNotFoundError(f"Code file not found: {file_path}")
        return parse_stab(text, name or Path(file_path).stem)

    def save(self, file_path: Path) -> None:
        Path(file_path).write_text(self.to_text(), encoding="utf-8")


_HEADER = re.compile(r"^n\s*=\s*(\d+)\s+k\s*=\s*(\d+)$")
_ROW = re.compile(r"^([MXZ])(\d+)\s*:\s*(\S+)$")


def _positive(g: PauliOperator) -> PauliOperator:
    # non-Hermitian rows stay as written so validate_code reports them
    return g.hermitian() if g.is_hermitian() else g


def parse_stab(text: str, name: str = "custom") -> StabilizerCode:
    """Parse the line-based .stab format.

    Hermitian generators written with a ``-`` sign are stored with sign +1.
    Logical rows keep their sign.

    Args:
        text: Contents of a ``.stab`` file.
        name: Name given to the parsed code.

    Returns:
        The code, with a derived logical frame when the file lists no
        ``X``/``Z`` rows and ``k > 0``.

    Raises:
        FormatError: If a line cannot be parsed, rows are duplicated or
            misnumbered, or the counts disagree with the header.
    """
    header: tuple[int, int] | None = None
    rows: dict[str, dict[int, PauliOperator]] = {"M": {}, "X": {}, "Z": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            match = _HEADER.match(line)
            if match is None:
                raise FormatError(f"line {lineno}: expected header 'n=<int> k=<int>'")
            header = (int(match.group(1)), int(match.group(2)))
            continue
        match = _ROW.match(line)
        if match is None:
            raise FormatError(f"line {lineno}: cannot parse '{line}'")
        kind, index, pauli = match.group(1), int(match.group(2)), match.group(3)
        if index in rows[kind]:
            raise FormatError(f"line {lineno}: duplicate {kind}{index}")
        try:
            rows[kind][index] = PauliOperator.parse(pauli)
        except PauliError as e:
            raise FormatError(f"line {lineno}: {e}")
    if header is None:
        raise FormatError("missing header 'n=<int> k=<int>'")
    n, k = header

    def ordered(kind: str) -> list[PauliOperator]:
        found = rows[kind]
        if sorted(found) != list(range(1, len(found) + 1)):
            raise FormatError(f"{kind} rows must be numbered 1..{len(found)}")
        return [found[i] for i in range(1, len(found) + 1)]

    written = ordered("M")
    generators = [_positive(g) for g in written]
    flipped = [i for i, (g, raw) in enumerate(zip(generators, written), 1) if g != raw]
    if flipped:
        logger.info(
            "Stored %s of '%s' with sign +1", ", ".join(f"M{i}" for i in flipped), name
        )
    logical_x, logical_z = ordered("X"), ordered("Z")
    if not logical_x and not logical_z and k > 0:
        logger.info("No logical operators in '%s'; deriving a frame", name)
        logical_x, logical_z = derive_logical_frame(n, generators)
    try:
        return StabilizerCode(
            name=name, n=n, k=k, generators=generators,
            logical_x=logical_x, logical_z=logical_z,
        )
    except ValueError as e:
        raise FormatError(str(e))


def _symplectic_form(u: int, v: int, n: int) -> int:
    mask = (1 << n) - 1
    return ((u & mask & (v >> n)).bit_count() + ((u >> n) & v & mask).bit_count()) & 1


def derive_logical_frame(
    n: int, generators: Sequence[PauliOperator]
) -> tuple[list[PauliOperator], list[PauliOperator]]:
    """Pick logical X and Z operators for a stabilizer given only its generators.

    Normalizer vectors outside the stabilizer span are paired by symplectic
    Gram-Schmidt, taking the lowest-index candidate at every step.
    """
    for g in generators:
        if g.n != n:
            raise InvalidCodeError(f"Generator {g} is not on {n} qubits")
    normalizer = nullspace([symplectic_row(g) for g in generators], 2 * n)
    span = GF2Basis()
    for g in generators:
        span.add(symplectic_vector(g))
    pool = [v for v in normalizer if span.add(v)]
    xs: list[PauliOperator] = []
    zs: list[PauliOperator] = []
    while pool:
        a = pool.pop(0)
        partner = next((i for i, b in enumerate(pool) if _symplectic_form(a, b, n)), None)
        if partner is None:
            raise InvalidCodeError("Generators do not define a valid stabilizer")
        b = pool.pop(partner)
        rest = []
        for c in pool:
            with_a = _symplectic_form(c, a, n)
            with_b = _symplectic_form(c, b, n)
            if with_b:
                c ^= a
            if with_a:
                c ^= b
            rest.append(c)
        pool = rest
        xs.append(vector_to_pauli(a, n))
        zs.append(vector_to_pauli(b, n))
    return xs, zs


def random_code(n: int, k: int, rng: np.random.Generator, css_bias: float = 0.5) -> StabilizerCode:
    """Seeded random code by rejection sampling of commuting, independent generators.

    Generators carry phase 0, so only patterns with an even number of Y factors
    are drawn. Codes whose CSS sectors would carry a -1 sign are redrawn.
    """
    if not 0 <= k < n:
        raise InvalidCodeError(f"Need 0 <= k < n, got n={n} k={k}")
    while True:
        css_kind = rng.random() < css_bias
        generators: list[PauliOperator] = []
        span = GF2Basis()
        tries = 0
        while len(generators) < n - k and tries < 500:
            tries += 1
            if css_kind:
                bits = random_mask(n, rng)
                p = PauliOperator(n, bits, 0) if rng.random() < 0.5 else PauliOperator(n, 0, bits)
            else:
                p = PauliOperator(n, random_mask(n, rng), random_mask(n, rng))
            if p.is_identity or not p.is_hermitian():
                continue
            if not all(p.commutes(g) for g in generators):
                continue
            if not span.add(symplectic_vector(p)):
                continue
            generators.append(p)
        if len(generators) < n - k:
            continue
        logical_x, logical_z = derive_logical_frame(n, generators)
        code = StabilizerCode(
            name=f"random-{n}-{k}", n=n, k=k, generators=generators,
            logical_x=logical_x, logical_z=logical_z,
        )
        structure = code.css_structure()
        if structure is not None and any(
            p.phase for p in structure.x_sector + structure.z_sector
        ):
            continue
        return code


# Built-in codes

_STEANE = (
    ["XXXXIII", "XXIIXXI", "XIXIXIX", "ZZZZIII", "ZZIIZZI", "ZIZIZIZ"],
    ["IIIIXXX"],
    ["IIIIZZZ"],
)

_FIVE_QUBIT = (
    ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
    ["XXXXX"],
    ["ZZZZZ"],
)

_EIGHT_QUBIT = (
    ["XXXXXXXX", "ZZZZZZZZ", "XIXIZYZY", "XIYZXIYZ", "XZIYIYXZ"],
    ["XXIIIZIZ", "XIXZIIZI", "XIIZXZII"],
    ["IZIZIZIZ", "IIZZIIZZ", "IIIIZZZZ"],
)

BUILTIN_CODES = ("steane7", "five_qubit", "eight_qubit", "distance2", "trivial")


def distance2_code(n: int) -> StabilizerCode:
    """Two generators, all-X and all-Z; ``Xbar_i = X_1 X_{i+1}``, ``Zbar_i = Z_{i+1} Z_n``."""
    if n < 4 or n % 2:
        raise InvalidCodeError(f"distance2 needs an even n >= 4, got {n}")
    generators = [PauliOperator(n, (1 << n) - 1, 0), PauliOperator(n, 0, (1 << n) - 1)]
    logical_x = [PauliOperator(n, 1 | (1 << i), 0) for i in range(1, n - 1)]
    logical_z = [PauliOperator(n, 0, (1 << i) | (1 << (n - 1))) for i in range(1, n - 1)]
    return StabilizerCode(
        name=f"distance2:{n}", n=n, k=n - 2, generators=generators,
        logical_x=logical_x, logical_z=logical_z,
    )


def builtin_code(name: str, n: int | None = None) -> StabilizerCode:
    """One of the built-in codes: steane7, five_qubit, eight_qubit, distance2 or trivial."""
    tables = {"steane7": _STEANE, "five_qubit": _FIVE_QUBIT, "eight_qubit": _EIGHT_QUBIT}
    if name in tables:
        gens, xs, zs = tables[name]
        return StabilizerCode(
            name=name, n=len(xs[0]), k=len(xs), generators=gens, logical_x=xs, logical_z=zs,
        )
    if name == "distance2":
        return distance2_code(4 if n is None else n)
    if name == "trivial":
        size = 1 if n is None else n
        return StabilizerCode(
            name="trivial" if size == 1 else f"trivial:{size}", n=size, k=size,
            logical_x=[PauliOperator.single(size, q, "X") for q in range(size)],
            logical_z=[PauliOperator.single(size, q, "Z") for q in range(size)],
        )
    raise CodeNotFoundError(
        f"Unknown built-in code '{name}'. Available: {', '.join(BUILTIN_CODES)}"
    )


def resolve_builtin(spec: str) -> StabilizerCode | None:
    """Parse ``name`` or ``name:<n>``; None when the name is not built in."""
    name, _, param = spec.partition(":")
    if name not in BUILTIN_CODES:
        return None
    if param:
        try:
            size = int(param)
        except ValueError:
            raise CodeNotFoundError(f"Invalid size in '{spec}'")
        return builtin_code(name, size)
    return builtin_code(name)
