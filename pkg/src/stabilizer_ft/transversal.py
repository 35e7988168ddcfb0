"""Transversal and permutation gates on stabilizer codes.

Qubit ``p`` of block ``b`` is register qubit ``b * n + p``; encoded qubit
``i`` of block ``b`` is logical qubit ``b * k + i``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Union

from .clifford import CliffordMap, base_gate, compose, single_qubit_cliffords
from .codes import StabilizerCode
from .exceptions import TransversalError
from .pauli import PauliOperator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BitwiseStage:
    """Gate ``gate`` on qubit ``p`` of every block, for every position ``p``."""

    gate: CliffordMap
    name: str = "custom"


@dataclass(frozen=True)
class PermutationStage:
    """Relabel positions inside each block: position ``p`` moves to ``perm[p]``."""

    perm: tuple[int, ...]
    name: str = "perm"


Stage = Union[BitwiseStage, PermutationStage]


@dataclass(frozen=True)
class TransversalCandidate:
    blocks: int
    stages: tuple[Stage, ...]
    name: str = "candidate"

    @classmethod
    def bitwise(cls, gate: str | CliffordMap, blocks: int | None = None) -> TransversalCandidate:
        """Bitwise gate by name or map; ``blocks`` defaults to the gate's arity."""
        if isinstance(gate, str):
            name, clifford = gate, base_gate(gate)
        else:
            name, clifford = "custom", gate
        m = clifford.n if blocks is None else blocks
        return cls(m, (BitwiseStage(clifford, name),), name)

    @classmethod
    def block_permutation(cls, perm: Sequence[int], name: str = "perm", blocks: int = 1) -> TransversalCandidate:
        """Permute qubits inside every block; ``perm`` is zero-based."""
        return cls(blocks, (PermutationStage(tuple(perm), name),), name)

    def then(self, other: TransversalCandidate) -> TransversalCandidate:
        """Run ``other`` after this candidate."""
        if other.blocks != self.blocks:
            raise TransversalError("Stages must act on the same number of blocks")
        return TransversalCandidate(self.blocks, self.stages + other.stages, f"{self.name};{other.name}")

    def validate(self, n: int) -> list[str]:
        issues = []
        if self.blocks < 1:
            issues.append("Block count must be positive")
        for stage in self.stages:
            if isinstance(stage, BitwiseStage):
                if stage.gate.n != self.blocks:
                    issues.append(
                        f"Bitwise {stage.name} acts on {stage.gate.n} qubits but there are {self.blocks} blocks"
                    )
                issues.extend(stage.gate.validate())
            elif sorted(stage.perm) != list(range(n)):
                issues.append(f"Permutation {[p + 1 for p in stage.perm]} is not a bijection on 1..{n}")
        return issues

    def physical_map(self, n: int) -> CliffordMap:
        """Conjugation map on all ``blocks * n`` qubits."""
        issues = self.validate(n)
        if issues:
            raise TransversalError("; ".join(issues))
        m = self.blocks
        total = m * n
        current = CliffordMap.identity(total)
        for stage in self.stages:
            if isinstance(stage, BitwiseStage):
                xs: list[PauliOperator] = [PauliOperator.identity(total)] * total
                zs: list[PauliOperator] = [PauliOperator.identity(total)] * total
                for p in range(n):
                    wires = [b * n + p for b in range(m)]
                    for b, wire in enumerate(wires):
                        xs[wire] = stage.gate.x_images[b].embed(total, wires)
                        zs[wire] = stage.gate.z_images[b].embed(total, wires)
                step = CliffordMap(total, tuple(xs), tuple(zs))
            else:
                step = CliffordMap.permutation(
                    [b * n + stage.perm[p] for b in range(m) for p in range(n)]
                )
            current = compose(step, current)
        return current


@dataclass(frozen=True)
class GeneratorImage:
    """Image of generator ``index`` of the repeated code, and how it decomposes."""

    index: int
    generator: PauliOperator
    image: PauliOperator
    stabilizer_part: int | None
    phase: int | None

    @property
    def in_stabilizer(self) -> bool:
        """True when the image is the generator product with sign +1."""
        return self.phase == 0

    def selected(self) -> list[int]:
        part = self.stabilizer_part or 0
        return [i for i in range(part.bit_length()) if (part >> i) & 1]

    def describe(self) -> str:
        if self.stabilizer_part is None:
            return f"M{self.index + 1} -> {self.image} (outside the stabilizer)"
        product = "".join(f"M{i + 1}" for i in self.selected()) or "I"
        sign = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase or 0]
        return f"M{self.index + 1} -> {sign}{product}"


@dataclass
class TransversalVerdict:
    code: str
    candidate: str
    blocks: int
    valid: bool
    generator_images: list[GeneratorImage] = field(default_factory=list)
    witness: GeneratorImage | None = None
    logical: CliffordMap | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "code": self.code,
            "candidate": self.candidate,
            "blocks": self.blocks,
            "valid": self.valid,
            "witness": None if self.witness is None else {
                "generator": f"M{self.witness.index + 1}",
                "image": str(self.witness.image),
                "reason": "wrong sign" if self.witness.stabilizer_part is not None else "outside stabilizer",
            },
            "generator_images": [g.describe() for g in self.generator_images],
            "logical": [] if self.logical is None else self.logical.table_rows(),
        }


def check_transversal(code: StabilizerCode, candidate: TransversalCandidate) -> TransversalVerdict:
    """
    Check whether a candidate gate preserves the stabilizer of ``code``.

    Every generator of the code repeated over ``candidate.blocks`` blocks is
    conjugated and decomposed in that stabilizer. The check stops at the
    first image that lies outside it or comes back with a sign.

    Args:
        code: Code the gate acts on, one copy per block
        candidate: Bitwise and permutation stages to apply

    Returns:
        The verdict. A valid one carries the induced logical map; an invalid
        one carries the witness generator

    Raises:
        TransversalError: If the candidate is malformed for this code
    """
    m = candidate.blocks
    big = code.repeated(m)
    u = candidate.physical_map(code.n)
    group = big.stabilizer_group()
    images = []
    for i, g in enumerate(big.generators):
        image = u.apply(g)
        combo = group.decompose(image)
        phase = None if combo is None else (image.phase - group.product(combo).phase) % 4
        record = GeneratorImage(i, g, image, combo, phase)
        images.append(record)
        if phase != 0:
            logger.debug("%s on %s fails at %s", candidate.name, code.name, record.describe())
            return TransversalVerdict(code.name, candidate.name, m, False, images, witness=record)

    xs = tuple(big.reduce_logical(u.apply(p)).logical_operator() for p in big.logical_x)
    zs = tuple(big.reduce_logical(u.apply(p)).logical_operator() for p in big.logical_z)
    logical = CliffordMap(big.k, xs, zs)
    return TransversalVerdict(code.name, candidate.name, m, True, images, logical=logical)


def logical_action(code: StabilizerCode, candidate: TransversalCandidate) -> CliffordMap:
    """The induced logical map; raises TransversalError when the candidate is not valid."""
    verdict = check_transversal(code, candidate)
    if verdict.logical is None:
        raise TransversalError(
            f"{candidate.name} is not valid on '{code.name}': {verdict.witness.describe() if verdict.witness else ''}"
        )
    return verdict.logical


@dataclass(frozen=True)
class SweepEntry:
    label: str
    gate: CliffordMap
    verdict: TransversalVerdict


def search_single_qubit_transversal(code: StabilizerCode) -> list[SweepEntry]:
    """Every single-qubit Clifford that is valid applied bitwise to one block."""
    found = []
    for label, gate in single_qubit_cliffords():
        candidate = TransversalCandidate(1, (BitwiseStage(gate, label),), label)
        verdict = check_transversal(code, candidate)
        if verdict.valid:
            found.append(SweepEntry(label, gate, verdict))
    return found


def css_cnot_theorem_check(code: StabilizerCode) -> bool:
    """Whether "bitwise CNOT is valid" agrees with "the code is CSS"."""
    cnot_valid = check_transversal(code, TransversalCandidate.bitwise("CNOT", 2)).valid
    is_css = code.css_structure() is not None
    if cnot_valid != is_css:
        logger.warning("CNOT/CSS disagreement on %s: cnot=%s css=%s", code.name, cnot_valid, is_css)
    return cnot_valid == is_css


@dataclass(frozen=True)
class NamedPermutation:
    """A block permutation together with the generator images and logical table it should give."""

    candidate: TransversalCandidate
    generator_images: dict[int, tuple[int, ...]]
    logical_table: tuple[str, ...]


def eight_qubit_permutations() -> list[NamedPermutation]:
    """The three qubit permutations that preserve the eight-qubit code."""

    def perm(name: str, mapping: Sequence[int]) -> TransversalCandidate:
        return TransversalCandidate.block_permutation([p - 1 for p in mapping], name)

    return [
        NamedPermutation(
            perm("swap_halves", [5, 6, 7, 8, 1, 2, 3, 4]),
            {1: (1,), 2: (2,), 3: (1, 2, 3), 4: (4,), 5: (1, 5)},
            ("X1 -> XIZ", "X2 -> IXI", "X3 -> ZIX", "Z1 -> ZII", "Z2 -> IZI", "Z3 -> IIZ"),
        ),
        NamedPermutation(
            perm("swap_pairs", [3, 4, 1, 2, 7, 8, 5, 6]),
            {1: (1,), 2: (2,), 3: (3,), 4: (2, 4), 5: (1, 5)},
            ("X1 -> XZZ", "X2 -> ZXZ", "X3 -> ZZX", "Z1 -> ZII", "Z2 -> IZI", "Z3 -> IIZ"),
        ),
        NamedPermutation(
            perm("swap_odd_even", [2, 1, 4, 3, 6, 5, 8, 7]),
            {1: (1,), 2: (2,), 3: (1, 3), 4: (1, 4), 5: (1, 2, 5)},
            ("X1 -> XIZ", "X2 -> IXZ", "X3 -> ZZX", "Z1 -> ZII", "Z2 -> IZI", "Z3 -> IIZ"),
        ),
    ]


def matches_table(c: CliffordMap, table: Sequence[str], ignore_phase: bool = False) -> bool:
    """Compare ``c`` with ``X<i> -> <pauli>`` rows."""
    expected = {}
    for row in table:
        label, image = (part.strip() for part in row.split("->"))
        expected[label] = PauliOperator.parse(image)
    for j in range(c.n):
        for kind, images in (("X", c.x_images), ("Z", c.z_images)):
            want = expected.get(f"{kind}{j + 1}")
            if want is None:
                return False
            got = images[j]
            if not (got.equal_up_to_phase(want) if ignore_phase else got == want):
                return False
    return True
