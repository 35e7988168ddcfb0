"""Tests for stabilizer codes and the .stab format."""

import numpy as np
import pytest
from pydantic import ValidationError

from stabilizer_ft.codes import (
    BUILTIN_CODES,
    StabilizerCode,
    builtin_code,
    derive_logical_frame,
    parse_stab,
    random_code,
    resolve_builtin,
)
from stabilizer_ft.exceptions import (
    CodeNotFoundError,
    FormatError,
    InvalidCodeError,
    NotCssError,
    NotInNormalizerError,
    PauliError,
    SizeLimitError,
)
from stabilizer_ft.pauli import PauliOperator
from tests.conftest import BROKEN_FIVE_QUBIT, STEANE_TEXT, random_normalizer_element, write_file


@pytest.fixture
def steane() -> StabilizerCode:
    return builtin_code("steane7")


@pytest.fixture
def five_qubit() -> StabilizerCode:
    return builtin_code("five_qubit")


class TestBuiltins:
    """The catalogue of built-in codes."""

    @pytest.mark.parametrize(
        "spec,n,k",
        [
            ("steane7", 7, 1),
            ("five_qubit", 5, 1),
            ("eight_qubit", 8, 3),
            ("distance2", 4, 2),
            ("distance2:6", 6, 4),
            ("distance2:8", 8, 6),
            ("trivial", 1, 1),
            ("trivial:3", 3, 3),
        ],
    )
    def test_builtins_are_valid(self, spec, n, k):
        code = resolve_builtin(spec)
        assert code is not None
        assert (code.n, code.k) == (n, k)
        assert code.validate_code() == []

    def test_every_listed_name_resolves(self):
        for name in BUILTIN_CODES:
            assert builtin_code(name).is_valid()

    def test_distance2_frame(self):
        code = builtin_code("distance2", 4)
        assert [str(p) for p in code.logical_x] == ["XXII", "XIXI"]
        assert [str(p) for p in code.logical_z] == ["IZIZ", "IIZZ"]

    @pytest.mark.parametrize("n", [2, 5, 7])
    def test_distance2_needs_even_n(self, n):
        with pytest.raises(InvalidCodeError):
            builtin_code("distance2", n)

    def test_unknown(self):
        assert resolve_builtin("golay") is None
        with pytest.raises(CodeNotFoundError):
            builtin_code("golay")
        with pytest.raises(CodeNotFoundError):
            resolve_builtin("distance2:six")


class TestValidation:
    def test_broken_code_reports_anticommuting_pairs(self):
        code = parse_stab(BROKEN_FIVE_QUBIT, "broken")
        issues = code.validate_code()
        assert "M1 and M3 anticommute" in issues
        assert "M1 and M4 anticommute" in issues
        assert "M1 and M2 anticommute" not in issues
        with pytest.raises(InvalidCodeError):
            code.require_valid()

    def test_non_hermitian_generator(self):
        code = StabilizerCode(n=1, k=0, generators=["Y"])
        assert "M1 = Y is not Hermitian" in code.validate_code()

    def test_dependent_generators(self):
        code = StabilizerCode(n=2, k=0, generators=["XX", "XX"])
        assert "Generators are not independent" in code.validate_code()

    def test_wrong_generator_count(self):
        code = StabilizerCode(n=2, k=0, generators=["XX"])
        assert any("Expected n-k=2" in issue for issue in code.validate_code())

    def test_logical_pairing(self):
        code = StabilizerCode(
            n=2, k=1, generators=["ZZ"], logical_x=["XX"], logical_z=["XX"]
        )
        issues = code.validate_code()
        assert "X1 and Z1 should not commute" in issues

    def test_shape_errors(self):
        with pytest.raises(ValidationError):
            StabilizerCode(n=3, k=1, generators=["XX"], logical_x=["XXX"], logical_z=["ZZZ"])
        with pytest.raises(ValidationError):
            StabilizerCode(n=2, k=1, generators=["ZZ"])
        with pytest.raises(ValidationError):
            StabilizerCode(n=2, k=3)

    def test_generators_from_single_string(self):
        code = StabilizerCode(n=2, k=0, generators="XX ZZ")
        assert [str(g) for g in code.generators] == ["XX", "ZZ"]
        assert code.is_valid()


class TestSyndrome:
    def test_steane_single_qubit_errors(self, steane):
        assert str(steane.syndrome(PauliOperator.single(7, 0, "Z"))) == "111000"
        assert str(steane.syndrome(PauliOperator.single(7, 4, "X"))) == "000011"

    def test_syndrome_is_linear(self, steane, rng):
        for _ in range(50):
            a = PauliOperator(7, int(rng.integers(128)), int(rng.integers(128)))
            b = PauliOperator(7, int(rng.integers(128)), int(rng.integers(128)))
            assert steane.syndrome(a * b) == steane.syndrome(a) ^ steane.syndrome(b)

    def test_normalizer_elements_have_trivial_syndrome(self, five_qubit, rng):
        for _ in range(50):
            p = random_normalizer_element(five_qubit, rng)
            assert five_qubit.syndrome(p).is_trivial

    def test_size_mismatch(self, steane):
        with pytest.raises(PauliError):
            steane.syndrome(PauliOperator.parse("X"))


class TestMembership:
    def test_in_stabilizer(self, steane):
        assert steane.in_stabilizer(PauliOperator.parse("IIXXXXI")) == 0
        assert steane.in_stabilizer(PauliOperator.parse("-IIXXXXI")) == 2
        assert steane.in_stabilizer(PauliOperator.parse("IIIIXXX")) is None

    def test_in_normalizer(self, five_qubit):
        assert five_qubit.in_normalizer(PauliOperator.parse("XXXXX"))
        assert not five_qubit.in_normalizer(PauliOperator.single(5, 0, "X"))


class TestReduceLogical:
    def test_steane_logical_z(self, steane):
        result = steane.reduce_logical(PauliOperator.parse("IIIIZZZ"))
        assert result.logical == PauliOperator(1, 0, 1)
        assert result.phase == 0
        assert result.stabilizer_part == 0

    def test_five_qubit_yyyyy(self, five_qubit):
        result = five_qubit.reduce_logical(PauliOperator.parse("YYYYY"))
        assert result.logical == PauliOperator(1, 1, 1)
        assert result.phase == 0
        assert result.stabilizer_part == 0
        assert str(result.logical_operator()) == "Y"

    def test_with_stabilizer_part(self, steane):
        p = PauliOperator.parse("IIIIXXX") * steane.generators[0]
        result = steane.reduce_logical(p)
        assert result.logical == PauliOperator(1, 1, 0)
        assert result.selected() == [0]
        assert steane.reassemble(result) == p

    def test_reassembles_random_elements(self, rng):
        for spec in ("five_qubit", "steane7", "eight_qubit", "distance2:6"):
            code = resolve_builtin(spec)
            for _ in range(30):
                p = random_normalizer_element(code, rng)
                assert code.reassemble(code.reduce_logical(p)) == p

    def test_outside_normalizer(self, five_qubit):
        with pytest.raises(NotInNormalizerError):
            five_qubit.reduce_logical(PauliOperator.single(5, 0, "X"))

    def test_logical_operator_lift(self, steane):
        lifted = steane.logical_operator(PauliOperator.parse("-Y"))
        assert lifted == -(steane.logical_x[0] * steane.logical_z[0])
        with pytest.raises(PauliError):
            steane.logical_operator(PauliOperator.parse("XX"))


class TestDistance:
    @pytest.mark.parametrize(
        "spec,expected",
        [
            ("five_qubit", 3),
            ("steane7", 3),
            ("eight_qubit", 3),
            ("distance2:4", 2),
            ("distance2:6", 2),
            ("distance2:8", 2),
            ("trivial", 1),
        ],
    )
    def test_known_distances(self, spec, expected):
        assert resolve_builtin(spec).distance() == expected

    def test_size_limit(self, steane):
        with pytest.raises(SizeLimitError):
            steane.repeated(3).distance()

    def test_no_logical_qubits(self):
        code = StabilizerCode(n=2, k=0, generators=["XX", "ZZ"])
        with pytest.raises(InvalidCodeError):
            code.distance()


class TestCss:
    def test_distance2_sectors(self):
        structure = builtin_code("distance2", 6).css_structure()
        assert structure is not None
        assert [str(p) for p in structure.x_sector] == ["XXXXXX"]
        assert [str(p) for p in structure.z_sector] == ["ZZZZZZ"]

    def test_five_qubit_is_not_css(self, five_qubit):
        assert five_qubit.css_structure() is None
        with pytest.raises(NotCssError):
            five_qubit.doubly_even_self_dual_check()

    @pytest.mark.parametrize("spec", ["steane7", "distance2:4"])
    def test_doubly_even_self_dual(self, spec):
        report = resolve_builtin(spec).doubly_even_self_dual_check()
        assert report.self_dual
        assert report.doubly_even

    def test_distance2_6_is_self_dual_only(self):
        report = builtin_code("distance2", 6).doubly_even_self_dual_check()
        assert report.self_dual
        assert not report.doubly_even
        assert report.x_sector_weights == [6]

    def test_steane_sector_weights(self, steane):
        report = steane.doubly_even_self_dual_check()
        assert report.x_sector_rank == 3
        assert report.x_sector_weights == [4]


class TestConstructions:
    def test_repeated(self, steane):
        doubled = steane.repeated(2)
        assert (doubled.n, doubled.k) == (14, 2)
        assert doubled.name == "steane7^2"
        assert doubled.is_valid()
        assert str(doubled.logical_x[1]) == "IIIIIII" + "IIIIXXX"

    def test_repeated_needs_blocks(self, steane):
        with pytest.raises(InvalidCodeError):
            steane.repeated(0)

    @pytest.mark.parametrize("spec", ["steane7", "five_qubit", "eight_qubit"])
    def test_destabilizers(self, spec):
        code = resolve_builtin(spec)
        destabilizers = code.destabilizers()
        for i, d in enumerate(destabilizers):
            for j, g in enumerate(code.generators):
                assert d.commutes(g) == (i != j)
            for logical in code.logical_x + code.logical_z:
                assert d.commutes(logical)

    def test_describe(self, steane):
        info = steane.describe()
        assert info["n"] == 7
        assert info["css"] is True
        assert info["self_dual"] is True
        assert info["doubly_even"] is True
        assert builtin_code("five_qubit").describe()["css"] is False

    def test_random_codes_are_valid(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(0, n))
            code = random_code(n, k, rng)
            assert code.name == f"random-{n}-{k}"
            assert code.validate_code() == []

    def test_random_code_bounds(self, rng):
        with pytest.raises(InvalidCodeError):
            random_code(3, 3, rng)

    def test_derived_frame_is_valid(self, rng):
        for _ in range(30):
            base = random_code(6, 2, rng)
            xs, zs = derive_logical_frame(6, base.generators)
            code = StabilizerCode(
                n=6, k=2, generators=base.generators, logical_x=xs, logical_z=zs
            )
            assert code.validate_code() == []


class TestStabFormat:
    def test_parse_steane(self):
        code = parse_stab(STEANE_TEXT, "hand")
        assert code.name == "hand"
        assert code.generators == builtin_code("steane7").generators
        assert code.is_valid()

    def test_text_round_trip(self, five_qubit):
        again = StabilizerCode.from_text(five_qubit.to_text(), "five_qubit")
        assert again.to_text() == five_qubit.to_text()
        assert again.logical_x == five_qubit.logical_x

    def test_file_round_trip(self, tmp_path, steane):
        path = tmp_path / "mine.stab"
        steane.save(path)
        loaded = StabilizerCode.from_file(path)
        assert loaded.name == "mine"
        assert loaded.generators == steane.generators

    def test_missing_file(self, tmp_path):
        with pytest.raises(CodeNotFoundError):
            StabilizerCode.from_file(tmp_path / "absent.stab")

    def test_frame_derived_when_absent(self, tmp_path):
        text = "n=5 k=1\nM1: XZZXI\nM2: IXZZX\nM3: XIXZZ\nM4: ZXIXZ\n"
        code = StabilizerCode.from_file(write_file(tmp_path, "bare.stab", text))
        assert len(code.logical_x) == 1
        assert code.validate_code() == []

    def test_negative_generators_stored_positive(self, caplog):
        with caplog.at_level("INFO", logger="stabilizer_ft.codes"):
            code = parse_stab("n=2 k=0\nM1: -XX\nM2: -YY\n", "signed")
        assert [str(g) for g in code.generators] == ["XX", "YY"]
        assert all(g.hermitian() == g for g in code.generators)
        assert code.in_stabilizer(PauliOperator.parse("XX")) == 0
        assert code.is_valid()
        assert "M1, M2" in caplog.text

    def test_logical_signs_kept(self):
        code = parse_stab(STEANE_TEXT.replace("X1: IIIIXXX", "X1: -IIIIXXX"))
        assert str(code.logical_x[0]) == "-IIIIXXX"
        assert code.generators == builtin_code("steane7").generators

    def test_non_hermitian_generator_reported(self):
        code = parse_stab("n=2 k=0\nM1: iXX\nM2: ZZ\n")
        assert str(code.generators[0]) == "iXX"
        assert "M1 = iXX is not Hermitian" in code.validate_code()

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "M1: XX\n",
            "n=2 k=0\nM1 XX\n",
            "n=2 k=0\nM1: XX\nM1: ZZ\n",
            "n=2 k=0\nM1: XX\nM3: ZZ\n",
            "n=2 k=0\nM1: XQ\n",
            "n=2 k=1\nM1: XX\nX1: ZZ\n",
            "n=3 k=0\nM1: XX\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(FormatError):
            parse_stab(text)
