"""
Pytest configuration and fixtures for stabilizer-ft tests.

Every test runs with a private XDG_CONFIG_HOME and working directory so the
user's settings and stray ``.stab`` files never leak in.
"""

from pathlib import Path
from typing import Generator

import numpy as np
import pytest
from typer.testing import CliRunner

from stabilizer_ft.codes import StabilizerCode
from stabilizer_ft.pauli import PauliOperator
from stabilizer_ft.settings import CODE_DIR_ENV, SEED_ENV, Settings


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Generator[Path, None, None]:
    """Point the settings directory and cwd at a temporary tree."""
    xdg = tmp_path / "xdg"
    xdg.mkdir()
    work = tmp_path / "work"
    work.mkdir()
    monkeypatch.setenv("XDG_CONFIG_HOME", str(xdg))
    monkeypatch.delenv(SEED_ENV, raising=False)
    monkeypatch.delenv(CODE_DIR_ENV, raising=False)
    monkeypatch.chdir(work)
    yield work


@pytest.fixture
def runner() -> CliRunner:
    """Provide a CliRunner instance for testing."""
    return CliRunner()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def settings() -> Settings:
    """Settings bound to the isolated XDG directory."""
    return Settings()


# Five-qubit code with M1 replaced by XZZXX, which anticommutes with M3 and M4
BROKEN_FIVE_QUBIT = """\
# broken
n=5 k=1
M1: XZZXX
M2: IXZZX
M3: XIXZZ
M4: ZXIXZ
X1: XXXXX
Z1: ZZZZZ
"""

STEANE_TEXT = """\
# steane, written out by hand
n=7 k=1
M1: XXXXIII
M2: XXIIXXI
M3: XIXIXIX
M4: ZZZZIII
M5: ZZIIZZI
M6: ZIZIZIZ
X1: IIIIXXX
Z1: IIIIZZZ
"""

T_GATE_TEXT = """\
# X -> iY -> Z -> X
X1 -> iY
Z1 -> X
"""


def write_file(directory: Path, name: str, text: str) -> Path:
    """
    Utility function to write a fixture document.

    Args:
        directory: Directory where the file should be created
        name: File name including its extension
        text: File contents

    Returns:
        Path to the created file
    """
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return path


def random_normalizer_element(code: StabilizerCode, rng: np.random.Generator) -> PauliOperator:
    """Random product of generators and logical operators, with a random power of i in front."""
    result = PauliOperator.identity(code.n).scaled(int(rng.integers(4)))
    for op in list(code.generators) + list(code.logical_x) + list(code.logical_z):
        if rng.integers(2):
            result = result.multiply(op)
    return result
