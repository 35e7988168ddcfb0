"""Lookup of built-in codes and ``.stab`` files."""

import logging
from pathlib import Path
from typing import Optional

from .codes import BUILTIN_CODES, StabilizerCode, builtin_code, resolve_builtin
from .exceptions import CodeNotFoundError, StabilizerFtError
from .settings import Settings

logger = logging.getLogger(__name__)


class CodeStore:
    """Resolve code names against built-ins, search directories and paths."""

    def __init__(self, code_dir: Optional[Path] = None, settings: Optional[Settings] = None):
        """
        Initialize the store.

        Args:
            code_dir: Optional explicit directory searched before any other
            settings: Optional Settings instance providing search directories
        """
        self.settings = settings or Settings()
        self.explicit_dir = code_dir

    def search_directories(self) -> list[Path]:
        directories = [self.explicit_dir] if self.explicit_dir else []
        return directories + self.settings.code_directories()

    def find_code_file(self, name: str) -> Optional[Path]:
        """First ``<name>.stab`` in the search directories."""
        for directory in self.search_directories():
            candidate = directory / f"{name}.stab"
            if candidate.exists():
                return candidate
        return None

    def get_code(self, spec: str) -> StabilizerCode:
        """Resolve ``spec``: a file path, a built-in (``name`` or ``name:<n>``), or a stored name."""
        path = Path(spec)
        if spec.endswith(".stab") or path.is_file():
            if not path.exists():
                raise CodeNotFoundError(f"Code file not found: {spec}")
            return StabilizerCode.from_file(path)

        code = resolve_builtin(spec)
        if code is not None:
            return code

        found = self.find_code_file(spec)
        if found is None:
            available = [info["name"] for info in self.list_codes()]
            raise CodeNotFoundError(
                f"Code '{spec}' not found. Available codes: {', '.join(available)}"
            )
        logger.debug("Resolved code '%s' to %s", spec, found)
        return StabilizerCode.from_file(found, name=spec)

    def list_codes(self) -> list[dict[str, str]]:
        """Built-in codes followed by ``.stab`` files; the first occurrence of a name wins."""
        codes: dict[str, dict[str, str]] = {}
        for name in BUILTIN_CODES:
            code = builtin_code(name)
            codes[name] = {"name": name, "n": str(code.n), "k": str(code.k), "source": "builtin"}

        for directory in self.search_directories():
            if not directory.exists():
                continue
            for code_file in sorted(directory.glob("*.stab")):
                name = code_file.stem
                if name in codes:
                    continue
                try:
                    code = StabilizerCode.from_file(code_file)
                except StabilizerFtError as e:
                    logger.warning("Skipping invalid code file %s: %s", code_file, e)
                    continue
                codes[name] = {
                    "name": name,
                    "n": str(code.n),
                    "k": str(code.k),
                    "source": str(code_file),
                }
        return list(codes.values())

    def save_code(self, code: StabilizerCode, target_dir: Optional[Path] = None) -> Path:
        """
        Write a code as ``<name>.stab``.

        Args:
            code: Code to store
            target_dir: Directory to write to; defaults to the explicit code
                directory, then the configured one

        Returns:
            Path of the written file
        """
        directory = target_dir or self.explicit_dir or self.settings.codes_dir
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{code.name}.stab"
        code.save(path)
        return path
