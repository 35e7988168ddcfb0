"""Common helper functions for CLI commands."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel

from ..exceptions import (
    CircuitError,
    CodeNotFoundError,
    FormatError,
    InvalidCliffordError,
    InvalidCodeError,
    PauliError,
    ProtocolError,
    SizeLimitError,
    StabilizerFtError,
    UnknownGateError,
)
from ..settings import Settings, SettingsError
from ..store import CodeStore

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass
class CliOptions:
    """Global options given before the command name."""

    max_n: int = 64
    max_n_dense: int = 10
    json_output: bool = False
    verbose: bool = False
    code_dir: Optional[Path] = None


def resolve_store_and_settings(code_dir: Optional[Path] = None) -> tuple[CodeStore, Settings]:
    """Load settings and build the code store searched by every command.

    Raises:
        SettingsError: If the settings file is unreadable or invalid
    """
    try:
        settings = Settings()
    except SettingsError as e:
        raise SettingsError(f"{e}. Run 'stabft config init' to write a fresh settings file")
    return CodeStore(code_dir, settings), settings


def configure_logging(verbose: bool, console: Console) -> None:
    """Route library logs through rich; debug level with ``--verbose``."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def read_input_file(path: Path) -> str:
    """Read a text file; missing or unreadable files raise FormatError."""
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FormatError(f"File not found: {path}")
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e}")


def dump_document(document: dict[str, Any]) -> str:
    """Stable JSON rendering; key order is the insertion order of the document."""
    return json.dumps(document, indent=2)


def parse_params(values: Optional[list[str]]) -> dict[str, str]:
    """Turn repeated ``key=value`` options into a dict."""
    params: dict[str, str] = {}
    for item in values or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ProtocolError(f"Parameters look like key=value, got '{item}'")
        params[key.strip()] = value.strip()
    return params


def handle_cli_error(error: Exception, console: Console, exit_code: int = EXIT_INPUT_ERROR) -> None:
    """Print ``error`` and exit. Library errors are input errors (exit 2)."""
    if isinstance(error, CodeNotFoundError):
        console.print(f"[red]Code not found: {error}[/red]")
        console.print("[dim]Use 'stabft code list' to see available codes[/dim]")
        raise typer.Exit(exit_code)

    elif isinstance(error, (FormatError, PauliError)):
        console.print(f"[red]Cannot parse input: {error}[/red]")
        raise typer.Exit(exit_code)

    elif isinstance(error, (InvalidCodeError, InvalidCliffordError, CircuitError)):
        console.print(f"[red]Invalid input: {error}[/red]")
        raise typer.Exit(exit_code)

    elif isinstance(error, UnknownGateError):
        console.print(f"[red]{error}[/red]")
        raise typer.Exit(exit_code)

    elif isinstance(error, SizeLimitError):
        console.print(f"[red]Refusing oversize request: {error}[/red]")
        console.print("[dim]Raise the guard with --max-n or --max-n-dense[/dim]")
        raise typer.Exit(exit_code)

    elif isinstance(error, SettingsError):
        console.print(f"[red]Configuration error: {error}[/red]")
        raise typer.Exit(exit_code)

    elif isinstance(error, StabilizerFtError):
        console.print(Panel(f"[red]{error}[/red]", title="Error", border_style="red"))
        raise typer.Exit(exit_code)

    else:
        console.print(
            Panel(f"[red]Unexpected error: {str(error)}[/red]", title="Error", border_style="red")
        )
        raise typer.Exit(EXIT_CHECK_FAILED)
