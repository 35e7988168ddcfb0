"""Base classes and shared functionality for CLI commands."""

import functools
from collections.abc import Callable
from pathlib import Path
from typing import Any, Optional, ParamSpec, TypeVar

import typer
from rich.console import Console
from rich.panel import Panel

from ..codes import StabilizerCode
from ..exceptions import SizeLimitError, StabilizerFtError
from ..settings import Settings
from ..store import CodeStore
from .helpers import (
    EXIT_CHECK_FAILED,
    CliOptions,
    dump_document,
    handle_cli_error,
    read_input_file,
    resolve_store_and_settings,
)

P = ParamSpec("P")
R = TypeVar("R")


class BaseCommand:
    """Shared state for one command invocation.

    Resolves settings, the code store and the global options, and owns the
    console every message goes through.
    """

    def __init__(self, ctx: Optional[typer.Context] = None, resolve: bool = True):
        self.console = Console()
        obj = ctx.obj if ctx is not None else None
        self.options: CliOptions = obj if isinstance(obj, CliOptions) else CliOptions()
        self.store: CodeStore
        self.settings: Settings
        if not resolve:
            return
        try:
            self.store, self.settings = resolve_store_and_settings(self.options.code_dir)
        except StabilizerFtError as e:
            self.handle_error(e)

    def handle_error(self, error: Exception) -> None:
        """Print the error and exit with the code its type maps to.

        Args:
            error: Exception raised by the command
        """
        handle_cli_error(error, self.console)

    # Inputs

    def load_code(self, spec: str) -> StabilizerCode:
        """Resolve a code through the store and apply the tableau size guard.

        Args:
            spec: Built-in name, stored name or path to a .stab file

        Returns:
            The resolved code
        """
        code = self.store.get_code(spec)
        self.check_size(code.n)
        return code

    def read_file(self, path: Path) -> str:
        """Read an input file, mapping missing files to exit code 2."""
        return read_input_file(path)

    def check_size(self, n: int) -> None:
        """Enforce ``--max-n``."""
        if n > self.options.max_n:
            raise SizeLimitError(f"Tableau work is limited to n <= {self.options.max_n} (got n={n})")

    def check_dense(self, n: int) -> None:
        """Enforce ``--max-n-dense``."""
        if n > self.options.max_n_dense:
            raise SizeLimitError(f"Dense simulation is limited to n <= {self.options.max_n_dense} (got n={n})")

    def seed(self, seed: Optional[int]) -> int:
        """The given seed, or the configured default."""
        return self.settings.default_seed if seed is None else seed

    # Output

    def emit(self, document: dict[str, Any], render: Callable[[], None]) -> None:
        """Print ``document`` as JSON with ``--json``, otherwise call ``render``."""
        if self.options.json_output:
            typer.echo(dump_document(document))
        else:
            render()

    def finish(self, passed: bool) -> None:
        """Exit 1 when a requested check failed."""
        if not passed:
            raise typer.Exit(EXIT_CHECK_FAILED)

    def success(self, message: str) -> None:
        """Display a success message.

        Args:
            message: Success message to display
        """
        self.console.print(f"[bold green]✓[/bold green] {message}")

    def failure(self, message: str) -> None:
        """Display a failed check.

        Args:
            message: Description of what failed
        """
        self.console.print(f"[bold red]✗[/bold red] {message}")

    def error(self, message: str, title: str = "Error") -> None:
        """Display an error message.

        Args:
            message: Error message to display
            title: Title for the error panel
        """
        self.console.print(Panel(f"[red]{message}[/red]", title=title, border_style="red"))

    def info(self, message: str) -> None:
        """Display an info message.

        Args:
            message: Info message to display
        """
        self.console.print(f"[dim]{message}[/dim]")

    def warning(self, message: str) -> None:
        """Display a warning message.

        Args:
            message: Warning message to display
        """
        self.console.print(f"[yellow]{message}[/yellow]")


def with_error_handling(func: Callable[P, R]) -> Callable[P, R]:
    """Turn library errors into exit code 2 and anything unexpected into exit 1."""

    @functools.wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        try:
            return func(*args, **kwargs)
        except (typer.Exit, typer.Abort):
            raise
        except Exception as e:
            handle_cli_error(e, Console())
            raise

    return wrapper
