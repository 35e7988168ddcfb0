"""Protocol CLI commands (protocol list, run, dump)."""

from pathlib import Path
from typing import Optional

import numpy as np
import typer
from rich.table import Table

from ..protocols import available_protocols, build_protocol, verify_protocol
from .base import BaseCommand, with_error_handling
from .helpers import parse_params


@with_error_handling
def list_protocols(ctx: typer.Context) -> None:
    """List the registered protocols and their parameters."""
    command = BaseCommand(ctx)
    entries = available_protocols()

    def render() -> None:
        table = Table(title="Protocols", show_header=True, header_style="bold cyan")
        table.add_column("Name", style="green")
        table.add_column("Description")
        table.add_column("Parameters", style="yellow")
        for entry in entries:
            params = ", ".join(f"{k}={v}" for k, v in entry.defaults.items()) or "-"
            table.add_row(entry.name, entry.summary, params)
        command.console.print(table)

    command.emit(
        {"protocols": [{"name": e.name, "summary": e.summary, "parameters": dict(e.defaults)} for e in entries]},
        render,
    )


@with_error_handling
def run_protocol(
    ctx: typer.Context,
    name: str = typer.Argument(..., help="Protocol name"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Random seed (default from settings)"),
    seeds: int = typer.Option(1, "--seeds", help="Run this many consecutive seeds"),
    param: Optional[list[str]] = typer.Option(None, "--param", "-p", help="Protocol parameter as key=value"),
) -> None:
    """Run a protocol and check it implements its target."""
    command = BaseCommand(ctx)
    protocol = build_protocol(name, parse_params(param))
    command.check_size(protocol.n + protocol.k)
    start = command.seed(seed)
    results = [
        verify_protocol(protocol, np.random.default_rng(s), command.options.max_n_dense)
        for s in range(start, start + max(seeds, 1))
    ]
    passed = all(r.passed for r in results)

    def render() -> None:
        first = results[0]
        if first.target is not None:
            command.console.print("[bold]Target:[/bold]")
            for row in first.target.table_rows():
                command.console.print(f"  {row}")
        for s, result in zip(range(start, start + len(results)), results):
            outcomes = " ".join(f"b{b}={1 - 2 * v:+d}" for b, v in sorted(result.outcomes.items()))
            if result.passed:
                command.success(f"seed {s}: pass ({result.method}) {outcomes}")
            else:
                command.failure(f"seed {s}: FAIL ({result.method}) {outcomes}")
                for failure in result.failures:
                    command.console.print(f"  • {failure}")

    command.emit(
        {"protocol": name, "passed": passed, "runs": [{"seed": s, **r.to_dict()} for s, r in zip(range(start, start + len(results)), results)]},
        render,
    )
    command.finish(passed)


@with_error_handling
def dump_protocol(
    ctx: typer.Context,
    name: str = typer.Argument(..., help="Protocol name"),
    param: Optional[list[str]] = typer.Option(None, "--param", "-p", help="Protocol parameter as key=value"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write the .circ here instead of stdout"),
) -> None:
    """Print a protocol's circuit in .circ form."""
    command = BaseCommand(ctx)
    text = build_protocol(name, parse_params(param)).to_text()
    if output is None:
        typer.echo(text, nl=False)
        return
    output.write_text(text, encoding="utf-8")
    command.success(f"Wrote [cyan]{name}[/cyan] to {output}")
