"""Configuration CLI commands (config init, show, get, set)."""

import os

import typer
from rich.panel import Panel
from rich.table import Table

from ..settings import CODE_DIR_ENV, SEED_ENV, Settings
from .base import BaseCommand, with_error_handling


@with_error_handling
def init_config(
    ctx: typer.Context,
    force: bool = typer.Option(False, "--force", "-f", help="Overwrite an existing settings file"),
) -> None:
    """Write default settings and create the code directory."""
    command = BaseCommand(ctx, resolve=False)
    settings = Settings(load=False)

    if settings.config_file.exists() and not force:
        command.warning(f"Settings already exist at {settings.config_file}")
        command.info("Use --force to overwrite them")
        return

    settings.initialize()
    command.console.print(
        Panel(
            f"[bold green]✓[/bold green] Settings initialized\n\n"
            f"[dim]Config file:[/dim] {settings.config_file}\n"
            f"[dim]Codes dir:[/dim] {settings.codes_dir}",
            title="stabilizer-ft",
            border_style="green",
        )
    )


@with_error_handling
def show_config(ctx: typer.Context) -> None:
    """Show settings and the .stab search order."""
    command = BaseCommand(ctx)
    settings = command.settings
    values = settings.as_dict()
    directories = [str(d) for d in settings.code_directories()]

    def render() -> None:
        table = Table(title="Settings")
        table.add_column("Setting", style="cyan")
        table.add_column("Value", style="magenta")
        for key, value in values.items():
            table.add_row(key, str(value))
        command.console.print(table)
        if os.environ.get(SEED_ENV):
            command.info(f"{SEED_ENV} overrides default_seed: {os.environ[SEED_ENV]}")
        command.console.print("\n[bold]Code Search Order:[/bold]")
        for i, directory in enumerate(settings.code_directories(), 1):
            source = " (environment variable)" if i == 1 and os.environ.get(CODE_DIR_ENV) else ""
            status = "✓" if directory.exists() else "✗"
            command.console.print(f"{i}. {directory}{source} {status}")

    command.emit({"config_file": str(settings.config_file), "settings": values, "code_directories": directories}, render)


@with_error_handling
def get_config(
    ctx: typer.Context,
    key: str = typer.Argument(..., help="Setting name"),
) -> None:
    """Print one setting."""
    command = BaseCommand(ctx)
    typer.echo(f"{key}: {command.settings.get_value(key)}")


@with_error_handling
def set_config(
    ctx: typer.Context,
    key: str = typer.Argument(..., help="Setting name"),
    value: str = typer.Argument(..., help="New value ('none' clears optional settings)"),
) -> None:
    """Validate and store one setting."""
    command = BaseCommand(ctx)
    command.settings.set_value(key, value)
    command.settings.save()
    command.success(f"Set {key} = {command.settings.get_value(key)}")
