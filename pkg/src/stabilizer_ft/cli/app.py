"""Main typer app initialization and command registration."""

import logging
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from ..settings import Settings, SettingsData, SettingsError
from .commands import (
    code_distance,
    code_info,
    code_random,
    code_reduce,
    code_syndrome,
    faults,
    list_codes,
    simulate,
    synth,
    transversal,
    validate_code,
)
from .config_commands import get_config, init_config, set_config, show_config
from .helpers import CliOptions, configure_logging
from .protocol_commands import dump_protocol, list_protocols, run_protocol

app = typer.Typer(
    name="stabft",
    help="Stabilizer codes, Clifford maps and fault-tolerant constructions",
    rich_markup_mode="rich",
    no_args_is_help=True,
)
code_app = typer.Typer(help="Inspect stabilizer codes", no_args_is_help=True)
protocol_app = typer.Typer(help="Run measurement-based protocols", no_args_is_help=True)
config_app = typer.Typer(help="Manage settings", no_args_is_help=True)

log_console = Console(stderr=True)
logger = logging.getLogger(__name__)


@app.callback()
def main(
    ctx: typer.Context,
    max_n: Optional[int] = typer.Option(None, "--max-n", help="Largest register for tableau work"),
    max_n_dense: Optional[int] = typer.Option(None, "--max-n-dense", help="Largest register for dense simulation"),
    json_output: Optional[bool] = typer.Option(None, "--json/--no-json", help="Print a JSON document instead of tables"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show debug logs"),
    code_dir: Optional[Path] = typer.Option(None, "--code-dir", "-d", help="Directory searched first for .stab files"),
) -> None:
    """Stabilizer codes, transversal gates and measurement-based Clifford circuits."""
    configure_logging(verbose, log_console)
    try:
        data = Settings().data
    except SettingsError as e:
        logger.warning("%s; using default settings", e)
        data = SettingsData()
    ctx.obj = CliOptions(
        max_n=data.max_n if max_n is None else max_n,
        max_n_dense=data.max_n_dense if max_n_dense is None else max_n_dense,
        json_output=data.json_output if json_output is None else json_output,
        verbose=verbose,
        code_dir=code_dir,
    )


code_app.command("list")(list_codes)
code_app.command("validate")(validate_code)
code_app.command("info")(code_info)
code_app.command("distance")(code_distance)
code_app.command("syndrome")(code_syndrome)
code_app.command("reduce")(code_reduce)
code_app.command("random")(code_random)

protocol_app.command("list")(list_protocols)
protocol_app.command("run")(run_protocol)
protocol_app.command("dump")(dump_protocol)

config_app.command("init")(init_config)
config_app.command("show")(show_config)
config_app.command("get")(get_config)
config_app.command("set")(set_config)

app.add_typer(code_app, name="code", rich_help_panel="Codes")
app.command("transversal", rich_help_panel="Codes")(transversal)
app.command("sim", rich_help_panel="Circuits")(simulate)
app.command("synth", rich_help_panel="Circuits")(synth)
app.command("faults", rich_help_panel="Circuits")(faults)
app.add_typer(protocol_app, name="protocol", rich_help_panel="Circuits")
app.add_typer(config_app, name="config", rich_help_panel="Configuration")
