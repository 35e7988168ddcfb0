"""Core CLI commands (code, transversal, sim, synth, faults)."""

from pathlib import Path
from typing import Optional

import numpy as np
import typer
from rich.panel import Panel
from rich.table import Table

from ..circuit import parse_circuit
from ..clifford import CliffordMap, base_gate, parse_gate_text
from ..codes import random_code
from ..dense import equal_up_to_phase
from ..exceptions import FormatError, SimulationError
from ..faults import BlockLayout, fault_injection
from ..pauli import PauliOperator
from ..simulator import StabilizerState, run_circuit
from ..synthesis import synthesize
from ..transversal import TransversalCandidate, check_transversal, search_single_qubit_transversal
from .base import BaseCommand, with_error_handling


def _load_gate(command: BaseCommand, gate: str) -> tuple[str, CliffordMap]:
    """A gate name, or a path to a ``.gate`` file."""
    path = Path(gate)
    if gate.endswith(".gate") or path.is_file():
        return path.stem, parse_gate_text(command.read_file(path))
    return gate.upper(), base_gate(gate)


def _parse_perm(text: str) -> list[int]:
    try:
        return [int(p) - 1 for p in text.replace(" ", "").split(",") if p]
    except ValueError:
        raise FormatError(f"Permutation must be comma-separated 1-based positions, got '{text}'")


# code sub-commands


@with_error_handling
def list_codes(ctx: typer.Context) -> None:
    """List built-in codes and stored .stab files."""
    command = BaseCommand(ctx)
    codes = command.store.list_codes()

    def render() -> None:
        table = Table(title="Available Codes", show_header=True, header_style="bold cyan")
        table.add_column("Code", style="green")
        table.add_column("n", style="blue")
        table.add_column("k", style="blue")
        table.add_column("Source", style="magenta")
        for info in codes:
            table.add_row(info["name"], info["n"], info["k"], info["source"])
        command.console.print(table)

    command.emit({"codes": codes}, render)


@with_error_handling
def validate_code(
    ctx: typer.Context,
    spec: str = typer.Argument(..., help="Built-in name, name:<n>, stored name or .stab path"),
) -> None:
    """Check every invariant of a code."""
    command = BaseCommand(ctx)
    code = command.load_code(spec)
    issues = code.validate_code()

    def render() -> None:
        if not issues:
            command.success(f"Code '[cyan]{code.name}[/cyan]' is valid")
            return
        command.failure(f"Code '[cyan]{code.name}[/cyan]' has [bold]{len(issues)}[/bold] issue(s):")
        for issue in issues:
            command.console.print(f"  • {issue}")

    command.emit({"code": code.name, "valid": not issues, "issues": issues}, render)
    command.finish(not issues)


@with_error_handling
def code_info(
    ctx: typer.Context,
    spec: str = typer.Argument(..., help="Built-in name, name:<n>, stored name or .stab path"),
) -> None:
    """Show n, k, generators, logical operators and CSS flags."""
    command = BaseCommand(ctx)
    code = command.load_code(spec)
    code.require_valid()
    info = code.describe()

    def render() -> None:
        lines = [f"[bold]n:[/bold] {code.n}   [bold]k:[/bold] {code.k}"]
        lines += [f"M{i}: {g}" for i, g in enumerate(info["generators"], 1)]
        lines += [f"X{i}: {p}" for i, p in enumerate(info["logical_x"], 1)]
        lines += [f"Z{i}: {p}" for i, p in enumerate(info["logical_z"], 1)]
        flags = ["CSS" if info["css"] else "not CSS"]
        if info.get("self_dual"):
            flags.append("self-dual")
        if info.get("doubly_even"):
            flags.append("doubly-even")
        lines.append(f"[bold]Structure:[/bold] {', '.join(flags)}")
        command.console.print(Panel("\n".join(lines), title=code.name, border_style="blue"))

    command.emit(info, render)


@with_error_handling
def code_distance(
    ctx: typer.Context,
    spec: str = typer.Argument(..., help="Built-in name, name:<n>, stored name or .stab path"),
) -> None:
    """Exact code distance by exhaustive search."""
    command = BaseCommand(ctx)
    code = command.load_code(spec)
    code.require_valid()
    distance = code.distance()
    command.emit(
        {"code": code.name, "n": code.n, "k": code.k, "distance": distance},
        lambda: command.console.print(f"[[{code.n},{code.k},{distance}]] {code.name}: distance [bold]{distance}[/bold]"),
    )


@with_error_handling
def code_syndrome(
    ctx: typer.Context,
    spec: str = typer.Argument(..., help="Code to measure against"),
    error: str = typer.Argument(..., help="Pauli error, e.g. IXIII"),
) -> None:
    """Syndrome bits of a Pauli error."""
    command = BaseCommand(ctx)
    code = command.load_code(spec)
    syndrome = code.syndrome(PauliOperator.parse(error))
    command.emit(
        {"code": code.name, "error": error, "syndrome": str(syndrome)},
        lambda: command.console.print(f"{error} -> [bold]{syndrome}[/bold]"),
    )


@with_error_handling
def code_reduce(
    ctx: typer.Context,
    spec: str = typer.Argument(..., help="Code whose logical frame is used"),
    operator: str = typer.Argument(..., help="Normalizer element to decompose"),
) -> None:
    """Split a normalizer element into an encoded Pauli and a stabilizer element."""
    command = BaseCommand(ctx)
    code = command.load_code(spec)
    decomposition = code.reduce_logical(PauliOperator.parse(operator))
    product = "".join(f"M{i + 1}" for i in decomposition.selected()) or "I"
    logical = decomposition.logical_operator()
    command.emit(
        {"code": code.name, "operator": operator, "logical": str(logical), "stabilizer": product},
        lambda: command.console.print(f"{operator} = [bold]{logical}[/bold] (encoded) x {product}"),
    )


@with_error_handling
def code_random(
    ctx: typer.Context,
    n: int = typer.Argument(..., help="Number of physical qubits"),
    k: int = typer.Argument(..., help="Number of encoded qubits"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Random seed (default from settings)"),
    css_bias: float = typer.Option(0.5, "--css-bias", help="Probability of drawing a CSS code"),
    name: Optional[str] = typer.Option(None, "--name", help="Save into the code directory under this name"),
) -> None:
    """Draw a random valid code."""
    command = BaseCommand(ctx)
    command.check_size(n)
    code = random_code(n, k, np.random.default_rng(command.seed(seed)), css_bias)
    if name:
        code = code.model_copy(update={"name": name})
        path = command.store.save_code(code)
        command.success(f"Saved [cyan]{name}[/cyan] to {path}")
        return
    typer.echo(code.to_text(), nl=False)


# transversal


@with_error_handling
def transversal(
    ctx: typer.Context,
    spec: str = typer.Argument(..., help="Code to test"),
    gate: Optional[str] = typer.Argument(None, help="Gate name or .gate file, applied bitwise"),
    blocks: Optional[int] = typer.Option(None, "--blocks", "-m", help="Number of code blocks (default: gate arity)"),
    perm: Optional[str] = typer.Option(None, "--perm", help="Qubit permutation inside each block, e.g. 5,6,7,8,1,2,3,4"),
    sweep: bool = typer.Option(False, "--sweep", help="Try all 24 single-qubit Cliffords bitwise"),
) -> None:
    """Check whether a bitwise gate or block permutation preserves the code, and its logical action."""
    command = BaseCommand(ctx)
    code = command.load_code(spec)
    code.require_valid()

    if sweep:
        found = search_single_qubit_transversal(code)

        def render_sweep() -> None:
            table = Table(title=f"Valid single-qubit gates on {code.name}", header_style="bold cyan")
            table.add_column("Gate", style="green")
            table.add_column("Logical action", style="yellow")
            for entry in found:
                table.add_row(entry.label, "; ".join(entry.verdict.logical.table_rows()) if entry.verdict.logical else "")
            command.console.print(table)

        command.emit(
            {"code": code.name, "valid": [e.label for e in found],
             "logical": {e.label: e.verdict.logical.table_rows() for e in found if e.verdict.logical}},
            render_sweep,
        )
        return

    if gate is None and perm is None:
        raise FormatError("Give a gate, --perm, or --sweep")
    candidate = None
    if gate is not None:
        label, clifford = _load_gate(command, gate)
        candidate = TransversalCandidate.bitwise(clifford, blocks)
        candidate = TransversalCandidate(candidate.blocks, candidate.stages, label)
    if perm is not None:
        m = candidate.blocks if candidate is not None else (blocks or 1)
        stage = TransversalCandidate.block_permutation(_parse_perm(perm), f"perm({perm})", m)
        candidate = stage if candidate is None else candidate.then(stage)
    assert candidate is not None
    command.check_size(code.n * candidate.blocks)
    verdict = check_transversal(code, candidate)

    def render() -> None:
        if verdict.valid:
            command.success(f"{candidate.name} on {verdict.blocks} block(s) of {code.name} is valid")
            for row in verdict.logical.table_rows() if verdict.logical else []:
                command.console.print(f"  {row}")
        else:
            witness = verdict.witness
            command.failure(f"{candidate.name} on {verdict.blocks} block(s) of {code.name} is not valid")
            if witness is not None:
                command.console.print(f"  witness: {witness.describe()}")

    command.emit(verdict.to_dict(), render)
    command.finish(verdict.valid)


# sim


@with_error_handling
def simulate(
    ctx: typer.Context,
    circuit_file: Path = typer.Argument(..., help=".circ file"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Random seed (default from settings)"),
    oracle: bool = typer.Option(False, "--oracle", help="Follow the same branch on a dense state vector"),
    input_bits: Optional[str] = typer.Option(None, "--input", help="Computational basis input, e.g. 0110"),
) -> None:
    """Run a stabilizer circuit."""
    command = BaseCommand(ctx)
    circuit = parse_circuit(command.read_file(circuit_file))
    command.check_size(circuit.n)
    if input_bits is None:
        state = StabilizerState.zero(circuit.n)
    else:
        if len(input_bits) != circuit.n or set(input_bits) - {"0", "1"}:
            raise FormatError(f"--input must be {circuit.n} characters of 0 and 1")
        state = StabilizerState.basis_state([int(b) for b in input_bits])
    if oracle:
        command.check_dense(circuit.n)

    used_seed = command.seed(seed)
    try:
        result = run_circuit(circuit, state, np.random.default_rng(used_seed), oracle, command.options.max_n_dense)
    except SimulationError as e:
        if not oracle:
            raise
        command.failure(str(e))
        raise typer.Exit(1)
    document = {"seed": used_seed, **result.to_dict()}
    passed = not oracle or (result.oracle_fidelity is not None and result.oracle_fidelity > 1 - 1e-10)

    def render() -> None:
        table = Table(title=f"Measurements (seed {used_seed})", header_style="bold cyan")
        table.add_column("Bit", style="green")
        table.add_column("Outcome")
        table.add_column("Kind", style="dim")
        if oracle:
            table.add_column("Oracle p", style="yellow")
        for entry in document["measurements"]:
            kind = "deterministic" if entry["deterministic"] else "random"
            if entry["corrected"]:
                kind += ", corrected"
            row = [entry["bit"], f"{entry['outcome']:+d}", kind]
            if oracle:
                row.append(f"{entry['oracle_probability']:.6f}")
            table.add_row(*row)
        command.console.print(table)
        command.console.print("[bold]Final state:[/bold] " + " ".join(document["final_generators"]))
        if oracle:
            (command.success if passed else command.failure)(f"Oracle fidelity {result.oracle_fidelity:.12f}")

    command.emit(document, render)
    command.finish(passed)


# synth


@with_error_handling
def synth(
    ctx: typer.Context,
    gate_file: Path = typer.Argument(..., help=".gate file with the map to synthesize"),
    verify: bool = typer.Option(False, "--verify", help="Replay the circuit and compare, densely when small"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write the .circ here instead of stdout"),
) -> None:
    """Decompose a Clifford map into R, P, P-dagger, CNOT and Paulis."""
    command = BaseCommand(ctx)
    target = parse_gate_text(command.read_file(gate_file))
    command.check_size(target.n)
    circuit = synthesize(target)
    text = circuit.to_text()

    passed = True
    dense_checked = False
    if verify:
        passed = circuit.to_clifford() == target
        if target.n <= command.options.max_n_dense:
            dense_checked = True
            passed = passed and equal_up_to_phase(
                circuit.to_unitary(target.n), target.to_unitary(target.n)
            )

    if output is not None:
        output.write_text(text, encoding="utf-8")

    document = {
        "qubits": circuit.n,
        "gates": len(circuit),
        "circuit": text,
        "output": str(output) if output is not None else None,
        "verified": passed if verify else None,
        "dense_checked": dense_checked,
    }

    def render() -> None:
        if output is not None:
            command.success(f"Wrote {len(circuit)} gates to [cyan]{output}[/cyan]")
        else:
            typer.echo(text, nl=False)
        if verify:
            if passed:
                command.success("Replay matches the target map")
            else:
                command.failure("Replay does not match the target map")

    command.emit(document, render)
    command.finish(passed)


# faults


@with_error_handling
def faults(
    ctx: typer.Context,
    circuit_file: Path = typer.Argument(..., help=".circ file"),
    layout: str = typer.Option(..., "--layout", "-l", help="Blocks as 1-based ranges, e.g. 1-7;8-14"),
    code_spec: Optional[str] = typer.Option(None, "--code", help="Block code, for coset-reduced weights"),
    show_all: bool = typer.Option(False, "--all", help="List every fault, not only violations"),
) -> None:
    """Inject every single fault and report how far it spreads inside each block."""
    command = BaseCommand(ctx)
    circuit = parse_circuit(command.read_file(circuit_file))
    command.check_size(circuit.n)
    code = command.load_code(code_spec) if code_spec else None
    report = fault_injection(circuit, BlockLayout.parse(layout), code)

    def render() -> None:
        shown = report.outcomes if show_all else report.violations
        if shown:
            table = Table(title="Faults", header_style="bold cyan")
            for column in ("Step", "Location", "Fault", "Final error", "Raw", "Reduced", ""):
                table.add_column(column)
            for row in report.table_rows():
                cells = row.split("\t")
                if show_all or cells[-1] == "VIOLATION":
                    table.add_row(*cells)
            command.console.print(table)
        summary = f"{len(report.outcomes)} faults, {len(report.violations)} violation(s)"
        (command.success if report.fault_tolerant else command.failure)(summary)

    command.emit(report.to_dict(), render)
    command.finish(report.fault_tolerant)
