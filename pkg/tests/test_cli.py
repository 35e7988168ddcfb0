"""Tests for CLI commands."""

import json

from typer.testing import CliRunner

from stabilizer_ft.circuit import Circuit
from stabilizer_ft.cli import app
from stabilizer_ft.settings import Settings
from tests.conftest import BROKEN_FIVE_QUBIT, STEANE_TEXT, T_GATE_TEXT, write_file

runner = CliRunner()

BELL_CIRC = """\
QUBITS 2
GATE R 1
GATE CNOT 1 2
MEASURE ZI -> b0
MEASURE IZ -> b1
"""


def invoke_json(*args: str):
    result = runner.invoke(app, ["--json", *args])
    return result, json.loads(result.stdout) if result.stdout.strip().startswith("{") else None


class TestCodeCommands:
    def test_list(self):
        result = runner.invoke(app, ["code", "list"])
        assert result.exit_code == 0
        assert "steane7" in result.stdout

    def test_list_json_includes_files(self, isolated_environment):
        write_file(isolated_environment, "hand.stab", STEANE_TEXT)
        result, document = invoke_json("code", "list")
        assert result.exit_code == 0
        assert "hand" in [c["name"] for c in document["codes"]]

    def test_validate_builtin(self):
        result, document = invoke_json("code", "validate", "five_qubit")
        assert result.exit_code == 0
        assert document == {"code": "five_qubit", "valid": True, "issues": []}

    def test_validate_broken_file(self, isolated_environment):
        path = write_file(isolated_environment, "broken.stab", BROKEN_FIVE_QUBIT)
        result, document = invoke_json("code", "validate", str(path))
        assert result.exit_code == 1
        assert document["valid"] is False
        assert "M1 and M3 anticommute" in document["issues"]

    def test_validate_table_output(self, isolated_environment):
        write_file(isolated_environment, "broken.stab", BROKEN_FIVE_QUBIT)
        result = runner.invoke(app, ["code", "validate", "broken"])
        assert result.exit_code == 1
        assert "anticommute" in result.stdout

    def test_info(self):
        result, document = invoke_json("code", "info", "steane7")
        assert result.exit_code == 0
        assert document["n"] == 7
        assert document["css"] is True
        assert document["self_dual"] is True
        assert document["logical_z"] == ["IIIIZZZ"]

    def test_distance(self):
        result, document = invoke_json("code", "distance", "five_qubit")
        assert result.exit_code == 0
        assert document["distance"] == 3

    def test_syndrome(self):
        result, document = invoke_json("code", "syndrome", "steane7", "IIIXIII")
        assert result.exit_code == 0
        assert document["syndrome"] == "000100"

    def test_reduce(self):
        result, document = invoke_json("code", "reduce", "steane7", "XXXXXXX")
        assert result.exit_code == 0
        assert document["logical"] == "X"
        assert document["stabilizer"] == "M1"

    def test_reduce_outside_normalizer(self):
        result = runner.invoke(app, ["code", "reduce", "steane7", "XIIIIII"])
        assert result.exit_code == 2

    def test_random_prints_stab(self):
        result = runner.invoke(app, ["code", "random", "6", "2", "--seed", "5"])
        assert result.exit_code == 0
        assert "n=6 k=2" in result.stdout
        again = runner.invoke(app, ["code", "random", "6", "2", "--seed", "5"])
        assert again.stdout == result.stdout

    def test_random_saves(self):
        result = runner.invoke(app, ["code", "random", "5", "1", "--seed", "1", "--name", "drawn"])
        assert result.exit_code == 0
        assert (Settings().codes_dir / "drawn.stab").exists()
        follow_up, document = invoke_json("code", "validate", "drawn")
        assert follow_up.exit_code == 0
        assert document["valid"] is True

    def test_unknown_code(self):
        result = runner.invoke(app, ["code", "info", "nope"])
        assert result.exit_code == 2
        assert "Code not found" in result.stdout

    def test_size_guard(self):
        result = runner.invoke(app, ["--max-n", "5", "code", "info", "steane7"])
        assert result.exit_code == 2
        assert "oversize" in result.stdout


class TestTransversalCommand:
    def test_valid_gate(self):
        result, document = invoke_json("transversal", "steane7", "R")
        assert result.exit_code == 0
        assert document["valid"] is True
        assert document["logical"] == ["X1 -> Z", "Z1 -> X"]

    def test_invalid_gate_exits_one(self):
        result, document = invoke_json("transversal", "five_qubit", "R")
        assert result.exit_code == 1
        assert document["witness"]["generator"] == "M1"

    def test_gate_file(self, isolated_environment):
        path = write_file(isolated_environment, "mine.gate", T_GATE_TEXT)
        result = runner.invoke(app, ["transversal", "five_qubit", str(path)])
        assert result.exit_code == 0
        assert "valid" in result.stdout

    def test_permutation(self):
        result, document = invoke_json("transversal", "eight_qubit", "--perm", "5,6,7,8,1,2,3,4")
        assert result.exit_code == 0
        assert document["valid"] is True

    def test_sweep(self):
        result, document = invoke_json("transversal", "five_qubit", "--sweep")
        assert result.exit_code == 0
        assert "T" in document["valid"]
        assert "R" not in document["valid"]

    def test_nothing_to_check(self):
        result = runner.invoke(app, ["transversal", "steane7"])
        assert result.exit_code == 2

    def test_unknown_gate(self):
        result = runner.invoke(app, ["transversal", "steane7", "FOO"])
        assert result.exit_code == 2


class TestSimCommand:
    def test_bell_measurements_agree(self, isolated_environment):
        path = write_file(isolated_environment, "bell.circ", BELL_CIRC)
        for seed in range(5):
            result, document = invoke_json("sim", str(path), "--seed", str(seed), "--oracle")
            assert result.exit_code == 0
            assert document["seed"] == seed
            first, second = document["measurements"]
            assert first["outcome"] == second["outcome"]
            assert second["deterministic"] is True
            assert abs(document["oracle_fidelity"] - 1.0) < 1e-9

    def test_basis_input(self, isolated_environment):
        path = write_file(isolated_environment, "z.circ", "QUBITS 2\nMEASURE IZ -> b0\n")
        result, document = invoke_json("sim", str(path), "--input", "01")
        assert result.exit_code == 0
        assert document["measurements"][0]["outcome"] == -1

    def test_bad_input(self, isolated_environment):
        path = write_file(isolated_environment, "z.circ", "QUBITS 2\nMEASURE IZ -> b0\n")
        result = runner.invoke(app, ["sim", str(path), "--input", "012"])
        assert result.exit_code == 2

    def test_malformed_circuit(self, isolated_environment):
        path = write_file(isolated_environment, "bad.circ", "GATE FOO 1\n")
        result = runner.invoke(app, ["sim", str(path)])
        assert result.exit_code == 2

    def test_missing_file(self):
        result = runner.invoke(app, ["sim", "nowhere.circ"])
        assert result.exit_code == 2

    def test_seed_from_environment(self, isolated_environment, monkeypatch):
        path = write_file(isolated_environment, "bell.circ", BELL_CIRC)
        monkeypatch.setenv("STABILIZER_FT_SEED", "11")
        _, document = invoke_json("sim", str(path))
        assert document["seed"] == 11


class TestSynthCommand:
    def test_stdout(self, isolated_environment):
        path = write_file(isolated_environment, "t.gate", T_GATE_TEXT)
        result = runner.invoke(app, ["synth", str(path)])
        assert result.exit_code == 0
        assert result.stdout.startswith("QUBITS 1")
        assert "GATE" in result.stdout

    def test_verify_and_output(self, isolated_environment):
        path = write_file(isolated_environment, "t.gate", T_GATE_TEXT)
        output = isolated_environment / "t.circ"
        result = runner.invoke(app, ["synth", str(path), "--verify", "-o", str(output)])
        assert result.exit_code == 0
        assert "Replay matches" in result.stdout
        simulated = runner.invoke(app, ["sim", str(output)])
        assert simulated.exit_code == 0

    def test_json_document(self, isolated_environment):
        path = write_file(isolated_environment, "t.gate", T_GATE_TEXT)
        result, document = invoke_json("synth", str(path), "--verify")
        assert result.exit_code == 0
        assert document["qubits"] == 1
        assert document["circuit"].startswith("QUBITS 1")
        assert document["gates"] == len(document["circuit"].splitlines()) - 1
        assert document["verified"] is True
        assert document["dense_checked"] is True
        assert document["output"] is None

    def test_verify_multiplies_the_circuit_out(self, isolated_environment, mocker):
        path = write_file(isolated_environment, "t.gate", T_GATE_TEXT)
        spy = mocker.spy(Circuit, "to_unitary")
        result = runner.invoke(app, ["synth", str(path), "--verify"])
        assert result.exit_code == 0
        assert spy.call_count == 1

    def test_verify_catches_a_wrong_circuit(self, isolated_environment, mocker):
        path = write_file(isolated_environment, "t.gate", T_GATE_TEXT)
        mocker.patch("stabilizer_ft.cli.commands.synthesize", return_value=Circuit(1).gate("R", 0))
        result, document = invoke_json("synth", str(path), "--verify")
        assert result.exit_code == 1
        assert document["verified"] is False

    def test_dense_check_follows_limit(self, isolated_environment):
        path = write_file(isolated_environment, "t.gate", T_GATE_TEXT)
        result, document = invoke_json("--max-n-dense", "1", "synth", str(path), "--verify")
        assert result.exit_code == 0
        assert document["dense_checked"] is True
        path = write_file(isolated_environment, "cnot.gate", "X1 -> XX\nX2 -> IX\nZ1 -> ZI\nZ2 -> ZZ\n")
        result, document = invoke_json("--max-n-dense", "1", "synth", str(path), "--verify")
        assert result.exit_code == 0
        assert document["verified"] is True
        assert document["dense_checked"] is False

    def test_invalid_map(self, isolated_environment):
        path = write_file(isolated_environment, "bad.gate", "X1 -> Z\nZ1 -> Z\n")
        result = runner.invoke(app, ["synth", str(path)])
        assert result.exit_code == 2


class TestFaultsCommand:
    def test_bitwise_cnot_is_fault_tolerant(self, isolated_environment):
        lines = ["QUBITS 14"] + [f"GATE CNOT {p} {p + 7}" for p in range(1, 8)]
        path = write_file(isolated_environment, "cnot.circ", "\n".join(lines) + "\n")
        result, document = invoke_json("faults", str(path), "--layout", "1-7;8-14", "--code", "steane7")
        assert result.exit_code == 0
        assert document["fault_tolerant"] is True
        assert document["faults"] == 105

    def test_swap_is_flagged(self, isolated_environment):
        path = write_file(isolated_environment, "swap.circ", "QUBITS 2\nGATE SWAP 1 2\n")
        result = runner.invoke(app, ["faults", str(path), "--layout", "1-2"])
        assert result.exit_code == 1
        assert "violation" in result.stdout

    def test_bad_layout(self, isolated_environment):
        path = write_file(isolated_environment, "swap.circ", "QUBITS 2\nGATE SWAP 1 2\n")
        result = runner.invoke(app, ["faults", str(path), "--layout", "1-a"])
        assert result.exit_code == 2


class TestProtocolCommands:
    def test_list(self):
        result, document = invoke_json("protocol", "list")
        assert result.exit_code == 0
        names = [p["name"] for p in document["protocols"]]
        assert "teleport" in names
        assert len(names) == 13

    def test_run_several_seeds(self):
        result, document = invoke_json("protocol", "run", "teleport", "--seed", "4", "--seeds", "3")
        assert result.exit_code == 0
        assert document["passed"] is True
        assert [r["seed"] for r in document["runs"]] == [4, 5, 6]

    def test_run_with_params(self):
        result = runner.invoke(app, ["protocol", "run", "qubit_switch", "-p", "j=2"])
        assert result.exit_code == 0
        assert "pass" in result.stdout

    def test_bad_param_syntax(self):
        result = runner.invoke(app, ["protocol", "run", "teleport", "-p", "code"])
        assert result.exit_code == 2

    def test_unknown_protocol(self):
        result = runner.invoke(app, ["protocol", "run", "nope"])
        assert result.exit_code == 2

    def test_dump(self, isolated_environment):
        result = runner.invoke(app, ["protocol", "dump", "teleport"])
        assert result.exit_code == 0
        assert result.stdout.startswith("# protocol: teleport")
        output = isolated_environment / "teleport.circ"
        written = runner.invoke(app, ["protocol", "dump", "teleport", "-o", str(output)])
        assert written.exit_code == 0
        assert output.read_text() == result.stdout


class TestConfigCommands:
    def test_init(self):
        result = runner.invoke(app, ["config", "init"])
        assert result.exit_code == 0
        assert Settings().config_file.exists()
        again = runner.invoke(app, ["config", "init"])
        assert "already exist" in again.stdout

    def test_set_and_get(self):
        assert runner.invoke(app, ["config", "set", "max_n", "5"]).exit_code == 0
        result = runner.invoke(app, ["config", "get", "max_n"])
        assert result.stdout.strip() == "max_n: 5"
        guarded = runner.invoke(app, ["code", "info", "steane7"])
        assert guarded.exit_code == 2

    def test_set_invalid(self):
        result = runner.invoke(app, ["config", "set", "max_n_dense", "99"])
        assert result.exit_code == 2
        assert "Configuration error" in result.stdout

    def test_json_default_from_settings(self):
        runner.invoke(app, ["config", "set", "json_output", "true"])
        result = runner.invoke(app, ["code", "distance", "steane7"])
        assert json.loads(result.stdout)["distance"] == 3

    def test_show(self):
        result, document = invoke_json("config", "show")
        assert result.exit_code == 0
        assert document["settings"]["max_n"] == 64
        assert len(document["code_directories"]) == 2

    def test_broken_settings_file_needs_init(self):
        settings = Settings(load=False)
        settings.config_dir.mkdir(parents=True)
        settings.config_file.write_text("{not json")
        result = runner.invoke(app, ["config", "show"])
        assert result.exit_code == 2
        assert runner.invoke(app, ["config", "init", "--force"]).exit_code == 0
        assert runner.invoke(app, ["config", "show"]).exit_code == 0
