import json

import pytest
from click.testing import CliRunner

from tslforge.cli import EXIT_NEGATIVE, EXIT_OK, EXIT_PROVIDER, EXIT_USAGE, cli

from .conftest import BALL, BENCHMARKS, CONTROLLER_STATE0, MUTANT_BALL, PROSE_ONLY, fenced


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args))


def write_mock(tmp_path, responses, name="mock.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"responses": responses}))
    return str(path)


BALL_TSL = str(BALL / "gold.tsl")
BALL_SIG = str(BALL / "signatures.json")
BALL_MACHINE = str(BALL / "machine.json")


class TestParse:
    def test_ok(self, runner):
        result = invoke(runner, "parse", BALL_TSL)
        assert result.exit_code == EXIT_OK
        assert "3 assumption(s), 5 guarantee(s)" in result.output

    def test_json_ok(self, runner):
        result = invoke(runner, "parse", BALL_TSL, "--json")
        doc = json.loads(result.output)
        assert doc["ok"] and doc["assumes"] == 3 and doc["guarantees"] == 5

    def test_parse_error_exit_one(self, runner, tmp_path):
        bad = tmp_path / "bad.tsl"
        bad.write_text("always guarantee { [ball <- ]; }")
        result = invoke(runner, "parse", str(bad))
        assert result.exit_code == EXIT_NEGATIVE

    def test_parse_error_json(self, runner, tmp_path):
        bad = tmp_path / "bad.tsl"
        bad.write_text("always guarantee { [ball <- ]; }")
        result = invoke(runner, "parse", str(bad), "--json")
        doc = json.loads(result.output)
        assert doc["ok"] is False and doc["error"]["type"] == "parse"

    def test_missing_file_is_usage_error(self, runner):
        result = invoke(runner, "parse", "nope.tsl", "--json")
        assert result.exit_code == EXIT_USAGE
        assert json.loads(result.output)["ok"] is False


class TestValidate:
    def test_ok(self, runner):
        result = invoke(runner, "validate", BALL_TSL, "--sig", BALL_SIG)
        assert result.exit_code == EXIT_OK

    def test_invalid_exit_one(self, runner, tmp_path):
        spec = tmp_path / "bad.tsl"
        spec.write_text("always guarantee { teleport ball; }")
        result = invoke(runner, "validate", str(spec), "--sig", BALL_SIG, "--json")
        assert result.exit_code == EXIT_NEGATIVE
        doc = json.loads(result.output)
        assert doc["report"]["issues"][0]["code"] == "UnknownSymbol"

    def test_bad_signature_file_is_usage_error(self, runner, tmp_path):
        sig = tmp_path / "bad.json"
        sig.write_text('{"cells": [{"name": "x", "huh": 1}]}')
        result = invoke(runner, "validate", BALL_TSL, "--sig", str(sig), "--json")
        assert result.exit_code == EXIT_USAGE
        assert json.loads(result.output)["ok"] is False


class TestPrompt:
    def test_full_prompt(self, runner):
        result = invoke(runner, "prompt", str(BALL), "--variant", "full")
        assert result.exit_code == EXIT_OK
        assert "moveLeft" in result.output

    def test_summary_only(self, runner):
        result = invoke(runner, "prompt", str(BALL), "--variant", "summary-only")
        assert result.exit_code == EXIT_OK
        assert "moveLeft" not in result.output
        assert "A ball is bouncing" in result.output

    def test_unknown_variant(self, runner):
        result = invoke(runner, "prompt", str(BALL), "--variant", "tiny")
        assert result.exit_code == EXIT_USAGE

    def test_missing_part_is_usage_error_with_json(self, runner, tmp_path):
        bundle = tmp_path / "bundle"
        bundle.mkdir()
        (bundle / "summary.txt").write_text("just a summary")
        (bundle / "signatures.json").write_text('{"cells": [{"name": "c"}]}')
        result = invoke(runner, "prompt", str(bundle), "--variant", "full", "--json")
        assert result.exit_code == EXIT_USAGE
        doc = json.loads(result.output)
        assert doc["ok"] is False and doc["error"]["type"] == "missing_part"


class TestGenerate:
    def test_gold_mock(self, runner, tmp_path, ball_text):
        mock = write_mock(tmp_path, [fenced(ball_text)])
        result = invoke(runner, "generate", str(BALL), "--mock", mock, "--json")
        assert result.exit_code == EXIT_OK
        doc = json.loads(result.output)
        assert doc["ok"] and doc["record"]["equiv"]["type"] == "equivalent_up_to"

    def test_mutant_mock_exit_one(self, runner, tmp_path):
        mock = write_mock(tmp_path, [fenced(MUTANT_BALL)])
        result = invoke(runner, "generate", str(BALL), "--mock", mock, "--json")
        assert result.exit_code == EXIT_NEGATIVE
        doc = json.loads(result.output)
        assert doc["record"]["equiv"]["type"] == "counterexample"

    def test_prose_mock_exit_one(self, runner, tmp_path):
        mock = write_mock(tmp_path, [PROSE_ONLY])
        result = invoke(runner, "generate", str(BALL), "--mock", mock)
        assert result.exit_code == EXIT_NEGATIVE

    def test_provider_exhausted_exit_three(self, runner, tmp_path):
        mock = write_mock(tmp_path, [{"error": "Exhausted"}])
        result = invoke(runner, "generate", str(BALL), "--mock", mock, "--json")
        assert result.exit_code == EXIT_PROVIDER
        assert json.loads(result.output)["record"]["provider_error"] == "Exhausted"

    def test_missing_credentials_exit_three(self, runner, monkeypatch):
        monkeypatch.delenv("TSLF_API_KEY", raising=False)
        result = invoke(runner, "generate", str(BALL), "--json")
        assert result.exit_code == EXIT_PROVIDER
        doc = json.loads(result.output)
        assert doc["error"]["kind"] == "Auth"


class TestEquiv:
    def test_reflexive(self, runner):
        result = invoke(runner, "equiv", BALL_TSL, BALL_TSL, "--sig", BALL_SIG, "-k", "3")
        assert result.exit_code == EXIT_OK
        assert "equivalent up to 3" in result.output

    def test_inequivalent_exit_one(self, runner, tmp_path):
        mutant = tmp_path / "mutant.tsl"
        mutant.write_text(MUTANT_BALL)
        result = invoke(
            runner, "equiv", BALL_TSL, str(mutant), "--sig", BALL_SIG, "--json"
        )
        assert result.exit_code == EXIT_NEGATIVE
        doc = json.loads(result.output)
        assert doc["verdict"]["type"] == "counterexample"
        assert doc["verdict"]["trace"]["loop"]


class TestCheckMachine:
    def test_conforms(self, runner):
        result = invoke(
            runner, "check-machine", BALL_MACHINE, BALL_TSL, "--sig", BALL_SIG, "-k", "4"
        )
        assert result.exit_code == EXIT_OK
        assert "conforms up to 4" in result.output

    def test_incomplete_machine_exit_one(self, runner, tmp_path):
        doc = json.loads(open(BALL_MACHINE).read())
        doc["states"][0]["transitions"] = doc["states"][0]["transitions"][1:]
        machine = tmp_path / "machine.json"
        machine.write_text(json.dumps(doc))
        result = invoke(
            runner, "check-machine", str(machine), BALL_TSL, "--sig", BALL_SIG, "--json"
        )
        assert result.exit_code == EXIT_NEGATIVE
        assert json.loads(result.output)["verdict"]["type"] == "incomplete_machine"

    def test_nondeterministic_machine_usage_error(self, runner, tmp_path):
        doc = {
            "initial": 0,
            "states": [{"id": 0, "transitions": [
                {"guard": [], "updates": {}, "to": 0},
                {"guard": [], "updates": {}, "to": 0},
            ]}],
        }
        machine = tmp_path / "machine.json"
        machine.write_text(json.dumps(doc))
        result = invoke(
            runner, "check-machine", str(machine), BALL_TSL, "--sig", BALL_SIG, "--json"
        )
        assert result.exit_code == EXIT_USAGE


class TestCodegen:
    def test_writes_controller(self, runner, tmp_path):
        out = tmp_path / "ball.js"
        result = invoke(runner, "codegen", BALL_MACHINE, "-o", str(out))
        assert result.exit_code == EXIT_OK
        text = out.read_text()
        state0 = text.split("if (currentState === 1)")[0]
        got = [line.rstrip() for line in state0.rstrip().splitlines()]
        assert got == CONTROLLER_STATE0.splitlines()

    def test_json_output(self, runner, tmp_path):
        out = tmp_path / "ball.js"
        result = invoke(runner, "codegen", BALL_MACHINE, "-o", str(out), "--json")
        doc = json.loads(result.output)
        assert doc["ok"] and doc["states"] == 3


class TestConfigPrecedence:
    def test_env_then_file_then_flag(self, tmp_path, monkeypatch):
        from tslforge.cli import _setting

        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("TSLF_MODEL", "env-model")
        assert _setting(None, "model", "TSLF_MODEL", "fallback") == "env-model"
        (tmp_path / "tslforge.json").write_text('{"model": "file-model"}')
        assert _setting(None, "model", "TSLF_MODEL", "fallback") == "file-model"
        assert _setting("flag-model", "model", "TSLF_MODEL", "fallback") == "flag-model"
        monkeypatch.delenv("TSLF_MODEL")
        (tmp_path / "tslforge.json").unlink()
        assert _setting(None, "model", "TSLF_MODEL", "fallback") == "fallback"

    def test_malformed_config_file_is_usage_error(self, tmp_path, monkeypatch, runner):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "tslforge.json").write_text("[broken")
        (tmp_path / "spec.tsl").write_text("always guarantee { }")
        mock = write_mock(tmp_path, ["x"])
        result = invoke(runner, "generate", str(BALL), "--mock", mock, "--json")
        assert result.exit_code == EXIT_USAGE


class TestBench:
    def test_bench_over_shipped_cases(self, runner, tmp_path, ball_text):
        mock = write_mock(tmp_path, [fenced(ball_text)])
        result = invoke(
            runner, "bench",
            "--cases", str(BENCHMARKS),
            "--variants", "full",
            "-n", "1",
            "--mock", mock,
            "--run-dir", str(tmp_path / "run"),
            "-k", "2",
            "--json",
        )
        assert result.exit_code == EXIT_OK, result.output
        doc = json.loads(result.output)
        cells = {c["benchmark"]: c for c in doc["summary"]["cells"]}
        assert cells["ball"]["correct"] == 1  # the mock returns the ball gold
        assert set(cells) == {"ball", "blinker", "cube-grow", "cube-pulse",
                              "cube-shrink", "vending"}
        assert (tmp_path / "run" / "summary.csv").exists()
        assert (tmp_path / "run" / "metrics_long.csv").exists()

    def test_unknown_flag_rejected(self, runner):
        result = invoke(runner, "bench", "--cases", str(BENCHMARKS), "--frobnicate")
        assert result.exit_code == EXIT_USAGE

    def test_empty_cases_dir(self, runner, tmp_path):
        result = invoke(runner, "bench", "--cases", str(tmp_path), "--json")
        assert result.exit_code == EXIT_USAGE
        assert json.loads(result.output)["ok"] is False
