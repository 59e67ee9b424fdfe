"""Command-line entry point.

Exit codes: 0 success, 1 negative verdict (invalid / inequivalent /
nonconforming), 2 usage or configuration error, 3 provider error.  With
`--json`, stdout carries one JSON document for every outcome, including
errors; without it, verdicts go to stdout and error diagnostics to stderr.

Configuration precedence: environment variables, then `tslforge.json` in the
working directory, then command-line flags (strongest).
"""

from __future__ import annotations

import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import bench as bench_mod
from .errors import FormatError
from .formulas import spec_to_dict
from .llm import (
    DEFAULT_BASE_URL,
    DEFAULT_MAX_TOKENS,
    DEFAULT_MODEL,
    DEFAULT_TEMPERATURE,
    ENV_API_KEY,
    ENV_BASE_URL,
    ENV_MODEL,
    HttpProvider,
    MockProvider,
    ProviderError,
    RateLimiter,
    RetryingProvider,
)
from .machines import NondeterministicGuards, emit_controller, load_machine_file
from .parser import ParseError, parse_spec
from .printer import print_spec
from .prompting import (
    MissingPart,
    PromptVariant,
    assemble_prompt,
    load_bundle,
)
from .semantics import (
    BudgetExceeded,
    Conforms,
    EquivalentUpTo,
    IncompleteMachine,
    UnknownAtom,
    bounded_equiv,
    check_machine,
)
from .signatures import atom_alphabet, load_signatures, validate

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_PROVIDER = 3

CONFIG_FILE = "tslforge.json"


class CliFailure(Exception):
    def __init__(self, code: int, error_type: str, message: str):
        self.code = code
        self.error_type = error_type
        self.message = message
        super().__init__(message)


def _load_config() -> dict:
    path = Path(CONFIG_FILE)
    if not path.exists():
        return {}
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise CliFailure(EXIT_USAGE, "config", f"{CONFIG_FILE}: {e}") from e
    if not isinstance(doc, dict):
        raise CliFailure(EXIT_USAGE, "config", f"{CONFIG_FILE}: must be an object")
    return doc


def _setting(flag, file_key: str, env_key: str | None, default):
    """env < config file < flag."""
    if flag is not None:
        return flag
    config = _load_config()
    if file_key in config:
        return config[file_key]
    if env_key and env_key in os.environ:
        return os.environ[env_key]
    return default


def _emit(ctx_json: bool, payload: dict, human: str, code: int) -> None:
    if ctx_json:
        click.echo(json.dumps(payload, sort_keys=True))
    elif human:
        out = sys.stderr if code == EXIT_USAGE or code == EXIT_PROVIDER else sys.stdout
        click.echo(human, file=out)
    sys.exit(code)


def _run(ctx_json: bool, body) -> None:
    try:
        payload, human, code = body()
    except CliFailure as e:
        _emit(
            ctx_json,
            {"ok": False, "error": {"type": e.error_type, "message": e.message}},
            f"error: {e.message}",
            e.code,
        )
        return
    except ProviderError as e:
        _emit(
            ctx_json,
            {"ok": False, "error": {"type": "provider", "kind": e.kind, "message": e.detail}},
            f"provider error ({e.kind}): {e.detail}",
            EXIT_PROVIDER,
        )
        return
    _emit(ctx_json, payload, human, code)


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliFailure(EXIT_USAGE, "io", f"cannot read {what} {path}: {e}") from e


def _parse_spec_file(path: str):
    text = _read_text(path, "specification")
    try:
        return parse_spec(text)
    except ParseError as e:
        raise CliFailure(
            EXIT_USAGE,
            "parse",
            f"{path}:{e.line}:{e.column}: expected {e.expected}, found {e.found}",
        ) from e


def _load_table(path: str):
    try:
        return load_signatures(path)
    except FormatError as e:
        raise CliFailure(EXIT_USAGE, "format", f"{path}: {e}") from e
    except OSError as e:
        raise CliFailure(EXIT_USAGE, "io", f"cannot read signatures {path}: {e}") from e


def _load_bundle(path: str):
    try:
        return load_bundle(path)
    except FileNotFoundError as e:
        raise CliFailure(EXIT_USAGE, "io", f"not a benchmark bundle: {path} ({e})") from e
    except FormatError as e:
        raise CliFailure(EXIT_USAGE, "format", f"{path}: {e}") from e


def _variant(name: str) -> PromptVariant:
    try:
        return PromptVariant.parse(name)
    except ValueError as e:
        raise CliFailure(EXIT_USAGE, "usage", str(e)) from e


def _provider(mock: str | None, rpm: float | None):
    if mock is not None:
        try:
            return MockProvider.from_file(mock)
        except (OSError, ValueError) as e:
            raise CliFailure(EXIT_USAGE, "config", f"mock script {mock}: {e}") from e
    api_key = _setting(None, "api_key", ENV_API_KEY, "")
    base_url = _setting(None, "base_url", ENV_BASE_URL, DEFAULT_BASE_URL)
    rpm = _setting(rpm, "requests_per_minute", None, None)
    limiter = RateLimiter(float(rpm)) if rpm else None
    return RetryingProvider(
        HttpProvider(api_key=api_key, base_url=base_url, rate_limiter=limiter)
    )


def _settings(model: str | None, temperature: float | None, max_tokens: int | None):
    return bench_mod.GenerationSettings(
        model=_setting(model, "model", ENV_MODEL, DEFAULT_MODEL),
        temperature=float(_setting(temperature, "temperature", None, DEFAULT_TEMPERATURE)),
        max_tokens=int(_setting(max_tokens, "max_tokens", None, DEFAULT_MAX_TOKENS)),
    )


json_flag = click.option("--json", "json_mode", is_flag=True, help="machine-readable output")


@click.group()
@click.version_option()
def cli() -> None:
    """Temporal stream specification toolkit."""


@cli.command("parse")
@click.argument("spec_file", type=click.Path())
@json_flag
def cmd_parse(spec_file: str, json_mode: bool) -> None:
    """Parse a .tsl file and print its AST."""

    def body():
        text = _read_text(spec_file, "specification")
        try:
            spec = parse_spec(text)
        except ParseError as e:
            return (
                {
                    "ok": False,
                    "error": {
                        "type": "parse",
                        "line": e.line,
                        "column": e.column,
                        "expected": e.expected,
                        "found": e.found,
                    },
                },
                f"{spec_file}:{e.line}:{e.column}: expected {e.expected}, found {e.found}",
                EXIT_NEGATIVE,
            )
        payload = {
            "ok": True,
            "assumes": len(spec.assumes),
            "guarantees": len(spec.guarantees),
            "ast": spec_to_dict(spec),
        }
        human = (
            f"parsed: {len(spec.assumes)} assumption(s), "
            f"{len(spec.guarantees)} guarantee(s)\n" + print_spec(spec)
        )
        return payload, human, EXIT_OK

    _run(json_mode, body)


@cli.command("validate")
@click.argument("spec_file", type=click.Path())
@click.option("--sig", "sig_file", required=True, type=click.Path())
@json_flag
def cmd_validate(spec_file: str, sig_file: str, json_mode: bool) -> None:
    """Validate a specification against a signature table."""

    def body():
        spec = _parse_spec_file(spec_file)
        table = _load_table(sig_file)
        report = validate(spec, table)
        payload = {"ok": report.ok, "report": report.to_json()}
        if report.ok:
            return payload, "valid", EXIT_OK
        lines = []
        for issue in report.issues:
            where = f"{issue.span.line}:{issue.span.column}: " if issue.span else ""
            lines.append(f"{where}{issue.code.value}: {issue.message}")
        return payload, "\n".join(lines), EXIT_NEGATIVE

    _run(json_mode, body)


@cli.command("prompt")
@click.argument("benchdir", type=click.Path())
@click.option("--variant", default="full", show_default=True)
@json_flag
def cmd_prompt(benchdir: str, variant: str, json_mode: bool) -> None:
    """Assemble and print the generation prompt for a benchmark bundle."""

    def body():
        bundle = _load_bundle(benchdir)
        v = _variant(variant)
        try:
            prompt = assemble_prompt(bundle, v)
        except MissingPart as e:
            raise CliFailure(EXIT_USAGE, "missing_part", str(e)) from e
        return (
            {"ok": True, "variant": v.value, "prompt": prompt},
            prompt,
            EXIT_OK,
        )

    _run(json_mode, body)


@cli.command("generate")
@click.argument("benchdir", type=click.Path())
@click.option("--variant", default="full", show_default=True)
@click.option("--mock", "mock_script", type=click.Path(), default=None,
              help="mock provider script instead of the live endpoint")
@click.option("-k", "equiv_bound", default=4, show_default=True)
@click.option("--model", default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--max-tokens", type=int, default=None)
@json_flag
def cmd_generate(
    benchdir: str,
    variant: str,
    mock_script: str | None,
    equiv_bound: int,
    model: str | None,
    temperature: float | None,
    max_tokens: int | None,
    json_mode: bool,
) -> None:
    """Run one generation trial and report validity/correctness."""

    def body():
        try:
            case = bench_mod.load_case(benchdir, equiv_bound)
        except (OSError, FormatError, ParseError, ValueError) as e:
            raise CliFailure(EXIT_USAGE, "bundle", f"{benchdir}: {e}") from e
        provider = _provider(mock_script, None)
        record = bench_mod.run_trial(
            case,
            _variant(variant),
            trial=0,
            provider=provider,
            settings=_settings(model, temperature, max_tokens),
        )
        payload = {"ok": record.valid and record.correct, "record": record.to_json()}
        lines = [f"stage: {record.stage}", f"valid: {record.valid}"]
        if record.extracted:
            lines.append("--- extracted ---")
            lines.append(record.extracted)
        if record.validation and not record.validation.ok:
            lines.extend(i.message for i in record.validation.issues)
        if record.equiv is not None:
            lines.append(f"correct: {record.correct} ({record.equiv.to_json()['type']})")
        code = EXIT_OK if record.valid and record.correct else EXIT_NEGATIVE
        if record.is_provider_error:
            code = EXIT_PROVIDER
        return payload, "\n".join(lines), code

    _run(json_mode, body)


@cli.command("equiv")
@click.argument("spec_a", type=click.Path())
@click.argument("spec_b", type=click.Path())
@click.option("--sig", "sig_file", required=True, type=click.Path())
@click.option("-k", "bound", default=4, show_default=True)
@json_flag
def cmd_equiv(spec_a: str, spec_b: str, sig_file: str, bound: int, json_mode: bool) -> None:
    """Exhaustively compare two specifications up to a lasso size bound."""

    def body():
        a = _parse_spec_file(spec_a)
        b = _parse_spec_file(spec_b)
        table = _load_table(sig_file)
        for name, spec in ((spec_a, a), (spec_b, b)):
            report = validate(spec, table)
            if not report.ok:
                raise CliFailure(
                    EXIT_USAGE, "validate",
                    f"{name} does not validate against {sig_file}",
                )
        alphabet = atom_alphabet(a, table).union(atom_alphabet(b, table))
        try:
            verdict = bounded_equiv(a, b, alphabet, bound)
        except BudgetExceeded as e:
            raise CliFailure(EXIT_USAGE, "budget", str(e)) from e
        payload = {"ok": isinstance(verdict, EquivalentUpTo), "verdict": verdict.to_json()}
        if isinstance(verdict, EquivalentUpTo):
            return payload, f"equivalent up to {bound}", EXIT_OK
        human = "not equivalent; distinguishing lasso:\n" + json.dumps(
            verdict.to_json()["trace"], indent=2
        )
        return payload, human, EXIT_NEGATIVE

    _run(json_mode, body)


@cli.command("check-machine")
@click.argument("machine_file", type=click.Path())
@click.argument("spec_file", type=click.Path())
@click.option("--sig", "sig_file", required=True, type=click.Path())
@click.option("-k", "bound", default=4, show_default=True)
@json_flag
def cmd_check_machine(
    machine_file: str, spec_file: str, sig_file: str, bound: int, json_mode: bool
) -> None:
    """Check a controller against a specification on all bounded inputs."""

    def body():
        try:
            machine = load_machine_file(machine_file)
        except (FormatError, NondeterministicGuards, OSError) as e:
            raise CliFailure(EXIT_USAGE, "machine", f"{machine_file}: {e}") from e
        spec = _parse_spec_file(spec_file)
        table = _load_table(sig_file)
        report = validate(spec, table)
        if not report.ok:
            raise CliFailure(EXIT_USAGE, "validate", f"{spec_file} does not validate")
        alphabet = atom_alphabet(spec, table)
        try:
            verdict = check_machine(machine, spec, bound, alphabet)
        except IncompleteMachine as e:
            payload = {
                "ok": False,
                "verdict": {"type": "incomplete_machine", "state": e.state,
                            "message": str(e)},
            }
            return payload, str(e), EXIT_NEGATIVE
        except (BudgetExceeded, UnknownAtom) as e:
            raise CliFailure(EXIT_USAGE, "check", str(e)) from e
        payload = {"ok": isinstance(verdict, Conforms), "verdict": verdict.to_json()}
        if isinstance(verdict, Conforms):
            human = f"conforms up to {bound}"
            if verdict.unclosed_skipped:
                human += f" ({verdict.unclosed_skipped} unclosed sequence(s) skipped)"
            return payload, human, EXIT_OK
        human = "nonconforming; violating trace:\n" + json.dumps(
            verdict.to_json()["trace"], indent=2
        )
        return payload, human, EXIT_NEGATIVE

    _run(json_mode, body)


@cli.command("codegen")
@click.argument("machine_file", type=click.Path())
@click.option("-o", "out_file", required=True, type=click.Path())
@json_flag
def cmd_codegen(machine_file: str, out_file: str, json_mode: bool) -> None:
    """Emit controller source for a machine description."""

    def body():
        try:
            machine = load_machine_file(machine_file)
        except (FormatError, NondeterministicGuards, OSError) as e:
            raise CliFailure(EXIT_USAGE, "machine", f"{machine_file}: {e}") from e
        source = emit_controller(machine) + "\n"
        Path(out_file).write_text(source, encoding="utf-8")
        return (
            {"ok": True, "out": out_file, "states": len(machine.states)},
            f"wrote {out_file}",
            EXIT_OK,
        )

    _run(json_mode, body)


@cli.command("bench")
@click.option("--cases", "cases_dir", required=True, type=click.Path())
@click.option("--variants", default="all", show_default=True,
              help="'all' or comma-separated: full,no-sigs,summary-only")
@click.option("-n", "trials", default=10, show_default=True)
@click.option("--mock", "mock_script", type=click.Path(), default=None)
@click.option("--parallel", "parallelism", default=1, show_default=True)
@click.option("--run-dir", default=None, help="output directory (re-use to resume)")
@click.option("-k", "equiv_bound", default=4, show_default=True)
@click.option("--count-provider-errors", is_flag=True)
@click.option("--model", default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--max-tokens", type=int, default=None)
@click.option("--rpm", "requests_per_minute", type=float, default=None,
              help="rate limit for the live endpoint")
@json_flag
def cmd_bench(
    cases_dir: str,
    variants: str,
    trials: int,
    mock_script: str | None,
    parallelism: int,
    run_dir: str | None,
    equiv_bound: int,
    count_provider_errors: bool,
    model: str | None,
    temperature: float | None,
    max_tokens: int | None,
    requests_per_minute: float | None,
    json_mode: bool,
) -> None:
    """Run the benchmark suite and write records + metric summaries."""

    def body():
        try:
            cases = bench_mod.discover_cases(cases_dir, equiv_bound)
        except (OSError, FormatError, ParseError, ValueError) as e:
            raise CliFailure(EXIT_USAGE, "bundle", f"{cases_dir}: {e}") from e
        if not cases:
            raise CliFailure(EXIT_USAGE, "bundle", f"no benchmark bundles in {cases_dir}")
        if variants == "all":
            selected = list(bench_mod.ALL_VARIANTS)
        else:
            selected = [_variant(v.strip()) for v in variants.split(",") if v.strip()]
        if not selected:
            raise CliFailure(EXIT_USAGE, "usage", "no prompt variants selected")
        if trials < 1:
            raise CliFailure(EXIT_USAGE, "usage", "-n must be >= 1")
        out = Path(run_dir) if run_dir else Path("runs") / datetime.now(
            timezone.utc
        ).strftime("%Y%m%dT%H%M%SZ")
        provider = _provider(mock_script, requests_per_minute)
        summary, records_path = bench_mod.run_suite(
            cases,
            selected,
            trials,
            provider,
            out,
            parallelism=parallelism,
            settings=_settings(model, temperature, max_tokens),
            count_provider_errors=count_provider_errors,
        )
        payload = {
            "ok": True,
            "records": str(records_path),
            "summary": summary.to_json(),
        }
        lines = [f"records: {records_path}"]
        lines.append(
            f"{'benchmark':<14} {'variant':<13} {'trials':>6} {'valid':>6} "
            f"{'correct':>8} {'v-rate':>7} {'c-rate':>7} {'c|v':>7}"
        )
        for c in summary.cells:
            cgv = c.rate_correct_given_valid
            lines.append(
                f"{c.benchmark:<14} {c.variant:<13} {c.trials:>6} {c.valid:>6} "
                f"{c.correct:>8} {float(c.rate_valid or 0):>7.2f} "
                f"{float(c.rate_correct or 0):>7.2f} "
                f"{'-' if cgv is None else format(float(cgv), '.2f'):>7}"
            )
        return payload, "\n".join(lines), EXIT_OK

    _run(json_mode, body)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except SystemExit as e:
        return int(e.code or 0)
    except click.UsageError as e:
        click.echo(f"error: {e.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
