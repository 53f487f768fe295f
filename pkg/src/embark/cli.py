"""Command line: run scenarios, serve the console bridge, re-run checkers.

Exit codes: 0 all checkers pass, 1 a checker failed, 2 configuration or
usage error.
"""

from __future__ import annotations

import sys

import click

from embark.scenario.checks import evaluate_checkers
from embark.scenario.config import ConfigError, load_config
from embark.scenario.runner import ScenarioRunner, RunReport
from embark.scenario.transcript import read_transcript


def _print_report(report: RunReport) -> None:
    for result in report.checker_results:
        mark = "PASS" if result["passed"] else "FAIL"
        click.echo(f"{mark} {result['name']}: {result['detail']}")
    click.echo(f"outcome: {report.outcome} (ticks={report.ticks})")
    if report.transcript_path is not None:
        click.echo(f"transcript: {report.transcript_path}")


@click.group()
def main() -> None:
    """Embodied multi-agent scenario harness."""


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(), help="scenario JSON")
@click.option("--seed", type=int, default=None, help="override the scenario seed")
@click.option("--transcript", "transcript_path", type=click.Path(), default=None,
              help="write the JSONL transcript here")
@click.option("--live", is_flag=True, help="wall-clock ticks (10 per second) instead of fake time")
def run(scenario_path: str, seed: int | None, transcript_path: str | None, live: bool) -> None:
    """Run a scenario to completion and judge its checkers."""
    try:
        config = load_config(scenario_path)
        if seed is not None:
            config.seed = seed
        runner = ScenarioRunner(config, live=live)
        report = runner.run(transcript_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    _print_report(report)
    sys.exit(report.exit_code)


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--console", "console_dir", type=click.Path(), default="frontend",
              show_default=True, help="directory with the built operator console")
def serve(scenario_path: str, port: int, host: str, console_dir: str) -> None:
    """Run a scenario live and expose the operator console bridge."""
    from pathlib import Path

    from embark.service import serve as serve_bridge

    try:
        config = load_config(scenario_path)
        runner = ScenarioRunner(config, live=True)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    console = Path(console_dir)
    if (console / "index.html").is_file():
        click.echo(f"console: http://{host}:{port}/  bridge: ws://{host}:{port}/ws")
    else:
        click.echo(f"bridge: ws://{host}:{port}/ws (no console at {console})")
    serve_bridge(runner, host, port, console_dir=console)


@main.command()
@click.option("--transcript", "transcript_path", required=True, type=click.Path())
def checkers(transcript_path: str) -> None:
    """Re-evaluate a finished run's checkers from its transcript."""
    try:
        index = read_transcript(transcript_path)
        specs = index.meta().get("checkers", [])
    except (OSError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    results = evaluate_checkers(index, specs)
    for result in results:
        mark = "PASS" if result["passed"] else "FAIL"
        click.echo(f"{mark} {result['name']}: {result['detail']}")
    sys.exit(0 if all(r["passed"] for r in results) else 1)


if __name__ == "__main__":
    main()
