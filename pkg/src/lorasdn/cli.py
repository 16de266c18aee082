"""Command-line entry points: run the workload, inspect rates, verify runs."""

from __future__ import annotations

import json
import os

import click

from .harness import (
    IoFailure,
    export_report,
    run_field_workload,
    verify_determinism,
)
from .scenario import ScenarioInvalid, default_scenario, load_scenario


def _load(scenario_path):
    if scenario_path is None:
        return default_scenario()
    return load_scenario(scenario_path)


@click.group()
def main():
    """LoRa controlled-flooding mesh simulator and SDN control service."""


@main.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True),
              default=None, help="Scenario file (bundled campus default when omitted).")
@click.option("--duration", default=3600.0, show_default=True,
              help="Simulated seconds of workload.")
@click.option("--seed", default=None, type=int, help="Override the scenario seed.")
@click.option("--out", "out_path", default="report.json", show_default=True,
              help="Report path; .csv extension selects CSV output.")
def run(scenario_path, duration, seed, out_path):
    """Run the sequential request workload and write a metrics report."""
    try:
        scenario = _load(scenario_path)
        if seed is not None:
            scenario.seed = seed
        report, _ = run_field_workload(scenario, duration_s=duration)
        fmt = "csv" if os.path.splitext(out_path)[1].lower() == ".csv" else "json"
        export_report(report, out_path, fmt)
    except (ScenarioInvalid, IoFailure, ValueError) as exc:
        raise click.ClickException(str(exc))
    agg = report.aggregate["success_rate"]
    click.echo(
        f"{report.meta['requests']} requests over {duration:.0f} simulated s; "
        f"aggregate success rate {'n/a' if agg is None else f'{agg:.4f}'}; "
        f"report written to {out_path}"
    )


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True),
              help="Report JSON produced by `run`.")
def rates(in_path):
    """Print per-device and aggregate success/error rates from a report."""
    try:
        with open(in_path, "r", encoding="utf-8") as fh:
            report = json.load(fh)
        devices = report["devices"]
        aggregate = report["aggregate"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise click.ClickException(f"cannot read report {in_path}: {exc}")
    for device_id in sorted(devices, key=int):
        row = devices[device_id]
        if row["success_rate"] is None:
            click.echo(f"device {device_id}: no receptions")
        else:
            click.echo(
                f"device {device_id}: success {row['success_rate']:.4f} "
                f"error {row['error_rate']:.4f}"
            )
    if aggregate["success_rate"] is not None:
        click.echo(
            f"aggregate: success {aggregate['success_rate']:.4f} "
            f"error {aggregate['error_rate']:.4f}"
        )


@main.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True),
              default=None, help="Scenario file (bundled campus default when omitted).")
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--reps", default=3, show_default=True, type=int)
@click.option("--duration", default=60.0, show_default=True,
              help="Simulated seconds per repetition.")
def verify(scenario_path, seed, reps, duration):
    """Check that repeated seeded runs replay byte-identically."""
    try:
        scenario = _load(scenario_path)
        ok = verify_determinism(scenario, seed, repetitions=reps, duration_s=duration)
    except (ScenarioInvalid, ValueError) as exc:
        raise click.ClickException(str(exc))
    if not ok:
        raise click.ClickException("runs diverged: simulation is not deterministic")
    click.echo(f"{reps} runs identical (seed {seed})")


@main.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--registry", "registry_path", default=None,
              help="Registry snapshot file for persistence across restarts.")
def serve(scenario_path, host, port, registry_path):
    """Serve the northbound HTTP API for the admin console."""
    import uvicorn

    from .api import create_app

    try:
        app = create_app(_load(scenario_path), registry_path=registry_path)
    except ScenarioInvalid as exc:
        raise click.ClickException(str(exc))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
