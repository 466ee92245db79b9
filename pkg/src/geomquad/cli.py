"""Command-line surface: run scenarios, check stability reports, list registry.

Exit codes: 0 success, 1 monitor violation or simulation abort, 2 usage error.
"""

from __future__ import annotations

import os
import sys
from dataclasses import replace

import click

from . import config as config_mod
from . import monitor, sim, trace_io
from .errors import GeomQuadError, SimulationAbort


def _load_scenario(scenario: str) -> config_mod.ScenarioConfig:
    if scenario in config_mod.SCENARIOS:
        return config_mod.parse_config(f"scenario: {scenario}")
    if os.path.exists(scenario):
        with open(scenario) as fh:
            return config_mod.parse_config(fh.read())
    raise click.UsageError(f"unknown scenario or missing file: {scenario!r}")


def _apply_overrides(cfg, dt, duration):
    sim_cfg = cfg.sim
    if dt is not None:
        sim_cfg = replace(sim_cfg, dt=dt)
    if duration is not None:
        sim_cfg = replace(sim_cfg, duration=duration)
    return replace(cfg, sim=sim_cfg)


@click.group()
def main():
    """Geometric quadrotor flight-control simulator."""


@main.command("run")
@click.option("--scenario", required=True, help="registry name or config file path")
@click.option("--dt", type=float, default=None, help="integration step override [s]")
@click.option("--duration", type=float, default=None, help="run length override [s]")
@click.option("--out", "out_prefix", default=None, help="output path prefix")
def run_cmd(scenario, dt, duration, out_prefix):
    """Simulate a scenario; writes <prefix>.csv and <prefix>.report."""
    cfg = _apply_overrides(_load_scenario(scenario), dt, duration)
    prefix = out_prefix or cfg.out_prefix or cfg.name or "trace"
    try:
        result = sim.run(cfg.mission, cfg.sim)
    except SimulationAbort as exc:
        click.echo(f"aborted at t={exc.t}: {exc}", err=True)
        sys.exit(1)
    except GeomQuadError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    trace_io.write_trace_csv(result.records, f"{prefix}.csv")
    extra = {
        "scenario": cfg.name or scenario,
        "dt": cfg.sim.dt,
        "records": len(result.records),
        "negative_thrust_steps": result.negative_thrust_steps,
        "projection_fallbacks": result.projection_fallbacks,
        "max_ortho_drift": result.max_ortho_drift,
    }
    if result.report is not None:
        text = monitor.report_to_text(result.report, extra=extra)
    else:
        text = "[monitor-report]\nsamples = 0\n"
    with open(f"{prefix}.report", "w") as fh:
        fh.write(text)
    click.echo(f"wrote {prefix}.csv and {prefix}.report")


@main.command("check")
@click.option("--scenario", required=True, help="registry name or config file path")
@click.option("--dt", type=float, default=None, help="integration step override [s]")
@click.option("--duration", type=float, default=None, help="run length override [s]")
def check_cmd(scenario, dt, duration):
    """Run the monitor only; exit 0 iff no stability violations."""
    cfg = _apply_overrides(_load_scenario(scenario), dt, duration)
    try:
        result = sim.run(cfg.mission, cfg.sim)
    except (SimulationAbort, GeomQuadError) as exc:
        click.echo(f"aborted: {exc}", err=True)
        sys.exit(1)
    report = result.report
    click.echo(monitor.report_to_text(report, extra={"scenario": cfg.name or scenario}))
    if report is not None and report.violations:
        sys.exit(1)


@main.command("list")
def list_cmd():
    """List the built-in scenario registry."""
    for name in config_mod.list_scenarios():
        click.echo(name)


if __name__ == "__main__":
    main()
