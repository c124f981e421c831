"""Command-line entry point: scenario runs, model comparison, database
inspection and the HTTP service.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from bamcbr.errors import BamCbrError
from bamcbr.cbr.database import CaseDatabase
from bamcbr.binding.config import BamCbrConfig, build_schema
from bamcbr.binding.controller import (
    DECISION_LOG_HEADER,
    METRICS_HEADER,
    compare_models,
    make_engine,
    run_cbr,
)
from bamcbr.sim.link import MODELS
from bamcbr.sim.scenario import load_scenario, write_trace


def _fail(message: str) -> None:
    raise click.ClickException(message)


def _load(scenario_path: str, seed: int | None):
    try:
        scenario = load_scenario(scenario_path)
    except BamCbrError as exc:
        _fail(str(exc))
    if seed is not None:
        from dataclasses import replace
        scenario = replace(scenario, seed=seed)
    return scenario


def _default_schema():
    return build_schema(BamCbrConfig())


@click.group()
def main():
    """BAMCBR: CBR-driven bandwidth allocation model management."""


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--db", "db_path", type=click.Path(exists=True), default=None,
              help="Seed the engine from an exported case database.")
def run(scenario_path, seed, out_dir, db_path):
    """Run the CBR control loop over a scenario; write metrics, decision log,
    event trace and the learned case database to the output directory."""
    scenario = _load(scenario_path, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        db = None
        if db_path is not None:
            db = CaseDatabase.import_file(_default_schema(), db_path)
        engine = make_engine(scenario, db=db)
        sim, loop, engine = run_cbr(scenario, engine=engine)
    except BamCbrError as exc:
        _fail(str(exc))
    metrics_path = out / "metrics.csv"
    decisions_path = out / "decisions.csv"
    trace_path = out / "trace.csv"
    db_out = out / "casedb.jsonl"
    metrics_path.write_text(
        "\n".join([METRICS_HEADER] + [row.line() for row in loop.metrics]) + "\n")
    decisions_path.write_text(
        "\n".join([DECISION_LOG_HEADER] + [r.line() for r in loop.decision_log]) + "\n")
    write_trace(trace_path, sim.trace)
    engine.db.export_file(db_out)
    requests = sum(w.requests for w in sim.windows)
    blocked = sum(w.blocked for w in sim.windows)
    click.echo(f"scenario: {scenario_path}  seed: {scenario.seed}")
    click.echo(f"final model: {sim.state.model}")
    click.echo(f"requests: {requests}  blocked: {blocked}  "
               f"blocking: {(blocked / requests) if requests else 0.0:.4f}")
    click.echo(f"decisions: {len(loop.decision_log)}  "
               f"hits: {loop.hit_count}  fallbacks: {loop.fallback_count}")
    click.echo(f"cases: {len(engine.db)}")
    click.echo(f"metrics: {metrics_path}")
    click.echo(f"decision log: {decisions_path}")


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--models", "models_csv", default="mam,rdm,atcs",
              help="Comma-separated fixed models to compare against CBR control.")
def compare(scenario_path, models_csv):
    """Run the identical seeded traffic under each fixed model and under CBR."""
    scenario = _load(scenario_path, None)
    models = []
    for token in models_csv.split(","):
        name = token.strip().upper()
        if name not in MODELS:
            _fail(f"unknown model {token.strip()!r}")
        models.append(name)
    try:
        rows = compare_models(scenario, models)
    except BamCbrError as exc:
        _fail(str(exc))
    header = f"{'model':<6} {'blocking':>9} {'utilization':>12} {'preempt':>8} {'devolve':>8}"
    click.echo(header)
    for row in rows:
        click.echo(f"{row.model:<6} {row.blocking:>9.4f} {row.utilization:>12.4f} "
                   f"{row.preemptions:>8d} {row.devolutions:>8d}")


@main.group()
@click.option("--db", "db_path", required=True, type=click.Path())
@click.pass_context
def db(ctx, db_path):
    """Inspect or export a case database file."""
    if not Path(db_path).exists():
        _fail(f"database file not found: {db_path}")
    try:
        ctx.obj = CaseDatabase.import_file(_default_schema(), db_path)
    except BamCbrError as exc:
        _fail(str(exc))


@db.command("ls")
@click.pass_obj
def db_ls(database):
    """List case id, outcome and partition, one row per case."""
    for case in database.cases():
        click.echo(f"{case.id:<24} {case.outcome:<11} {case.context_signature}")


@db.command("show")
@click.argument("case_id")
@click.pass_obj
def db_show(database, case_id):
    """Print one case in full."""
    case = database.get(case_id)
    if case is None:
        _fail(f"unknown case id {case_id!r}")
    from bamcbr.cbr.database import _case_to_record
    click.echo(json.dumps(_case_to_record(case), indent=2, sort_keys=True))


@db.command("export")
@click.argument("path", type=click.Path())
@click.pass_obj
def db_export(database, path):
    """Re-export the database in the round-trippable line format."""
    count = database.export_file(path)
    click.echo(f"exported {count} cases to {path}")


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--mode", type=click.Choice(["automated", "assisted"]), default=None,
              help="Override the scenario's resolution mode.")
@click.option("--tick-interval", type=float, default=0.5,
              help="Real-time seconds per simulated window.")
def serve(scenario_path, port, host, mode, tick_interval):
    """Launch the HTTP control plane (and operator workbench, if built)."""
    import uvicorn

    from bamcbr.service.app import create_app
    from bamcbr.service.session import SimulationSession

    scenario = _load(scenario_path, None)
    overrides = {"mode": mode} if mode else None
    try:
        session = SimulationSession(scenario, overrides=overrides,
                                    tick_interval=tick_interval)
    except BamCbrError as exc:
        _fail(str(exc))
    frontend = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(session, frontend_dir=frontend if frontend.is_dir() else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
