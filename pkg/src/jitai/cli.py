"""Command-line entrypoint.

Subcommands: elicit-priors, simulate, ingest, analyze, serve. Interchange is
line-delimited JSON throughout; every run writes a manifest next to its
outputs recording inputs, seed, and engine version. Exit codes: 0 success,
1 validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analytics.report import ReportError, build_report, render_text, report_csv_rows
from .domain import (
    ActivityContext,
    CatalogError,
    PriorError,
    SurveyTally,
    elicit_priors,
    load_catalog,
    load_prior_table,
)
from .ingest.features import PlacesTable, derive_features, load_app_catalog
from .ingest.records import parse_logs
from .ingest.features import FeatureRow
from .service.config import load_engine_config
from .service.engine import InterventionEngine
from .simulator import (
    ResponseProfile,
    ProfileKind,
    SimConfig,
    SimulationError,
    build_user_model,
    run_simulation,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class ValidationFailure(Exception):
    pass


def _write_manifest(out_dir: Path, subcommand: str, inputs: dict, outputs: list[str], seed=None):
    manifest = {
        "subcommand": subcommand,
        "engine_version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "inputs": inputs,
        "outputs": outputs,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValidationFailure(f"{path}:{lineno}: invalid JSON: {exc.msg}")
    return records


def cmd_elicit_priors(args) -> int:
    catalog = load_catalog(args.catalog) if args.catalog else load_catalog()
    tallies = []
    for rec in _read_jsonl(Path(args.tallies)):
        try:
            tallies.append(
                SurveyTally(
                    context=ActivityContext(rec["context"]),
                    intervention_id=rec["intervention_id"],
                    yes=int(rec["yes"]),
                    total=int(rec["total"]),
                )
            )
        except (KeyError, ValueError) as exc:
            raise ValidationFailure(f"bad tally record {rec!r}: {exc}")
    matrix = elicit_priors(
        tallies, catalog, threshold=args.threshold, cap_adjustment=args.cap
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(matrix.to_table(), indent=2) + "\n")
    _write_manifest(
        out.parent, "elicit-priors",
        {"tallies": str(args.tallies), "catalog": args.catalog,
         "threshold": args.threshold, "cap_adjustment": args.cap},
        [out.name],
    )
    print(f"wrote prior matrix for {len(matrix.contexts)} contexts -> {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    doc = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        doc["seed"] = args.seed
    try:
        config = SimConfig.from_dict(doc)
    except (KeyError, ValueError) as exc:
        raise ValidationFailure(f"bad simulation config: {exc}")
    priors = load_prior_table(args.priors) if args.priors else load_prior_table()
    profile_doc = doc.get("profile", {"kind": "simple"})
    profile = ResponseProfile(
        kind=ProfileKind(profile_doc.get("kind", "simple")),
        w_not_feasible=float(profile_doc.get("w_not_feasible", 0.0)),
        p_miss=float(profile_doc.get("p_miss", 0.0)),
    )
    weights = None
    if "context_weights" in doc:
        weights = {
            ActivityContext(k): float(v) for k, v in doc["context_weights"].items()
        }
    model = build_user_model(priors, profile=profile, context_weights=weights)
    trajectory = run_simulation(config, model, priors)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj_path = out_dir / "trajectory.jsonl"
    with traj_path.open("w") as fh:
        for rec in trajectory.records:
            fh.write(json.dumps(rec.to_dict()) + "\n")
    summary_path = out_dir / "summary.json"
    summary = {"config": config.to_dict(), **trajectory.summary.to_dict()}
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    outputs = [traj_path.name, summary_path.name]
    if trajectory.summary.cumulative_regret is not None:
        regret_path = out_dir / "regret.csv"
        with regret_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "cumulative_regret"])
            for i, v in enumerate(trajectory.summary.cumulative_regret):
                writer.writerow([i, f"{v:.6f}"])
        outputs.append(regret_path.name)
    _write_manifest(
        out_dir, "simulate",
        {"config": str(args.config), "priors": args.priors}, outputs, seed=config.seed,
    )
    print(
        f"simulated {len(trajectory.records)} decision points; "
        f"average reward {trajectory.summary.average_reward:.4f}"
    )
    return EXIT_OK


def cmd_ingest(args) -> int:
    for path in args.logs:
        if not Path(path).exists():
            raise ValidationFailure(f"missing log file: {path}")
    store = parse_logs(args.logs)
    places = PlacesTable.load(args.places) if args.places else None
    app_catalog = load_app_catalog(args.app_catalog) if args.app_catalog else None
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        for notification in store.notifications:
            row = derive_features(notification, store, places=places, app_catalog=app_catalog)
            fh.write(json.dumps(row.to_dict()) + "\n")
    outputs = [out.name]
    rejects_path = out.parent / (out.stem + ".rejects.jsonl")
    with rejects_path.open("w") as fh:
        for reject in store.rejects:
            fh.write(json.dumps(reject.to_dict()) + "\n")
    outputs.append(rejects_path.name)
    _write_manifest(
        out.parent, "ingest",
        {"logs": [str(p) for p in args.logs], "places": args.places,
         "app_catalog": args.app_catalog},
        outputs,
    )
    print(
        f"derived {len(store.notifications)} feature rows "
        f"({len(store.rejects)} rejected lines) -> {out}"
    )
    return EXIT_OK


def cmd_analyze(args) -> int:
    rows = [FeatureRow.from_dict(rec) for rec in _read_jsonl(Path(args.features))]
    try:
        report = build_report(rows, args.group, alpha=args.alpha)
    except ReportError as exc:
        raise ValidationFailure(str(exc))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    (out_dir / "report.txt").write_text(render_text(report))
    with (out_dir / "metrics.csv").open("w", newline="") as fh:
        csv.writer(fh).writerows(report_csv_rows(report))
    _write_manifest(
        out_dir, "analyze",
        {"features": str(args.features), "groups": list(args.group), "alpha": args.alpha},
        ["report.json", "report.txt", "metrics.csv"],
    )
    print(render_text(report))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.api import create_app

    config = load_engine_config(args.config)
    catalog = load_catalog(args.catalog) if args.catalog else load_catalog()
    priors = load_prior_table(args.priors, catalog) if args.priors else load_prior_table(None, catalog)
    engine = InterventionEngine(catalog, priors, config)
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


RAW = argparse.RawDescriptionHelpFormatter

LOG_SCHEMA = """\
log line schemas (one JSON object per line, tagged by "stream"):
  battery      {stream, user_id, ts, status: Charging|Full|Discharging|Not Charging,
                level: 0-100, voltage_mv?, temperature_c?, power_saving?}
  screen       {stream, user_id, ts, screen_on: bool, unlocked: bool}
  activity     {stream, user_id, ts, label: still|tilting|walking|on_foot|
                in_vehicle|on_bicycle|running, confidence: 0-100}
  app_usage    {stream, user_id, ts, package, foreground_ms}
  call         {stream, user_id, start_ts, end_ts, call_type: incoming|outgoing,
                status: missed|complete, number_hash}
  gps          {stream, user_id, ts, lat, lon, alt?}
  notification {stream, user_id, notified_at, responded_at|null,
                response: yes|no|not_feasible_now|missed,
                activity_context?, social_context?, suggested_arm?}
places file: {places: [{name, lat, lon, category}], campus_polygon: [[lat, lon], ...]}
app catalog: {"<package>": "<category>", ...} over the seven app categories
timestamps are RFC 3339; malformed lines land in <out>.rejects.jsonl"""

SIM_SCHEMA = """\
config JSON: {days, users?, seed?, policy: {kind: thompson|epsilon_greedy|
  decaying_epsilon|random|uniform_round_robin, epsilon?, decay?},
  priors_mode: informed|uninformed, prior_strength?, schedule?: ["HH:MM", ...],
  profile?: {kind: simple|ternary|with_misses, w_not_feasible?, p_miss?},
  context_weights?: {"<activity>": weight, ...}}
outputs: trajectory.jsonl ({t, user, context, social, arm, response, reward}),
  summary.json, regret.csv (simple profile only), manifest.json"""

TALLY_SCHEMA = """\
tally lines: {context: "<activity>", intervention_id, yes, total}
output matrix: rows = interventions, columns = contexts, excluded cells flagged"""

ANALYZE_SCHEMA = """\
input: feature rows JSONL as written by `jitai ingest`
outputs: report.json (groups, omnibus test, post-hoc pairs), report.txt,
  metrics.csv, manifest.json"""

SERVE_SCHEMA = """\
engine config JSON: {policy: {...}, priors_mode, prior_strength?, seed?,
  pending_timeout_minutes?, bandit_scope: per_user|pooled, event_log?}
environment overrides: JITAI_POLICY, JITAI_EPSILON, JITAI_PRIORS_MODE,
  JITAI_SEED, JITAI_TIMEOUT_MINUTES, JITAI_BANDIT_SCOPE, JITAI_EVENT_LOG
routes: POST /sessions {user_id}; POST /sessions/{id}/context {activity, social};
  POST /sessions/{id}/response {response, suggestion_id?};
  GET /sessions/{id}/state; GET /admin/snapshot; POST /admin/restore {snapshot}"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jitai",
        description="Adaptive intervention engine: priors, simulation, ingestion, analytics, serving.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "elicit-priors", help="survey tallies (JSONL) -> prior matrix file",
        epilog=TALLY_SCHEMA, formatter_class=RAW,
    )
    p.add_argument("--tallies", required=True, help="JSONL of {context, intervention_id, yes, total}")
    p.add_argument("--out", required=True, help="output prior matrix JSON")
    p.add_argument("--catalog", help="catalog JSON (default: shipped)")
    p.add_argument("--threshold", type=float, default=0.4, help="exclusion threshold")
    p.add_argument("--cap", type=float, default=0.025, help="cap adjustment for certain arms")
    p.set_defaults(func=cmd_elicit_priors)

    p = sub.add_parser(
        "simulate", help="simulation config -> trajectory + summary",
        epilog=SIM_SCHEMA, formatter_class=RAW,
    )
    p.add_argument("--config", required=True, help="simulation config JSON")
    p.add_argument("--seed", type=int, help="override config seed")
    p.add_argument("--priors", help="prior matrix JSON (default: shipped table)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "ingest", help="sensor/notification logs -> feature rows JSONL",
        epilog=LOG_SCHEMA, formatter_class=RAW,
    )
    p.add_argument("--logs", nargs="+", required=True)
    p.add_argument("--out", required=True, help="feature rows JSONL path")
    p.add_argument("--places", help="places table JSON with campus polygon")
    p.add_argument("--app-catalog", help="package -> category JSON")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser(
        "analyze", help="feature rows -> per-feature receptivity report",
        epilog=ANALYZE_SCHEMA, formatter_class=RAW,
    )
    p.add_argument("--features", required=True, help="feature rows JSONL")
    p.add_argument("--group", action="append", required=True, help="feature to group by (repeatable)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser(
        "serve", help="start the HTTP decision service",
        epilog=SERVE_SCHEMA, formatter_class=RAW,
    )
    p.add_argument("--config", help="engine config JSON")
    p.add_argument("--catalog", help="catalog JSON (default: shipped)")
    p.add_argument("--priors", help="prior matrix JSON (default: shipped table)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationFailure, CatalogError, PriorError, SimulationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - report and exit nonzero
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
