"""Command-line interface.

    tnsim simulate --scenario scenario.json --out rundir [--format csv|json]
    tnsim calibrate --data history.csv --out model.json
    tnsim optimal-interval --curves curves.json [--out outdir]
    tnsim serve [--port 8080] [--data-dir DIR]

simulate writes the trajectory in the requested delimited format plus the
standard figure panels into the output directory, along with a run.json
metadata document. Exit codes: 0 success, 1 runtime/I-O failure,
2 validation failure; failures emit a machine-readable JSON report on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .calibration import CalibrationError, fit_regression, ingest_csv
from .chain import ChainParams, hashrate_to_dt
from .costs import CostModelError, curve_from_json_dict, optimal_interval
from .engine import export_trajectory, run_simulation
from .scenario import ScenarioValidationError, load_scenario


def _fail(report: dict, code: int) -> int:
    print(json.dumps(report, sort_keys=True), file=sys.stderr)
    return code


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError as exc:
        return _fail({"error": {"type": "FileNotFound", "message": str(exc)}}, 1)
    except json.JSONDecodeError as exc:
        return _fail({"error": {"type": "InvalidJSON", "message": str(exc)}}, 2)
    except ScenarioValidationError as exc:
        return _fail({"errors": exc.errors}, 2)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    records = run_simulation(scenario)
    trajectory_path = None
    if records or args.format == "json":
        trajectory_path = outdir / f"trajectory.{args.format}"
        export_trajectory(records, args.format, trajectory_path)
    meta = {
        "scenario": json.loads(Path(args.scenario).read_text()),
        "epochs": len(records),
        "format": args.format,
    }
    if scenario.interval_result is not None:
        meta["interval"] = {
            "n_low": scenario.interval_result.n_low,
            "n_high": scenario.interval_result.n_high,
            "min_total_cost": scenario.interval_result.min_total_cost,
        }
    (outdir / "run.json").write_text(json.dumps(meta, sort_keys=True, indent=2))
    if not args.no_figures and records:
        from .report import render_trajectory_figures

        render_trajectory_figures(records, scenario, outdir)
    print(str(trajectory_path or outdir))
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    try:
        dataset = ingest_csv(args.data)
        model = fit_regression(dataset)
    except FileNotFoundError as exc:
        return _fail({"error": {"type": "FileNotFound", "message": str(exc)}}, 1)
    except CalibrationError as exc:
        report = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if hasattr(exc, "errors"):
            report["errors"] = exc.errors
        return _fail(report, 2)
    doc = {
        "model": "log_regression",
        "alphas": list(model.alphas),
        "r_squared": model.r_squared,
        "stderr": list(model.stderr) if model.stderr else None,
        "rows": len(dataset),
    }
    Path(args.out).write_text(json.dumps(doc, sort_keys=True, indent=2))
    print(args.out)
    return 0


def _cmd_optimal_interval(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.curves).read_text())
        env = curve_from_json_dict(doc["environmental"])
        sec = curve_from_json_dict(doc["security"])
        domain = (float(doc["domain"][0]), float(doc["domain"][1]))
        result = optimal_interval(
            env,
            sec,
            domain,
            grid=int(doc.get("grid", 10_000)),
            tolerance=float(doc.get("tolerance", 0.0)),
        )
    except FileNotFoundError as exc:
        return _fail({"error": {"type": "FileNotFound", "message": str(exc)}}, 1)
    except (CostModelError, KeyError, ValueError, TypeError, IndexError) as exc:
        return _fail({"error": {"type": type(exc).__name__, "message": str(exc)}}, 2)

    out = {
        "n_low": result.n_low,
        "n_high": result.n_high,
        "min_total_cost": result.min_total_cost,
    }
    chain_doc = doc.get("chain")
    if chain_doc:
        params = ChainParams(
            blocks_per_epoch=int(chain_doc.get("blocks_per_epoch", 2016)),
            target_block_interval=float(chain_doc.get("target_block_interval", 600.0)),
            clamp_factor=float(chain_doc.get("clamp_factor", 4.0)),
            hash_scale=float(chain_doc.get("hash_scale", 1.0)),
        )
        out["dt_lower"] = hashrate_to_dt(result.n_low, params)
        out["dt_upper"] = hashrate_to_dt(result.n_high, params)
    payload = json.dumps(out, sort_keys=True, indent=2)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "interval.json").write_text(payload)
        from .report import render_interval_figure

        render_interval_figure(env, sec, domain, result, outdir / "interval.png")
        print(str(outdir / "interval.json"))
    else:
        print(payload)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(port=args.port, data_dir=args.data_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tnsim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario and export its trajectory")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("calibrate", help="fit the hashrate regression from a CSV")
    p.add_argument("--data", required=True, help="calibration CSV file")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("optimal-interval", help="search the cost-minimizing band")
    p.add_argument("--curves", required=True, help="curves JSON file")
    p.add_argument("--out", help="output directory (also renders a figure)")
    p.set_defaults(func=_cmd_optimal_interval)

    p = sub.add_parser("serve", help="start the HTTP run service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
