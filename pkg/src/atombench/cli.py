"""Command-line front end: benchmark sweeps, calibration fits, gate tables.

Subcommands:
  run      execute a benchmark sweep from a JSON config; writes results.json,
           summary.csv and heatmap.csv into the output directory.
  fit      calibrate noise parameters against a directory of external-circuit
           files with measured distributions.
  gatefid  print Haar-average fidelities of the three native gates.

Config values can be overridden with repeated --set dotted.path=value flags.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import bench, fit as fitmod, metrics, runner
from .channels import NoiseParams
from .errors import AtombenchError


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise AtombenchError(f"cannot read config {path!r}: {exc}") from exc


def _apply_override(config: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise AtombenchError(f"override {assignment!r} is not KEY=VALUE")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = config
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise AtombenchError(f"override path {key!r} crosses a non-object")
    node[parts[-1]] = value


def _write_summary(aggregates: list, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "width", "topology", "n_instances", "n_failed",
                    "mean_fidelity", "mean_depth"])
        for a in aggregates:
            w.writerow([a["kind"], a["width"], a["topology"],
                        a["n_instances"], a["n_failed"],
                        f"{a['mean_fidelity']:.6f}", f"{a['mean_depth']:.2f}"])


def _write_heatmap(aggregates: list, path) -> None:
    """Long-format (width, mean depth, fidelity) grid per topology and kind."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["topology", "kind", "width", "mean_depth", "mean_fidelity"])
        for a in sorted(aggregates,
                        key=lambda r: (r["topology"], r["kind"], r["width"])):
            w.writerow([a["topology"], a["kind"], a["width"],
                        f"{a['mean_depth']:.2f}", f"{a['mean_fidelity']:.6f}"])


def cmd_run(args) -> int:
    config = _load_config(args.config)
    for assignment in args.set or []:
        _apply_override(config, assignment)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.memory_cap is not None:
        config["memory_cap"] = args.memory_cap
    if args.threads is not None:
        config["workers"] = args.threads
    run_config = runner.RunConfig.from_dict(config)
    records, aggregates = runner.run_suite(run_config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runner.save_records(records, out / "results.json")
    _write_summary(aggregates, out / "summary.csv")
    _write_heatmap(aggregates, out / "heatmap.csv")
    failures = [r for r in records if r.status == "error"]
    if failures:
        with open(out / "failures.json", "w") as fh:
            json.dump([r.to_dict() for r in failures], fh, indent=1)
        print(f"{len(failures)} of {len(records)} instances failed; "
              f"see {out / 'failures.json'}", file=sys.stderr)
        return 1
    print(f"wrote {len(records)} records to {out}")
    return 0


def cmd_fit(args) -> int:
    config = _load_config(args.config)
    for assignment in args.set or []:
        _apply_override(config, assignment)
    ref_dir = Path(args.references)
    files = sorted(ref_dir.glob("*.json")) if ref_dir.is_dir() else []
    if not files:
        print(f"no reference files in {ref_dir}", file=sys.stderr)
        return 1
    references = [bench.load_external(f) for f in files]
    base = NoiseParams.from_dict(config.get("noise", {})) \
        if isinstance(config.get("noise", {}), dict) \
        else NoiseParams.from_json(config["noise"])
    kwargs = {k: tuple(v) if k == "free_params" else v
              for k, v in config.get("fit", {}).items()}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    problem = fitmod.FitProblem(references, base_params=base, **kwargs)
    params, fidelity, report = fitmod.fit_noise_params(problem)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params.to_json(out / "fitted_params.json")
    with open(out / "fit_report.json", "w") as fh:
        json.dump({"achieved_fidelity": fidelity,
                   "n_references": len(references),
                   "free_params": list(problem.free_params),
                   **report}, fh, indent=1)
    print(f"achieved mean fidelity {fidelity:.6f}; params in "
          f"{out / 'fitted_params.json'}")
    return 0


def cmd_gatefid(args) -> int:
    config = _load_config(args.config)
    noise = config.get("noise", {})
    params = NoiseParams.from_json(noise) if isinstance(noise, str) \
        else NoiseParams.from_dict(noise)
    print(f"{'gate':<18}{'mean fidelity':>14}{'std err':>12}")
    for gate in ("global_rotation", "local_rz", "cz"):
        mean, sem = metrics.average_gate_fidelity(
            gate, params, n_samples=args.samples, seed=args.seed or 0)
        print(f"{gate:<18}{mean:>14.5f}{sem:>12.5f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="atombench",
        description="Noisy ququart density-matrix benchmark simulator")
    sub = p.add_subparsers(dest="command", required=True)

    default_threads = int(os.environ.get("ATOMBENCH_THREADS", "1"))

    run = sub.add_parser("run", help="execute a benchmark sweep")
    run.add_argument("--config", help="JSON run configuration")
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a dotted config path")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int, default=default_threads)
    run.add_argument("--out", default="out")
    run.add_argument("--memory-cap", type=int, dest="memory_cap")
    run.set_defaults(func=cmd_run)

    fit_p = sub.add_parser("fit", help="calibrate noise parameters")
    fit_p.add_argument("references", help="directory of reference files")
    fit_p.add_argument("--config", help="JSON config with noise/fit sections")
    fit_p.add_argument("--set", action="append", metavar="KEY=VALUE")
    fit_p.add_argument("--seed", type=int)
    fit_p.add_argument("--out", default="out")
    fit_p.set_defaults(func=cmd_fit)

    gf = sub.add_parser("gatefid", help="Haar-average native-gate fidelities")
    gf.add_argument("--config", help="JSON config with a noise section")
    gf.add_argument("--samples", type=int, default=500)
    gf.add_argument("--seed", type=int)
    gf.set_defaults(func=cmd_gatefid)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AtombenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
