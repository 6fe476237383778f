"""Command-line front end: ``fdpair run`` and ``fdpair verify``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .assignment import GuardError
from .config import ConfigError, ScenarioConfig, load_config
from .harness import METHODS, cdf_csv, check_methods, drops_csv, run_drop, run_monte_carlo
from .verify import run_property_suite


def _parse_sets(items) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value
    return out


def build_config(config_path: str, sets, seed: int | None) -> ScenarioConfig:
    config = load_config(config_path)
    overrides = _parse_sets(sets)
    if seed is not None:
        overrides["seed"] = str(seed)
    return config.with_overrides(overrides)


def cmd_run(args) -> int:
    try:
        config = build_config(args.config, args.set, args.seed)
        methods = check_methods([m.strip() for m in args.methods.split(",") if m.strip()], config)
    except (ConfigError, GuardError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    result = run_monte_carlo(config, methods, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "drops.csv").write_text(drops_csv(result))
    (out / "cdf.csv").write_text(cdf_csv(result.cdfs))
    (out / "cdf_weighted.csv").write_text(cdf_csv(result.weighted_cdfs))
    (out / "config.txt").write_text(config.to_text())
    summary = {
        "drops": len(result.drops),
        "methods": list(methods),
        "medians": {m: s.median() for m, s in result.cdfs.items()},
        "weighted_medians": {m: s.median() for m, s in result.weighted_cdfs.items()},
        "median_ratios": result.ratios(),
        "weighted_median_ratios": result.ratios(weighted=True),
        "infeasible_pairs": {m: sum(r.per_method[m].infeasible_pairs for r in result.drops)
                             for m in methods},
    }
    if "dauc" in methods:
        summary["dauc_eps_cs_all"] = all(r.per_method["dauc"].eps_cs for r in result.drops)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    if args.trace and "dauc" in methods:
        tdir = out / "traces"
        tdir.mkdir(exist_ok=True)
        for d in range(len(result.drops)):
            # rerun with recording on; drops are deterministic so results match
            trace = run_drop(config, d, ("dauc",), keep_trace=True).trace
            with open(tdir / f"drop_{d:04d}.jsonl", "w") as fh:
                trace.to_jsonl(fh)

    for key, value in sorted(summary["median_ratios"].items()):
        print(f"{key}: {value:.4f}")
    print(f"wrote results to {out}")
    return 0


def cmd_verify(args) -> int:
    report = run_property_suite(seed=args.seed, instances=args.instances,
                                epsilon=args.epsilon, skip_price_update=args.inject_fault)
    if report.bid_counts:
        counts = sorted(report.bid_counts)
        print(f"instances: {report.instances}; bids median {counts[len(counts) // 2]}, "
              f"max {counts[-1]}; smallest bound {min(report.bid_bounds)}")
    if report.ok:
        print("all properties hold")
        return 0
    print(f"{len(report.failures)} property failure(s)", file=sys.stderr)
    print(report.failures[0].to_json(), file=sys.stderr)
    return 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdpair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo experiment, writes CSV files")
    run.add_argument("--config", default="tableI",
                     help="config file (key = value lines) or preset name (default: tableI)")
    run.add_argument("--methods", default="dauc,hd,repa",
                     help=f"comma-separated subset of {','.join(METHODS)}")
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a config key (repeatable)")
    run.add_argument("--out", default="results", help="output directory")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--trace", action="store_true", help="write auction message traces")
    run.add_argument("--workers", type=int, default=None)
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="randomized auction property checks")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--instances", type=int, default=200)
    ver.add_argument("--epsilon", type=float, default=0.1)
    ver.add_argument("--inject-fault", action="store_true",
                     help="skip the BS price update (the check must then fail)")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
