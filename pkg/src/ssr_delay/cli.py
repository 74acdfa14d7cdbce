"""Command line interface: ``ssr-delay <command> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .design import (reference_binary_design, reference_continuous_design, required_n_binary,
                     required_n_continuous)
from .recruitment import PATTERNS, T1_MODES, RecruitmentPlan
from .statdist import POWER_MODES


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="base seed (default 42)")
    p.add_argument("--reps", type=int, default=None, help="replicates per cell (default 10000)")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--t1-mode", choices=T1_MODES, default=None)
    p.add_argument("--power-mode", choices=POWER_MODES, default=None)
    p.add_argument("--out", type=Path, default=None,
                   help="write CSV here (plus a .json mirror) instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="ssr-delay",
        description="Blinded sample size re-estimation with delayed outcomes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", parents=[common], help="print planning sample sizes")
    p.add_argument("--endpoint", choices=("continuous", "binary"), default="continuous")
    p.add_argument("--sd", type=float, nargs="+", default=[8.0, 10.0, 12.0])
    p.add_argument("--p1", type=float, nargs="+", default=[0.1, 0.3, 0.5])
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=float, default=0.2)

    p = sub.add_parser("pipeline", parents=[common], help="print expected pipeline counts")
    p.add_argument("--design", choices=("continuous", "binary"), default="continuous")
    p.add_argument("--n-init", type=float, default=None, help="override the planned total")
    p.add_argument("--n1", type=int, default=None)
    p.add_argument("--horizon", type=float, default=24.0)
    p.add_argument("--pattern", choices=PATTERNS, nargs="+", default=list(PATTERNS))
    p.add_argument("-m", "--delays", type=float, nargs="+", default=list(harness.TABLE_DELAYS))

    p = sub.add_parser("simulate", parents=[common], help="run a YAML scenario file")
    p.add_argument("config", type=Path)

    p = sub.add_parser("tables", parents=[common], help="reproduce supplementary tables")
    p.add_argument("table_ids", nargs="+", metavar="ID", help="S1 S2 S3 S4")

    p = sub.add_parser("figures", parents=[common], help="long-format figure data")
    p.add_argument("--metric", choices=harness.FIGURE_METRICS, required=True)
    p.add_argument("--config", type=Path, default=None,
                   help="scenario file; defaults to the published design for --endpoint")
    p.add_argument("--endpoint", choices=("continuous", "binary"), default="continuous")
    p.add_argument("--pattern", choices=PATTERNS, nargs="+", default=None)
    p.add_argument("--n1", type=int, nargs="+", default=None,
                   help="one or more stage-1 sizes, e.g. 50 70 90")
    p.add_argument("-m", "--delays", type=float, nargs="+", default=None)
    return parser


def _apply_overrides(grid, args):
    changes = {}
    if args.seed is not None:
        changes["base_seed"] = args.seed
    if args.reps is not None:
        changes["replicates"] = args.reps
    if args.t1_mode is not None:
        changes["t1_mode"] = args.t1_mode
    if args.power_mode is not None:
        changes["power_mode"] = args.power_mode
    return replace(grid, **changes) if changes else grid


def _emit(text: str, out: Path | None, json_text: str | None = None):
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    if json_text is not None:
        out.with_suffix(".json").write_text(json_text)


def _meta(grid) -> dict:
    return {"base_seed": grid.base_seed, "replicates": grid.replicates, "t1_mode": grid.t1_mode,
            "power_mode": grid.power_mode, "estimator": grid.estimator, "cap": grid.cap,
            "horizon_t": grid.horizon_t, "n_init": grid.design.n_init}


def cmd_oracle(args) -> int:
    lines = []
    if args.endpoint == "continuous":
        delta = 3.5 if args.delta is None else args.delta
        lines.append("sd,delta,n_total")
        for sd in args.sd:
            lines.append(f"{sd:g},{delta:g},{required_n_continuous(sd, delta, args.alpha, args.beta):.6g}")
    else:
        delta = 0.25 if args.delta is None else args.delta
        lines.append("p1,p2,n_total")
        for p1 in args.p1:
            n = required_n_binary(p1, p1 + delta, args.alpha, args.beta)
            lines.append(f"{p1:g},{p1 + delta:g},{n:.6g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_pipeline(args) -> int:
    design = reference_continuous_design() if args.design == "continuous" else reference_binary_design()
    if args.n1 is not None:
        design = replace(design, n1=args.n1)
    n_init = design.n_init if args.n_init is None else args.n_init
    t1_mode = args.t1_mode or "table-compatible"
    lines = ["pattern,m,n_delay"]
    for pattern in args.pattern:
        plan = RecruitmentPlan(pattern, args.horizon, n_init, design.n1, t1_mode)
        lines.extend(f"{pattern},{m:g},{plan.n_delay(m):.6g}" for m in args.delays)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    grid = _apply_overrides(harness.load_config(args.config), args)
    summaries = harness.run_grid(grid, args.workers)
    _emit(harness.summaries_csv(summaries), args.out, harness.summaries_json(summaries, _meta(grid)))
    return 0


def cmd_tables(args) -> int:
    texts, docs = [], {}
    for tid in args.table_ids:
        grid = harness.table_grid(tid)
        grid = _apply_overrides(grid, args)
        summaries = harness.run_grid(grid, args.workers)
        texts.append(harness.table_csv(summaries))
        docs[tid.upper()] = json.loads(harness.summaries_json(summaries, _meta(grid)))
    if args.out is not None and len(args.table_ids) > 1:
        for tid, text in zip(args.table_ids, texts):
            path = args.out.with_name(f"{args.out.stem}_{tid.upper()}{args.out.suffix or '.csv'}")
            _emit(text, path, json.dumps(docs[tid.upper()], indent=2))
        return 0
    json_text = json.dumps(next(iter(docs.values())), indent=2) if len(docs) == 1 else None
    _emit("".join(texts), args.out, json_text)
    return 0


def cmd_figures(args) -> int:
    if args.config is not None:
        grid = harness.load_config(args.config)
    else:
        grid = harness.table_grid("S1" if args.endpoint == "continuous" else "S3")
        grid = replace(grid, patterns=list(PATTERNS))
    if args.pattern is not None:
        grid = replace(grid, patterns=args.pattern)
    if args.delays is not None:
        grid = replace(grid, delays_m=args.delays)
    elif args.config is None:
        delays = harness.TABLE_DELAYS if args.metric == "nstar-dist" else harness.FIGURE_DELAYS
        grid = replace(grid, delays_m=list(delays))
    grid = _apply_overrides(grid, args)
    header, rows = None, []
    for n1 in args.n1 or [grid.design.n1]:
        header, part = harness.figure_rows(harness.with_n1(grid, n1), args.metric, args.workers)
        rows.extend(part)
    _emit(harness.write_csv(header, rows), args.out)
    return 0


COMMANDS = {"oracle": cmd_oracle, "pipeline": cmd_pipeline, "simulate": cmd_simulate,
            "tables": cmd_tables, "figures": cmd_figures}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.workers < 1:
            raise ValueError("--workers must be at least 1")
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"ssr-delay: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
