"""Command line entry point: ``amoebot-energy run|sweep|verify``.

Exit codes: 0 success, 1 config/validation error, 2 property failure,
3 engine fault (a snapshot is dumped to ``fault_snapshot.json``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import statistics
import sys
from pathlib import Path

from .config import RunConfig, build_from_config, load_config
from .experiments import derive_seed
from .metrics import rounds_csv, summary_json
from .scheduler import TRACE_COLUMNS, run
from .svg import render_snapshot
from .system import EngineFault, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PROPERTY = 2
EXIT_FAULT = 3

log = logging.getLogger("amoebot_energy")


def execute(cfg: RunConfig, seed: int):
    s, sch, behavior, stop = build_from_config(cfg, seed)
    report = run(s, sch, behavior, stop, crashes=cfg.crashes, trace=cfg.trace, frames_every=cfg.frames_every)
    return s, report


def _write_run(out: Path, cfg: RunConfig, seed: int, s, report) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "rounds.csv").write_text(rounds_csv(report.rounds))
    summary = dict(report.summary, seed=seed, config=cfg.source, crash_log=report.crash_log)
    (out / "summary.json").write_text(summary_json(summary))
    if report.trace is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        w.writerows(report.trace)
        (out / "trace.csv").write_text(buf.getvalue())
    for rnd, snap in sorted(report.frames.items()):
        (out / f"frame_{rnd:06d}.svg").write_text(render_snapshot(snap, f"round {rnd}"))


def _with_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "max_rounds", None) is not None:
        cfg = cfg.with_value("max_rounds", str(args.max_rounds))
    if getattr(args, "frames_every", None) is not None:
        cfg = cfg.with_value("frames_every", str(args.frames_every))
    return cfg


def cmd_run(args) -> int:
    cfg = _with_overrides(load_config(args.config), args)
    out = Path(args.out)
    try:
        s, report = execute(cfg, args.seed)
    except EngineFault as exc:
        out.mkdir(parents=True, exist_ok=True)
        (out / "fault_snapshot.json").write_text(json.dumps(exc.snapshot or {}, indent=2, sort_keys=True, default=str))
        print(f"engine fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    _write_run(out, cfg, args.seed, s, report)
    summ = report.summary
    print(f"{summ['rounds']} rounds, stop={summ['stop_reason']}, first all-met round={summ['first_all_met_round']}, "
          f"met fraction={summ['met_fraction']:.3f}, population={summ['population']}")
    return EXIT_OK


def _parse_values(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def cmd_sweep(args) -> int:
    base = _with_overrides(load_config(args.config), args)
    key, _, vals = args.vary.partition("=")
    values = _parse_values(vals)
    if not key or not values:
        raise ValidationError(f"--vary expects key=v1,v2,..., got {args.vary!r}")
    # validate every cell's config up front so a typo fails fast
    cells = [(v, base.with_value(key.strip(), v)) for v in values]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for value, cfg in cells:
        rounds, failures = [], 0
        for rep in range(args.repeats):
            seed = derive_seed(args.seed, value, rep)
            try:
                _, report = execute(cfg, seed)
            except (EngineFault, ValidationError) as exc:
                log.warning("cell %s=%s repeat %d failed: %s", key, value, rep, exc)
                failures += 1
                continue
            summ = report.summary
            if summ["stop_reason"] == "max_rounds" and cfg.stop != "max_rounds":
                failures += 1
                continue
            rounds.append(summ["rounds"])
        mean = statistics.fmean(rounds) if rounds else float("nan")
        sd = statistics.pstdev(rounds) if len(rounds) > 1 else 0.0
        rows.append([value, repr(mean), repr(sd), len(rounds), failures])
        print(f"{key}={value}: mean {mean:.1f} rounds, sd {sd:.1f}, {len(rounds)} runs, {failures} failures")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "mean_rounds", "stddev", "runs", "failures"])
    w.writerows(rows)
    (out / "sweep.csv").write_text(buf.getvalue())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites

    if args.scope != "all" and args.scope not in SUITES:
        raise ValidationError(f"unknown scope {args.scope!r}; choose from all, {', '.join(SUITES)}")
    results = run_suites(args.scope)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amoebot-energy", description="Energy distribution simulator for amoebot systems.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="INI run configuration")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--frames-every", type=int, default=None, help="write an SVG frame every N rounds")
        sp.add_argument("--max-rounds", type=int, default=None)

    sp = sub.add_parser("run", help="run one simulation")
    common(sp)
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("sweep", help="repeat runs over a list of values for one key")
    common(sp)
    sp.add_argument("--vary", required=True, help="key=v1,v2,... (keys: n, roots, or any config field)")
    sp.add_argument("--repeats", type=int, default=20)
    sp.set_defaults(func=cmd_sweep)
    sp = sub.add_parser("verify", help="run the property suites")
    sp.add_argument("scope", nargs="?", default="all")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EngineFault as exc:
        print(f"engine fault: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
