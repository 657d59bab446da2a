"""Command-line front end: ``pzone check`` and ``pzone bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Caps, Status, cycle_synth, eef, export_graph
from .extrapolation import MODES, select_mode
from .model import SyntaxProblem, parse_model
from .oracle import Property, validate

EXIT_COMPLETE = 0
EXIT_ERROR = 1
EXIT_CAP = 2

_DIRECTIVE = re.compile(r"^#\s*property:\s*(reach|cycle)\s+(.+?)\s*$", re.MULTILINE)


@dataclass
class RunConfig:
    model: Path
    kind: str  # "reach" or "cycle"
    locations: tuple[str, ...]
    mode: str = "auto"
    max_states: int = 0
    max_depth: int = 0
    json: bool = False
    dot: Path | None = None
    validate: bool = False
    liveness_l_side: bool = False
    seed: int = 0
    deadline: float | None = None
    text: str | None = None  # model source, when already loaded


@dataclass
class RunOutcome:
    code: int
    document: dict
    text: str
    dot: str | None = None
    errors: list[str] = field(default_factory=list)


def _split_locations(value: str) -> tuple[str, ...]:
    locs = tuple(s for s in (part.strip() for part in value.split(",")) if s)
    if not locs:
        raise argparse.ArgumentTypeError("expected at least one location")
    return locs


def run(config: RunConfig) -> RunOutcome:
    """Parse, pick the extrapolation, synthesize, and optionally validate."""
    try:
        text = config.text if config.text is not None else config.model.read_text(encoding="utf-8")
    except OSError as exc:
        return RunOutcome(EXIT_ERROR, {}, "", errors=[f"{config.model}: {exc.strerror}"])
    try:
        a = parse_model(text)
    except SyntaxProblem as exc:
        where = f"{config.model}:{exc.line}:{exc.col}" if exc.line else str(config.model)
        return RunOutcome(EXIT_ERROR, {}, "", errors=[f"{where}: {exc.message}"])
    unknown = sorted(set(config.locations) - set(a.locations))
    if unknown:
        return RunOutcome(EXIT_ERROR, {}, "", errors=[f"unknown location(s): {', '.join(unknown)}"])

    bounds, report = select_mode(a, config.mode)
    caps = Caps(config.max_states, config.max_depth, config.deadline)
    if config.kind == "reach":
        result, stats = eef(a, config.locations, bounds, caps)
        prop = Property.reach(config.locations)
    else:
        result, stats = cycle_synth(
            a, config.locations, bounds, caps, report=report, l_side=config.liveness_l_side
        )
        prop = Property.cycle(config.locations)

    mode_json = report.to_json()
    warnings = list(report.warnings) + list(stats.warnings)
    if warnings:
        mode_json["warnings"] = warnings
    doc = {
        "property": {"kind": config.kind, "locations": list(config.locations)},
        "mode_report": mode_json,
        "result": result.render(),
        "stats": stats.to_json(),
        "termination": stats.status.value,
    }
    if config.validate:
        doc["validation"] = validate(a, result, prop, lp_hat=report.lp_hat, seed=config.seed)

    dot = None
    if config.dot is not None:
        targets = config.locations if config.kind == "reach" else ()
        dot = export_graph(a, bounds, caps, "dot", targets)

    lines = [
        f"class: {report.cls}",
        f"mode: {report.mode}",
        "bounds: " + ", ".join(f"{x}={m}" for x, m in report.bounds.as_dict().items()),
    ]
    if report.lp_hat is not None:
        lines.append(f"parameter bound: {report.lp_hat}")
    lines += [f"warning: {w}" for w in warnings]
    lines.append("result:")
    lines += [f"  {d}" for d in result.render()] or ["  false"]
    lines.append(
        f"termination: {stats.status.value} "
        f"({stats.states_explored} states, depth {stats.max_depth})"
    )
    if config.validate:
        v = doc["validation"]
        lines.append(
            f"validation: {v['agreements']}/{v['samples']} agree, "
            f"{len(v['counterexamples'])} counterexample(s)"
        )
        for cx in v["counterexamples"]:
            lines.append(f"  {cx['valuation']}: oracle {cx['expected']}, result {cx['got']}")
    code = EXIT_COMPLETE if stats.status is Status.COMPLETE else EXIT_CAP
    return RunOutcome(code, doc, "\n".join(lines) + "\n", dot)


# ---------------------------------------------------------------------------
# bench


def read_property(text: str) -> tuple[str, tuple[str, ...]] | None:
    m = _DIRECTIVE.search(text)
    if m is None:
        return None
    return m.group(1), _split_locations(m.group(2).replace(" ", ","))


def bench(directory: Path, timeout: float = 5.0) -> list[dict]:
    """Run every model in ``directory`` without and with extrapolation."""
    rows = []
    for path in sorted(directory.glob("*.pta"), key=lambda p: p.name):
        text = path.read_text(encoding="utf-8")
        prop = read_property(text)
        if prop is None:
            continue
        row = {"model": path.stem, "property": f"{prop[0]} {','.join(prop[1])}"}
        for mode in ("none", "auto"):
            start = time.monotonic()
            cfg = RunConfig(path, prop[0], prop[1], mode=mode, deadline=start + timeout, text=text)
            out = run(cfg)
            elapsed = time.monotonic() - start
            timed_out = out.code != EXIT_COMPLETE
            row[f"{mode}_time"] = timeout if timed_out else elapsed
            row[f"{mode}_status"] = "T.O." if timed_out else "Complete"
        rows.append(row)
    return rows


def bench_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields = ["model", "property", "none_time", "none_status", "auto_time", "auto_status"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow(
            [r["model"], r["property"], f"{r['none_time']:.3f}", r["none_status"],
             f"{r['auto_time']:.3f}", r["auto_status"]]
        )
    if rows:
        n = len(rows)
        mean = {m: sum(r[f"{m}_time"] for r in rows) / n for m in ("none", "auto")}
        # per model, each time is divided by the slower of the two modes
        norm = {m: 0.0 for m in ("none", "auto")}
        for r in rows:
            worst = max(r["none_time"], r["auto_time"]) or 1.0
            for m in norm:
                norm[m] += r[f"{m}_time"] / worst / n
        w.writerow(["mean", "", f"{mean['none']:.3f}", "", f"{mean['auto']:.3f}", ""])
        w.writerow(["normalized mean", "", f"{norm['none']:.3f}", "", f"{norm['auto']:.3f}", ""])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pzone", description="Parameter synthesis for parametric timed automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="synthesize parameters for one model")
    check.add_argument("model", type=Path)
    prop = check.add_mutually_exclusive_group(required=True)
    prop.add_argument("--reach", type=_split_locations, metavar="LOCS", help="comma-separated target locations")
    prop.add_argument("--cycle", type=_split_locations, metavar="LOCS", help="comma-separated accepting locations")
    check.add_argument("--mode", choices=MODES, default="auto")
    check.add_argument("--max-states", type=int, default=0, metavar="N")
    check.add_argument("--max-depth", type=int, default=0, metavar="N")
    check.add_argument("--json", action="store_true", help="print the result as JSON")
    check.add_argument("--dot", type=Path, metavar="FILE", help="write the explored graph as DOT")
    check.add_argument("--validate", action="store_true", help="cross-check against the concrete oracle")
    check.add_argument(
        "--liveness-l-side",
        action="store_true",
        help="also cap lower-bound parameters during cycle synthesis",
    )

    b = sub.add_parser("bench", help="time every model in a directory with and without extrapolation")
    b.add_argument("directory", type=Path)
    b.add_argument("--timeout", type=float, default=5.0, metavar="SECS")
    b.add_argument("--csv", type=Path, metavar="FILE")
    return parser


def _seed() -> int:
    raw = os.environ.get("PZONE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"pzone: PZONE_SEED must be an integer, got {raw!r}")


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "bench":
        if not args.directory.is_dir():
            print(f"pzone: {args.directory} is not a directory", file=sys.stderr)
            return EXIT_ERROR
        table = bench_csv(bench(args.directory, args.timeout))
        sys.stdout.write(table)
        if args.csv is not None:
            args.csv.write_text(table, encoding="utf-8")
        return EXIT_COMPLETE

    kind, locs = ("reach", args.reach) if args.reach else ("cycle", args.cycle)
    config = RunConfig(
        model=args.model,
        kind=kind,
        locations=locs,
        mode=args.mode,
        max_states=args.max_states,
        max_depth=args.max_depth,
        json=args.json,
        dot=args.dot,
        validate=args.validate,
        liveness_l_side=args.liveness_l_side,
        seed=_seed(),
    )
    out = run(config)
    for err in out.errors:
        print(f"pzone: {err}", file=sys.stderr)
    if out.code == EXIT_ERROR:
        return out.code
    if out.dot is not None:
        config.dot.write_text(out.dot, encoding="utf-8")
    if config.json:
        sys.stdout.write(json.dumps(out.document, indent=2) + "\n")
    else:
        sys.stdout.write(out.text)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
