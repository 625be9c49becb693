"""Command line front end. Thin: every subcommand calls a service handler.

Exit codes: 0 success / conformance pass, 1 failed check or violations,
2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from pydantic import ValidationError

from . import analysis
from .engine import EmptyScheduleForObjective, IncompleteSchedule
from .service import (
    RunRequest,
    TableRequest,
    ValidateRequest,
    handle_run,
    handle_table,
    handle_validate,
)

PROTOCOL_CHOICES = ["circular", "nc-multicast", "routing", "nc-gaming"]

RUN_FIELDS = [
    "protocol", "n", "objective", "objective_overridden", "t", "l",
    "overshoot", "completion_round", "t_lb", "t_ub", "l_kind", "l_value",
    "conformance",
]


def _n_list(text: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringcast",
        description="Slot-level simulator for ring relay and network-coding "
        "schedules, with closed-form performance checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one protocol at one size")
    p_run.add_argument("--protocol", required=True, choices=PROTOCOL_CHOICES)
    p_run.add_argument("--n", required=True, type=int, help="number of players")
    p_run.add_argument("--objective", choices=["GAMING", "MULTICAST"])
    p_run.add_argument("--no-compaction", action="store_true",
                       help="count silent completion-round slots too")
    p_run.add_argument("--format", choices=["table", "json", "csv"],
                       default="table")
    p_run.add_argument("--trace-out", metavar="PATH",
                       help="write the slot trace as JSON lines")

    p_table = sub.add_parser("table", help="measured vs predicted, several n")
    p_table.add_argument("--n", required=True, type=_n_list,
                         help="comma separated, e.g. 7,8,9")
    p_table.add_argument("--format", choices=["table", "json", "csv"],
                         default="table")

    p_val = sub.add_parser("validate", help="replay-check a written trace")
    p_val.add_argument("--validate-in", required=True, metavar="PATH")
    p_val.add_argument("--n", required=True, type=int)
    p_val.add_argument("--objective", required=True,
                       choices=["GAMING", "MULTICAST"])
    p_val.add_argument("--t", required=True, type=int, help="claimed period")
    p_val.add_argument("--l", required=True, type=int,
                       help="claimed message count")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _print_kv(pairs) -> None:
    width = max(len(k) for k, _ in pairs)
    for key, value in pairs:
        print(f"{key.ljust(width)}  {value}")


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def _cmd_run(args) -> int:
    req = RunRequest(
        protocol=args.protocol,
        n=args.n,
        objective=args.objective,
        compaction=not args.no_compaction,
        include_trace=args.trace_out is not None,
    )
    report = handle_run(req)
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            for rec in report.trace:
                fh.write(json.dumps(rec, sort_keys=True,
                                    separators=(",", ":")) + "\n")
    data = report.model_dump(exclude={"trace"})
    if args.format == "json":
        print(json.dumps(data, sort_keys=True, indent=2))
    elif args.format == "csv":
        row = {
            "n": report.n,
            "protocol": report.protocol,
            "t_lb": report.t_lb,
            "t_ub": report.t_ub,
            "t_measured": report.t,
            "l_formula_or_bound": analysis.display_l(
                analysis.bounds_for(report.protocol, report.n)),
            "l_measured": report.l,
        }
        sys.stdout.write(_csv_text(analysis.CSV_COLUMNS, [row]))
    else:
        _print_kv([(k, data[k]) for k in RUN_FIELDS])
    return 0 if report.conformance in ("PASS", "N/A") else 1


def _cmd_table(args) -> int:
    report = handle_table(TableRequest(n_list=args.n))
    rows = [r.model_dump() for r in report.rows]
    if args.format == "json":
        payload = {
            "rows": [
                {k: v for k, v in row.items() if v is not None}
                for row in rows
            ],
            "footnotes": report.footnotes,
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    elif args.format == "csv":
        sys.stdout.write(_csv_text(analysis.CSV_COLUMNS, rows))
    else:
        columns = analysis.CSV_COLUMNS + ["gain"]
        display = []
        for row in rows:
            shown = {c: row[c] for c in analysis.CSV_COLUMNS}
            shown["gain"] = "" if row.get("gain") is None else f"{row['gain']:.4f}"
            display.append({k: str(v) for k, v in shown.items()})
        widths = {
            c: max(len(c), *(len(row[c]) for row in display)) for c in columns
        }
        print("  ".join(c.ljust(widths[c]) for c in columns).rstrip())
        for row in display:
            print("  ".join(row[c].ljust(widths[c]) for c in columns).rstrip())
        for note in report.footnotes:
            print(f"# {note}")
    return 0


def _cmd_validate(args) -> int:
    try:
        with open(args.validate_in) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read trace: {exc}", file=sys.stderr)
        return 2
    try:
        report = handle_validate(ValidateRequest(
            trace_text=text, n=args.n, objective=args.objective,
            claimed_t=args.t, claimed_l=args.l,
        ))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if report.ok:
        print(f"OK: trace consistent for n={args.n}, "
              f"objective={args.objective}, T={args.t}, L={args.l}")
        return 0
    for v in report.violations:
        nodes = ",".join(str(x) for x in v.nodes)
        print(f"VIOLATION slot={v.slot} kind={v.kind} nodes=[{nodes}] {v.detail}")
    print(f"{len(report.violations)} violation(s) found")
    return 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "table":
            return _cmd_table(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_serve(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IncompleteSchedule, EmptyScheduleForObjective) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # last resort, keep the contractually fixed code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
