"""Command-line front end with plan, trace, verify and sweep subcommands.

Reports go to standard output (or ``--output``), diagnostics to standard
error.  Exit codes: 0 success, 1 bad input, 2 requirement violation.
Output is deterministic: the same invocation always produces the same
bytes, so reports are safe to diff and to pin as golden files.

JSON reports share one top-level shape
``{params, placements, occupancy1, occupancy2, occupancy3, gap,
requirements}`` with field names matching the library types; the plan
subcommand emits the prefix of that shape it can know (params without a
second set, records without post-rebalance buckets).  CSV rows carry the
same fields, with the move flag as 0/1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from typing import Any

from .lifecycle import LifecycleTrace, TokenPlacement, run_lifecycle
from .placement import PlacementParams, gap, label, plan_stage1
from .verify import (
    REQUIREMENT_DESCRIPTIONS,
    RequirementReport,
    SweepDomain,
    SweepReport,
    check_requirements,
    sweep,
)

__all__ = [
    "build_parser",
    "main",
    "parse_trace_report",
    "plan_report",
    "sweep_report_document",
    "trace_report",
]

PLAN_CSV_FIELDS = ("token", "label", "stage1_bucket")
TRACE_CSV_FIELDS = (
    "token",
    "label",
    "stage1_bucket",
    "stage2_bucket",
    "stage3_bucket",
    "moved",
)


class _Parser(argparse.ArgumentParser):
    """Parser that exits 1 on usage errors.

    The stock parser exits 2, which this tool reserves for requirement
    violations.
    """

    def error(self, message: str) -> Any:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _nonneg_int(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a decimal integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def plan_report(params: PlacementParams) -> dict:
    """Stage-1 report: instance fields plus one record per token."""
    records = [
        {"token": token, "label": label(params, token), "stage1_bucket": bucket}
        for token, bucket in plan_stage1(params)
    ]
    return {
        "params": {
            "token_count": params.token_count,
            "first_set_size": params.first_set_size,
            "fill_width": params.fill_width,
            "first_bucket": params.first_bucket,
        },
        "placements": records,
    }


def trace_report(trace: LifecycleTrace, report: RequirementReport) -> dict:
    """Full lifecycle report, JSON-native throughout."""
    return {
        "params": asdict(trace.params),
        "placements": [placement._asdict() for placement in trace.placements],
        "occupancy1": list(trace.occupancy1),
        "occupancy2": list(trace.occupancy2),
        "occupancy3": list(trace.occupancy3),
        "gap": asdict(gap(trace.params)),
        "requirements": [
            {
                "id": check.id,
                "status": "pass" if check.passed else "fail",
                "witness": check.witness,
            }
            for check in report.checks
        ],
    }


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def parse_trace_report(document: dict) -> LifecycleTrace:
    """Rebuild a trace from an emitted JSON report.

    Validates shape and internal consistency (dense token order, correct
    histogram lengths, histograms tallying the placements, stage-1
    occupancy confined to the fill window) so a re-verification runs on
    exactly the data the report claims.  Raises ValueError on any
    malformation.
    """
    _require(isinstance(document, dict), "report must be a JSON object")
    _require("params" in document, "report is missing params")
    raw_params = document["params"]
    _require(isinstance(raw_params, dict), "params must be an object")
    expected_fields = {
        "token_count",
        "first_set_size",
        "fill_width",
        "first_bucket",
        "second_set_size",
    }
    _require(
        set(raw_params) == expected_fields,
        f"params must have exactly the fields {sorted(expected_fields)}",
    )
    _require(
        all(
            isinstance(raw_params[name], int) and not isinstance(raw_params[name], bool)
            for name in expected_fields
        ),
        "params fields must be integers",
    )
    params = PlacementParams(**raw_params)

    raw_placements = document.get("placements")
    _require(isinstance(raw_placements, list), "placements must be a list")
    _require(
        len(raw_placements) == params.token_count,
        f"expected {params.token_count} placements, got {len(raw_placements)}",
    )
    placements = []
    for index, entry in enumerate(raw_placements):
        _require(isinstance(entry, dict), f"placement {index} must be an object")
        _require(
            set(entry) == set(TokenPlacement._fields),
            f"placement {index} must have exactly the fields {sorted(TokenPlacement._fields)}",
        )
        _require(
            entry["token"] == index,
            f"placement {index} has token {entry['token']}, tokens must be dense and ordered",
        )
        for name in TokenPlacement._fields[:-1]:
            _require(
                isinstance(entry[name], int) and not isinstance(entry[name], bool),
                f"placement {index} field {name} must be an integer",
            )
        _require(
            isinstance(entry["moved_in_stage2"], bool),
            f"placement {index} field moved_in_stage2 must be a boolean",
        )
        _require(
            0 <= entry["stage1_bucket"] < params.first_set_size
            and 0 <= entry["stage2_bucket"] < params.first_set_size
            and 0 <= entry["stage3_bucket"] < params.second_set_size,
            f"placement {index} has a bucket outside its set",
        )
        placements.append(TokenPlacement(**entry))

    histograms = {}
    for name, size in (
        ("occupancy1", params.first_set_size),
        ("occupancy2", params.first_set_size),
        ("occupancy3", params.second_set_size),
    ):
        raw = document.get(name)
        _require(isinstance(raw, list), f"{name} must be a list")
        _require(len(raw) == size, f"{name} must have {size} entries, got {len(raw)}")
        _require(
            all(isinstance(count, int) and not isinstance(count, bool) for count in raw),
            f"{name} entries must be integers",
        )
        histograms[name] = tuple(raw)

    for name, field in (
        ("occupancy1", "stage1_bucket"),
        ("occupancy2", "stage2_bucket"),
        ("occupancy3", "stage3_bucket"),
    ):
        counts = [0] * len(histograms[name])
        for placement in placements:
            counts[getattr(placement, field)] += 1
        _require(
            tuple(counts) == histograms[name],
            f"{name} does not tally the {field} column",
        )
    for bucket, count in enumerate(histograms["occupancy1"]):
        _require(
            count == 0 or params.in_fill_window(bucket),
            f"occupancy1 is nonzero at bucket {bucket}, outside the fill window",
        )

    return LifecycleTrace(
        params=params,
        placements=tuple(placements),
        occupancy1=histograms["occupancy1"],
        occupancy2=histograms["occupancy2"],
        occupancy3=histograms["occupancy3"],
    )


def sweep_report_document(report: SweepReport) -> dict:
    """JSON-native summary of a sweep; witnesses included, instances not."""
    minimal = {}
    for requirement_id, (params, check) in report.minimal_violations.items():
        minimal[requirement_id] = {
            "params": asdict(params),
            "check": {
                "id": check.id,
                "status": "pass" if check.passed else "fail",
                "witness": check.witness,
            },
        }
    mismatch = report.minimal_oracle_mismatch
    return {
        "domain": asdict(report.domain),
        "instances_checked": report.instances_checked,
        "oracle_mismatches": report.oracle_mismatches,
        "minimal_oracle_mismatch": None if mismatch is None else asdict(mismatch),
        "violation_counts": dict(report.violation_counts),
        "minimal_violations": minimal,
        "unexpected_violations": report.unexpected_violations,
        "only_expected_failures": report.only_expected_failures,
    }


def _render_json(document: dict) -> str:
    return json.dumps(document, indent=2) + "\n"


def _render_csv(fields: tuple[str, ...], rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(fields)
    writer.writerows(rows)
    return buffer.getvalue()


def _render_table(header: tuple[str, ...], rows: list[tuple]) -> str:
    cells = [[str(value) for value in row] for row in rows]
    widths = [len(name) for name in header]
    for row in cells:
        for column, cell in enumerate(row):
            widths[column] = max(widths[column], len(cell))
    lines = ["  ".join(name.ljust(widths[i]) for i, name in enumerate(header)).rstrip()]
    for row in cells:
        lines.append("  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines) + "\n"


def _gap_line(descriptor) -> str:
    if not descriptor.present:
        return "gap: none"
    return (
        f"gap: start={descriptor.gap_start} length={descriptor.gap_length} "
        f"round={descriptor.round} offset={descriptor.offset}"
    )


def _requirement_lines(report: RequirementReport) -> list[str]:
    lines = []
    for check in report.checks:
        verdict = "pass" if check.passed else "FAIL"
        lines.append(f"{check.id} {verdict}  {REQUIREMENT_DESCRIPTIONS[check.id]}")
        if not check.passed:
            lines.append(f"  witness: {json.dumps(check.witness)}")
    return lines


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _instance_params(args: argparse.Namespace, second_set_size: int) -> PlacementParams:
    return PlacementParams(
        token_count=args.tokens,
        first_set_size=args.buckets,
        fill_width=args.fill,
        first_bucket=args.first,
        second_set_size=second_set_size,
    )


def cmd_plan(args: argparse.Namespace) -> int:
    # Stage 1 never looks at the second set; any legal size will do.
    params = _instance_params(args, args.buckets + 1)
    document = plan_report(params)
    if args.format == "json":
        text = _render_json(document)
    elif args.format == "csv":
        rows = [
            (entry["token"], entry["label"], entry["stage1_bucket"])
            for entry in document["placements"]
        ]
        text = _render_csv(PLAN_CSV_FIELDS, rows)
    else:
        rows = [
            (entry["token"], entry["label"], entry["stage1_bucket"])
            for entry in document["placements"]
        ]
        text = _render_table(PLAN_CSV_FIELDS, rows)
    _emit(text, args.output)
    return 0


def _trace_rows(trace: LifecycleTrace) -> list[tuple]:
    return [
        (
            placement.token,
            placement.label,
            placement.stage1_bucket,
            placement.stage2_bucket,
            placement.stage3_bucket,
            int(placement.moved_in_stage2),
        )
        for placement in trace.placements
    ]


def cmd_trace(args: argparse.Namespace) -> int:
    params = _instance_params(args, args.target_buckets)
    trace = run_lifecycle(params)
    report = check_requirements(trace)
    if args.format == "json":
        text = _render_json(trace_report(trace, report))
    elif args.format == "csv":
        text = _render_csv(TRACE_CSV_FIELDS, _trace_rows(trace))
    else:
        lines = [_render_table(TRACE_CSV_FIELDS, _trace_rows(trace)).rstrip("\n")]
        lines.append("")
        lines.append("occupancy1: " + " ".join(map(str, trace.occupancy1)))
        lines.append("occupancy2: " + " ".join(map(str, trace.occupancy2)))
        lines.append("occupancy3: " + " ".join(map(str, trace.occupancy3)))
        lines.append(_gap_line(gap(params)))
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    params = _instance_params(args, args.target_buckets)
    trace = run_lifecycle(params)
    report = check_requirements(trace)
    if args.format == "json":
        text = _render_json(trace_report(trace, report))
    else:
        text = "\n".join(_requirement_lines(report)) + "\n"
    _emit(text, args.output)
    return 0 if report.all_pass else 2


def cmd_sweep(args: argparse.Namespace) -> int:
    domain = SweepDomain(
        max_buckets=args.max_buckets,
        max_rounds=args.max_rounds,
        target_span=args.target_span,
    )
    report = sweep(domain)
    if args.format == "json":
        text = _render_json(sweep_report_document(report))
    else:
        lines = [
            f"instances checked: {report.instances_checked}",
            f"oracle mismatches: {report.oracle_mismatches}",
        ]
        for requirement_id, count in report.violation_counts.items():
            line = f"{requirement_id} violations: {count}"
            if requirement_id in report.minimal_violations:
                _, check = report.minimal_violations[requirement_id]
                line += f"  (minimal witness: {json.dumps(check.witness)})"
            lines.append(line)
        lines.append(f"unexpected violations: {report.unexpected_violations}")
        if report.only_expected_failures:
            lines.append("result: only the documented gap-case count violations")
        else:
            lines.append("result: UNEXPECTED violations found")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return 0 if report.only_expected_failures else 2


def _add_output_flags(parser: argparse.ArgumentParser, formats: tuple[str, ...]) -> None:
    parser.add_argument(
        "--format", choices=formats, default="table", help="report format"
    )
    parser.add_argument(
        "--output", metavar="PATH", default=None, help="write the report to PATH"
    )


def _add_instance_flags(parser: argparse.ArgumentParser, with_target: bool) -> None:
    parser.add_argument(
        "--tokens", type=_nonneg_int, required=True, help="number of tokens to place"
    )
    parser.add_argument(
        "--buckets", type=_nonneg_int, required=True, help="size of the first bucket set"
    )
    parser.add_argument(
        "--fill", type=_nonneg_int, required=True, help="width of the stage-1 fill window"
    )
    parser.add_argument(
        "--first", type=_nonneg_int, required=True, help="ring index of the window start"
    )
    if with_target:
        parser.add_argument(
            "--target-buckets",
            type=_nonneg_int,
            required=True,
            help="size of the second bucket set, must exceed --buckets",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ringfill",
        description=(
            "Plan, trace, verify and exhaustively sweep three-stage "
            "token placement on bucket rings."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    plan = subparsers.add_parser(
        "plan", help="stage-1 bucket assignment and labels for one instance"
    )
    _add_instance_flags(plan, with_target=False)
    _add_output_flags(plan, ("table", "json", "csv"))
    plan.set_defaults(func=cmd_plan)

    trace = subparsers.add_parser(
        "trace", help="full three-stage trace with occupancy and gap analysis"
    )
    _add_instance_flags(trace, with_target=True)
    _add_output_flags(trace, ("table", "json", "csv"))
    trace.set_defaults(func=cmd_trace)

    verify = subparsers.add_parser(
        "verify", help="check all requirements on one instance"
    )
    _add_instance_flags(verify, with_target=True)
    _add_output_flags(verify, ("table", "json"))
    verify.set_defaults(func=cmd_verify)

    sweep_parser = subparsers.add_parser(
        "sweep", help="exhaustively check a whole parameter domain"
    )
    sweep_parser.add_argument(
        "--max-buckets",
        type=_nonneg_int,
        default=10,
        help="largest first-set size to sweep (default 10)",
    )
    sweep_parser.add_argument(
        "--max-rounds",
        type=_nonneg_int,
        default=4,
        help="token counts run to this many full rounds plus 3 (default 4)",
    )
    sweep_parser.add_argument(
        "--target-span",
        type=_nonneg_int,
        default=2,
        help="second-set sizes run up to this multiple of the first (default 2)",
    )
    _add_output_flags(sweep_parser, ("table", "json"))
    sweep_parser.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
