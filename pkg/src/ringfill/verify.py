"""Requirement checks, the pointer-walk oracle, and the exhaustive sweep.

The checker treats a trace purely as data and never re-derives buckets
from the closed-form maps.  Seven checks are reported:

  R1  labels are pairwise distinct
  R2  stage-1 counts across the fill window differ by at most 1
  R3  per-residue label counts over the first set differ by at most 1
  R4  every move leaves the fill window, and each token moves at most once
  R5  stage-2 bucket equals label mod first_set_size; bucket counts over
      the first set differ by at most 1
  R6  stage-3 bucket equals label mod second_set_size; bucket counts over
      the second set differ by at most 1
  RC  the ascending stream starts at the window start and advances by one
      window slot per moved token

R6's count clause is the one place homogeneity can break: a truncated
final sweep leaves a gap in the label sequence, and removing that gap
from an otherwise contiguous range can push the spread in the second
bucket set to 2.  The sweep classifies exactly those failures as
expected and flags anything else.

Spreads include zero-count buckets of the relevant set: all fill-window
buckets for R2, the whole first set for R3 and R5, the whole second set
for R6.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterator, NamedTuple

from .lifecycle import LifecycleTrace, end_state, run_lifecycle
from .placement import PlacementParams, gap, plan_stage1

__all__ = [
    "REQUIREMENT_DESCRIPTIONS",
    "REQUIREMENT_IDS",
    "EndStateClassification",
    "RequirementCheck",
    "RequirementReport",
    "ResidueHistogram",
    "SweepDomain",
    "SweepReport",
    "check_requirements",
    "classify_end_state",
    "prose_oracle_stage1",
    "spread",
    "sweep",
]

REQUIREMENT_IDS = ("R1", "R2", "R3", "R4", "R5", "R6", "RC")

REQUIREMENT_DESCRIPTIONS = {
    "R1": "labels are pairwise distinct",
    "R2": "fill-window token counts differ by at most 1",
    "R3": "label residue counts over the first set differ by at most 1",
    "R4": "each token moves at most once and never inside the window",
    "R5": "stage-2 bucket is label mod first_set_size, counts differ by at most 1",
    "R6": "stage-3 bucket is label mod second_set_size, counts differ by at most 1",
    "RC": "ascending stream starts at the window start and steps by one slot",
}


def spread(counts) -> int:
    """Max minus min of a histogram, zero-count buckets included."""
    return max(counts) - min(counts)


@dataclass(frozen=True)
class ResidueHistogram:
    """Counts of values per residue class of a fixed modulus."""

    modulus: int
    counts: tuple[int, ...]

    @classmethod
    def of(cls, values, modulus: int) -> "ResidueHistogram":
        if modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {modulus}")
        counts = [0] * modulus
        for value in values:
            counts[value % modulus] += 1
        return cls(modulus, tuple(counts))

    @property
    def spread(self) -> int:
        return max(self.counts) - min(self.counts)


class RequirementCheck(NamedTuple):
    """Verdict for one requirement; a failing check carries a witness."""

    id: str
    passed: bool
    witness: dict | None = None


@dataclass(frozen=True)
class RequirementReport:
    """Ordered verdicts for R1 through R6 plus RC."""

    checks: tuple[RequirementCheck, ...]

    def __getitem__(self, requirement_id: str) -> RequirementCheck:
        for check in self.checks:
            if check.id == requirement_id:
                return check
        raise KeyError(requirement_id)

    @property
    def all_pass(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> tuple[RequirementCheck, ...]:
        return tuple(check for check in self.checks if not check.passed)


def _params_dict(params: PlacementParams) -> dict:
    return asdict(params)


def _check_distinct_labels(trace: LifecycleTrace) -> RequirementCheck:
    seen: dict[int, int] = {}
    for placement in trace.placements:
        other = seen.get(placement.label)
        if other is not None:
            return RequirementCheck(
                "R1",
                False,
                {
                    "params": _params_dict(trace.params),
                    "token_a": other,
                    "token_b": placement.token,
                    "label": placement.label,
                },
            )
        seen[placement.label] = placement.token
    return RequirementCheck("R1", True)


def _check_window_counts(trace: LifecycleTrace) -> RequirementCheck:
    counts = [trace.occupancy1[b] for b in trace.params.fill_window()]
    observed = spread(counts)
    if observed > 1:
        return RequirementCheck(
            "R2",
            False,
            {
                "params": _params_dict(trace.params),
                "window_counts": counts,
                "spread": observed,
            },
        )
    return RequirementCheck("R2", True)


def _check_label_residues(trace: LifecycleTrace) -> RequirementCheck:
    histogram = ResidueHistogram.of(
        (p.label for p in trace.placements), trace.params.first_set_size
    )
    if histogram.spread > 1:
        return RequirementCheck(
            "R3",
            False,
            {
                "params": _params_dict(trace.params),
                "residue_counts": list(histogram.counts),
                "spread": histogram.spread,
            },
        )
    return RequirementCheck("R3", True)


def _check_move_budget(trace: LifecycleTrace) -> RequirementCheck:
    params = trace.params
    for placement in trace.placements:
        moved = placement.stage1_bucket != placement.stage2_bucket
        if placement.moved_in_stage2 != moved:
            reason = "flag_mismatch"
        elif moved and params.in_fill_window(placement.stage2_bucket):
            # Both buckets inside the window: forbidden shuffle.
            reason = "moved_within_window"
        else:
            continue
        return RequirementCheck(
            "R4",
            False,
            {
                "params": _params_dict(params),
                "token": placement.token,
                "stage1_bucket": placement.stage1_bucket,
                "stage2_bucket": placement.stage2_bucket,
                "reason": reason,
            },
        )
    return RequirementCheck("R4", True)


def _check_rebalance(trace: LifecycleTrace) -> RequirementCheck:
    size = trace.params.first_set_size
    for placement in trace.placements:
        expected = placement.label % size
        if placement.stage2_bucket != expected:
            return RequirementCheck(
                "R5",
                False,
                {
                    "params": _params_dict(trace.params),
                    "clause": "residue",
                    "token": placement.token,
                    "label": placement.label,
                    "stage2_bucket": placement.stage2_bucket,
                    "expected": expected,
                },
            )
    observed = spread(trace.occupancy2)
    if observed > 1:
        return RequirementCheck(
            "R5",
            False,
            {
                "params": _params_dict(trace.params),
                "clause": "count",
                "occupancy2": list(trace.occupancy2),
                "spread": observed,
            },
        )
    return RequirementCheck("R5", True)


def _check_reshard(trace: LifecycleTrace) -> RequirementCheck:
    size = trace.params.second_set_size
    for placement in trace.placements:
        expected = placement.label % size
        if placement.stage3_bucket != expected:
            return RequirementCheck(
                "R6",
                False,
                {
                    "params": _params_dict(trace.params),
                    "clause": "residue",
                    "token": placement.token,
                    "label": placement.label,
                    "stage3_bucket": placement.stage3_bucket,
                    "expected": expected,
                },
            )
    observed = spread(trace.occupancy3)
    if observed > 1:
        return RequirementCheck(
            "R6",
            False,
            {
                "params": _params_dict(trace.params),
                "clause": "count",
                "occupancy3": list(trace.occupancy3),
                "spread": observed,
            },
        )
    return RequirementCheck("R6", True)


def _check_ascending_direction(trace: LifecycleTrace) -> RequirementCheck:
    params = trace.params
    expected = 0
    position = 0
    for placement in trace.placements:
        if not placement.moved_in_stage2:
            continue
        offset = params.window_offset(placement.stage1_bucket)
        if offset != expected:
            return RequirementCheck(
                "RC",
                False,
                {
                    "params": _params_dict(params),
                    "position": position,
                    "token": placement.token,
                    "expected_offset": expected,
                    "actual_offset": offset,
                },
            )
        expected = (offset + 1) % params.fill_width
        position += 1
    return RequirementCheck("RC", True)


def check_requirements(trace: LifecycleTrace) -> RequirementReport:
    """Check all seven requirements against one trace.

    Total: every trace yields a verdict for every requirement, and a
    failing verdict carries enough detail (full parameters plus the
    offending indices) to reproduce the failure from scratch.  The empty
    trace passes everything vacuously.
    """
    return RequirementReport(
        (
            _check_distinct_labels(trace),
            _check_window_counts(trace),
            _check_label_residues(trace),
            _check_move_budget(trace),
            _check_rebalance(trace),
            _check_reshard(trace),
            _check_ascending_direction(trace),
        )
    )


def prose_oracle_stage1(params: PlacementParams) -> list[tuple[int, int]]:
    """Literal two-pointer walk of stage 1, independent of the label map.

    One pointer starts at the far end of the window and walks backwards,
    the other starts at the window start and walks forwards, both
    wrapping modulo the window width.  Each token goes to its stream's
    pointer.  Agreement with :func:`plan_stage1` is checked exhaustively
    by the sweep.
    """
    size = params.first_set_size
    width = params.fill_width
    start = params.first_bucket
    down = width - 1
    up = 0
    assignments = []
    for token in range(params.token_count):
        if token % size < width:
            bucket = (start + down) % size
            down = (down - 1) % width
        else:
            bucket = (start + up) % size
            up = (up + 1) % width
        assignments.append((token, bucket))
    return assignments


@dataclass(frozen=True)
class EndStateClassification:
    """Stage-1 fill pattern predicted from the streams' final buckets.

    ``kind`` is one of ``equal``, ``deficit_run`` or ``surplus_run``;
    ``run_offsets`` lists the window slots holding one token fewer
    (deficit) or one more (surplus) than the rest, empty for the equal
    case.
    """

    kind: str
    run_offsets: tuple[int, ...]


def classify_end_state(trace: LifecycleTrace) -> EndStateClassification | None:
    """Classify how stage 1 ended, when the interesting case applies.

    Defined when the final token rode the descending stream, landed away
    from the window start, and the ascending stream has run at all;
    returns None otherwise.  Comparisons happen in window order: with
    ``z`` the ascending stream's final slot and ``y`` the descending
    stream's, the window is evenly filled when ``z + 1 == y``, the slots
    strictly between them run one short when ``z + 1 < y``, and the slots
    from ``y`` through ``z`` run one over when ``z + 1 > y``.
    """
    if not trace.placements:
        return None
    if trace.placements[-1].moved_in_stage2:
        return None
    state = end_state(trace)
    if state.last_second_cycle_bucket is None:
        return None
    params = trace.params
    descending = params.window_offset(state.last_first_cycle_bucket)
    ascending = params.window_offset(state.last_second_cycle_bucket)
    if descending == 0:
        # The sweep reached the window start; plain at-most-1 spread case.
        return None
    if ascending + 1 == descending:
        return EndStateClassification("equal", ())
    if ascending + 1 < descending:
        return EndStateClassification(
            "deficit_run", tuple(range(ascending + 1, descending))
        )
    return EndStateClassification(
        "surplus_run", tuple(range(descending, ascending + 1))
    )


@dataclass(frozen=True)
class SweepDomain:
    """Finite grid of instances, swept in lexicographic parameter order.

    For each first-set size up to ``max_buckets``: every fill width, every
    window start, token counts from 0 through
    ``max_rounds * size + 3`` (enough full rounds plus every mid-round
    stopping offset to expose wrap effects), and second-set sizes from
    ``size + 1`` through ``target_span * size``.
    """

    max_buckets: int = 10
    max_rounds: int = 4
    target_span: int = 2

    def __post_init__(self) -> None:
        if self.max_buckets < 1:
            raise ValueError(f"max_buckets must be >= 1, got {self.max_buckets}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")
        if self.target_span < 2:
            raise ValueError(
                f"target_span must be >= 2 for a non-empty second-set range, got {self.target_span}"
            )

    def token_limit(self, first_set_size: int) -> int:
        return self.max_rounds * first_set_size + 3

    def iter_planning_instances(self) -> Iterator[PlacementParams]:
        """Stage-1 grid: one instance per (size, width, start, tokens).

        The second-set size is pinned to its smallest legal value; stage-1
        planning and labels do not depend on it.
        """
        for size in range(1, self.max_buckets + 1):
            for width in range(1, size + 1):
                for start in range(size):
                    for tokens in range(self.token_limit(size) + 1):
                        yield PlacementParams(tokens, size, width, start, size + 1)

    def iter_instances(self) -> Iterator[PlacementParams]:
        for size in range(1, self.max_buckets + 1):
            for width in range(1, size + 1):
                for start in range(size):
                    for tokens in range(self.token_limit(size) + 1):
                        for second in range(size + 1, self.target_span * size + 1):
                            yield PlacementParams(tokens, size, width, start, second)


@dataclass
class SweepReport:
    """Outcome of an exhaustive sweep.

    ``violations`` holds every failing instance with its full report, in
    sweep order.  ``minimal_violations`` maps requirement id to the
    lexicographically smallest failing instance.  A violation is expected
    only when it is R6's count clause at spread exactly 2 on an instance
    whose label sequence has a gap; ``unexpected_violations`` counts
    everything else, oracle mismatches aside.
    """

    domain: SweepDomain
    instances_checked: int = 0
    violations: list[tuple[PlacementParams, RequirementReport]] = field(
        default_factory=list
    )
    violation_counts: dict[str, int] = field(
        default_factory=lambda: {rid: 0 for rid in REQUIREMENT_IDS}
    )
    minimal_violations: dict[str, tuple[PlacementParams, RequirementCheck]] = field(
        default_factory=dict
    )
    oracle_mismatches: int = 0
    minimal_oracle_mismatch: PlacementParams | None = None
    unexpected_violations: int = 0

    @property
    def only_expected_failures(self) -> bool:
        return self.unexpected_violations == 0 and self.oracle_mismatches == 0


def _expected_failure(params: PlacementParams, check: RequirementCheck) -> bool:
    if check.id != "R6" or check.witness is None:
        return False
    if check.witness.get("clause") != "count":
        return False
    if check.witness.get("spread") != 2:
        return False
    return gap(params).present


def sweep(domain: SweepDomain | None = None) -> SweepReport:
    """Exhaustively check every instance in the domain.

    Runs the full requirement check on each instance and compares the
    planner against the pointer-walk oracle once per stage-1 quadruple
    (the comparison does not depend on the second-set size; a mismatch is
    recorded against every instance sharing the quadruple).  Instances
    are visited in lexicographic parameter order, so the first recorded
    violation per requirement is the minimal one and the whole report is
    deterministic.
    """
    if domain is None:
        domain = SweepDomain()
    report = SweepReport(domain=domain)
    for planning in domain.iter_planning_instances():
        oracle_ok = plan_stage1(planning) == prose_oracle_stage1(planning)
        size = planning.first_set_size
        for second in range(size + 1, domain.target_span * size + 1):
            params = PlacementParams(
                planning.token_count,
                size,
                planning.fill_width,
                planning.first_bucket,
                second,
            )
            report.instances_checked += 1
            if not oracle_ok:
                report.oracle_mismatches += 1
                if report.minimal_oracle_mismatch is None:
                    report.minimal_oracle_mismatch = params
            result = check_requirements(run_lifecycle(params))
            if result.all_pass:
                continue
            report.violations.append((params, result))
            for check in result.failures():
                report.violation_counts[check.id] += 1
                if check.id not in report.minimal_violations:
                    report.minimal_violations[check.id] = (params, check)
                if not _expected_failure(params, check):
                    report.unexpected_violations += 1
    return report
