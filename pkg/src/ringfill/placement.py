"""Closed-form maps for three-stage token placement on a bucket ring.

A run drops ``token_count`` tokens into a ring of ``first_set_size``
buckets.  Stage 1 confines them to a window of ``fill_width`` consecutive
ring positions starting at ``first_bucket``.  Two interleaved round-robin
streams sweep that window in opposite directions: a descending stream for
tokens whose final ring bucket already lies inside the window, and an
ascending stream, driven by a wrapping counter, for everyone else.
Running the streams in opposite directions is what keeps the window
homogeneous in both token count and label value.

Stage 2 spreads the tokens over the whole ring and stage 3 re-shards them
into a strictly larger second bucket set.  Every choice after stage 1 is
a residue of the token's permanent integer label: stage 2 uses
``label % first_set_size``, stage 3 uses ``label % second_set_size``.

Tokens and labels are plain non-negative ints.  Label arithmetic is done
on unreduced integers so labels from different rounds never alias; bucket
indices are reduced modulo the relevant set size at operation boundaries.
Python ints are unbounded, so no overflow guard is needed at any size.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Cycle",
    "GapDescriptor",
    "PlacementParams",
    "Stage1Planner",
    "cycle_class",
    "gap",
    "label",
    "plan_stage1",
    "stage2_bucket",
    "stage3_bucket",
]


@dataclass(frozen=True)
class PlacementParams:
    """One placement instance.

    Attributes:
        token_count: number of tokens to place, zero allowed.
        first_set_size: bucket count of the first set; buckets form a
            ring counted modulo this size.
        fill_width: how many consecutive ring buckets stage 1 may use.
        first_bucket: ring index where the fill window starts.
        second_set_size: bucket count of the second set; must be strictly
            larger than the first.
    """

    token_count: int
    first_set_size: int
    fill_width: int
    first_bucket: int
    second_set_size: int

    def __post_init__(self) -> None:
        if self.token_count < 0:
            raise ValueError(f"token_count must be >= 0, got {self.token_count}")
        if self.first_set_size < 1:
            raise ValueError(f"first_set_size must be >= 1, got {self.first_set_size}")
        if not 1 <= self.fill_width <= self.first_set_size:
            raise ValueError(
                "fill_width must be between 1 and first_set_size, got "
                f"fill_width={self.fill_width} with first_set_size={self.first_set_size}"
            )
        if not 0 <= self.first_bucket < self.first_set_size:
            raise ValueError(
                "first_bucket must be between 0 and first_set_size - 1, got "
                f"first_bucket={self.first_bucket} with first_set_size={self.first_set_size}"
            )
        if self.second_set_size <= self.first_set_size:
            raise ValueError(
                "second_set_size must exceed first_set_size, got "
                f"second_set_size={self.second_set_size} with first_set_size={self.first_set_size}"
            )

    def fill_window(self) -> tuple[int, ...]:
        """Ring buckets available to stage 1, in window order."""
        size = self.first_set_size
        return tuple((self.first_bucket + i) % size for i in range(self.fill_width))

    def window_offset(self, bucket: int) -> int:
        """Distance of a ring bucket from the window start, around the ring."""
        return (bucket - self.first_bucket) % self.first_set_size

    def in_fill_window(self, bucket: int) -> bool:
        return self.window_offset(bucket) < self.fill_width


class Cycle(Enum):
    """The two interleaved round-robin streams of stage 1."""

    FIRST = "first"
    SECOND = "second"


def _check_token(params: PlacementParams, token: int) -> None:
    if not 0 <= token < params.token_count:
        raise ValueError(
            f"token {token} out of range for token_count={params.token_count}"
        )


def cycle_class(params: PlacementParams, token: int) -> Cycle:
    """Which stream carries this token.

    A token rides the descending first stream exactly when its position
    within the current round falls inside the fill window, i.e. when
    ``token % first_set_size < fill_width``.
    """
    _check_token(params, token)
    if token % params.first_set_size < params.fill_width:
        return Cycle.FIRST
    return Cycle.SECOND


def label(params: PlacementParams, token: int) -> int:
    """Permanent integer label of a token.

    Second-stream tokens take the plain ascending form
    ``first_bucket + token``.  First-stream tokens take a form that
    descends within each round, so that reducing it modulo the ring size
    walks the window from its far end back to the start bucket.  Labels
    never drop below ``first_bucket`` and, except for a possible gap left
    by a truncated final round, cover a contiguous range.
    """
    _check_token(params, token)
    round_pos = token % params.first_set_size
    if round_pos < params.fill_width:
        return params.first_bucket + token + params.fill_width - 1 - 2 * round_pos
    return params.first_bucket + token


@dataclass
class Stage1Planner:
    """Sequential stage-1 scheduler.

    Owns the ascending stream's counter, a window offset in
    ``[0, fill_width)`` that advances once per second-stream token and is
    untouched by first-stream tokens.  The counter persists across
    rounds.  An instance is single-owner state: advance it one token at a
    time with :meth:`step` and do not share it between threads.  Distinct
    instances are independent.
    """

    params: PlacementParams
    counter: int = 0
    tokens_emitted: int = 0

    def step(self) -> tuple[int, int]:
        """Assign the next token, returning ``(token, ring_bucket)``."""
        params = self.params
        token = self.tokens_emitted
        _check_token(params, token)
        if token % params.first_set_size < params.fill_width:
            bucket = label(params, token) % params.first_set_size
        else:
            bucket = (params.first_bucket + self.counter) % params.first_set_size
            self.counter = (self.counter + 1) % params.fill_width
        self.tokens_emitted = token + 1
        return token, bucket


def plan_stage1(params: PlacementParams) -> list[tuple[int, int]]:
    """Stage-1 assignment for every token, in token order.

    Each entry is ``(token, ring_bucket)`` and every assigned bucket lies
    inside the fill window.  Zero tokens yield the empty plan.
    """
    planner = Stage1Planner(params)
    return [planner.step() for _ in range(params.token_count)]


def stage2_bucket(params: PlacementParams, token: int) -> int:
    """Ring bucket after the rebalance: ``label % first_set_size``.

    First-stream tokens already sit there after stage 1, so the rebalance
    only ever moves second-stream tokens, each exactly once.
    """
    return label(params, token) % params.first_set_size


def stage3_bucket(params: PlacementParams, token: int) -> int:
    """Bucket in the second set: ``label % second_set_size``."""
    return label(params, token) % params.second_set_size


@dataclass(frozen=True)
class GapDescriptor:
    """Contiguous interval of label values that no token carries.

    A run that stops partway through a descending sweep, before the sweep
    reaches the window's start bucket, leaves the low labels of its final
    round unassigned.  ``round`` is the index of that final round and
    ``offset`` is how far the last emitted label sits above the round's
    base label; the missing values are
    ``{gap_start, ..., gap_start + gap_length - 1}``.

    The interval is anchored at ``first_bucket + round * first_set_size``:
    the whole label sequence is shifted by the window start, so the
    missing values are shifted with it.  All numeric fields are zero when
    no gap is present.
    """

    present: bool
    gap_start: int = 0
    gap_length: int = 0
    round: int = 0
    offset: int = 0


def gap(params: PlacementParams) -> GapDescriptor:
    """Describe the missing-label interval of a truncated final round.

    The emitted labels are contiguous from ``first_bucket`` upward unless
    the very last token rides the descending stream and stops short of
    the window start; only then is a gap present.
    """
    if params.token_count == 0:
        return GapDescriptor(present=False)
    last = params.token_count - 1
    round_pos = last % params.first_set_size
    if round_pos >= params.fill_width - 1:
        # Ascending-stream tail, or a descending sweep that reached the
        # window start: no labels are skipped.
        return GapDescriptor(present=False)
    round_index = last // params.first_set_size
    base = params.first_bucket + round_index * params.first_set_size
    return GapDescriptor(
        present=True,
        gap_start=base,
        gap_length=params.fill_width - 1 - round_pos,
        round=round_index,
        offset=label(params, last) - base,
    )
