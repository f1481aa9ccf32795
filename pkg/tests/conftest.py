"""Shared helpers: a terse instance builder and a hypothesis strategy."""

from __future__ import annotations

from hypothesis import strategies as st

from ringfill import PlacementParams


def make_params(
    tokens: int, buckets: int, fill: int, first: int = 0, target: int | None = None
) -> PlacementParams:
    """Build an instance; the second set defaults to one past the first."""
    if target is None:
        target = buckets + 1
    return PlacementParams(
        token_count=tokens,
        first_set_size=buckets,
        fill_width=fill,
        first_bucket=first,
        second_set_size=target,
    )


@st.composite
def placement_params(
    draw, max_buckets: int = 8, max_tokens: int = 40, target_span: int = 3
) -> PlacementParams:
    """Valid instances across small rings, windows, phases and horizons."""
    buckets = draw(st.integers(1, max_buckets))
    fill = draw(st.integers(1, buckets))
    first = draw(st.integers(0, buckets - 1))
    tokens = draw(st.integers(0, max_tokens))
    target = draw(st.integers(buckets + 1, target_span * buckets))
    return PlacementParams(
        token_count=tokens,
        first_set_size=buckets,
        fill_width=fill,
        first_bucket=first,
        second_set_size=target,
    )
