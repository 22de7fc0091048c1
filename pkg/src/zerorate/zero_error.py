"""Decision procedures for zero-error behaviour of a channel/metric pair.

For an ordered input pair ``(a, b)`` two exact rational quantities decide
everything here:

* ``min_side``: the smallest ``q(a,y)/q(b,y)`` over outputs the channel
  can actually produce from ``a`` (``+inf`` when the metric row of ``b``
  vanishes on all of them, using the convention positive/0 = +inf);
* ``max_side``: the largest ``q(a,y)/q(b,y)`` over outputs producible
  from ``b`` (always finite, by admissibility).

The zero-error capacity of the pair under the product-metric decoder is
zero in the average sense iff ``min_side <= max_side`` for every ordered
pair; the maximal sense additionally requires every equality pair to
share an output both inputs can produce.  Pairs achieving equality form
the boundary set, and a pair of matrices is *balanced* when, on top of
the average condition, each boundary pair sees one constant metric ratio
across all relevant outputs.  All comparisons are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .channel import ChannelMetricPair
from .errors import PreconditionError

INF = math.inf
ExactRatio = Union[Fraction, float]


def extremal_ratios(pair: ChannelMetricPair, a: int, b: int) -> tuple[ExactRatio, Fraction]:
    """Exact ``(min_side, max_side)`` for the ordered input pair ``(a, b)``."""
    ny = pair.ny
    min_side: ExactRatio = INF
    for y in range(ny):
        if pair.W[a][y] > 0:
            r: ExactRatio = pair.q[a][y] / pair.q[b][y] if pair.q[b][y] > 0 else INF
            if r < min_side:
                min_side = r
    max_side = Fraction(-1)
    for y in range(ny):
        if pair.W[b][y] > 0:
            r2 = pair.q[a][y] / pair.q[b][y]
            if r2 > max_side:
                max_side = r2
    return min_side, max_side


@dataclass(frozen=True)
class RatioWitness:
    """Evidence that a zero-error condition fails (or binds) at one pair."""

    kind: str  # "ordering_violation" or "equality_without_overlap"
    pair: tuple[int, int]
    min_ratio: ExactRatio
    max_ratio: ExactRatio
    overlap: Optional[bool] = None


@dataclass(frozen=True)
class BalanceViolation:
    """Two outputs of one boundary pair exhibiting different metric ratios."""

    pair: tuple[int, int]
    outputs: tuple[int, int]
    ratios: tuple[Fraction, Fraction]


def check_c0bar_zero(pair: ChannelMetricPair) -> tuple[bool, Optional[RatioWitness]]:
    """Average-sense zero-error capacity is zero iff no ordered pair violates
    ``min_side <= max_side``; on failure the first violating pair is returned."""
    nx = pair.nx
    for a in range(nx):
        for b in range(nx):
            if a == b:
                continue
            lo, hi = extremal_ratios(pair, a, b)
            if lo > hi:
                return False, RatioWitness("ordering_violation", (a, b), lo, hi)
    return True, None


def check_c0_zero(pair: ChannelMetricPair) -> tuple[bool, Optional[RatioWitness]]:
    """Maximal-sense zero-error capacity is zero iff the average-sense
    condition holds and every equality pair shares a producible output."""
    ok, witness = check_c0bar_zero(pair)
    if not ok:
        return False, witness
    nx, ny = pair.nx, pair.ny
    for a in range(nx):
        for b in range(nx):
            if a == b:
                continue
            lo, hi = extremal_ratios(pair, a, b)
            if lo == hi:
                overlap = any(pair.W[a][y] > 0 and pair.W[b][y] > 0 for y in range(ny))
                if not overlap:
                    return False, RatioWitness(
                        "equality_without_overlap", (a, b), lo, hi, overlap=False
                    )
    return True, None


def boundary_set_B(pair: ChannelMetricPair) -> tuple[tuple[int, int], ...]:
    """Ordered off-diagonal pairs where ``min_side == max_side`` exactly.

    The set is symmetric: the two sides for ``(b, a)`` are the exact
    reciprocals of those for ``(a, b)``.  Diagonal pairs always satisfy
    the equality trivially (ratio one) and are omitted.
    """
    nx = pair.nx
    out = []
    for a in range(nx):
        for b in range(nx):
            if a == b:
                continue
            lo, hi = extremal_ratios(pair, a, b)
            if lo == hi:
                out.append((a, b))
    return tuple(out)


def boundary_ratio(pair: ChannelMetricPair, a: int, b: int) -> Fraction:
    """The common extremal ratio of a boundary pair (exact)."""
    lo, hi = extremal_ratios(pair, a, b)
    if lo != hi:
        raise PreconditionError(f"({a},{b}) is not a boundary pair")
    return hi


def is_balanced(pair: ChannelMetricPair) -> tuple[bool, Optional[BalanceViolation]]:
    """A pair is balanced when the average zero-error condition holds and on
    every boundary pair the metric ratio ``q(a,y)/q(b,y)`` is one constant
    across all overlap outputs that either input can produce."""
    ok, _ = check_c0bar_zero(pair)
    if not ok:
        return False, None
    ny = pair.ny
    for a, b in boundary_set_B(pair):
        relevant = [
            y for y in range(ny)
            if pair.q[a][y] > 0 and pair.q[b][y] > 0
            and (pair.W[a][y] > 0 or pair.W[b][y] > 0)
        ]
        ratios = [pair.q[a][y] / pair.q[b][y] for y in relevant]
        for y, r in zip(relevant[1:], ratios[1:]):
            if r != ratios[0]:
                return False, BalanceViolation(
                    pair=(a, b), outputs=(relevant[0], y), ratios=(ratios[0], r)
                )
    return True, None


def is_strict_support_match(pair: ChannelMetricPair) -> bool:
    """True when the metric is positive exactly where the channel is."""
    return all(
        (pair.W[a][y] > 0) == (pair.q[a][y] > 0)
        for a in range(pair.nx)
        for y in range(pair.ny)
    )


@dataclass(frozen=True)
class ZeroErrorReport:
    c0bar_zero: bool
    c0_zero: bool
    balanced: bool
    boundary_pairs: tuple[tuple[int, int], ...]
    strict_support_match: bool
    witness: Optional[RatioWitness]
    balance_violation: Optional[BalanceViolation]


def zero_error_report(pair: ChannelMetricPair) -> ZeroErrorReport:
    """One-stop summary used by the command-line front end."""
    c0bar, w_bar = check_c0bar_zero(pair)
    c0, w_max = check_c0_zero(pair)
    balanced, violation = is_balanced(pair)
    return ZeroErrorReport(
        c0bar_zero=c0bar,
        c0_zero=c0,
        balanced=balanced,
        boundary_pairs=boundary_set_B(pair),
        strict_support_match=is_strict_support_match(pair),
        witness=w_bar if w_bar is not None else w_max,
        balance_violation=violation,
    )
