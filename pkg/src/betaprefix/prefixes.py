"""Prefix enumeration and growth-rate estimation.

A binary word e_1..e_k is a k-prefix of x exactly when the composed map
orbit beta^k x - sum e_n beta^(k-n) stays inside the admissible interval
I = [0, 1/(beta-1)]; equivalently, when the partial sum sum e_n beta^-n
lies in the window [x - 1/(beta^k (beta-1)), x].  Both characterisations
are implemented on deliberately separate code paths so that each serves as
the other's oracle:

* ``enumerate_prefixes_branching`` expands the orbit tree breadth first and
  prunes children that leave the admissible interval (escape from the
  interval is permanent, so pruning loses nothing);
* ``enumerate_prefixes_direct`` tests all 2^k digit words against the
  partial-sum window with no pruning logic at all;
* ``count_prefixes_window`` counts the same window by a half-split
  (meet-in-the-middle) sum over float64 arrays, which makes counts at
  depths far beyond any materialisable enumeration cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mpf, workprec

from .errors import CapExceeded, InvalidPoint, MemoryGuard
from .numeric import BetaContext, apply_word

DEFAULT_SURVIVOR_CAP = 10_000_000
DIRECT_K_CAP = 24
WINDOW_K_CAP = 44  # half arrays hold 2^(k/2) float64 entries
_REFRESH_LEVELS = 16  # closed-form value refresh cadence in the orbit tree


def word_ones(word: str) -> int:
    return word.count("1")


def word_zeros(word: str) -> int:
    return word.count("0")


def complement_word(word: str) -> str:
    return word.translate(str.maketrans("01", "10"))


@dataclass(frozen=True)
class PrefixSet:
    """All valid k-prefixes of a point, with their orbit values.

    ``words`` is lexicographically sorted; ``orbit_values`` maps each word
    to the composed-map value, which lies in the admissible interval up to
    the context tolerance.
    """

    k: int
    words: tuple
    orbit_values: dict

    @property
    def count(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class GrowthEstimate:
    """log2 prefix counts over a k-range with min/max tail slopes."""

    k_values: tuple
    log2_counts: tuple
    lower_slope: float
    upper_slope: float


def _require_in_base_interval(ctx: BetaContext, x):
    if not ctx.in_base_interval(x):
        raise InvalidPoint(
            f"x={x} outside [0, 1/(beta-1)] beyond tolerance")


def enumerate_prefixes_branching(ctx: BetaContext, x, k: int,
                                 survivor_cap: int = DEFAULT_SURVIVOR_CAP) -> PrefixSet:
    """Breadth-first orbit-tree expansion to depth k.

    A word of length j+1 is kept iff its parent was kept and its orbit
    value lies in the tolerance-closed admissible interval.  Words are
    produced in lexicographic order.  Orbit values are refreshed from the
    closed form every 16 levels to stop error accumulation (iterating
    multiplies the rounding error by beta per level).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    with workprec(ctx.precision_bits):
        x = mpf(x)
        _require_in_base_interval(ctx, x)
        beta = ctx.beta
        lo = -ctx.comparison_tolerance
        hi = ctx.one_over_beta_minus_one + ctx.comparison_tolerance
        frontier = [("", x)]
        for level in range(1, k + 1):
            nxt = []
            append = nxt.append
            for w, v in frontier:
                child = beta * v
                if lo <= child <= hi:
                    append((w + "0", child))
                child -= 1
                if lo <= child <= hi:
                    append((w + "1", child))
            if len(nxt) > survivor_cap:
                raise MemoryGuard(
                    f"frontier {len(nxt)} exceeds survivor cap {survivor_cap} "
                    f"at level {level}")
            if level % _REFRESH_LEVELS == 0 and level < k:
                nxt = [(w, apply_word(ctx, w, x)) for w, _ in nxt]
            frontier = nxt
        return PrefixSet(k=k, words=tuple(w for w, _ in frontier),
                         orbit_values={w: v for w, v in frontier})


def enumerate_prefixes_direct(ctx: BetaContext, x, k: int,
                              k_cap: int = DIRECT_K_CAP) -> PrefixSet:
    """Exhaustive test of all 2^k digit words against the partial-sum
    window.  Shares no pruning logic with the branching path.  Cost is
    2^k, hence the hard cap."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > k_cap:
        raise CapExceeded(f"direct enumeration k={k} above cap {k_cap}")
    with workprec(ctx.precision_bits):
        x = mpf(x)
        _require_in_base_interval(ctx, x)
        bk = ctx.power(k)
        # window for the partial sums, tolerance mapped down by beta^-k
        tol_s = ctx.comparison_tolerance / bk
        win_lo = x - ctx.one_over_beta_minus_one / bk - tol_s
        win_hi = x + tol_s
        # split the digit sum in two halves so memory stays 2^(k/2);
        # every one of the 2^k words is still tested individually
        k1 = (k + 1) // 2
        low = [mpf(0)]
        for j in range(1, k1 + 1):
            p = 1 / ctx.power(j)
            low += [s + p for s in low]
        high = [mpf(0)]
        for j in range(k1 + 1, k + 1):
            p = 1 / ctx.power(j)
            high += [s + p for s in high]
        mask = (1 << k1) - 1
        kept = []
        for i in range(1 << k):
            s = low[i & mask] + high[i >> k1]
            if win_lo <= s <= win_hi:
                word = "".join("1" if (i >> (j - 1)) & 1 else "0"
                               for j in range(1, k + 1))
                kept.append((word, bk * (x - s)))
        kept.sort()
        return PrefixSet(k=k, words=tuple(w for w, _ in kept),
                         orbit_values={w: v for w, v in kept})


def count_prefixes(ctx: BetaContext, x, k: int,
                   survivor_cap: int = DEFAULT_SURVIVOR_CAP) -> int:
    """Number of k-prefixes of x (cardinality of the branching set)."""
    return enumerate_prefixes_branching(ctx, x, k, survivor_cap).count


def count_prefixes_window(ctx: BetaContext, x, k: int) -> int:
    """Half-split window count of k-prefixes.

    Splits the partial sum into first- and second-half digit sums (arrays
    of size 2^ceil(k/2)), sorts one side and counts matches per element of
    the other with vectorised binary search.  Runs in float64: for the
    depths this package targets (k <= 44) the window width dominates the
    float rounding error by many orders of magnitude, and no orbit is ever
    iterated, so the double-precision caveat for long orbits does not
    apply.  Agrees exactly with both enumerations away from window
    boundaries (checked in the test suite).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > WINDOW_K_CAP:
        raise MemoryGuard(f"window count k={k} above cap {WINDOW_K_CAP}")
    beta = float(ctx.beta)
    xf = float(x)
    if not ctx.in_base_interval(mpf(x)):
        raise InvalidPoint(f"x={x} outside [0, 1/(beta-1)] beyond tolerance")
    if k == 0:
        return 1
    k1 = (k + 1) // 2
    a = np.zeros(1)
    for j in range(1, k1 + 1):
        a = np.concatenate([a, a + beta ** -j])
    b = np.zeros(1)
    for j in range(k1 + 1, k + 1):
        b = np.concatenate([b, b + beta ** -j])
    b.sort()
    width = beta ** -k / (beta - 1.0)
    tol_s = float(ctx.comparison_tolerance) * beta ** -k
    hi_idx = np.searchsorted(b, (xf + tol_s) - a, side="right")
    lo_idx = np.searchsorted(b, (xf - width - tol_s) - a, side="left")
    return int((hi_idx - lo_idx).sum())


def growth_estimate(ctx: BetaContext, x, k_min: int, k_max: int) -> GrowthEstimate:
    """log2 N_k / k over [k_min, k_max] with tail-window extremes.

    ``lower_slope`` / ``upper_slope`` are the min/max of log2(N_k)/k over
    the tail window k in [ceil(k_max/2), k_max]; they bracket the lower and
    upper exponential growth rates at the resolution k_max affords.  Counts
    come from the window counter, so depth is limited by the half-array
    budget rather than by the survivor count.
    """
    if k_min < 8:
        raise ValueError("k_min must be at least 8")
    if k_max < k_min:
        raise ValueError("k_max must be >= k_min")
    ks = tuple(range(k_min, k_max + 1))
    logs = []
    for k in ks:
        n = count_prefixes_window(ctx, x, k)
        if n < 1:
            raise InvalidPoint(
                f"no k-prefix found at k={k}; x is outside the representable set")
        logs.append(math.log2(n))
    tail_start = max(k_min, math.ceil(k_max / 2))
    tail = [logs[i] / k for i, k in enumerate(ks) if k >= tail_start]
    return GrowthEstimate(k_values=ks, log2_counts=tuple(logs),
                          lower_slope=min(tail), upper_slope=max(tail))
