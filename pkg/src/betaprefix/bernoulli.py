"""Estimation of the fair-coin convolution measure and its local dimension.

The measure is the distribution of sum a_n beta^-n with independent fair
bits a_n; it is supported on [0, 1/(beta-1)] and satisfies the
self-similarity mu(E) = (mu(beta E) + mu(beta E - 1)) / 2.  Two estimators
are provided that serve as one another's oracle:

* a bracketed self-similarity recursion whose unresolved leaves contribute
  [0, 1] rather than a point guess (the measure can be singular, so a point
  estimate without a bracket is meaningless), and
* a seeded Monte Carlo estimate over depth-truncated digit sums.

Both run in double precision: interval endpoints here are never iterated
more than the recursion depth (capped at 48) and the truncation windows
dominate the float rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DepthExceeded, InvalidPoint
from .numeric import BetaContext

MAX_DEPTH = 48
_MEMO_SCALE = 2.0 ** 48  # endpoint rounding grid for memo keys
_MC_CHUNK = 1 << 19

METHOD_RECURSION = "recursion"
METHOD_MONTE_CARLO = "monte-carlo"


def _three_sigma(p: float, n: int) -> float:
    """Plug-in three-sigma binomial allowance, floored at one hit."""
    return 3.0 * math.sqrt(max(p * (1.0 - p), 1.0 / n) / n)


@dataclass(frozen=True)
class MeasureEstimate:
    """Bracketed estimate of the convolution measure of an interval."""

    interval: tuple
    value: float
    half_width: float
    depth: int
    method: str
    seed: Optional[int] = None
    samples: Optional[int] = None


@dataclass(frozen=True)
class LocalDimEstimate:
    """Log-measure slopes over shrinking balls at a point.

    slope_lower / slope_upper are the extremes of log mu([x-r, x+r]) / log r
    over the tail window (top third of the k-range, where the limit behaviour
    dominates the constants).  ``unstable`` flags measure estimates whose
    brackets exceed a quarter of their values inside the window.
    """

    x: float
    radii: tuple
    log_measures: tuple
    slope_lower: float
    slope_upper: float
    unstable: bool


def measure_interval(ctx: BetaContext, lo, hi, depth: int) -> MeasureEstimate:
    """Self-similarity recursion for mu([lo, hi]) with midpoint value and
    half-width from the unresolved leaves.

    At each level the interval is clipped to the support; a clipped interval
    covering the whole support scores 1, an empty one 0, and a leaf at depth
    0 contributes the bracket [0, 1].  Memoisation keys round endpoints to
    the 2^-48 grid.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > MAX_DEPTH:
        raise DepthExceeded(f"recursion depth {depth} above cap {MAX_DEPTH}")
    beta = float(ctx.beta)
    ub = float(ctx.one_over_beta_minus_one)
    lo_f, hi_f = float(lo), float(hi)
    if hi_f < lo_f:
        raise ValueError("interval endpoints out of order")
    memo: dict = {}

    def rec(a: float, b: float, d: int):
        if b <= 0.0 or a >= ub:
            return 0.0, 0.0
        a = max(a, 0.0)
        b = min(b, ub)
        if a <= 0.0 and b >= ub:
            return 1.0, 1.0
        if d == 0:
            return 0.0, 1.0
        key = (round(a * _MEMO_SCALE), round(b * _MEMO_SCALE), d)
        got = memo.get(key)
        if got is None:
            l0, h0 = rec(beta * a, beta * b, d - 1)
            l1, h1 = rec(beta * a - 1.0, beta * b - 1.0, d - 1)
            got = ((l0 + l1) / 2.0, (h0 + h1) / 2.0)
            memo[key] = got
        return got

    low, high = rec(lo_f, hi_f, depth)
    return MeasureEstimate(interval=(lo_f, hi_f), value=(low + high) / 2.0,
                           half_width=(high - low) / 2.0, depth=depth,
                           method=METHOD_RECURSION)


def measure_monte_carlo(ctx: BetaContext, lo, hi, samples: int, depth: int,
                        seed: int) -> MeasureEstimate:
    """Monte Carlo bracket for mu([lo, hi]) from depth-truncated digit sums.

    A truncated sum differs from the full one by at most
    tail = beta^-depth / (beta - 1), so the fraction of samples in
    [lo - tail, hi + tail] over-counts the measure (outer estimate) and the
    fraction in [lo + tail, hi - tail] under-counts it (inner estimate).
    The reported half-width combines the bracket with a three-sigma
    worst-case binomial sampling allowance.  All randomness flows from the
    required seed, so runs are reproducible.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    beta = float(ctx.beta)
    ub = float(ctx.one_over_beta_minus_one)
    lo_f, hi_f = float(lo), float(hi)
    if hi_f < lo_f:
        raise ValueError("interval endpoints out of order")
    if lo_f <= 0.0 and hi_f >= ub:
        return MeasureEstimate(interval=(lo_f, hi_f), value=1.0, half_width=0.0,
                               depth=depth, method=METHOD_MONTE_CARLO,
                               seed=seed, samples=samples)
    if hi_f < 0.0 or lo_f > ub:
        return MeasureEstimate(interval=(lo_f, hi_f), value=0.0, half_width=0.0,
                               depth=depth, method=METHOD_MONTE_CARLO,
                               seed=seed, samples=samples)
    tail = beta ** -depth / (beta - 1.0)
    powers = beta ** -np.arange(1, depth + 1)
    rng = np.random.default_rng(seed)
    outer_hits = 0
    inner_hits = 0
    remaining = samples
    while remaining > 0:
        n = min(remaining, _MC_CHUNK)
        bits = rng.integers(0, 2, size=(n, depth), dtype=np.uint8)
        vals = bits @ powers
        outer_hits += int(((vals >= lo_f - tail) & (vals <= hi_f + tail)).sum())
        inner_hits += int(((vals >= lo_f + tail) & (vals <= hi_f - tail)).sum())
        remaining -= n
    outer = outer_hits / samples
    inner = inner_hits / samples
    return MeasureEstimate(interval=(lo_f, hi_f), value=(outer + inner) / 2.0,
                           half_width=(outer - inner) / 2.0 + _three_sigma(outer, samples),
                           depth=depth, method=METHOD_MONTE_CARLO,
                           seed=seed, samples=samples)


def local_dimension(ctx: BetaContext, x, k_min: int, k_max: int,
                    method: str = METHOD_MONTE_CARLO, depth: Optional[int] = None,
                    samples: int = 1 << 21, seed: int = 0) -> LocalDimEstimate:
    """Slope estimates of log mu([x-r, x+r]) / log r over radii r = beta^-k
    for k in [k_min, k_max]."""
    if k_min < 1 or k_max < k_min:
        raise ValueError("need 1 <= k_min <= k_max")
    if method not in (METHOD_RECURSION, METHOD_MONTE_CARLO):
        raise ValueError(f"unknown method {method!r}")
    beta = float(ctx.beta)
    ub = float(ctx.one_over_beta_minus_one)
    xf = float(x)
    if not (0.0 < xf < ub):
        raise InvalidPoint(f"x={x} must lie strictly inside (0, 1/(beta-1))")
    if depth is None:
        depth = min(MAX_DEPTH, k_max + 22)
    ks = tuple(range(k_min, k_max + 1))
    estimates = []
    if method == METHOD_MONTE_CARLO:
        # one sample set serves every radius; estimates share the seed
        powers = beta ** -np.arange(1, depth + 1)
        rng = np.random.default_rng(seed)
        chunks = []
        remaining = samples
        while remaining > 0:
            n = min(remaining, _MC_CHUNK)
            bits = rng.integers(0, 2, size=(n, depth), dtype=np.uint8)
            chunks.append(bits @ powers)
            remaining -= n
        vals = np.concatenate(chunks)
        tail = beta ** -depth / (beta - 1.0)
        for k in ks:
            r = beta ** -k
            outer = float(((vals >= xf - r - tail) & (vals <= xf + r + tail)).mean())
            inner = float(((vals >= xf - r + tail) & (vals <= xf + r - tail)).mean())
            estimates.append(MeasureEstimate(
                interval=(xf - r, xf + r), value=(outer + inner) / 2.0,
                half_width=(outer - inner) / 2.0 + _three_sigma(outer, samples),
                depth=depth, method=METHOD_MONTE_CARLO, seed=seed,
                samples=samples))
    else:
        for k in ks:
            r = beta ** -k
            estimates.append(measure_interval(ctx, xf - r, xf + r, depth))
    radii = tuple(beta ** -k for k in ks)
    log_measures = tuple(math.log(max(e.value, 1e-300)) for e in estimates)
    window_start = k_max - max(1, (k_max - k_min + 1) // 3) + 1
    window = [(k, e) for k, e in zip(ks, estimates) if k >= window_start]
    slopes = [math.log(max(e.value, 1e-300)) / math.log(beta ** -k)
              for k, e in window]
    unstable = any(e.half_width > 0.25 * e.value for _, e in window
                   if e.value > 0)
    return LocalDimEstimate(x=xf, radii=radii, log_measures=log_measures,
                            slope_lower=min(slopes), slope_upper=max(slopes),
                            unstable=unstable)
