"""Closed-form growth-rate bounds and thresholds.

Lower bounds for the lower growth rate of the prefix count: the explicit
kappa formula (valid for beta below the golden ratio) and the two
generator-driven dimension bounds 2m/(2m+1) (beta at most the omega
threshold) and 1/(m+2) (beta at most the lambda threshold).  Upper bounds
for the upper growth rate: log2(2^m - 1)/m for beta above 2^(1/m), plus
the separation property of the m-digit sum set near beta = 2.  Upper
bounds for the local dimension of the fair-coin convolution mirror the
same thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from mpmath import mp, mpf, workprec

from .errors import CapExceeded, OutOfDomain
from .numeric import (BetaContext, golden_ratio, lambda_threshold,
                      omega_threshold)

DEFAULT_M_MAX = 64
SEPARATION_M_CAP = 20
_FLOOR_GUARD = mpf(10) ** -12


@dataclass(frozen=True)
class LocalDimBound:
    """One candidate upper bound for the upper local dimension."""

    source: str  # "majority-generator", "pair-generator" or "kappa"
    m: Optional[int]
    value: float
    threshold: float  # largest beta at which the bound applies


@dataclass(frozen=True)
class BoundReport:
    """Every bound the formulas supply for one base.

    Lower bounds apply to the lower growth rate (hence to the limit when it
    exists); upper bounds to the upper growth rate; the two are therefore
    mutually consistent whenever both apply.
    """

    beta: object
    kappa: Optional[float]
    omega_bound: Optional[tuple]  # (m, 2m/(2m+1))
    lambda_bound: Optional[tuple]  # (m, 1/(m+2))
    best_lower: Optional[float]
    upper_bounds: tuple  # ((m, value, threshold), ...)
    local_dim_upper: tuple  # (LocalDimBound, ...)
    local_dim_min: Optional[float]


def _floor_high_precision(ctx: BetaContext, value_fn):
    """Floor of value_fn() evaluated at context precision; when the value
    sits within 1e-12 of an integer, re-evaluate at doubled precision before
    flooring, since a misrounded floor silently shifts the result."""
    with workprec(ctx.precision_bits):
        v = value_fn()
        if abs(v - mp.nint(v)) < _FLOOR_GUARD:
            with workprec(2 * ctx.precision_bits):
                v = value_fn()
    return int(mp.floor(v))


def kappa_lower_bound(ctx: BetaContext) -> float:
    """Explicit lower bound for the lower growth rate, for beta strictly
    below the golden ratio.

    Equals (1/2) / (floor(log_beta((beta^2-1)/(1+beta-beta^2))) + 1) above
    sqrt(2) and (1/2) / (floor(log_beta(1/(beta-1))) + 1) otherwise.
    """
    with workprec(ctx.precision_bits):
        b = ctx.beta
        if b >= golden_ratio(ctx.precision_bits):
            raise OutOfDomain(
                "kappa is defined for beta below (1+sqrt(5))/2 "
                "(the argument 1+beta-beta^2 must stay positive)")
        if b > mp.sqrt(2):
            arg_fn = lambda: ((ctx.beta ** 2 - 1) / (1 + ctx.beta - ctx.beta ** 2))
        else:
            arg_fn = lambda: 1 / (ctx.beta - 1)
        fl = _floor_high_precision(ctx, lambda: mp.log(arg_fn()) / mp.log(ctx.beta))
        return 0.5 / (fl + 1)


def best_lower_bounds(ctx: BetaContext, m_max: int = DEFAULT_M_MAX,
                      abs_tol: float = 1e-9) -> BoundReport:
    """Lower-bound fragment of the report: kappa plus the best generator
    bounds up to index m_max.

    The omega thresholds decrease with m, so the best bound 2m/(2m+1) comes
    from the largest m with beta <= omega_m.  The lambda thresholds increase
    while the bound 1/(m+2) decreases, so the best comes from the smallest m
    with beta <= lambda_m.
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    beta = ctx.beta
    kappa = None
    if beta < golden_ratio(ctx.precision_bits):
        kappa = kappa_lower_bound(ctx)
    omega_pick = None
    for m in range(1, m_max + 1):
        if beta <= omega_threshold(m, abs_tol):
            omega_pick = (m, (2 * m) / (2 * m + 1))
        else:
            break  # thresholds decrease; no larger m can qualify
    lambda_pick = None
    for m in range(1, m_max + 1):
        if beta <= lambda_threshold(m, abs_tol):
            lambda_pick = (m, 1 / (m + 2))
            break  # thresholds increase; the first hit is the best bound
    lowers = [v for v in (kappa,
                          omega_pick[1] if omega_pick else None,
                          lambda_pick[1] if lambda_pick else None)
              if v is not None]
    return BoundReport(beta=beta, kappa=kappa, omega_bound=omega_pick,
                       lambda_bound=lambda_pick,
                       best_lower=max(lowers) if lowers else None,
                       upper_bounds=(), local_dim_upper=(), local_dim_min=None)


def upper_rate_bound(m: int):
    """Upper bound log2(2^m - 1)/m for the upper growth rate, valid for
    beta in (2^(1/m), 2); returns (value, validity_threshold)."""
    if m < 2:
        raise OutOfDomain("the upper rate bound needs m >= 2")
    # log2(2^m - 1) = m + log2(1 - 2^-m), stable for large m
    value = (m + math.log1p(-(2.0 ** -m)) / math.log(2)) / m
    return value, 2.0 ** (1.0 / m)


def upper_rate_bounds(ctx: BetaContext, count: int = 8) -> tuple:
    """The first ``count`` applicable upper bounds for this base, smallest m
    (hence tightest bound) first."""
    beta = float(ctx.beta)
    m_min = max(2, math.floor(math.log(2) / math.log(beta)) + 1)
    out = []
    m = m_min
    while len(out) < count:
        value, threshold = upper_rate_bound(m)
        if beta > threshold:
            out.append((m, value, threshold))
        m += 1
        if m > m_min + 4 * count:
            break
    return tuple(out)


def separation_holds(ctx: BetaContext, m: int) -> bool:
    """Whether all 2^m m-digit partial sums are pairwise farther apart than
    1/(2 beta^m (beta-1)).

    When this holds, every window of width 1/(beta^m (beta-1)) contains at
    most two of the sums, so prefix counts can at most double every m
    digits.  Sorting reduces the pairwise check to consecutive gaps.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    if m > SEPARATION_M_CAP:
        raise CapExceeded(f"separation check capped at m={SEPARATION_M_CAP}")
    beta = float(ctx.beta)
    sums = np.zeros(1)
    for j in range(1, m + 1):
        sums = np.concatenate([sums, sums + beta ** -j])
    sums.sort()
    threshold = 1.0 / (2.0 * beta ** m * (beta - 1.0))
    return bool(np.diff(sums).min() > threshold)


def delta_search(m: int, abs_tol: float = 1e-8,
                 precision_bits: int = 64) -> float:
    """Numerical witness for the separation margin near beta = 2: the
    largest delta found such that the separation property holds on sampled
    bases in (2 - delta, 2).

    Scans downward from 2 on a 1e-3 grid for the first failure, then bisects
    the boundary to abs_tol.  This witnesses the margin numerically; it is
    not a certified bound.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    if m > SEPARATION_M_CAP:
        raise CapExceeded(f"separation check capped at m={SEPARATION_M_CAP}")

    def holds(beta: float) -> bool:
        return separation_holds(BetaContext(beta, precision_bits), m)

    step = 1e-3
    b = 2.0 - step
    while b > 1.0 and holds(b):
        b -= step
    if b <= 1.0:
        return 1.0  # held on the whole sampled range
    lo, hi = b, b + step  # fails at lo, holds at hi
    while hi - lo > abs_tol:
        mid = (lo + hi) / 2.0
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return 2.0 - hi


def local_dim_upper(ctx: BetaContext, m_max: int = DEFAULT_M_MAX,
                    abs_tol: float = 1e-9) -> tuple:
    """All applicable upper bounds for the upper local dimension of the
    fair-coin convolution at this base, as (candidates, minimum).

    Candidates: (1/(2m+1)) log_beta 2 for the largest m with beta at most
    the omega threshold, ((m+1)/(m+2)) log_beta 2 for the smallest m with
    beta at most the lambda threshold, and (1 - kappa) log_beta 2 below the
    golden ratio.
    """
    beta = ctx.beta
    log_beta_2 = float(mp.log(2) / mp.log(beta))
    candidates = []
    omega_pick = None
    for m in range(1, m_max + 1):
        if beta <= omega_threshold(m, abs_tol):
            omega_pick = m
        else:
            break
    if omega_pick is not None:
        candidates.append(LocalDimBound(
            source="majority-generator", m=omega_pick,
            value=log_beta_2 / (2 * omega_pick + 1),
            threshold=float(omega_threshold(omega_pick, abs_tol))))
    for m in range(1, m_max + 1):
        if beta <= lambda_threshold(m, abs_tol):
            candidates.append(LocalDimBound(
                source="pair-generator", m=m,
                value=log_beta_2 * (m + 1) / (m + 2),
                threshold=float(lambda_threshold(m, abs_tol))))
            break
    if beta < golden_ratio(ctx.precision_bits):
        kappa = kappa_lower_bound(ctx)
        candidates.append(LocalDimBound(
            source="kappa", m=None, value=(1.0 - kappa) * log_beta_2,
            threshold=float(golden_ratio(ctx.precision_bits))))
    minimum = min((c.value for c in candidates), default=None)
    return tuple(candidates), minimum


def bound_report(ctx: BetaContext, m_max: int = DEFAULT_M_MAX,
                 abs_tol: float = 1e-9) -> BoundReport:
    """The full report: lower bounds, upper bounds and local-dimension
    bounds for one base."""
    frag = best_lower_bounds(ctx, m_max, abs_tol)
    uppers = upper_rate_bounds(ctx)
    cands, dim_min = local_dim_upper(ctx, m_max, abs_tol)
    return BoundReport(beta=frag.beta, kappa=frag.kappa,
                       omega_bound=frag.omega_bound,
                       lambda_bound=frag.lambda_bound,
                       best_lower=frag.best_lower,
                       upper_bounds=uppers,
                       local_dim_upper=cands,
                       local_dim_min=dim_min)
