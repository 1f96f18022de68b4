"""The two prefix generators and their steering intervals.

Both constructions push the orbit of x into a steering subinterval of the
admissible interval and then extend prefixes block by block so that every
extension's orbit lands back inside it:

* majority-block mode (``m``): blocks of length 2m+1 whose majority digit
  is chosen by which side of the pivot 1/(beta^2-1) the orbit sits on.
  Each block admits exactly 2^(2m) majority words, all of which return to
  the steering interval when beta is at most the omega threshold for m.
* steered-pair mode (``s3``): blocks of length m+2 built from at most m+1
  forced steps into the core two-cycle, one free branch digit, and a
  steering word chosen to land back in the interval.  Each block yields
  exactly 2 extensions when beta is at most the lambda threshold for m.

Orbit containment is asserted for every extension; a violation falsifies
the defining polynomial inequality for the given beta and aborts loudly.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from mpmath import mpf, workprec

from .errors import (ContainmentViolation, InvalidPoint, MemoryGuard,
                     NoSteeringWord, OutOfDomain, Unreachable)
from .numeric import (BetaContext, apply_word, golden_ratio, lambda_threshold,
                      omega_threshold)

DEFAULT_SURVIVOR_CAP = 10_000_000
_ENTRY_DFS_BUDGET = 2_000_000

MODE_MAJORITY = "m"
MODE_STEERED_PAIR = "s3"


@dataclass(frozen=True)
class BlockSteeringInterval:
    """Steering interval for majority-block mode: [lo, hi] with the pivot
    splitting it into the zeros-heavy and ones-heavy halves."""

    m: int
    lo: object
    pivot: object
    hi: object


@dataclass(frozen=True)
class PairSteeringInterval:
    """Steering interval for steered-pair mode, with the inner core
    two-cycle [core_lo, core_hi] that orbits cannot jump over."""

    lo: object
    core_lo: object
    core_hi: object
    hi: object


def block_steering_interval(ctx: BetaContext, m: int) -> BlockSteeringInterval:
    """Validated steering interval for majority-block mode.

    Requires beta <= omega threshold of m; then
    0 <= lo < pivot < hi <= 1/(beta-1), lo is the (2m+1)-fold lower-map
    image of 1/(beta^2-1) and hi the (2m+1)-fold upper-map image of
    beta/(beta^2-1).
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    if ctx.beta > omega_threshold(m):
        raise OutOfDomain(
            f"majority-block mode needs beta <= omega_{m} = "
            f"{omega_threshold(m)}, got {ctx.beta}")
    with workprec(ctx.precision_bits):
        b2m2 = ctx.power(2 * m + 2)
        denom = ctx.beta * ctx.beta - 1
        lo = (-b2m2 + ctx.beta + 1) / denom
        hi = b2m2 / denom
        iv = BlockSteeringInterval(m=m, lo=lo, pivot=ctx.core_lo, hi=hi)
        tol = ctx.comparison_tolerance
        if not (-tol <= lo < ctx.core_lo < hi <= ctx.one_over_beta_minus_one + tol):
            raise ContainmentViolation(
                f"steering interval endpoints out of order for m={m}, beta={ctx.beta}")
        if abs(apply_word(ctx, "1" * (2 * m + 1), ctx.core_lo) - lo) > tol:
            raise ContainmentViolation("lower endpoint does not match its map image")
        if abs(apply_word(ctx, "0" * (2 * m + 1), ctx.core_hi) - hi) > tol:
            raise ContainmentViolation("upper endpoint does not match its map image")
        return iv


def pair_steering_interval(ctx: BetaContext) -> PairSteeringInterval:
    """Validated steering interval for steered-pair mode; needs beta below
    the golden ratio so the interval fits inside the admissible one."""
    with workprec(ctx.precision_bits):
        if ctx.beta >= golden_ratio(ctx.precision_bits):
            raise OutOfDomain(
                f"steered-pair interval needs beta < (1+sqrt(5))/2, got {ctx.beta}")
        b = ctx.beta
        denom = b * b - 1
        lo = (1 + b - b * b) / denom
        hi = (b * b) / denom
        tol = ctx.comparison_tolerance
        if not (-tol <= lo <= ctx.core_lo <= ctx.core_hi <= hi
                <= ctx.one_over_beta_minus_one + tol):
            raise ContainmentViolation(
                f"pair steering interval endpoints out of order for beta={ctx.beta}")
        return PairSteeringInterval(lo=lo, core_lo=ctx.core_lo,
                                    core_hi=ctx.core_hi, hi=hi)


def _require_interior(ctx: BetaContext, x):
    tol = ctx.comparison_tolerance
    if not (tol < x < ctx.one_over_beta_minus_one - tol):
        raise InvalidPoint(
            f"x={x} must lie strictly inside (0, 1/(beta-1))")


def _lex_smallest_entry(ctx: BetaContext, lo, hi, x, length: int,
                        budget: int = _ENTRY_DFS_BUDGET):
    """Lexicographically smallest admissible word of the given length whose
    final orbit value lands in [lo, hi] (tolerance-closed).

    Depth-first in lex order with interval-reachability pruning: from value
    v with n steps left every reachable final value lies between the all-ones
    composition beta^n (v - ub) + ub and the all-zeros composition beta^n v,
    so subtrees whose bound interval misses the target are skipped.  Returns
    None if the node budget is exhausted before a hit.
    """
    tol = ctx.comparison_tolerance
    ub = ctx.one_over_beta_minus_one
    beta = ctx.beta
    target_lo = lo - tol
    target_hi = hi + tol
    nodes = 0
    stack = [("", mpf(x))]
    while stack:
        w, v = stack.pop()
        nodes += 1
        if nodes > budget:
            return None
        n = length - len(w)
        if n == 0:
            if target_lo <= v <= target_hi:
                return w
            continue
        bn = ctx.power(n)
        if bn * (v - ub) + ub > target_hi:
            continue
        if bn * v < target_lo:
            continue
        child = beta * v - 1
        if -tol <= child <= ub + tol:
            stack.append((w + "1", child))
        child += 1
        if -tol <= child <= ub + tol:
            stack.append((w + "0", child))
    return None


def _entry_word(ctx: BetaContext, lo, hi, x, depth_cap: int):
    """Minimal-length word mapping x into [lo, hi], lexicographically
    smallest among minimal ones; returns (word, length).

    Minimality follows from value bounds rather than search: every word
    value at depth j lies between the all-ones and all-zeros compositions,
    and the monotone climb (all zeros from below, all ones from above)
    enters the interval without jumping over it, because the interval
    contains the core two-cycle.
    """
    with workprec(ctx.precision_bits):
        x = mpf(x)
        _require_interior(ctx, x)
        tol = ctx.comparison_tolerance
        if ctx.in_interval(x, lo, hi):
            return "", 0
        beta = ctx.beta
        if x < lo:
            # all-zeros climb is both minimal and lexicographically smallest
            v = x
            j = 0
            while v < lo - tol:
                v *= beta
                j += 1
                if j > depth_cap:
                    raise Unreachable(
                        f"no entry into [{lo}, {hi}] within {depth_cap} steps from x={x}")
            if v > hi + tol:
                raise Unreachable(
                    f"monotone climb jumped over [{lo}, {hi}] from x={x}")
            return "0" * j, j
        # x > hi: the all-ones descent fixes the minimal length
        v = x
        j = 0
        while v > hi + tol:
            v = beta * v - 1
            j += 1
            if j > depth_cap:
                raise Unreachable(
                    f"no entry into [{lo}, {hi}] within {depth_cap} steps from x={x}")
        if v < lo - tol:
            raise Unreachable(
                f"monotone descent jumped over [{lo}, {hi}] from x={x}")
        word = _lex_smallest_entry(ctx, lo, hi, x, j)
        if word is None:
            # budget exhausted: fall back to the known-good all-ones word
            word = "1" * j
        final = apply_word(ctx, word, x)
        if not ctx.in_interval(final, lo, hi):
            raise Unreachable(
                f"entry word {word!r} fails to land in [{lo}, {hi}] (value {final})")
        return word, j


def entry_word_m(ctx: BetaContext, m: int, x):
    """Step-1 entry for majority-block mode: minimal-length word into the
    block steering interval, all intermediate orbit values admissible."""
    iv = block_steering_interval(ctx, m)
    return _entry_word(ctx, iv.lo, iv.hi, x, depth_cap=64 * (2 * m + 3))


def entry_word_s3(ctx: BetaContext, m: int, x):
    """Step-1 entry for steered-pair mode."""
    _require_pair_mode(ctx, m)
    iv = pair_steering_interval(ctx)
    return _entry_word(ctx, iv.lo, iv.hi, x, depth_cap=64 * (m + 4))


def _require_pair_mode(ctx: BetaContext, m: int):
    if m < 1:
        raise ValueError("m must be a positive integer")
    if ctx.beta > lambda_threshold(m):
        raise OutOfDomain(
            f"steered-pair mode needs beta <= lambda_{m} = "
            f"{lambda_threshold(m)}, got {ctx.beta}")


@functools.lru_cache(maxsize=256)
def _majority_words(length: int, heavy: str) -> tuple:
    """All words of the given length in which ``heavy`` occupies a strict
    majority of positions, in lexicographic order."""
    need = length // 2 + 1
    return tuple("".join(bits) for bits in itertools.product("01", repeat=length)
                 if bits.count(heavy) >= need)


def _affine_words(ctx: BetaContext, words: tuple, length: int, key) -> tuple:
    """Cache of (word, offset) pairs: applying ``word`` acts on an orbit
    value v as beta^length * v + offset."""
    got = ctx.cache.get(key)
    if got is None:
        with workprec(ctx.precision_bits):
            res = []
            for w in words:
                q = mpf(0)
                for n, ch in enumerate(w, start=1):
                    if ch == "1":
                        q -= ctx.power(length - n)
                res.append((w, q))
        got = tuple(res)
        ctx.cache[key] = got
    return got


def extend_block_m(ctx: BetaContext, m: int, prefix_word: str, orbit):
    """All 2^(2m) majority blocks of length 2m+1 extending a prefix whose
    orbit value is ``orbit``, with the orbit value after each block.

    Orbits at or above the pivot take ones-heavy blocks, below it
    zeros-heavy ones (a value exactly at the pivot belongs to both closed
    halves; the ones-heavy rule keeps runs reproducible).  Every extension
    must land back inside the steering interval; any escape raises
    ContainmentViolation, since it falsifies the block-return inequality
    for this beta.
    """
    iv = block_steering_interval(ctx, m)
    with workprec(ctx.precision_bits):
        orbit = mpf(orbit)
        if not ctx.in_interval(orbit, iv.lo, iv.hi):
            raise InvalidPoint(
                f"orbit {orbit} outside steering interval [{iv.lo}, {iv.hi}]")
        length = 2 * m + 1
        heavy = "1" if orbit >= iv.pivot else "0"
        pairs = _affine_words(ctx, _majority_words(length, heavy), length,
                              key=("block_m", m, heavy))
        scale = ctx.power(length)
        out = []
        for block, q in pairs:
            v = scale * orbit + q
            if not ctx.in_interval(v, iv.lo, iv.hi):
                raise ContainmentViolation(
                    f"block {block} (after {prefix_word!r}) leaves the steering "
                    f"interval: value {v} not in [{iv.lo}, {iv.hi}] at beta={ctx.beta}")
            out.append((block, v))
        return out


def _steer_into(ctx: BetaContext, lo, hi, value, length: int, cache_tag):
    """Lexicographically smallest word of the given length whose affine
    action sends ``value`` into [lo, hi] (tolerance-closed)."""
    if length == 0:
        if ctx.in_interval(value, lo, hi):
            return "", value
        raise NoSteeringWord(
            f"value {value} not in steering interval and no steering steps left")
    words = tuple("".join(bits)
                  for bits in itertools.product("01", repeat=length))
    pairs = _affine_words(ctx, words, length, key=(cache_tag, length))
    scale = ctx.power(length)
    for w, q in pairs:
        v = scale * value + q
        if ctx.in_interval(v, lo, hi):
            return w, v
    raise NoSteeringWord(
        f"no word of length {length} steers {value} back into [{lo}, {hi}] "
        f"at beta={ctx.beta}")


def extend_block_s3(ctx: BetaContext, m: int, prefix_word: str, orbit):
    """The two steered extensions of length m+2 from an orbit value inside
    the pair steering interval.

    Case analysis on the orbit's position: inside the core two-cycle the
    branch digit applies immediately; strictly below the core the lower map
    is forced until the core is reached (at most m+1 steps); strictly above,
    the upper map is forced symmetrically.  After the branch digit a
    steering word of the remaining length returns the orbit to the
    interval.  Returns a pair of (word, final_orbit) tuples whose words
    differ at the branch position.
    """
    _require_pair_mode(ctx, m)
    iv = pair_steering_interval(ctx)
    with workprec(ctx.precision_bits):
        orbit = mpf(orbit)
        if not ctx.in_interval(orbit, iv.lo, iv.hi):
            raise InvalidPoint(
                f"orbit {orbit} outside steering interval [{iv.lo}, {iv.hi}]")
        tol = ctx.comparison_tolerance
        beta = ctx.beta
        forced = ""
        v = orbit
        if v < iv.core_lo - tol:
            while v < iv.core_lo - tol:
                v *= beta
                forced += "0"
                if len(forced) > m + 1:
                    raise ContainmentViolation(
                        f"forced climb into the core took more than m+1={m + 1} "
                        f"steps at beta={beta}")
        elif v > iv.core_hi + tol:
            while v > iv.core_hi + tol:
                v = beta * v - 1
                forced += "1"
                if len(forced) > m + 1:
                    raise ContainmentViolation(
                        f"forced descent into the core took more than m+1={m + 1} "
                        f"steps at beta={beta}")
        k = len(forced)
        steer_len = m + 1 - k
        out = []
        for digit in ("0", "1"):
            vb = beta * v - int(digit)
            if not ctx.in_base_interval(vb):
                raise ContainmentViolation(
                    f"branch digit {digit} leaves the admissible interval from "
                    f"core value {v} at beta={beta}")
            steer, vf = _steer_into(ctx, iv.lo, iv.hi, vb, steer_len,
                                    cache_tag="steer_s3")
            out.append((forced + digit + steer, vf))
        words = [w for w, _ in out]
        if words[0][k] == words[1][k]:
            raise ContainmentViolation("branch words agree at the branch position")
        return tuple(out)


@dataclass(frozen=True)
class GeneratorRun:
    """Completed generator run: the entry word plus one prefix stage per
    block.  Stage s holds 2^(2ms) words (majority mode) or 2^s words
    (steered-pair mode) of length entry_steps + s * block_length, each with
    its orbit value inside the steering interval."""

    mode: str
    m: int
    x: object
    entry_word: str
    entry_steps: int
    block_length: int
    stages: tuple  # tuple of tuples of (word, orbit_value)

    @property
    def num_blocks(self) -> int:
        return len(self.stages) - 1

    def stage_words(self, s: int) -> tuple:
        return tuple(w for w, _ in self.stages[s])

    def stage_values(self, s: int) -> tuple:
        return tuple(v for _, v in self.stages[s])

    def descendant_count(self, s_from: int, word: str, s_to: int) -> int:
        """Number of stage-s_to words extending ``word`` from stage s_from."""
        if s_to < s_from:
            raise ValueError("s_to must be >= s_from")
        return sum(1 for w, _ in self.stages[s_to] if w.startswith(word))


def _expected_stage_count(mode: str, m: int, s: int) -> int:
    return 2 ** (2 * m * s) if mode == MODE_MAJORITY else 2 ** s


def _run_generator(ctx: BetaContext, mode: str, m: int, x, num_blocks: int,
                   survivor_cap: int) -> GeneratorRun:
    if num_blocks < 0:
        raise ValueError("num_blocks must be nonnegative")
    if _expected_stage_count(mode, m, num_blocks) > survivor_cap:
        raise MemoryGuard(
            f"final stage of {_expected_stage_count(mode, m, num_blocks)} words "
            f"exceeds survivor cap {survivor_cap}")
    if mode == MODE_MAJORITY:
        entry, steps = entry_word_m(ctx, m, x)
        block_length = 2 * m + 1
        extend = extend_block_m
    else:
        entry, steps = entry_word_s3(ctx, m, x)
        block_length = m + 2
        extend = extend_block_s3
    with workprec(ctx.precision_bits):
        v0 = apply_word(ctx, entry, mpf(x))
        stages = [((entry, v0),)]
        for s in range(1, num_blocks + 1):
            nxt = []
            for w, v in stages[-1]:
                for block, nv in extend(ctx, m, w, v):
                    nxt.append((w + block, nv))
            nxt.sort(key=lambda t: t[0])
            expected = _expected_stage_count(mode, m, s)
            if len(nxt) != expected:
                raise ContainmentViolation(
                    f"stage {s} produced {len(nxt)} words, expected {expected}")
            stages.append(tuple(nxt))
        return GeneratorRun(mode=mode, m=m, x=mpf(x), entry_word=entry,
                            entry_steps=steps, block_length=block_length,
                            stages=tuple(stages))


def run_generator_m(ctx: BetaContext, m: int, x, num_blocks: int,
                    survivor_cap: int = DEFAULT_SURVIVOR_CAP) -> GeneratorRun:
    """Majority-block generator run: stage s holds exactly 2^(2ms) words of
    length entry_steps + s(2m+1)."""
    return _run_generator(ctx, MODE_MAJORITY, m, x, num_blocks, survivor_cap)


def run_generator_s3(ctx: BetaContext, m: int, x, num_blocks: int,
                     survivor_cap: int = DEFAULT_SURVIVOR_CAP) -> GeneratorRun:
    """Steered-pair generator run: stage s holds exactly 2^s words of
    length entry_steps + s(m+2)."""
    return _run_generator(ctx, MODE_STEERED_PAIR, m, x, num_blocks, survivor_cap)
