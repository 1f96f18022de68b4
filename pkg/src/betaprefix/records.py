"""Serialization helpers: line-oriented word lists, JSON-line records and
CSV rows.

The records format is one JSON object per line with a ``kind`` field; the
field schemas are documented in the README.  Real numbers are emitted as
decimal strings with enough digits to round-trip at the producing context's
binary precision.
"""

from __future__ import annotations

import json
import math

from mpmath import mp, mpf, workprec

from .bernoulli import MeasureEstimate
from .bounds import BoundReport
from .generators import GeneratorRun
from .numeric import DEFAULT_PRECISION_BITS
from .prefixes import GrowthEstimate, PrefixSet


def real_repr(value, precision_bits: int = DEFAULT_PRECISION_BITS) -> str:
    """Decimal string with enough digits to round-trip the binary value."""
    digits = math.ceil(precision_bits * math.log10(2)) + 2
    with workprec(precision_bits):
        return mp.nstr(mpf(value), digits, strip_zeros=True)


def parse_real(text: str, precision_bits: int = DEFAULT_PRECISION_BITS):
    with workprec(precision_bits):
        return mpf(text)


# ---------------------------------------------------------------- prefix sets

def prefix_set_lines(ps: PrefixSet) -> str:
    """One word per line as an ASCII 0/1 string, then ``count=<N>``."""
    return "".join(f"{w}\n" for w in ps.words) + f"count={ps.count}\n"


def parse_prefix_set_lines(text: str):
    """Returns (words, count) parsed from the line format; validates the
    trailer against the number of word lines."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[-1].startswith("count="):
        raise ValueError("missing count= trailer")
    count = int(lines[-1].split("=", 1)[1])
    words = tuple(lines[:-1])
    if len(words) != count:
        raise ValueError(f"trailer says {count} words, found {len(words)}")
    for w in words:
        if w.strip("01"):
            raise ValueError(f"invalid word line {w!r}")
    return words, count


def prefix_set_records(ps: PrefixSet,
                       precision_bits: int = DEFAULT_PRECISION_BITS) -> list:
    recs = [{"kind": "prefix", "word": w,
             "orbit_value": real_repr(ps.orbit_values[w], precision_bits)}
            for w in ps.words]
    recs.append({"kind": "prefix_set", "k": ps.k, "count": ps.count})
    return recs


def parse_prefix_set_records(lines, precision_bits: int = DEFAULT_PRECISION_BITS) -> PrefixSet:
    words = []
    values = {}
    k = None
    count = None
    for line in lines:
        rec = json.loads(line) if isinstance(line, str) else line
        if rec["kind"] == "prefix":
            words.append(rec["word"])
            values[rec["word"]] = parse_real(rec["orbit_value"], precision_bits)
        elif rec["kind"] == "prefix_set":
            k, count = rec["k"], rec["count"]
    if k is None or count != len(words):
        raise ValueError("inconsistent prefix set records")
    return PrefixSet(k=k, words=tuple(sorted(words)), orbit_values=values)


# ------------------------------------------------------------ generator runs

def generator_run_records(run: GeneratorRun, beta,
                          precision_bits: int = DEFAULT_PRECISION_BITS,
                          include_words: bool = True) -> list:
    recs = [{
        "kind": "generator_run",
        "mode": run.mode,
        "m": run.m,
        "beta": real_repr(beta, precision_bits),
        "x": real_repr(run.x, precision_bits),
        "entry_word": run.entry_word,
        "entry_steps": run.entry_steps,
        "block_length": run.block_length,
        "num_blocks": run.num_blocks,
    }]
    for s, stage in enumerate(run.stages):
        values = [v for _, v in stage]
        recs.append({
            "kind": "stage",
            "index": s,
            "count": len(stage),
            "word_length": len(stage[0][0]),
            "orbit_min": real_repr(min(values), precision_bits),
            "orbit_max": real_repr(max(values), precision_bits),
        })
        if include_words:
            for w, v in stage:
                recs.append({"kind": "stage_word", "stage": s, "word": w,
                             "orbit_value": real_repr(v, precision_bits)})
    return recs


# ------------------------------------------------------------- bound reports

def bound_report_records(report: BoundReport,
                         precision_bits: int = DEFAULT_PRECISION_BITS) -> list:
    rec = {
        "kind": "bound_report",
        "beta": real_repr(report.beta, precision_bits),
        "kappa": report.kappa,
        "omega_bound_m": report.omega_bound[0] if report.omega_bound else None,
        "omega_bound": report.omega_bound[1] if report.omega_bound else None,
        "lambda_bound_m": report.lambda_bound[0] if report.lambda_bound else None,
        "lambda_bound": report.lambda_bound[1] if report.lambda_bound else None,
        "best_lower": report.best_lower,
        "local_dim_min": report.local_dim_min,
    }
    recs = [rec]
    for m, value, threshold in report.upper_bounds:
        recs.append({"kind": "upper_bound", "m": m, "value": value,
                     "threshold": threshold})
    for cand in report.local_dim_upper:
        recs.append({"kind": "local_dim_bound", "source": cand.source,
                     "m": cand.m, "value": cand.value,
                     "threshold": cand.threshold})
    return recs


def bound_report_table(report: BoundReport,
                       precision_bits: int = DEFAULT_PRECISION_BITS) -> str:
    lines = [f"beta = {real_repr(report.beta, precision_bits)}"]
    if report.kappa is not None:
        lines.append(f"kappa lower bound          {report.kappa:.6f}")
    if report.omega_bound:
        m, v = report.omega_bound
        lines.append(f"majority-generator bound   {v:.6f}  (m={m})")
    if report.lambda_bound:
        m, v = report.lambda_bound
        lines.append(f"pair-generator bound       {v:.6f}  (m={m})")
    if report.best_lower is not None:
        lines.append(f"best lower bound           {report.best_lower:.6f}")
    else:
        lines.append("best lower bound           (none applicable)")
    for m, value, threshold in report.upper_bounds:
        lines.append(f"upper rate bound           {value:.6f}  "
                     f"(m={m}, valid for beta > {threshold:.6f})")
    for cand in report.local_dim_upper:
        mtxt = f", m={cand.m}" if cand.m is not None else ""
        lines.append(f"local dim upper bound      {cand.value:.6f}  "
                     f"({cand.source}{mtxt})")
    if report.local_dim_min is not None:
        lines.append(f"local dim best upper       {report.local_dim_min:.6f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------- measure / growth

def measure_records(est: MeasureEstimate) -> list:
    return [{
        "kind": "measure",
        "interval": [est.interval[0], est.interval[1]],
        "value": est.value,
        "half_width": est.half_width,
        "method": est.method,
        "depth": est.depth,
        "seed": est.seed,
        "samples": est.samples,
    }]


def parse_measure_record(line: str) -> MeasureEstimate:
    rec = json.loads(line) if isinstance(line, str) else line
    if rec.get("kind") != "measure":
        raise ValueError("not a measure record")
    return MeasureEstimate(interval=(rec["interval"][0], rec["interval"][1]),
                           value=rec["value"], half_width=rec["half_width"],
                           depth=rec["depth"], method=rec["method"],
                           seed=rec.get("seed"), samples=rec.get("samples"))


def growth_records(est: GrowthEstimate) -> list:
    recs = [{"kind": "growth_point", "k": k, "log2_count": lc,
             "slope": lc / k}
            for k, lc in zip(est.k_values, est.log2_counts)]
    recs.append({"kind": "growth_summary", "lower_slope": est.lower_slope,
                 "upper_slope": est.upper_slope})
    return recs


def to_jsonl(records: list) -> str:
    return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in records)
