"""The harmonic threshold t(k) and its comparison with ceil(k/e).

``t(k)`` is the largest ``s`` with ``1/s + 1/(s+1) + ... + 1/k > 1``. All
comparisons are exact: harmonic tails are held as integer numerators over
the common denominator ``lcm(1..K)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from functools import lru_cache


class _HarmonicPrefix:
    """Integer prefix sums ``A[n] = sum_{i<=n} L/i`` with ``L = lcm(1..size)``."""

    def __init__(self, size: int):
        self.size = size
        self.lcm = math.lcm(*range(1, size + 1))
        acc, prefix = 0, [0]
        for i in range(1, size + 1):
            acc += self.lcm // i
            prefix.append(acc)
        self.prefix = prefix

    def tail_numerator(self, s: int, k: int) -> int:
        return self.prefix[k] - self.prefix[s - 1]


_prefix = _HarmonicPrefix(64)


def _prefix_for(k: int) -> _HarmonicPrefix:
    global _prefix
    if k > _prefix.size:
        size = _prefix.size
        while size < k:
            size *= 2
        _prefix = _HarmonicPrefix(size)
    return _prefix


def harmonic_tail(s: int, k: int) -> Fraction:
    """Exact value of ``1/s + ... + 1/k``."""
    if not 1 <= s <= k:
        raise ValueError(f"need 1 <= s <= k, got s={s}, k={k}")
    pre = _prefix_for(k)
    return Fraction(pre.tail_numerator(s, k), pre.lcm)


def tail_exceeds_one(s: int, k: int) -> bool:
    pre = _prefix_for(k)
    return pre.tail_numerator(s, k) > pre.lcm


def t_of_k(k: int) -> int:
    if k < 2:
        raise ValueError(f"t(k) is defined for k >= 2, got {k}")
    # the tail shrinks as s grows, so binary search for the last s above 1
    lo, hi = 1, k
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if tail_exceeds_one(mid, k):
            lo = mid
        else:
            hi = mid - 1
    return lo


@lru_cache(maxsize=None)
def _e_bounds(terms: int) -> tuple[Fraction, Fraction]:
    # sum_{n<terms} 1/n! <= e <= that sum + 2/terms!
    s, fact = Fraction(0), 1
    for n in range(terms):
        if n:
            fact *= n
        s += Fraction(1, fact)
    return s, s + Fraction(2, fact * terms)


def ceil_k_over_e(k: int) -> int:
    """``ceil(k/e)`` from rigorous rational bounds on e.

    ``k/e`` is never an integer because e is irrational, so doubling the
    number of series terms always separates the interval from the integers.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    terms = 32
    while True:
        e_lo, e_hi = _e_bounds(terms)
        lo, hi = Fraction(k) / e_hi, Fraction(k) / e_lo
        if math.ceil(lo) == math.ceil(hi):
            return math.ceil(lo)
        terms *= 2


@dataclass(frozen=True)
class ThresholdRow:
    k: int
    t: int
    ceil_k_over_e: int
    strict: bool

    def as_dict(self) -> dict:
        return asdict(self)


def threshold_table(k_min: int, k_max: int) -> list[ThresholdRow]:
    if not 2 <= k_min <= k_max:
        raise ValueError(f"need 2 <= k_min <= k_max, got {k_min}, {k_max}")
    _prefix_for(k_max)
    rows = []
    for k in range(k_min, k_max + 1):
        t, c = t_of_k(k), ceil_k_over_e(k)
        rows.append(ThresholdRow(k, t, c, t < c))
    return rows


def format_table(rows: list[ThresholdRow]) -> str:
    """Aligned text; an asterisk marks rows with t(k) < ceil(k/e)."""
    width = max(len(str(rows[-1].k)), 1) + 1
    lines = [f"{'k':>{width}}  ceil(k/e)  t(k)"]
    for r in rows:
        mark = "*" if r.strict else " "
        lines.append(f"{r.k:>{width}}{mark} {r.ceil_k_over_e:>9}  {r.t:>4}")
    return "\n".join(lines)
