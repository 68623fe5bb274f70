"""Statistics over decision-time distributions.

A :class:`DecisionDistribution` counts how many items (machines, formulas)
were decided at each time ``t >= 1``; whatever was never decided is kept as
``undecided``.  Halting censuses and proof censuses both map onto it, so the
same timeout questions apply to either.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple


@dataclass(frozen=True)
class DecisionDistribution:
    label: str
    counts: dict[int, int]
    undecided: int
    total: int

    def __post_init__(self) -> None:
        if any(t < 1 or k < 0 for t, k in self.counts.items()):
            raise ValueError("counts need t >= 1 and non-negative values")
        if self.undecided < 0 or self.undecided + sum(self.counts.values()) != self.total:
            raise ValueError(f"{self.label}: undecided + sum(counts) != total")

    @property
    def decided(self) -> int:
        return self.total - self.undecided

    @property
    def times(self) -> list[int]:
        return sorted(t for t, k in self.counts.items() if k)

    def count(self, t: int) -> int:
        return self.counts.get(t, 0)

    @classmethod
    def from_census(cls, census, label: str | None = None) -> "DecisionDistribution":
        """View a :class:`~beaverlab.census.HaltingCensus` as a distribution."""
        return cls(label or f"({census.n},2) halting times", dict(census.counts), census.nonhalting, census.total)


class Unachievable(ValueError):
    """Raised when a target fraction exceeds what the distribution ever decides."""

    def __init__(self, gamma, max_fraction: Fraction):
        super().__init__(f"gamma={gamma} is unachievable; at most {max_fraction} ({float(max_fraction):.6g}) is decided")
        self.gamma = gamma
        self.max_fraction = max_fraction


def _denominator(d: DecisionDistribution, decided_only: bool) -> int:
    denom = d.decided if decided_only else d.total
    if denom == 0:
        raise ValueError("empty distribution")
    return denom


def cumulative_fraction(d: DecisionDistribution, t: int, decided_only: bool = False) -> Fraction:
    """Exact fraction decided by time ``t``."""
    if t < 1:
        raise ValueError("t must be at least 1")
    return Fraction(sum(k for s, k in d.counts.items() if s <= t), _denominator(d, decided_only))


def cumulative_curve(d: DecisionDistribution, decided_only: bool = False) -> dict[int, Fraction]:
    denom = _denominator(d, decided_only)
    out, acc = {}, 0
    for t in range(1, fbb(d) + 1):
        acc += d.count(t)
        out[t] = Fraction(acc, denom)
    return out


def optime(d: DecisionDistribution, gamma, decided_only: bool = False) -> int:
    """Smallest ``t`` by which at least a fraction ``gamma`` is decided."""
    gamma = Fraction(gamma)
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    denom = _denominator(d, decided_only)
    acc = 0
    for t in d.times:
        acc += d.counts[t]
        if Fraction(acc, denom) >= gamma:
            return t
    raise Unachievable(gamma, Fraction(acc, denom))


def fbb(d: DecisionDistribution) -> int:
    """Longest decision time that actually occurs."""
    if not d.times:
        raise ValueError("distribution has no decided entries")
    return d.times[-1]


def monotone_tail(d: DecisionDistribution) -> bool:
    """Whether counts never increase after the peak (over ``1..fbb``, gaps as zero)."""
    seq = [d.count(t) for t in range(1, fbb(d) + 1)]
    peak = seq.index(max(seq))
    return all(a >= b for a, b in zip(seq[peak:], seq[peak + 1 :]))


class ComparisonRow(NamedTuple):
    t: int
    a_fraction: Fraction
    b_fraction: Fraction
    a_cumulative: Fraction
    b_cumulative: Fraction


@dataclass(frozen=True)
class Comparison:
    a: str
    b: str
    rows: list[ComparisonRow]
    a_monotone_tail: bool
    b_monotone_tail: bool


def compare_distributions(a: DecisionDistribution, b: DecisionDistribution, decided_only: bool = False) -> Comparison:
    """Per-time and cumulative fractions for both distributions, aligned on ``t``."""
    da, db = _denominator(a, decided_only), _denominator(b, decided_only)
    rows = []
    acc_a = acc_b = 0
    for t in range(1, max(fbb(a), fbb(b)) + 1):
        acc_a += a.count(t)
        acc_b += b.count(t)
        if t in a.counts or t in b.counts:
            rows.append(
                ComparisonRow(t, Fraction(a.count(t), da), Fraction(b.count(t), db), Fraction(acc_a, da), Fraction(acc_b, db))
            )
    return Comparison(a.label, b.label, rows, monotone_tail(a), monotone_tail(b))


def optime_consistency(d: DecisionDistribution, gammas: Iterable = None) -> dict[str, bool]:
    """Check ``0 < optime <= fbb``, monotonicity in gamma, and ``optime(1) == fbb`` when nothing is undecided."""
    if gammas is None:
        gammas = [Fraction(i, 10) for i in range(1, 10)]
    decided = Fraction(d.decided, d.total)
    values = [optime(d, g) for g in sorted(map(Fraction, gammas)) if g <= decided]
    top = fbb(d)
    checks = {
        "bounded": all(0 < v <= top for v in values),
        "monotone": all(x <= y for x, y in zip(values, values[1:])),
    }
    if d.undecided == 0:
        checks["full_equals_fbb"] = optime(d, 1) == top
    else:
        try:
            optime(d, 1)
            checks["full_unachievable"] = False
        except Unachievable:
            checks["full_unachievable"] = True
    return checks
