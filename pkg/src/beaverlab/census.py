"""Exhaustive halting-time census of an (n, 2) machine space.

Machines are simulated in blocks of contiguous indexes with numpy: every
machine in a block advances one transition per pass, and rows drop out of
the working set as soon as they halt.  Blocks are folded into a
:class:`SpaceScan` accumulator whose merge is plain addition, so the result
does not depend on how the index range is split across workers.
"""

from __future__ import annotations

import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .machines import KNOWN_S, check_index_range, machine_count, trim_output

log = logging.getLogger(__name__)

BLOCK = 1 << 18
NONHALTING = None

#: Output-string rules for :func:`output_census`.
VISITED = "visited-extent"
TRIMMED = "trimmed"


def default_budget(n: int) -> int:
    try:
        return KNOWN_S[n]
    except KeyError:
        raise ValueError(f"no known S({n}); a budget must be given") from None


def _decode_tables(idx: np.ndarray, n: int):
    base = 4 * n + 2
    entries = 2 * n
    digits = np.empty((len(idx), entries), dtype=np.int64)
    rest = idx.copy()
    for j in range(entries - 1, -1, -1):
        digits[:, j] = rest % base
        rest //= base
    halt = digits < 2
    d = digits - 2
    write = np.where(halt, digits, d // (2 * n)).astype(np.int8)
    move = np.where(halt, 0, np.where((d // n) % 2 == 1, 1, -1))
    nxt = np.where(halt, 0, d % n)
    return halt, write, move, nxt


def simulate_block(n: int, budget: int, start: int, stop: int, outputs: bool = False) -> dict:
    """Run machines ``start..stop-1`` for up to ``budget`` steps.

    Returns arrays indexed by ``i - start``: ``steps`` (0 where the machine
    did not halt), ``ones``, and with ``outputs`` a ``key`` array encoding the
    visited-extent output as ``(1 << length) | bits`` (leftmost cell most
    significant; 0 for non-halters).
    """
    if outputs and budget > 62:
        raise ValueError("output tracking supports budgets up to 62")
    idx = np.arange(start, stop, dtype=np.int64)
    size = len(idx)
    halt, write, move, nxt = _decode_tables(idx, n)
    width = 2 * budget + 1
    tape = np.zeros((size, width), dtype=np.int8)
    head = np.full(size, budget, dtype=np.int64)
    state = np.zeros(size, dtype=np.int64)
    lo = head.copy()
    hi = head.copy()
    steps = np.zeros(size, dtype=np.int16)
    rows = np.arange(size)
    for t in range(1, budget + 1):
        if not len(rows):
            break
        h_rows = head[rows]
        entry = 2 * state[rows] + tape[rows, h_rows]
        tape[rows, h_rows] = write[rows, entry]
        halted = halt[rows, entry]
        steps[rows[halted]] = t
        keep = ~halted
        rows = rows[keep]
        entry = entry[keep]
        head[rows] += move[rows, entry]
        state[rows] = nxt[rows, entry]
        np.minimum(lo, head, out=lo)
        np.maximum(hi, head, out=hi)
    result = {"steps": steps, "ones": tape.sum(axis=1, dtype=np.int16) * (steps > 0)}
    if outputs:
        pos = np.arange(width)
        inside = (pos >= lo[:, None]) & (pos <= hi[:, None])
        shift = np.clip(hi[:, None] - pos, 0, 62)
        bits = (tape.astype(np.int64) << shift) * inside
        key = bits.sum(axis=1) | (np.int64(1) << (hi - lo + 1))
        result["key"] = np.where(steps > 0, key, 0)
    return result


def decode_output_key(key: int) -> str:
    length = key.bit_length() - 1
    return format(key ^ (1 << length), f"0{length}b") if length else ""


@dataclass
class SpaceScan:
    """Mergeable accumulator over a contiguous slice of one machine space."""

    n: int
    budget: int
    start: int
    stop: int
    counts: Counter = field(default_factory=Counter)
    max_steps: int = 0
    step_champions: list[int] = field(default_factory=list)
    max_ones: int = 0
    ones_champions: list[int] = field(default_factory=list)
    outputs: Counter | None = None
    runtimes: np.ndarray | None = None
    partial: bool = False

    def add_block(self, start: int, block: dict) -> None:
        steps = block["steps"]
        tally = np.bincount(steps, minlength=self.budget + 1)
        for t in np.flatnonzero(tally[1:]) + 1:
            self.counts[int(t)] += int(tally[t])
        top = int(steps.max())
        if top and top >= self.max_steps:
            found = (np.flatnonzero(steps == top) + start).tolist()
            if top > self.max_steps:
                self.max_steps, self.step_champions = top, found
            else:
                self.step_champions.extend(found)
        ones = block["ones"]
        halted = steps > 0
        if halted.any():
            top = int(ones[halted].max())
            if top >= self.max_ones:
                found = (np.flatnonzero(halted & (ones == top)) + start).tolist()
                if top > self.max_ones or not self.ones_champions:
                    self.max_ones, self.ones_champions = top, found
                else:
                    self.ones_champions.extend(found)
        if self.outputs is not None:
            keys, freq = np.unique(block["key"][halted], return_counts=True)
            for k, c in zip(keys.tolist(), freq.tolist()):
                self.outputs[k] += c
        if self.runtimes is not None:
            self.runtimes[start - self.start : start - self.start + len(steps)] = steps
        self.stop = max(self.stop, start + len(steps))

    def merge(self, other: "SpaceScan") -> "SpaceScan":
        """Concatenate ``other`` (the next contiguous slice) onto this scan."""
        if other.start != self.stop:
            raise ValueError("scans must be merged in index order")
        self.counts.update(other.counts)
        for attr, champs in (("max_steps", "step_champions"), ("max_ones", "ones_champions")):
            mine, theirs = getattr(self, attr), getattr(other, attr)
            if theirs > mine or (theirs == mine and not getattr(self, champs)):
                setattr(self, attr, theirs)
                setattr(self, champs, list(getattr(other, champs)))
            elif theirs == mine:
                getattr(self, champs).extend(getattr(other, champs))
        if self.outputs is not None and other.outputs is not None:
            self.outputs.update(other.outputs)
        if self.runtimes is not None and other.runtimes is not None:
            self.runtimes = np.concatenate([self.runtimes, other.runtimes])
        self.stop = other.stop
        self.partial = self.partial or other.partial
        return self

    @property
    def halting(self) -> int:
        return sum(self.counts.values())


def _scan_slice(args) -> SpaceScan:
    n, budget, start, stop, outputs, runtimes = args
    scan = SpaceScan(n, budget, start, start, outputs=Counter() if outputs else None)
    if runtimes:
        scan.runtimes = np.zeros(stop - start, dtype=np.int16)
    for lo in range(start, stop, BLOCK):
        hi = min(stop, lo + BLOCK)
        scan.add_block(lo, simulate_block(n, budget, lo, hi, outputs))
    return scan


def shard_bounds(total: int, shards: int) -> list[tuple[int, int]]:
    """Split ``range(total)`` into ``shards`` contiguous, nearly equal slices."""
    if shards < 1:
        raise ValueError("shards must be at least 1")
    edges = [total * i // shards for i in range(shards + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def scan_space(
    n: int,
    budget: int | None = None,
    shards: int = 1,
    *,
    outputs: bool = False,
    runtimes: bool = False,
    should_stop: Callable[[], bool] | None = None,
) -> SpaceScan:
    """Simulate every machine of the (n, 2) space once and accumulate results.

    ``should_stop`` is polled between blocks in single-worker mode; when it
    returns true the scan so far is returned with ``partial=True``.
    """
    if budget is None:
        budget = default_budget(n)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    total = check_index_range(n)
    if shards == 1:
        scan = SpaceScan(n, budget, 0, 0, outputs=Counter() if outputs else None)
        if runtimes:
            scan.runtimes = np.zeros(total, dtype=np.int16)
        for lo in range(0, total, BLOCK):
            if should_stop is not None and should_stop():
                log.warning("census of (%d,2) cancelled at index %d", n, lo)
                scan.partial = True
                return scan
            hi = min(total, lo + BLOCK)
            scan.add_block(lo, simulate_block(n, budget, lo, hi, outputs))
        return scan
    jobs = [(n, budget, a, b, outputs, runtimes) for a, b in shard_bounds(total, shards)]
    with ProcessPoolExecutor(max_workers=min(shards, os.cpu_count() or 1)) as pool:
        parts: Iterable[SpaceScan] = pool.map(_scan_slice, jobs)
        parts = list(parts)
    scan = parts[0]
    for part in parts[1:]:
        scan.merge(part)
    return scan


@dataclass(frozen=True)
class HaltingCensus:
    n: int
    budget: int
    counts: dict[int, int]
    nonhalting: int
    total: int
    partial: bool = False

    def __post_init__(self) -> None:
        if not self.partial and self.nonhalting + sum(self.counts.values()) != self.total:
            raise ValueError("census does not partition the machine space")

    @property
    def halting(self) -> int:
        return sum(self.counts.values())

    @property
    def max_time(self) -> int:
        return max(self.counts, default=0)

    @classmethod
    def from_scan(cls, scan: SpaceScan) -> "HaltingCensus":
        counts = {t: scan.counts[t] for t in sorted(scan.counts)}
        total = machine_count(scan.n)
        seen = scan.stop - scan.start
        return cls(scan.n, scan.budget, counts, seen - scan.halting, total, scan.partial)


def run_census(n: int, budget: int | None = None, shards: int = 1, **kwargs) -> HaltingCensus:
    return HaltingCensus.from_scan(scan_space(n, budget, shards, **kwargs))


def halting_probability(census: HaltingCensus, t: int | None) -> Fraction:
    """Exact fraction of machines halting at ``t`` (``None`` means non-halting)."""
    if census.partial:
        raise ValueError("census is partial")
    if t is NONHALTING:
        return Fraction(census.nonhalting, census.total)
    if not 1 <= t <= census.budget:
        raise ValueError(f"t={t} outside 1..{census.budget}")
    return Fraction(census.counts.get(t, 0), census.total)


def format_sig(x: Fraction | float, digits: int) -> str:
    """Decimal rendering with ``digits`` significant figures, trailing zeros kept."""
    x = float(x)
    if x == 0:
        return "0"
    text = f"{x:#.{digits}g}"
    if "e" in text:
        mantissa, exp = text.split("e")
        text = f"{float(text):.{max(0, digits - 1 - int(exp))}f}"
    return text.rstrip(".")


def cumulative_halting(census: HaltingCensus) -> dict[int, Fraction]:
    """Fraction of halting machines with halting time at most ``t``."""
    if not census.halting:
        raise ValueError("no halting machines")
    out = {}
    acc = 0
    for t in range(1, census.max_time + 1):
        acc += census.counts.get(t, 0)
        out[t] = Fraction(acc, census.halting)
    return out


@dataclass(frozen=True)
class BusyBeaverRecord:
    n: int
    budget: int
    S_observed: int
    Sigma_observed: int
    step_champions: tuple[int, ...]
    ones_champions: tuple[int, ...]

    @classmethod
    def from_scan(cls, scan: SpaceScan) -> "BusyBeaverRecord":
        return cls(
            scan.n,
            scan.budget,
            scan.max_steps,
            scan.max_ones,
            tuple(sorted(scan.step_champions)),
            tuple(sorted(scan.ones_champions)),
        )


def busy_beaver(n: int, budget: int | None = None, shards: int = 1) -> BusyBeaverRecord:
    return BusyBeaverRecord.from_scan(scan_space(n, budget, shards))


def fit_reference(t: int) -> float:
    """Reference curve ``100 * 2**(14 - t)`` for (3,2) halting counts."""
    return 100 * 2.0 ** (14 - t)


class FitRow(NamedTuple):
    t: int
    k_t: int
    fit: float
    ratio: float


def fit_table(census: HaltingCensus) -> list[FitRow]:
    """Observed counts next to :func:`fit_reference`, one row per occupied ``t``."""
    rows = []
    for t, k in sorted(census.counts.items()):
        if k:
            fit = fit_reference(t)
            rows.append(FitRow(t, k, fit, k / fit))
    return rows


@dataclass(frozen=True)
class OutputCensus:
    n: int
    budget: int
    rule: str
    outputs: dict[str, int]

    @property
    def distinct(self) -> int:
        return len(self.outputs)

    @property
    def longest(self) -> int:
        return max(map(len, self.outputs), default=0)

    @property
    def halting(self) -> int:
        return sum(self.outputs.values())

    def single_symbol(self) -> int:
        """Number of halting machines whose output is exactly "0" or "1"."""
        return self.outputs.get("0", 0) + self.outputs.get("1", 0)


def output_censuses(scan: SpaceScan) -> dict[str, OutputCensus]:
    """Both output-rule censuses from a scan run with ``outputs=True``."""
    if scan.outputs is None:
        raise ValueError("scan was run without output tracking")
    visited: Counter = Counter()
    trimmed: Counter = Counter()
    for key, count in scan.outputs.items():
        text = decode_output_key(key)
        visited[text] += count
        trimmed[trim_output(text)] += count
    def freeze(c):
        return dict(sorted(c.items(), key=lambda kv: (len(kv[0]), kv[0])))
    return {
        VISITED: OutputCensus(scan.n, scan.budget, VISITED, freeze(visited)),
        TRIMMED: OutputCensus(scan.n, scan.budget, TRIMMED, freeze(trimmed)),
    }


def output_census(n: int, budget: int | None = None, rule: str = VISITED, shards: int = 1) -> OutputCensus:
    if rule not in (VISITED, TRIMMED):
        raise ValueError(f"unknown output rule {rule!r}")
    return output_censuses(scan_space(n, budget, shards, outputs=True))[rule]
