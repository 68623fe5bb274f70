"""Text formats for censuses, distributions, corpora, systems and truth spaces.

Census and distribution CSVs share one layout::

    t,k_t,p_kt
    1,2000,0.200000
    ...
    -,6544,0.654400

The last row holds the machines that never halted (or the goals that were
never decided).  Decimals carry 6 significant digits; the JSON variants keep
exact rationals as ``{"num": .., "den": ..}``.  Lines starting with ``#`` are
comments; a ``# label: ...`` comment names a distribution.
"""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .census import HaltingCensus, format_sig
from .machines import machine_count
from .models import FiniteModel
from .stats import DecisionDistribution
from .terms import AxiomSystem, Equation, parse_equation

CSV_HEADER = "t,k_t,p_kt"
SIG_DIGITS = 6
FIXTURES = ("fig1", "fig4", "fig9")


def rational(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def from_rational(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])


def _rows(counts: dict[int, int], times: Iterable[int], rest: int, total: int, comments: Sequence[str]) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(CSV_HEADER)
    for t in times:
        k = counts.get(t, 0)
        lines.append(f"{t},{k},{format_sig(Fraction(k, total), SIG_DIGITS)}")
    lines.append(f"-,{rest},{format_sig(Fraction(rest, total), SIG_DIGITS)}")
    return "\n".join(lines) + "\n"


def _parse_rows(text: str) -> tuple[dict[int, int], int, list[int], dict[str, str]]:
    """Counts, trailing count, row order and ``# key: value`` comments."""
    meta: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    if not body or body[0] != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    counts: dict[int, int] = {}
    order: list[int] = []
    rest = None
    for line in body[1:]:
        t, k, _ = line.split(",")
        if t == "-":
            rest = int(k)
        else:
            order.append(int(t))
            counts[int(t)] = int(k)
    if rest is None:
        raise ValueError("missing trailing '-' row")
    return counts, rest, order, meta


def census_to_csv(census: HaltingCensus) -> str:
    """Every ``t`` in ``1..budget`` (zeros included), then the non-halting row."""
    if census.partial:
        raise ValueError("refusing to write a partial census")
    return _rows(census.counts, range(1, census.budget + 1), census.nonhalting, census.total, ())


def census_from_csv(text: str) -> HaltingCensus:
    counts, rest, order, _ = _parse_rows(text)
    total = rest + sum(counts.values())
    n = next((n for n in range(1, 8) if machine_count(n) == total), None)
    if n is None:
        raise ValueError(f"{total} is not the size of any (n,2) space")
    budget = max(order, default=0)
    return HaltingCensus(n, budget, {t: k for t, k in counts.items() if k}, rest, total)


def census_to_json(census: HaltingCensus) -> str:
    data = {
        "n": census.n,
        "budget": census.budget,
        "total": census.total,
        "counts": [
            {"t": t, "k_t": census.counts.get(t, 0), "p": rational(Fraction(census.counts.get(t, 0), census.total))}
            for t in range(1, census.budget + 1)
        ],
        "nonhalting": {"k": census.nonhalting, "p": rational(Fraction(census.nonhalting, census.total))},
    }
    return json.dumps(data, indent=1) + "\n"


def census_from_json(text: str) -> HaltingCensus:
    data = json.loads(text)
    counts = {row["t"]: row["k_t"] for row in data["counts"] if row["k_t"]}
    return HaltingCensus(data["n"], data["budget"], counts, data["nonhalting"]["k"], data["total"])


def distribution_to_csv(d: DecisionDistribution, comments: Sequence[str] = ()) -> str:
    """Rows for ``1..fbb`` (zeros included) and the undecided row; the label goes in a comment."""
    top = max(d.times, default=0)
    return _rows(d.counts, range(1, top + 1), d.undecided, d.total, [f"label: {d.label}", *comments])


def distribution_from_csv(text: str, label: str | None = None) -> DecisionDistribution:
    counts, rest, _, meta = _parse_rows(text)
    total = rest + sum(counts.values())
    name = label or meta.get("label", "distribution")
    return DecisionDistribution(name, {t: k for t, k in sorted(counts.items()) if k}, rest, total)


def distribution_to_json(d: DecisionDistribution) -> str:
    data = {
        "label": d.label,
        "total": d.total,
        "counts": [{"t": t, "k_t": d.counts[t], "p": rational(Fraction(d.counts[t], d.total))} for t in d.times],
        "undecided": {"k": d.undecided, "p": rational(Fraction(d.undecided, d.total))},
    }
    return json.dumps(data, indent=1) + "\n"


def load_fixture(name: str) -> DecisionDistribution:
    """One of the shipped reference tables: ``fig1``, ``fig4`` or ``fig9``."""
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("beaverlab").joinpath("data", f"{name}.csv").read_text(encoding="utf-8")
    return distribution_from_csv(text)


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}")
    return resources.files("beaverlab").joinpath("data", f"{name}.csv").read_text(encoding="utf-8")


# -- logic files ---------------------------------------------------------------


def corpus_to_text(corpus: Sequence[Equation]) -> str:
    return "".join(f"{eq}\n" for eq in corpus)


def corpus_from_text(text: str) -> list[Equation]:
    return [parse_equation(line) for line in text.splitlines() if line.strip() and not line.startswith("#")]


def systems_to_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, separators=(", ", ": ")) + "\n" for r in records)


def systems_from_jsonl(text: str) -> list[AxiomSystem]:
    out = []
    for line in text.splitlines():
        if line.strip():
            data = json.loads(line)
            out.append(AxiomSystem(data["id"], tuple(parse_equation(a) for a in data["axioms"])))
    return out


def truth_space_to_csv(codes: Sequence[Sequence[str]], goals: Sequence[Equation], system_ids: Sequence[int]) -> str:
    """One row per goal; columns are system ids (bitmasks)."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["goal", *system_ids])
    for goal, row in zip(goals, codes):
        writer.writerow([str(goal), *row])
    return buf.getvalue()


def truth_space_from_csv(text: str) -> tuple[list[Equation], list[int], list[list[str]]]:
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or rows[0][0] != "goal":
        raise ValueError("missing truth-space header")
    ids = [int(x) for x in rows[0][1:]]
    goals = [parse_equation(r[0]) for r in rows[1:]]
    codes = [r[1:] for r in rows[1:]]
    return goals, ids, codes


def model_to_json(model: FiniteModel) -> str:
    return json.dumps(model.to_json(), separators=(",", ":")) + "\n"


def model_from_json(text: str) -> FiniteModel:
    return FiniteModel.from_json(text)
