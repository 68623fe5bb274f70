"""``beaverlab`` command line.

Every file written is accompanied by ``<file>.manifest.json`` recording the
command, its parameters, SHA-256 hashes of inputs and outputs, the shard
count and the wall time.  Apart from the wall time, rerunning a command with
the same flags reproduces every output byte for byte.

Exit codes: 0 success, 2 usage, 3 index overflow, 10 undecided goal,
11 unachievable gamma.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .census import (
    TRIMMED,
    VISITED,
    BusyBeaverRecord,
    HaltingCensus,
    default_budget,
    output_censuses,
    scan_space,
)
from .fields import field_filename, render_field, render_matrix, render_spectrum_legend
from .io import (
    census_to_csv,
    census_to_json,
    corpus_from_text,
    corpus_to_text,
    distribution_from_csv,
    distribution_to_csv,
    load_fixture,
    model_to_json,
    systems_to_jsonl,
    truth_space_from_csv,
    truth_space_to_csv,
)
from .machines import KNOWN_S, KNOWN_SIGMA, HaltedAt, decode_machine, format_machine, machine_count, run, trace
from .prover import (
    DecisionBudget,
    Disproven,
    Proven,
    Undecided,
    decide,
    filter_systems,
    proof_census,
    truth_space,
)
from .stats import Unachievable, cumulative_fraction, fbb, optime
from .terms import ParseError, enumerate_formulas, generate_axiom_systems, parse_equation

FORMAT_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_OVERFLOW, EXIT_UNDECIDED, EXIT_UNACHIEVABLE = 0, 2, 3, 10, 11
REFERENCE_MILESTONES = {5: 0.9596, 9: 0.9922}


class UsageError(Exception):
    pass


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class Recorder:
    """Writes outputs and their manifests for one command invocation."""

    def __init__(self, command: str, params: dict, shards: int = 1):
        self.command = command
        self.params = params
        self.shards = shards
        self.inputs: dict[str, str] = {}
        self.start = time.perf_counter()

    def read_input(self, path: str) -> str:
        data = Path(path).read_bytes()
        self.inputs[str(path)] = _sha256(data)
        return data.decode("utf-8")

    def write(self, path: str | Path, data: str | bytes) -> None:
        path = Path(path)
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        raw = data.encode("utf-8") if isinstance(data, str) else data
        path.write_bytes(raw)
        manifest = {
            "command": self.command,
            "parameters": self.params,
            "format_version": FORMAT_VERSION,
            "beaverlab_version": __version__,
            "inputs": self.inputs,
            "output": {"path": str(path), "sha256": _sha256(raw)},
            "shards": self.shards,
            "wall_time": round(time.perf_counter() - self.start, 3),
        }
        Path(f"{path}.manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _shards(args) -> int:
    env = os.environ.get("BEAVER_SHARDS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"BEAVER_SHARDS must be an integer, got {env!r}") from None
    else:
        value = args.shards
    if value < 1:
        raise UsageError("shard count must be at least 1")
    return value


def _budget(args, n: int) -> int:
    if args.budget is not None:
        if args.budget < 1:
            raise UsageError("--budget must be at least 1")
        return args.budget
    if n not in KNOWN_S:
        raise UsageError(f"no known S({n}); pass --budget")
    return default_budget(n)


def _states(args) -> int:
    if args.states < 1:
        raise UsageError("--states must be at least 1")
    return args.states


def _emit(text: str, out: str | None, rec: Recorder) -> None:
    if out:
        rec.write(out, text)
    else:
        sys.stdout.write(text)


# -- tm ------------------------------------------------------------------------


def cmd_tm_census(args) -> int:
    n = _states(args)
    budget, shards = _budget(args, n), _shards(args)
    rec = Recorder("tm census", {"states": n, "budget": budget, "format": args.format}, shards)
    census = HaltingCensus.from_scan(scan_space(n, budget, shards))
    text = census_to_csv(census) if args.format == "csv" else census_to_json(census)
    _emit(text, args.out, rec)
    return EXIT_OK


def cmd_tm_bb(args) -> int:
    n = _states(args)
    budget, shards = _budget(args, n), _shards(args)
    rec = BusyBeaverRecord.from_scan(scan_space(n, budget, shards))
    print(f"states {n} budget {budget}")
    print(f"S_observed {rec.S_observed}")
    print(f"Sigma_observed {rec.Sigma_observed}")
    print(f"step champions ({len(rec.step_champions)}): {' '.join(map(str, rec.step_champions))}")
    print(f"ones champions ({len(rec.ones_champions)}): {' '.join(map(str, rec.ones_champions))}")
    for name, observed, table in (("S", rec.S_observed, KNOWN_S), ("Sigma", rec.Sigma_observed, KNOWN_SIGMA)):
        if n in table:
            verdict = "agree" if observed == table[n] else "disagree"
            print(f"{name}: observed {observed} vs known {table[n]}: {verdict}")
    return EXIT_OK


def cmd_tm_run(args) -> int:
    n = _states(args)
    total = machine_count(n)
    if not 0 <= args.index < total:
        raise UsageError(f"--index must lie in 0..{total - 1}")
    budget = _budget(args, n)
    m = decode_machine(args.index, n)
    if args.trace:
        sys.stdout.write(format_machine(m))
        for c in trace(m, budget):
            halted = isinstance(c, HaltedAt)
            cfg = c.config if halted else c
            lo = min([cfg.head, *cfg.tape]) if cfg.tape else cfg.head
            hi = max([cfg.head, *cfg.tape]) if cfg.tape else cfg.head
            tape = "".join(str(cfg.tape.get(i, 0)) for i in range(lo, hi + 1))
            state = "H" if halted else cfg.state
            print(f"step {cfg.steps}: state {state} head {cfg.head} tape[{lo}..{hi}] {tape}")
    r = run(m, budget)
    print(f"{r.status} steps={r.steps} ones={r.ones} output={r.output} extent=[{r.leftmost},{r.rightmost}]")
    return EXIT_OK


def cmd_tm_outputs(args) -> int:
    n = _states(args)
    budget, shards = _budget(args, n), _shards(args)
    rec = Recorder("tm outputs", {"states": n, "budget": budget}, shards)
    censuses = output_censuses(scan_space(n, budget, shards, outputs=True))
    for rule in (VISITED, TRIMMED):
        oc = censuses[rule]
        print(f"{rule}: distinct {oc.distinct} longest {oc.longest} single-symbol {oc.single_symbol()}")
    if args.dump:
        lines = ["rule,output,count"]
        for rule in (VISITED, TRIMMED):
            for out, k in sorted(censuses[rule].outputs.items(), key=lambda kv: (len(kv[0]), kv[0])):
                lines.append(f"{rule},{out},{k}")
        rec.write(args.dump, "\n".join(lines) + "\n")
    return EXIT_OK


# -- viz -----------------------------------------------------------------------


def _parse_crop(spec: str) -> tuple[int, int, int, int]:
    try:
        x, y, w, h = (int(v) for v in spec.split(","))
    except ValueError:
        raise UsageError("--crop expects x,y,width,height") from None
    return x, y, w, h


def _code_time(code: str) -> int:
    if code.startswith("P"):
        return int(code[1:])
    if code.startswith("D"):
        return max(1, int(code[1:]) - 1)
    return 0


def cmd_viz(args) -> int:
    rec = Recorder("viz", {k: getattr(args, k) for k in ("states", "budget", "truthspace", "order", "crop", "layout")})
    if (args.states is None) == (args.truthspace is None):
        raise UsageError("give exactly one of --states or --truthspace")
    if args.states is not None:
        n = _states(args)
        scan = scan_space(n, default_budget(n) if args.budget is None else args.budget, runtimes=True)
        S = int(scan.runtimes.max())
        try:
            image = render_field(scan.runtimes, max(S, 1), args.order)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        default_name = field_filename(n, image.order)
    else:
        _, _, codes = truth_space_from_csv(rec.read_input(args.truthspace))
        times = [[_code_time(c) for c in row] for row in codes]
        S = max((t for row in times for t in row), default=1)
        try:
            if args.layout == "matrix":
                image = render_matrix(times, S)
            else:
                image = render_field([t for row in times for t in row], S, args.order)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        default_name = "proof_field.ppm"
    if args.crop:
        try:
            image = image.crop(*_parse_crop(args.crop))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    out = args.out or default_name
    rec.write(out, image.to_ppm())
    if args.legend:
        rec.write(args.legend, render_spectrum_legend(max(S, 2)).to_ppm())
    print(f"wrote {out} ({image.width}x{image.height}, S={S})")
    return EXIT_OK


# -- logic ---------------------------------------------------------------------


def _logic_budget(args) -> DecisionBudget:
    try:
        return DecisionBudget(
            max_proof_steps=args.max_proof_steps,
            max_term_leaves=args.max_term_leaves,
            max_frontier=args.max_frontier,
            model_max_k=args.model_max_k,
            model_node_cap=args.model_node_cap,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _corpus(length: int):
    if length < 1:
        raise UsageError("--length must be positive")
    return enumerate_formulas(length)


def _sample(spec: str) -> int | None:
    if spec == "all":
        return None
    try:
        m = int(spec)
    except ValueError:
        raise UsageError("--sample expects a count or 'all'") from None
    if m < 1:
        raise UsageError("--sample must be positive")
    return m


def cmd_logic_formulas(args) -> int:
    rec = Recorder("logic formulas", {"length": args.length})
    _emit(corpus_to_text(_corpus(args.length)), args.out, rec)
    return EXIT_OK


def _filters(spec: str | None) -> set[str]:
    wanted = {s for s in (spec or "").split(",") if s}
    bad = wanted - {"consistent", "independent"}
    if bad:
        raise UsageError(f"unknown filter(s): {', '.join(sorted(bad))}")
    return wanted


def cmd_logic_systems(args) -> int:
    corpus = _corpus(args.length)
    limit = _sample(args.sample)
    wanted = _filters(args.filter)
    budget = _logic_budget(args)
    rec = Recorder("logic systems", {"length": args.length, "sample": args.sample, "filter": sorted(wanted)})
    systems = list(generate_axiom_systems(corpus, limit))
    if not wanted:
        _emit(systems_to_jsonl(s.to_json() for s in systems), args.out, rec)
        return EXIT_OK
    reports = filter_systems(systems, budget)
    kept = [
        r
        for r in reports
        if ("consistent" not in wanted or r.consistent) and ("independent" not in wanted or r.usable)
    ]
    _emit(systems_to_jsonl(r.to_json() for r in kept), args.out, rec)
    print(f"{len(kept)} of {len(systems)} systems pass {'+'.join(sorted(wanted))} (published L=4 sample: 607)", file=sys.stderr)
    return EXIT_OK


def cmd_logic_prove(args) -> int:
    rec = Recorder("logic prove", {"goal": args.goal})
    try:
        axioms = corpus_from_text(rec.read_input(args.axioms)) if args.axioms else []
        goal = parse_equation(args.goal)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    result = decide(axioms, goal, _logic_budget(args), trace=args.trace)
    if isinstance(result, Proven):
        print(f"PROVEN length={result.length}")
        for line in result.trace:
            print(line)
        return EXIT_OK
    if isinstance(result, Disproven):
        print(f"DISPROVEN k={result.k}")
        print(model_to_json(result.model), end="")
        return EXIT_OK
    assert isinstance(result, Undecided)
    print(f"UNDECIDED frontier_capped={result.frontier_capped} node_capped={result.node_capped}")
    return EXIT_UNDECIDED


def cmd_logic_census(args) -> int:
    corpus = _corpus(args.length)
    budget = _logic_budget(args)
    workers = _shards(args)
    rec = Recorder(
        "logic census",
        {"length": args.length, "sample": args.sample, "systems_limit": args.systems_limit, "budget": asdict(budget)},
        workers,
    )
    reports = filter_systems(generate_axiom_systems(corpus, _sample(args.sample)), budget)
    usable = [r.system for r in reports if r.usable]
    if args.systems_limit is not None:
        usable = usable[: args.systems_limit]
    space = truth_space(usable, corpus, budget, workers)
    dist = proof_census(space)
    out = Path(args.out)
    rec.write(out / "corpus.txt", corpus_to_text(corpus))
    rec.write(out / "systems.jsonl", systems_to_jsonl(r.to_json() for r in reports))
    rec.write(out / "truthspace.csv", truth_space_to_csv(space.codes(), corpus, [s.mask for s in usable]))
    rec.write(out / "distribution.csv", distribution_to_csv(dist))
    rows, cols = space.shape
    print(f"systems checked {len(reports)}, usable {len(usable)}, truth space {rows}x{cols}")
    print(f"decided {dist.decided} undecided {dist.undecided}")
    for t in dist.times:
        print(f"t={t}: {dist.count(t)}")
    for t, ref in REFERENCE_MILESTONES.items():
        if dist.decided:
            frac = float(cumulative_fraction(dist, t, decided_only=True))
            print(f"cumulative through t={t}: {frac:.4f} (published reference {ref:.4f})")
    return EXIT_OK


# -- optime --------------------------------------------------------------------


def cmd_optime(args) -> int:
    rec = Recorder("optime", {"dist": args.dist, "gamma": args.gamma})
    if Path(args.dist).exists():
        dist = distribution_from_csv(rec.read_input(args.dist))
    else:
        name = Path(args.dist).stem
        try:
            dist = load_fixture(name)
        except ValueError:
            raise UsageError(f"{args.dist}: no such file or fixture") from None
    try:
        gamma = Fraction(args.gamma)
    except ValueError:
        raise UsageError(f"bad gamma {args.gamma!r}") from None
    try:
        t = optime(dist, gamma, decided_only=args.decided_only)
    except Unachievable as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNACHIEVABLE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(t)
    if args.verbose:
        print(f"fbb {fbb(dist)}", file=sys.stderr)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _add_logic_budget(p: argparse.ArgumentParser) -> None:
    d = DecisionBudget()
    p.add_argument("--max-proof-steps", type=int, default=d.max_proof_steps)
    p.add_argument("--max-term-leaves", type=int, default=d.max_term_leaves)
    p.add_argument("--max-frontier", type=int, default=d.max_frontier)
    p.add_argument("--model-max-k", type=int, default=d.model_max_k)
    p.add_argument("--model-node-cap", type=int, default=d.model_node_cap)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beaverlab", description="Halting and proof-length censuses.")
    parser.add_argument("--version", action="version", version=f"beaverlab {__version__}")
    top = parser.add_subparsers(dest="group", required=True)

    tm = top.add_parser("tm", help="Turing machine spaces").add_subparsers(dest="cmd", required=True)
    for name, fn, helptext in (
        ("census", cmd_tm_census, "halting-time census"),
        ("bb", cmd_tm_bb, "busy beaver values and champions"),
        ("outputs", cmd_tm_outputs, "output-string census under both rules"),
    ):
        p = tm.add_parser(name, help=helptext)
        p.add_argument("--states", type=int, required=True)
        p.add_argument("--budget", type=int)
        p.add_argument("--shards", type=int, default=1)
        p.set_defaults(func=fn)
        if name == "census":
            p.add_argument("--out")
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "outputs":
            p.add_argument("--dump", help="write every distinct output to this CSV")
    p = tm.add_parser("run", help="run one machine")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_tm_run)

    p = top.add_parser("viz", help="render a runtime or proof-length field as PPM")
    p.add_argument("--states", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--truthspace")
    p.add_argument("--order", type=int)
    p.add_argument("--layout", choices=("curve", "matrix"), default="curve")
    p.add_argument("--crop", help="x,y,width,height")
    p.add_argument("--out")
    p.add_argument("--legend", help="also write the colour legend strip here")
    p.set_defaults(func=cmd_viz)

    logic = top.add_parser("logic", help="equational formulas and proofs").add_subparsers(dest="cmd", required=True)
    p = logic.add_parser("formulas", help="canonical formula corpus")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_logic_formulas)
    p = logic.add_parser("systems", help="axiom systems (subsets of the corpus)")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--sample", default="all")
    p.add_argument("--filter", help="comma list of consistent,independent")
    p.add_argument("--out")
    _add_logic_budget(p)
    p.set_defaults(func=cmd_logic_systems)
    p = logic.add_parser("prove", help="decide one goal")
    p.add_argument("--axioms", help="file with one equation per line")
    p.add_argument("--goal", required=True)
    p.add_argument("--trace", action="store_true")
    _add_logic_budget(p)
    p.set_defaults(func=cmd_logic_prove)
    p = logic.add_parser("census", help="truth space and proof-length distribution")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--sample", default="all")
    p.add_argument("--systems-limit", type=int, help="keep only the first usable systems")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    _add_logic_budget(p)
    p.set_defaults(func=cmd_logic_census)

    p = top.add_parser("optime", help="smallest time deciding a fraction gamma")
    p.add_argument("--dist", required=True, help="distribution CSV or fixture name (fig1, fig4, fig9)")
    p.add_argument("--gamma", required=True)
    p.add_argument("--decided-only", action="store_true", help="measure gamma against decided items only")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_optime)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"beaverlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OverflowError as exc:
        print(f"beaverlab: overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
