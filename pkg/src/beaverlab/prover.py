"""Bounded equational prover and disprover.

Goals are proven by freezing their variables into constants and searching
for a chain of single rewrites between the two sides: breadth-first from
both ends at once.  Disproofs come from finite countermodels.

Rewrite graph.  One step applies an axiom, either way round, at one position
of a term.  Variables that occur only on the side being introduced are drawn
from the *substitution pool*: subterms of the current term, subterms of the
frozen goal, and the goal's constants.  A step may only discard a binding
that is itself in the pool of the resulting term.  With both rules a step
can always be undone, so the graph is undirected and bidirectional search
returns true shortest paths.

Proof length.  Reflexive goals and instances of an axiom have length 1.  A
derivation found by search that uses ``r`` rewrites has length ``r + 1``, so
search never reports length 1.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .models import FiniteModel, search_model
from .stats import DecisionDistribution
from .terms import App, AxiomSystem, atoms, Equation, Term, leaves, print_term, subterms, variables

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecisionBudget:
    max_proof_steps: int = 17
    max_term_leaves: int = 16
    max_frontier: int = 200_000
    model_max_k: int = 3
    model_node_cap: int = 20_000

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if value < 1:
                raise ValueError(f"{name} must be positive")


class Proven(NamedTuple):
    length: int
    trace: tuple = ()


class Disproven(NamedTuple):
    model: FiniteModel
    t: int

    @property
    def k(self) -> int:
        return self.model.k


class Undecided(NamedTuple):
    proof_exhausted: bool = True
    models_exhausted: bool = True
    frontier_capped: bool = False
    node_capped: bool = False


class NotFound(NamedTuple):
    frontier_capped: bool = False
    depth_capped: bool = False


ProofResult = Union[Proven, Disproven, Undecided]


def status_code(result: ProofResult) -> str:
    """Cell code: ``P<length>``, ``D<model size>`` or ``U``."""
    if isinstance(result, Proven):
        return f"P{result.length}"
    if isinstance(result, Disproven):
        return f"D{result.k}"
    return "U"


def disproof_time(k: int) -> int:
    """Schedule round in which a size-``k`` countermodel is tried."""
    return max(1, k - 1)


# -- terms with frozen constants ---------------------------------------------------


def freeze(t: Term) -> Term:
    if type(t) is int:
        return -t
    return App(t.op, freeze(t.left), freeze(t.right))


def freeze_goal(goal: Equation) -> Equation:
    """Replace every variable ``x<i>`` by the constant ``k<i>``."""
    return Equation(freeze(goal.lhs), freeze(goal.rhs))


def match(pattern: Term, t: Term, subst: dict[int, Term]) -> bool:
    """Extend ``subst`` so that ``pattern`` instantiates to ``t``."""
    if type(pattern) is int:
        if pattern < 0:
            return pattern == t
        bound = subst.get(pattern)
        if bound is None:
            subst[pattern] = t
            return True
        return bound == t
    if type(t) is not App or t.op != pattern.op:
        return False
    return match(pattern.left, t.left, subst) and match(pattern.right, t.right, subst)


def instantiate(pattern: Term, subst: dict[int, Term]) -> Term:
    if type(pattern) is int:
        return subst[pattern] if pattern > 0 else pattern
    return App(pattern.op, instantiate(pattern.left, subst), instantiate(pattern.right, subst))


def is_instance(goal: Equation, axiom: Equation) -> bool:
    """True if ``goal`` (either orientation) is a substitution instance of ``axiom``."""
    for lhs, rhs in ((goal.lhs, goal.rhs), (goal.rhs, goal.lhs)):
        s: dict[int, Term] = {}
        if match(axiom.lhs, lhs, s) and match(axiom.rhs, rhs, s):
            return True
    return False


def subsumed(axioms: Sequence[Equation], goal: Equation) -> bool:
    frozen = freeze_goal(goal)
    return frozen.lhs == frozen.rhs or any(is_instance(frozen, a) for a in axioms)


class Rule(NamedTuple):
    source: Term
    target: Term
    introduced: tuple[int, ...]
    dropped: tuple[int, ...]
    axiom: int
    direction: str
    occurrences: tuple[tuple[int, int], ...] = ()
    size: int = 1


def _occurrences(t: Term) -> tuple[tuple[int, int], ...]:
    counts: dict[int, int] = {}
    for a in atoms(t):
        if a > 0:
            counts[a] = counts.get(a, 0) + 1
    return tuple(sorted(counts.items()))


def make_rules(axioms: Sequence[Equation]) -> list[Rule]:
    rules = []
    for i, ax in enumerate(axioms):
        lv, rv = variables(ax.lhs), variables(ax.rhs)
        for src, dst, sv, dv, d in ((ax.lhs, ax.rhs, lv, rv, "->"), (ax.rhs, ax.lhs, rv, lv, "<-")):
            if src == dst:
                continue
            rules.append(
                Rule(src, dst, tuple(sorted(dv - sv)), tuple(sorted(sv - dv)), i, d, _occurrences(dst), leaves(dst))
            )
    return rules


Position = tuple[int, ...]


def _positions(t: Term, pos: Position = ()) -> Iterator[tuple[Position, Term]]:
    yield pos, t
    if type(t) is App:
        yield from _positions(t.left, pos + (0,))
        yield from _positions(t.right, pos + (1,))


def _replace(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    if pos[0] == 0:
        return App(t.op, _replace(t.left, pos[1:], new), t.right)
    return App(t.op, t.left, _replace(t.right, pos[1:], new))


class Step(NamedTuple):
    result: Term
    axiom: int
    direction: str
    position: Position


def rewrite_steps(
    t: Term,
    rules: Sequence[Rule],
    max_leaves: int,
    base_pool: frozenset[Term] = frozenset(),
) -> Iterator[Step]:
    """Every single-rewrite successor of ``t`` within ``max_leaves``."""
    size = leaves(t)
    pool = None
    for pos, sub in _positions(t):
        room = max_leaves - (size - leaves(sub))
        for rule in rules:
            s: dict[int, Term] = {}
            if not match(rule.source, sub, s):
                continue
            # growth of the instantiated target over the bare pattern
            weights = dict(rule.occurrences)
            slack = room - rule.size - sum(n * (leaves(s[v]) - 1) for v, n in rule.occurrences if v in s)
            if slack < 0:
                continue
            if rule.introduced:
                if pool is None:
                    pool = sorted(((leaves(u) - 1, u) for u in base_pool.union(subterms(t))), key=_pool_order)
                bindings = _bounded(pool, [weights[v] for v in rule.introduced], slack)
            else:
                bindings = [()]
            for chosen in bindings:
                s.update(zip(rule.introduced, chosen))
                result = _replace(t, pos, instantiate(rule.target, s))
                if rule.dropped:
                    keep = base_pool.union(subterms(result))
                    if any(s[v] not in keep for v in rule.dropped):
                        continue
                yield Step(result, rule.axiom, rule.direction, pos)


def _bounded(pool: list[tuple[int, Term]], weights: list[int], slack: int) -> Iterator[tuple[Term, ...]]:
    """Tuples from ``pool`` (sorted by growth) whose weighted growth fits in ``slack``, in product order."""
    if not weights:
        yield ()
        return
    w = weights[0]
    for growth, u in pool:
        left = slack - w * growth
        if left < 0:
            break
        for rest in _bounded(pool, weights[1:], left):
            yield (u,) + rest


def _pool_order(item: tuple[int, Term]):
    return (item[0], print_term(item[1]))


def rewrite_neighbors(
    t: Term,
    axioms: Sequence[Equation],
    budget: DecisionBudget = DecisionBudget(),
    base_pool: frozenset[Term] = frozenset(),
) -> set[Term]:
    return {st.result for st in rewrite_steps(t, make_rules(axioms), budget.max_term_leaves, base_pool)}


def goal_pool(frozen: Equation) -> frozenset[Term]:
    return frozenset(subterms(frozen.lhs)) | frozenset(subterms(frozen.rhs))


class BidirectionalSearch:
    """Incremental shortest-path search between the two sides of a frozen goal.

    :meth:`advance` deepens the search until paths of ``rewrites`` steps
    have been ruled in or out.  Each side keeps a parent map so the
    connecting derivation can be printed.
    """

    def __init__(self, axioms: Sequence[Equation], goal: Equation, budget: DecisionBudget):
        frozen = freeze_goal(goal)
        self.rules = make_rules(axioms)
        self.budget = budget
        self.pool = goal_pool(frozen)
        self.sides = [
            {"seen": {frozen.lhs: None}, "frontier": [frozen.lhs], "depth": 0},
            {"seen": {frozen.rhs: None}, "frontier": [frozen.rhs], "depth": 0},
        ]
        self.meet: Term | None = frozen.lhs if frozen.lhs == frozen.rhs else None
        self.exhausted = False
        self.frontier_capped = False

    @property
    def rewrites(self) -> int:
        return self.sides[0]["depth"] + self.sides[1]["depth"]

    def advance(self, rewrites: int) -> Term | None:
        while self.meet is None and self.rewrites < rewrites and not (self.exhausted or self.frontier_capped):
            self._expand()
        return self.meet

    def _expand(self) -> None:
        a, b = self.sides
        side, other = (a, b) if len(a["frontier"]) <= len(b["frontier"]) else (b, a)
        if not side["frontier"]:
            self.exhausted = True
            return
        seen, other_seen = side["seen"], other["seen"]
        nxt = []
        cap = self.budget.max_frontier
        found = None
        for t in side["frontier"]:
            for st in rewrite_steps(t, self.rules, self.budget.max_term_leaves, self.pool):
                u = st.result
                if u in seen:
                    continue
                seen[u] = (t, st)
                nxt.append(u)
                if u in other_seen and found is None:
                    found = u
                if len(a["seen"]) + len(b["seen"]) > cap:
                    break
            if len(a["seen"]) + len(b["seen"]) > cap:
                break
        if found is None and len(a["seen"]) + len(b["seen"]) > cap:
            self.frontier_capped = True
            return
        side["frontier"] = nxt
        side["depth"] += 1
        if found is not None:
            self.meet = found
        elif not nxt:
            self.exhausted = True

    def derivation(self) -> list[str]:
        """Rewrite steps from lhs to rhs, one line each."""
        if self.meet is None:
            return []
        lines = []
        fwd = []
        node = self.meet
        while self.sides[0]["seen"][node] is not None:
            parent, st = self.sides[0]["seen"][node]
            fwd.append((parent, st, node))
            node = parent
        for parent, st, node in reversed(fwd):
            lines.append(_trace_line(parent, st, node, st.direction))
        node = self.meet
        while self.sides[1]["seen"][node] is not None:
            parent, st = self.sides[1]["seen"][node]
            back = "<-" if st.direction == "->" else "->"
            lines.append(_trace_line(node, st, parent, back))
            node = parent
        return lines


def _trace_line(src: Term, st: Step, dst: Term, direction: str) -> str:
    pos = ".".join(map(str, st.position)) or "root"
    return f"{print_term(src)}  --[axiom #{st.axiom + 1}, {direction}, {pos}]-->  {print_term(dst)}"


def prove(
    axioms: Sequence[Equation],
    goal: Equation,
    budget: DecisionBudget = DecisionBudget(),
    trace: bool = False,
) -> Proven | NotFound:
    """Shortest proof of ``goal`` from ``axioms`` within ``budget``."""
    axioms = _axiom_tuple(axioms)
    if subsumed(axioms, goal):
        return Proven(1)
    search = BidirectionalSearch(axioms, goal, budget)
    if search.advance(budget.max_proof_steps - 1) is not None:
        return Proven(search.rewrites + 1, tuple(search.derivation()) if trace else ())
    return NotFound(search.frontier_capped, not (search.exhausted or search.frontier_capped))


def _axiom_tuple(axioms) -> tuple[Equation, ...]:
    if isinstance(axioms, AxiomSystem):
        return axioms.axioms
    return tuple(axioms)


def decide(
    axioms: Sequence[Equation] | AxiomSystem,
    goal: Equation,
    budget: DecisionBudget = DecisionBudget(),
    trace: bool = False,
) -> ProofResult:
    """Interleave proof search and countermodel search; first success wins.

    Round 1 checks reflexivity and axiom instances, then models of size up to
    2 (a one-element model satisfies every equation).  Round ``d >= 2``
    searches for proofs of length ``d`` and then tries models of size
    ``d + 1``, while that is within ``model_max_k``.  A countermodel of size
    ``k`` therefore decides the goal at time ``k - 1``.
    """
    axioms = _axiom_tuple(axioms)
    if subsumed(axioms, goal):
        return Proven(1)
    node_capped = False

    def models(k: int) -> FiniteModel | None:
        nonlocal node_capped
        found = search_model(k, axioms, goal, budget.model_node_cap)
        node_capped |= found.capped
        return found.model

    for k in range(1, min(2, budget.model_max_k) + 1):
        m = models(k)
        if m is not None:
            return Disproven(m, disproof_time(k))
    search = BidirectionalSearch(axioms, goal, budget)
    for d in range(2, budget.max_proof_steps + 1):
        if search.advance(d - 1) is not None:
            return Proven(search.rewrites + 1, tuple(search.derivation()) if trace else ())
        k = d + 1
        if k <= budget.model_max_k:
            m = models(k)
            if m is not None:
                return Disproven(m, disproof_time(k))
        if (search.exhausted or search.frontier_capped) and k >= budget.model_max_k:
            break
    return Undecided(True, True, search.frontier_capped, node_capped)


# -- system-level checks --------------------------------------------------------

TRIVIAL_GOAL = Equation(1, 2)


class Consistent(NamedTuple):
    model: FiniteModel


class Inconsistent(NamedTuple):
    """``x1 = x2`` is derivable.  ``via`` names an inconsistent subsystem the verdict was inherited from."""

    length: int | None
    via: int | None = None


class Unknown(NamedTuple):
    pass


class Dependent(NamedTuple):
    length: int


class Independent(NamedTuple):
    model: FiniteModel


def is_consistent(system: Sequence[Equation] | AxiomSystem, budget: DecisionBudget = DecisionBudget()):
    """Nontriviality: a model with at least two elements, or a proof of ``x1 = x2``."""
    axioms = _axiom_tuple(system)
    found = search_model(2, axioms, None, budget.model_node_cap).model if budget.model_max_k >= 2 else None
    if found is not None:
        return Consistent(found)
    proof = prove(axioms, TRIVIAL_GOAL, budget)
    if isinstance(proof, Proven):
        return Inconsistent(proof.length)
    for k in range(3, budget.model_max_k + 1):
        found = search_model(k, axioms, None, budget.model_node_cap).model
        if found is not None:
            return Consistent(found)
    return Unknown()


def is_independent(system: Sequence[Equation] | AxiomSystem, budget: DecisionBudget = DecisionBudget()) -> list:
    """Per axiom: Dependent (derivable from the others), Independent (countermodel) or Unknown."""
    axioms = _axiom_tuple(system)
    if not axioms:
        raise ValueError("independence needs at least one axiom")
    out = []
    for i, a in enumerate(axioms):
        result = decide(axioms[:i] + axioms[i + 1 :], a, budget)
        if isinstance(result, Proven):
            out.append(Dependent(result.length))
        elif isinstance(result, Disproven):
            out.append(Independent(result.model))
        else:
            out.append(Unknown())
    return out


@dataclass
class SystemReport:
    system: AxiomSystem
    consistency: object
    independence: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return isinstance(self.consistency, Consistent)

    @property
    def independent(self) -> bool:
        return bool(self.independence) and all(isinstance(r, Independent) for r in self.independence)

    @property
    def usable(self) -> bool:
        return len(self.system) > 0 and self.consistent and self.independent

    def to_json(self) -> dict:
        data = self.system.to_json()
        data["consistent"] = type(self.consistency).__name__
        if isinstance(self.consistency, Inconsistent) and self.consistency.via is not None:
            data["via"] = self.consistency.via
        if isinstance(self.consistency, Consistent):
            data["witness"] = self.consistency.model.to_json()
        data["independence"] = [type(r).__name__ for r in self.independence]
        return data


def check_system(system: AxiomSystem, budget: DecisionBudget = DecisionBudget()) -> SystemReport:
    report = SystemReport(system, is_consistent(system, budget))
    if report.consistent and len(system):
        report.independence = is_independent(system, budget)
    return report


def filter_systems(systems: Iterable[AxiomSystem], budget: DecisionBudget = DecisionBudget()) -> list[SystemReport]:
    """:func:`check_system` over many systems, reusing inconsistency verdicts.

    A system containing an inconsistent system is itself inconsistent, so a
    mask with an already-checked inconsistent one-bit-smaller submask is
    marked inconsistent without a new proof search.  Systems visited in
    ascending mask order (as :func:`generate_axiom_systems` yields them)
    therefore inherit from every inconsistent proper subset.
    """
    known: dict[int, SystemReport] = {}
    out = []
    for system in systems:
        report = None
        bits = system.mask
        while bits:
            low = bits & -bits
            bits ^= low
            sub = known.get(system.mask ^ low)
            if sub is not None and isinstance(sub.consistency, Inconsistent):
                report = SystemReport(system, Inconsistent(None, sub.consistency.via or sub.system.mask))
                break
        if report is None:
            report = check_system(system, budget)
        known[system.mask] = report
        out.append(report)
    return out


@dataclass
class TruthSpace:
    """Decision results with ``cells[g][s]`` for corpus goal ``g`` and system ``s``."""

    systems: list[AxiomSystem]
    corpus: list[Equation]
    cells: list[list[ProofResult]]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.corpus), len(self.systems)

    def codes(self) -> list[list[str]]:
        return [[status_code(c) for c in row] for row in self.cells]

    def flat(self) -> Iterator[ProofResult]:
        for row in self.cells:
            yield from row


def _decide_column(args) -> list[ProofResult]:
    system, corpus, budget = args
    return [decide(system.axioms, g, budget) for g in corpus]


def truth_space(
    systems: Sequence[AxiomSystem],
    corpus: Sequence[Equation],
    budget: DecisionBudget = DecisionBudget(),
    workers: int = 1,
) -> TruthSpace:
    """Decide every corpus goal in every system (columns may run in parallel)."""
    systems, corpus = list(systems), list(corpus)
    jobs = [(s, corpus, budget) for s in systems]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(_decide_column, jobs))
    else:
        columns = [_decide_column(j) for j in jobs]
    cells = [[columns[s][g] for s in range(len(systems))] for g in range(len(corpus))]
    return TruthSpace(systems, corpus, cells)


def decision_time(result: ProofResult) -> int | None:
    if isinstance(result, Proven):
        return result.length
    if isinstance(result, Disproven):
        return result.t
    return None


def proof_census(space: TruthSpace, label: str = "proof lengths") -> DecisionDistribution:
    counts: dict[int, int] = {}
    undecided = 0
    for cell in space.flat():
        t = decision_time(cell)
        if t is None:
            undecided += 1
        else:
            counts[t] = counts.get(t, 0) + 1
    total = len(space.corpus) * len(space.systems)
    return DecisionDistribution(label, dict(sorted(counts.items())), undecided, total)
