"""Finite models of equational theories over ``f`` and ``p``.

Two-element models are swept exhaustively and in bulk with numpy (256
table pairs).  Larger domains use a backtracking search over table cells in
which every ground instance of an axiom is a constraint watched on the first
cell it cannot yet evaluate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .terms import App, Equation, Term, variables

DEFAULT_NODE_CAP = 20_000


@dataclass(frozen=True)
class FiniteModel:
    k: int
    f: tuple[tuple[int, ...], ...]
    p: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for table in (self.f, self.p):
            if len(table) != self.k or any(len(row) != self.k for row in table):
                raise ValueError("tables must be k x k")
            if any(not 0 <= v < self.k for row in table for v in row):
                raise ValueError("table entries must lie in 0..k-1")

    def eval(self, t: Term, env: Sequence[int]) -> int:
        """Value of ``t`` with variable ``x<i>`` bound to ``env[i-1]``."""
        if type(t) is int:
            return env[t - 1]
        table = self.f if t.op == "f" else self.p
        return table[self.eval(t.left, env)][self.eval(t.right, env)]

    def assignments(self, eq: Equation) -> Iterator[tuple[int, ...]]:
        top = max(variables(eq.lhs) | variables(eq.rhs), default=0)
        return product(range(self.k), repeat=top)

    def satisfies(self, eq: Equation) -> bool:
        return all(self.eval(eq.lhs, env) == self.eval(eq.rhs, env) for env in self.assignments(eq))

    def falsifying_assignment(self, eq: Equation) -> tuple[int, ...] | None:
        for env in self.assignments(eq):
            if self.eval(eq.lhs, env) != self.eval(eq.rhs, env):
                return env
        return None

    def to_json(self) -> dict:
        return {"k": self.k, "f": [list(r) for r in self.f], "p": [list(r) for r in self.p]}

    @classmethod
    def from_json(cls, data: dict | str) -> "FiniteModel":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["k"], tuple(map(tuple, data["f"])), tuple(map(tuple, data["p"])))


def trivial_model() -> FiniteModel:
    return FiniteModel(1, ((0,),), ((0,),))


# -- exhaustive sweep ----------------------------------------------------------


@lru_cache(maxsize=None)
def _all_tables(k: int) -> np.ndarray:
    """Every k x k table, row-major digits most significant first."""
    cells = k * k
    codes = np.arange(k**cells)
    digits = np.empty((len(codes), cells), dtype=np.int8)
    for j in range(cells - 1, -1, -1):
        digits[:, j] = codes % k
        codes = codes // k
    return digits.reshape(-1, k, k)


def _sweep_eval(t: Term, F: np.ndarray, P: np.ndarray, env: np.ndarray) -> np.ndarray:
    if type(t) is int:
        return np.broadcast_to(env[:, t - 1], (len(F), len(env)))
    left = _sweep_eval(t.left, F, P, env)
    right = _sweep_eval(t.right, F, P, env)
    table = F if t.op == "f" else P
    rows = np.arange(len(table))[:, None]
    return table[rows, left, right]


class Sweep:
    """All ``k**(2*k*k)`` models of size ``k``, ordered by (f table, p table) code."""

    def __init__(self, k: int):
        if k ** (2 * k * k) > 1 << 20:
            raise ValueError(f"exhaustive sweep of k={k} is too large")
        self.k = k
        tables = _all_tables(k)
        m = len(tables)
        self.F = np.repeat(tables, m, axis=0)
        self.P = np.tile(tables, (m, 1, 1))

    def holds(self, eq: Equation) -> np.ndarray:
        """Boolean mask of models in which ``eq`` holds."""
        top = max(variables(eq.lhs) | variables(eq.rhs), default=0)
        env = np.array(list(product(range(self.k), repeat=top)), dtype=np.int64).reshape(-1, top)
        if top == 0:
            env = np.zeros((1, 0), dtype=np.int64)
        lhs = _sweep_eval(eq.lhs, self.F, self.P, env)
        rhs = _sweep_eval(eq.rhs, self.F, self.P, env)
        return (lhs == rhs).all(axis=1)

    def model(self, i: int) -> FiniteModel:
        to_t = lambda a: tuple(tuple(int(v) for v in row) for row in a)
        return FiniteModel(self.k, to_t(self.F[i]), to_t(self.P[i]))


@lru_cache(maxsize=4)
def sweep(k: int) -> Sweep:
    return Sweep(k)


@lru_cache(maxsize=1 << 14)
def _holds_cached(k: int, eq: Equation) -> np.ndarray:
    mask = sweep(k).holds(eq)
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=1 << 12)
def satisfying_mask(k: int, axioms: tuple[Equation, ...]) -> np.ndarray:
    mask = np.ones(len(sweep(k).F), dtype=bool)
    for ax in axioms:
        mask &= _holds_cached(k, ax)
    mask.setflags(write=False)
    return mask


# -- backtracking search -------------------------------------------------------


class _Search:
    """Find a size-``k`` model of ``axioms`` in which ``goal`` fails (or any model if ``goal`` is None).

    Cells are numbered ``op * k*k + a*k + b`` with op 0 for f and 1 for p.
    """

    UNSET = -1

    def __init__(self, k: int, axioms: Sequence[Equation], goal: Equation | None, node_cap: int):
        self.k = k
        self.cells = [self.UNSET] * (2 * k * k)
        self.node_cap = node_cap
        self.nodes = 0
        self.capped = False
        self.constraints: list[tuple[Term, Term, tuple[int, ...], bool]] = []
        for ax in axioms:
            top = max(variables(ax.lhs) | variables(ax.rhs), default=0)
            for env in product(range(k), repeat=top):
                self.constraints.append((ax.lhs, ax.rhs, env, True))
        self.goal = goal
        self.goal_envs: list[tuple[int, ...]] = []
        if goal is not None:
            top = max(variables(goal.lhs) | variables(goal.rhs), default=0)
            # domain permutations act transitively on assignments with the same
            # equality pattern, so restricted-growth assignments suffice
            self.goal_envs = [env for env in product(range(k), repeat=top) if _is_rgs(env)]

    def _eval(self, t: Term, env: tuple[int, ...]):
        """Value of ``t``, or ``(cell,)`` naming the first unset cell blocking evaluation."""
        if type(t) is int:
            return env[t - 1]
        a = self._eval(t.left, env)
        if type(a) is tuple:
            return a
        b = self._eval(t.right, env)
        if type(b) is tuple:
            return b
        cell = (0 if t.op == "f" else self.k * self.k) + a * self.k + b
        v = self.cells[cell]
        return (cell,) if v == self.UNSET else v

    def _check(self, c) -> object:
        """True if satisfied, False if violated, else the blocking cell index."""
        lhs, rhs, env, equal = c
        a = self._eval(lhs, env)
        if type(a) is tuple:
            return a[0]
        b = self._eval(rhs, env)
        if type(b) is tuple:
            return b[0]
        return (a == b) == equal

    def run(self) -> FiniteModel | None:
        for env in self.goal_envs or [None]:
            constraints = list(self.constraints)
            if env is not None:
                constraints.append((self.goal.lhs, self.goal.rhs, env, False))
            self.cells = [self.UNSET] * (2 * self.k * self.k)
            watches: dict[int, list] = {}
            ok = True
            for c in constraints:
                r = self._check(c)
                if r is False:
                    ok = False
                    break
                if r is not True:
                    watches.setdefault(r, []).append(c)
            if ok and self._solve(watches):
                return self._model()
            if self.capped:
                return None
        return None

    def _solve(self, watches: dict[int, list]) -> bool:
        if not watches:
            return True
        cell = max(watches, key=lambda c: (len(watches[c]), -c))
        pending = watches.pop(cell)
        for v in range(self.k):
            self.nodes += 1
            if self.nodes > self.node_cap:
                self.capped = True
                break
            self.cells[cell] = v
            moved: list[tuple[int, object]] = []
            ok = True
            for c in pending:
                r = self._check(c)
                if r is False:
                    ok = False
                    break
                if r is not True:
                    watches.setdefault(r, []).append(c)
                    moved.append((r, c))
            if ok and self._solve(watches):
                return True
            for r, c in moved:
                watches[r].pop()
                if not watches[r]:
                    del watches[r]
            if self.capped:
                break
        self.cells[cell] = self.UNSET
        watches[cell] = pending
        return False

    def _model(self) -> FiniteModel:
        k = self.k
        cells = [0 if v == self.UNSET else v for v in self.cells]
        f = tuple(tuple(cells[a * k + b] for b in range(k)) for a in range(k))
        p = tuple(tuple(cells[k * k + a * k + b] for b in range(k)) for a in range(k))
        return FiniteModel(k, f, p)


def _is_rgs(env: tuple[int, ...]) -> bool:
    top = -1
    for v in env:
        if v > top + 1:
            return False
        top = max(top, v)
    return True


@dataclass
class ModelSearch:
    """Outcome of a bounded model search: the model (or None) and whether the node cap was hit."""

    model: FiniteModel | None
    capped: bool = False
    nodes: int = 0


def search_model(
    k: int,
    axioms: Sequence[Equation],
    goal: Equation | None = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> ModelSearch:
    """Size-``k`` model of ``axioms`` falsifying ``goal`` (when given)."""
    axioms = tuple(axioms)
    if k == 1:
        m = trivial_model()
        ok = goal is None or m.satisfies(goal) is False
        return ModelSearch(m if ok else None)
    if k == 2:
        sat = satisfying_mask(2, axioms)
        if goal is not None:
            sat = sat & ~_holds_cached(2, goal)
        hits = np.flatnonzero(sat)
        return ModelSearch(sweep(2).model(int(hits[0])) if len(hits) else None)
    s = _Search(k, axioms, goal, node_cap)
    m = s.run()
    return ModelSearch(m, s.capped and m is None, s.nodes)


def find_countermodel(
    axioms: Sequence[Equation],
    goal: Equation,
    max_k: int = 3,
    node_cap: int = DEFAULT_NODE_CAP,
) -> FiniteModel | None:
    """Smallest model (sizes 1..max_k) of ``axioms`` in which ``goal`` fails."""
    if max_k < 1:
        raise ValueError("max_k must be at least 1")
    for k in range(1, max_k + 1):
        found = search_model(k, axioms, goal, node_cap).model
        if found is not None:
            return found
    return None


def is_countermodel(model: FiniteModel, axioms: Sequence[Equation], goal: Equation) -> bool:
    """Direct check: every axiom holds and the goal fails somewhere."""
    return all(model.satisfies(a) for a in axioms) and not model.satisfies(goal)
