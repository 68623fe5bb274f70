"""Terms and equations over the binary operators ``f`` and ``p``.

Atoms are plain integers: a positive ``i`` is the variable ``x<i>`` and a
negative ``-i`` is the frozen (Skolem) constant ``k<i>`` used by the prover.
Applications are :class:`App` tuples, so terms hash and compare cheaply.

An equation is implicitly universally closed.  Its *length* is the number of
variable occurrences on both sides.  Canonical equations number variables by
first occurrence (left to right, lhs then rhs) and take whichever orientation
is smaller under :func:`term_key`, so ``s = t`` and ``t = s`` coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, NamedTuple, Sequence, Union

OPS = ("f", "p")


class App(NamedTuple):
    op: str
    left: "Term"
    right: "Term"


Term = Union[int, App]


def var(i: int) -> int:
    if i < 1:
        raise ValueError("variable ids start at 1")
    return i


def is_var(t: Term) -> bool:
    return type(t) is int and t > 0


def is_const(t: Term) -> bool:
    return type(t) is int and t < 0


@lru_cache(maxsize=1 << 16)
def leaves(t: Term) -> int:
    if type(t) is int:
        return 1
    return leaves(t.left) + leaves(t.right)


def atoms(t: Term) -> Iterator[int]:
    """Leaves of ``t`` from left to right."""
    stack = [t]
    while stack:
        u = stack.pop()
        if type(u) is int:
            yield u
        else:
            stack.append(u.right)
            stack.append(u.left)


def variables(t: Term) -> set[int]:
    return {a for a in atoms(t) if a > 0}


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if type(t) is App:
        yield from subterms(t.left)
        yield from subterms(t.right)


def term_key(t: Term):
    """Total order: atoms before applications, ``f`` before ``p``, then structure."""
    if type(t) is int:
        return (0, t)
    return (1, t.op, term_key(t.left), term_key(t.right))


def print_term(t: Term) -> str:
    if type(t) is int:
        return f"x{t}" if t > 0 else f"k{-t}"
    return f"{t.op}({print_term(t.left)},{print_term(t.right)})"


class ParseError(ValueError):
    """Syntax error; ``offset`` is the 1-based character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str) -> None:
        self.skip()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            got = "end of input" if self.pos >= len(self.text) else repr(self.text[self.pos])
            raise ParseError(f"expected {ch!r}, got {got}", self.pos + 1)
        self.pos += 1

    def term(self) -> Term:
        self.skip()
        if self.pos >= len(self.text):
            raise ParseError("unexpected end of input", self.pos + 1)
        ch = self.text[self.pos]
        if ch in OPS:
            self.pos += 1
            self.expect("(")
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(")")
            return App(ch, left, right)
        if ch in "xk":
            start = self.pos
            self.pos += 1
            end = self.pos
            while end < len(self.text) and self.text[end].isdigit():
                end += 1
            if end == self.pos:
                raise ParseError("expected digits", self.pos + 1)
            ident = int(self.text[self.pos : end])
            if ident == 0:
                raise ParseError("atom id 0 is not allowed", start + 1)
            self.pos = end
            return ident if ch == "x" else -ident
        raise ParseError(f"unexpected {ch!r}", self.pos + 1)

    def done(self) -> None:
        self.skip()
        if self.pos != len(self.text):
            raise ParseError(f"trailing input {self.text[self.pos:]!r}", self.pos + 1)


def parse_term(text: str) -> Term:
    """Parse ``x<i>``, ``k<i>``, ``f(t,t)`` or ``p(t,t)``; whitespace is ignored."""
    parser = _Parser(text)
    t = parser.term()
    parser.done()
    return t


class Equation(NamedTuple):
    lhs: Term
    rhs: Term

    @property
    def length(self) -> int:
        return leaves(self.lhs) + leaves(self.rhs)

    @property
    def nvars(self) -> int:
        return len(variables(self.lhs) | variables(self.rhs))

    def __str__(self) -> str:
        return f"{print_term(self.lhs)} = {print_term(self.rhs)}"


def parse_equation(text: str) -> Equation:
    parser = _Parser(text)
    lhs = parser.term()
    parser.expect("=")
    rhs = parser.term()
    parser.done()
    return Equation(lhs, rhs)


def rename(t: Term, mapping: dict[int, int]) -> Term:
    """Apply an atom renaming, extending ``mapping`` with fresh ids in first-occurrence order."""
    if type(t) is int:
        if t not in mapping:
            mapping[t] = len(mapping) + 1
        return mapping[t]
    left = rename(t.left, mapping)
    return App(t.op, left, rename(t.right, mapping))


def _numbered(lhs: Term, rhs: Term) -> Equation:
    mapping: dict[int, int] = {}
    left = rename(lhs, mapping)
    return Equation(left, rename(rhs, mapping))


def equation_key(eq: Equation):
    return (term_key(eq.lhs), term_key(eq.rhs))


def canonicalize(lhs: Term, rhs: Term) -> Equation:
    a = _numbered(lhs, rhs)
    b = _numbered(rhs, lhs)
    return a if equation_key(a) <= equation_key(b) else b


def is_canonical(eq: Equation) -> bool:
    return canonicalize(eq.lhs, eq.rhs) == eq


# -- enumeration -------------------------------------------------------------

Shape = Union[None, tuple]


@lru_cache(maxsize=None)
def shapes(n: int) -> tuple[Shape, ...]:
    """Binary tree shapes with ``n`` leaves, smaller left subtree first."""
    if n == 1:
        return (None,)
    return tuple((a, b) for i in range(1, n) for a in shapes(i) for b in shapes(n - i))


def _internal(shape: Shape) -> int:
    return 0 if shape is None else 1 + _internal(shape[0]) + _internal(shape[1])


def _fill(shape: Shape, ops: Iterator[str], atoms_: Iterator[int]) -> Term:
    if shape is None:
        return next(atoms_)
    op = next(ops)
    left = _fill(shape[0], ops, atoms_)
    return App(op, left, _fill(shape[1], ops, atoms_))


def restricted_growth(n: int) -> Iterator[tuple[int, ...]]:
    """Set partitions of ``n`` positions as 1-based restricted growth strings, lexicographically."""

    def grow(prefix: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(1, top + 2):
            prefix.append(v)
            yield from grow(prefix, max(top, v))
            prefix.pop()

    if n:
        yield from grow([], 0)


def enumerate_formulas(length: int) -> list[Equation]:
    """All canonical equations with exactly ``length`` variable occurrences.

    Ordered by lhs leaf count, lhs shape, rhs shape, operator assignment
    (preorder, ``f`` before ``p``) and finally the variable pattern.
    """
    if length < 1:
        raise ValueError("length must be positive")
    corpus = []
    for a in range(1, length):
        for ls, rs in product(shapes(a), shapes(length - a)):
            inner = _internal(ls) + _internal(rs)
            for ops in product(OPS, repeat=inner):
                for pattern in restricted_growth(length):
                    op_iter, atom_iter = iter(ops), iter(pattern)
                    eq = Equation(_fill(ls, op_iter, atom_iter), _fill(rs, op_iter, atom_iter))
                    if is_canonical(eq):
                        corpus.append(eq)
    return corpus


def build_constant(i: int) -> Term:
    """Constant terms ``c(0) = p(f(x1,x1), f(x1,x1))``, ``c(i+1) = p(f(x1,x1), c(i))``."""
    if i < 0:
        raise ValueError("constant index must be non-negative")
    base = App("f", 1, 1)
    t = App("p", base, base)
    for _ in range(i):
        t = App("p", base, t)
    return t


@dataclass(frozen=True)
class AxiomSystem:
    """Subset of a fixed-length corpus; bit ``i`` of ``mask`` selects ``corpus[i]``."""

    mask: int
    axioms: tuple[Equation, ...]

    def __len__(self) -> int:
        return len(self.axioms)

    def without(self, i: int) -> tuple[Equation, ...]:
        return self.axioms[:i] + self.axioms[i + 1 :]

    def to_json(self) -> dict:
        return {"id": self.mask, "axioms": [str(a) for a in self.axioms]}


def system_from_mask(corpus: Sequence[Equation], mask: int) -> AxiomSystem:
    if not 0 <= mask < 1 << len(corpus):
        raise ValueError(f"mask {mask} out of range for a corpus of {len(corpus)}")
    return AxiomSystem(mask, tuple(eq for i, eq in enumerate(corpus) if mask >> i & 1))


def generate_axiom_systems(corpus: Sequence[Equation], limit: int | None = None) -> Iterator[AxiomSystem]:
    """Subsets of ``corpus`` by ascending bitmask, starting with the empty system."""
    if limit is not None and limit < 1:
        raise ValueError("limit must be positive")
    stop = 1 << len(corpus)
    if limit is not None:
        stop = min(stop, limit)
    for mask in range(stop):
        yield system_from_mask(corpus, mask)
