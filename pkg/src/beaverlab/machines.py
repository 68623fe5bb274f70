"""Two-symbol Turing machines with a separate halting action.

A machine with ``n`` states has one table entry per (state, symbol) pair.
Each entry is either a halting action, which writes a symbol and stops with
the head in place, or a step, which writes, moves one cell and changes state.
That gives ``4n + 2`` possible actions per entry and ``(4n + 2) ** (2n)``
machines in total.

Machines are numbered by a mixed-radix code: the entries, in the order
(1, 0), (1, 1), (2, 0), ..., form the digits of the index in base ``4n + 2``,
most significant first.  Digit ``d`` decodes as::

    d = 0          -> Halt(write=0)
    d = 1          -> Halt(write=1)
    d = 2 + w*2n + m*n + (q - 1)  -> Step(write=w, move=(L, R)[m], next=q)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, NamedTuple, Union

#: Known values of the maximum halting time S(n) for two-symbol machines.
KNOWN_S = {1: 1, 2: 6, 3: 21, 4: 107}
#: Known values of the maximum number of ones Sigma(n).
KNOWN_SIGMA = {1: 1, 2: 4, 3: 6, 4: 13}

INT64_MAX = 2**63 - 1


class Move(Enum):
    LEFT = -1
    RIGHT = 1

    @property
    def letter(self) -> str:
        return "L" if self is Move.LEFT else "R"

    @classmethod
    def from_letter(cls, letter: str) -> "Move":
        try:
            return {"L": cls.LEFT, "R": cls.RIGHT}[letter]
        except KeyError:
            raise ValueError(f"invalid move {letter!r}") from None


class Halt(NamedTuple):
    write: int


class Step(NamedTuple):
    write: int
    move: Move
    next: int


Action = Union[Halt, Step]


def machine_count(n: int) -> int:
    """Number of machines in the (n, 2) space."""
    if n < 1:
        raise ValueError("state count must be at least 1")
    return (4 * n + 2) ** (2 * n)


def check_index_range(n: int) -> int:
    """Return ``machine_count(n)``, raising OverflowError if indexes do not fit int64."""
    count = machine_count(n)
    if count - 1 > INT64_MAX:
        raise OverflowError(f"(n={n}, 2) space has {count} machines; indexes overflow int64")
    return count


def decode_action(digit: int, n: int) -> Action:
    base = 4 * n + 2
    if not 0 <= digit < base:
        raise ValueError(f"digit {digit} out of range for n={n}")
    if digit < 2:
        return Halt(digit)
    d = digit - 2
    write, rest = divmod(d, 2 * n)
    move, nxt = divmod(rest, n)
    return Step(write, Move.RIGHT if move else Move.LEFT, nxt + 1)


def encode_action(action: Action, n: int) -> int:
    if isinstance(action, Halt):
        if action.write not in (0, 1):
            raise ValueError(f"bad halt symbol in {action}")
        return action.write
    if action.write not in (0, 1) or not 1 <= action.next <= n:
        raise ValueError(f"bad step {action} for n={n}")
    move = 1 if action.move is Move.RIGHT else 0
    return 2 + action.write * 2 * n + move * n + action.next - 1


@dataclass(frozen=True)
class TuringMachine:
    """Transition table of an ``n``-state, 2-symbol machine.

    ``table[2 * (state - 1) + symbol]`` is the action for ``(state, symbol)``.
    """

    n: int
    table: tuple[Action, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("state count must be at least 1")
        if len(self.table) != 2 * self.n:
            raise ValueError(f"expected {2 * self.n} table entries, got {len(self.table)}")
        for action in self.table:
            encode_action(action, self.n)  # validates

    def action(self, state: int, symbol: int) -> Action:
        return self.table[2 * (state - 1) + symbol]

    @classmethod
    def from_index(cls, index: int, n: int) -> "TuringMachine":
        return decode_machine(index, n)

    @property
    def index(self) -> int:
        return encode_machine(self)

    def to_text(self) -> str:
        return format_machine(self)


def decode_machine(index: int, n: int) -> TuringMachine:
    count = machine_count(n)
    if not 0 <= index < count:
        raise ValueError(f"index {index} out of range [0, {count}) for n={n}")
    base = 4 * n + 2
    digits = []
    for _ in range(2 * n):
        index, d = divmod(index, base)
        digits.append(d)
    digits.reverse()
    return TuringMachine(n, tuple(decode_action(d, n) for d in digits))


def encode_machine(m: TuringMachine) -> int:
    base = 4 * m.n + 2
    index = 0
    for action in m.table:
        index = index * base + encode_action(action, m.n)
    return index


def format_machine(m: TuringMachine) -> str:
    """One line per entry: ``q,s -> w,D,q'`` or ``q,s -> w,HALT``."""
    lines = []
    for i, action in enumerate(m.table):
        q, s = divmod(i, 2)
        if isinstance(action, Halt):
            rhs = f"{action.write},HALT"
        else:
            rhs = f"{action.write},{action.move.letter},{action.next}"
        lines.append(f"{q + 1},{s} -> {rhs}")
    return "\n".join(lines) + "\n"


def parse_machine(text: str) -> TuringMachine:
    entries: dict[tuple[int, int], Action] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            lhs, rhs = (part.strip() for part in line.split("->"))
            q, s = (int(x) for x in lhs.split(","))
            parts = [x.strip() for x in rhs.split(",")]
            if len(parts) == 2 and parts[1] == "HALT":
                action: Action = Halt(int(parts[0]))
            elif len(parts) == 3:
                action = Step(int(parts[0]), Move.from_letter(parts[1]), int(parts[2]))
            else:
                raise ValueError(rhs)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from exc
        entries[(q, s)] = action
    n = len(entries) // 2
    keys = [(q, s) for q in range(1, n + 1) for s in (0, 1)]
    if sorted(entries) != keys:
        raise ValueError("machine text must list every (state, symbol) entry exactly once")
    return TuringMachine(n, tuple(entries[k] for k in keys))


@dataclass
class Configuration:
    state: int = 1
    head: int = 0
    steps: int = 0
    tape: dict[int, int] = field(default_factory=dict)

    def read(self) -> int:
        return self.tape.get(self.head, 0)

    def copy(self) -> "Configuration":
        return Configuration(self.state, self.head, self.steps, dict(self.tape))


class HaltedAt(NamedTuple):
    config: Configuration


def step(m: TuringMachine, c: Configuration) -> Configuration | HaltedAt:
    """Apply one transition, returning a new configuration."""
    action = m.action(c.state, c.read())
    nxt = c.copy()
    nxt.steps += 1
    if action.write:
        nxt.tape[c.head] = action.write
    else:
        nxt.tape.pop(c.head, None)
    if isinstance(action, Halt):
        return HaltedAt(nxt)
    nxt.head += action.move.value
    nxt.state = action.next
    return nxt


class RunResult(NamedTuple):
    halted: bool
    steps: int
    ones: int
    output: str
    leftmost: int
    rightmost: int

    @property
    def status(self) -> str:
        return "Halted" if self.halted else "BudgetExceeded"


def trim_output(output: str) -> str:
    """Alternate output rule: strip blank cells from both ends."""
    return output.strip("0")


def trace(m: TuringMachine, budget: int) -> Iterator[Configuration | HaltedAt]:
    """Yield the configuration after every transition, up to ``budget`` steps."""
    c = Configuration()
    for _ in range(budget):
        c = step(m, c)
        yield c
        if isinstance(c, HaltedAt):
            return


def run(m: TuringMachine, budget: int | None = None) -> RunResult:
    """Run ``m`` on the empty tape for at most ``budget`` transitions.

    The halting transition counts as a step.  ``output`` is the tape over the
    interval of head positions visited (final halting cell included).
    """
    if budget is None:
        try:
            budget = KNOWN_S[m.n]
        except KeyError:
            raise ValueError(f"no default budget for n={m.n}; pass one explicitly") from None
    if budget < 1:
        raise ValueError("budget must be at least 1")
    tape: dict[int, int] = {}
    state, head, lo, hi = 1, 0, 0, 0
    table = m.table
    halted = False
    steps = 0
    while steps < budget:
        action = table[2 * (state - 1) + tape.get(head, 0)]
        steps += 1
        tape[head] = action.write
        if type(action) is Halt:
            halted = True
            break
        head += action.move.value
        state = action.next
        if head < lo:
            lo = head
        elif head > hi:
            hi = head
    output = "".join(str(tape.get(i, 0)) for i in range(lo, hi + 1))
    return RunResult(halted, steps, output.count("1"), output, lo, hi)
