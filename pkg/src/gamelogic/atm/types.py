import logging
from dataclasses import dataclass, replace
from enum import StrEnum
from functools import cached_property
from typing import Callable, Optional

import pyparsing as pp

from gamelogic.errors import ClockOverflowError, MachineError, ParseError
from gamelogic.structure import encoding_length
from gamelogic.syntax.clock import ClockTerm, eval_clock_term
from gamelogic.syntax.parser import CLOCK, INTEGER
from gamelogic.syntax.render import render_clock
from gamelogic.syntax.types import Vocabulary

logger = logging.getLogger(name=__name__)

INPUT_ALPHABET = ("0", "1")
DEFAULT_BLANK = "_"


class StateKind(StrEnum):
    existential = "existential"
    universal = "universal"
    accept = "accept"
    reject = "reject"

    @property
    def halting(self) -> bool:
        return self in (StateKind.accept, StateKind.reject)


class Direction(StrEnum):
    left = "L"
    right = "R"

    @property
    def step(self) -> int:
        return -1 if self == Direction.left else 1


@dataclass(frozen=True)
class Transition:
    state: str
    read: str
    write: str
    direction: Direction
    target: str

    def __str__(self) -> str:
        return (
            f"delta ({self.state},{self.read}) -> "
            f"({self.write},{self.direction},{self.target})"
        )


@dataclass(frozen=True)
class SmallModelTable:
    """
    Verdicts for the models below size `n0`: the encodings (under the
    default element order) of every accepted model smaller than `n0`.
    """

    n0: int
    accepted: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError("n0 must be a natural number.")
        object.__setattr__(self, "accepted", frozenset(self.accepted))

    def covers(self, size: int) -> bool:
        return size < self.n0

    def verdict(self, encoding: str) -> bool:
        return encoding in self.accepted

    @classmethod
    def derive(
        cls,
        atm: "Atm",
        vocab: Vocabulary,
        n0: int,
        cells: Optional[Callable[[int], int]] = None,
    ) -> "SmallModelTable":
        """Run the simulator on every model smaller than `n0`."""
        from gamelogic.atm.simulate import reference_cells, simulate
        from gamelogic.structure import encode, enumerate_structures

        accepted = set()
        for size in range(n0):
            budget = reference_cells(atm, size, vocab, cells)
            for m in enumerate_structures(vocab, size):
                enc = encode(m)
                if simulate(atm, enc, budget):
                    accepted.add(enc)
        logger.debug(
            f"Derived a small-model table for {atm.name}: {len(accepted)} accepted below size {n0}."
        )
        return cls(n0, frozenset(accepted))

    def to_text(self) -> str:
        return f"small n0={self.n0} accept=[{', '.join(sorted(self.accepted))}]"


@dataclass(frozen=True)
class Atm:
    """
    An alternating Turing machine over the input alphabet {0, 1}.

    `states` keeps declaration order. The space bound is either the
    exponent `space_k` (space n^(k+1) on models of size n) or the clock
    term `space_clock`.
    """

    states: tuple[tuple[str, StateKind], ...]
    start: str
    transitions: tuple[Transition, ...] = ()
    name: str = "machine"
    blank: str = DEFAULT_BLANK
    extra_symbols: tuple[str, ...] = ()
    space_k: Optional[int] = None
    space_clock: Optional[ClockTerm] = None
    small: Optional[SmallModelTable] = None

    def __post_init__(self):
        names = [q for q, _ in self.states]
        if len(names) != len(set(names)):
            raise MachineError(f"Machine {self.name} declares a state twice.")
        if self.start not in names:
            raise MachineError(f"Unknown start state {self.start!r}.")
        if self.blank in INPUT_ALPHABET:
            raise MachineError("The blank must differ from the input symbols.")
        if self.space_k is not None and self.space_k < 0:
            raise MachineError("The space exponent must be a natural number.")
        symbols = set(self.symbols)
        kinds = dict(self.states)
        for t in self.transitions:
            if t.state not in kinds or t.target not in kinds:
                raise MachineError(f"Transition {t} mentions an unknown state.")
            if t.read not in symbols or t.write not in symbols:
                raise MachineError(f"Transition {t} uses an undeclared tape symbol.")
            if kinds[t.state].halting:
                raise MachineError(f"Halting state {t.state!r} has an outgoing transition.")
        missing = [
            (q, a)
            for q, kind in self.states
            if not kind.halting
            for a in self.symbols
            if not self.transitions_from(q, a)
        ]
        if missing:
            e = MachineError(f"Machine {self.name} is not normalized: no move for {missing}.")
            e.add_note("Every non-halting state needs a transition for every tape symbol.")
            raise e

    @cached_property
    def _kinds(self) -> dict[str, StateKind]:
        return dict(self.states)

    @cached_property
    def _table(self) -> dict[tuple[str, str], tuple[Transition, ...]]:
        table: dict[tuple[str, str], list[Transition]] = {}
        for t in self.transitions:
            table.setdefault((t.state, t.read), []).append(t)
        return {k: tuple(v) for k, v in table.items()}

    @property
    def state_names(self) -> tuple[str, ...]:
        return tuple(q for q, _ in self.states)

    def kind(self, state: str) -> StateKind:
        try:
            return self._kinds[state]
        except KeyError as e:
            raise MachineError(f"Unknown state {state!r}.") from e

    @property
    def symbols(self) -> tuple[str, ...]:
        """The tape alphabet; the blank comes last."""
        written = list(INPUT_ALPHABET)
        for a in self.extra_symbols:
            if a not in written and a != self.blank:
                written.append(a)
        return tuple(written) + (self.blank,)

    @property
    def written_symbols(self) -> tuple[str, ...]:
        return self.symbols[:-1]

    def transitions_from(self, state: str, symbol: str) -> tuple[Transition, ...]:
        return self._table.get((state, symbol), ())

    def space(self, n: int, clock_bit_cap: Optional[int] = None) -> int:
        """The promised number of tape cells on models of size `n`."""
        if self.space_clock is not None:
            return eval_clock_term(self.space_clock, n, clock_bit_cap)
        if self.space_k is not None:
            return n ** (self.space_k + 1)
        raise MachineError(f"Machine {self.name} declares no space bound.")

    def with_small(self, table: Optional[SmallModelTable]) -> "Atm":
        return replace(self, small=table)

    def to_text(self) -> str:
        lines = [f"machine {self.name}"]
        lines.extend(f"state {q} {kind}" for q, kind in self.states)
        lines.append(f"start {self.start}")
        if self.extra_symbols:
            lines.append(f"tape {' '.join(self.extra_symbols)}")
        lines.append(f"blank {self.blank}")
        if self.space_clock is not None:
            lines.append(f"space clock={render_clock(self.space_clock)}")
        elif self.space_k is not None:
            lines.append(f"space k={self.space_k}")
        lines.extend(str(t) for t in self.transitions)
        if self.small is not None:
            lines.append(self.small.to_text())
        return "\n".join(lines) + "\n"


def small_threshold(
    cells: Callable[[int], int], vocab: Vocabulary, horizon: int = 16
) -> int:
    """
    The least n0 >= 1 such that, for every size from n0 up to `horizon`,
    the tape has room for the encoding and one blank cell after it.
    """
    n0 = 1
    for n in range(horizon):
        try:
            room = cells(n)
        except ClockOverflowError:
            continue
        if room < encoding_length(n, vocab) + 1:
            n0 = max(n0, n + 1)
    return n0


# machine text format
_NAME = pp.Word(pp.alphas + "_", pp.alphanums + "_-").set_name("name")
_SYMBOL = pp.Word(pp.alphanums + "_$").set_name("tape symbol")
_KIND = pp.one_of("existential universal accept reject exists forall").set_parse_action(
    lambda t: {"exists": "existential", "forall": "universal"}.get(t[0], t[0])
)
_DIRECTION = pp.one_of("L R left right").set_parse_action(
    lambda t: Direction.left if t[0] in ("L", "left") else Direction.right
)
_LPAR, _RPAR, _COMMA, _EQ = map(pp.Suppress, "(),=")
_ARROW = pp.Suppress("->")


_STATEMENT_KEYWORDS = ("machine", "state", "start", "tape", "blank", "space", "delta", "small")
# symbol lists run until the next statement
_SYMBOL_LIST = pp.Group(
    pp.OneOrMore(~pp.MatchFirst([pp.Keyword(k) for k in _STATEMENT_KEYWORDS]) + _SYMBOL)
)


def _statement(keyword: str, body: pp.ParserElement) -> pp.ParserElement:
    return pp.Group(pp.Keyword(keyword) + body)


_STATEMENT = (
    _statement("machine", pp.Word(pp.printables))
    | _statement("state", _NAME + _KIND)
    | _statement("start", _NAME)
    | _statement("tape", _SYMBOL_LIST)
    | _statement("blank", _SYMBOL)
    | _statement(
        "space",
        (pp.Keyword("k") + _EQ + INTEGER) | (pp.Keyword("clock") + _EQ + CLOCK),
    )
    | _statement(
        "delta",
        _LPAR + _NAME + _COMMA + _SYMBOL + _RPAR + _ARROW
        + _LPAR + _SYMBOL + _COMMA + _DIRECTION + _COMMA + _NAME + _RPAR,
    )
    | _statement(
        "small",
        pp.Suppress(pp.Keyword("n0")) + _EQ + INTEGER
        + pp.Suppress(pp.Keyword("accept")) + _EQ
        + pp.Suppress("[") + pp.Group(pp.Opt(pp.DelimitedList(pp.Word("01")))) + pp.Suppress("]"),
    )
)
MACHINE = (pp.ZeroOrMore(_STATEMENT) + pp.StringEnd()).ignore(pp.python_style_comment)


def parse_machine(text: str) -> Atm:
    """
    Parse the machine text format:

    ```
    machine EVEN-ONES
    state even existential
    state acc accept
    start even
    space k=1
    delta (even,0) -> (0,R,even)
    small n0=3 accept=[0, 101]
    ```
    """
    try:
        statements = MACHINE.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise ParseError(f"Malformed machine: {e.msg}", e.lineno, e.col) from e

    fields: dict = {"states": [], "transitions": [], "extra_symbols": []}
    for statement in statements:
        keyword, *rest = statement
        match keyword:
            case "machine":
                fields["name"] = rest[0]
            case "state":
                fields["states"].append((rest[0], StateKind(rest[1])))
            case "start":
                fields["start"] = rest[0]
            case "tape":
                fields["extra_symbols"].extend(rest[0])
            case "blank":
                fields["blank"] = rest[0]
            case "space":
                if rest[0] == "k":
                    fields["space_k"] = rest[1]
                else:
                    fields["space_clock"] = rest[1]
            case "delta":
                state, read, write, direction, target = rest
                fields["transitions"].append(
                    Transition(state, read, write, direction, target)
                )
            case "small":
                fields["small"] = SmallModelTable(rest[0], frozenset(rest[1]))
    if "start" not in fields:
        raise ParseError("A machine needs a 'start' line.")
    fields["states"] = tuple(fields["states"])
    fields["transitions"] = tuple(fields["transitions"])
    fields["extra_symbols"] = tuple(fields["extra_symbols"])
    atm = Atm(**fields)
    logger.debug(
        f"Parsed machine {atm.name}: {len(atm.states)} states, {len(atm.transitions)} transitions."
    )
    return atm

