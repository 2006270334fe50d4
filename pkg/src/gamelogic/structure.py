"""
Finite relational structures, the game state built on top of them, and the
binary encoding of structures.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional

import pyparsing as pp

from gamelogic.errors import ArityError, ParseError, RankError, UndeclaredSymbolError
from gamelogic.syntax.parser import DECLARATION, IDENT, INTEGER
from gamelogic.syntax.types import Symbol, SymbolKind, Vocabulary

logger = logging.getLogger(name=__name__)

Element = int
Row = tuple[Element, ...]
Relation = frozenset[Row]


def _check_rows(name: str, arity: int, rows: Iterable[Row], domain: Iterable[Element]):
    members = set(domain)
    for row in rows:
        if len(row) != arity:
            raise ArityError(f"Tuple {row} does not fit {name}/{arity}.")
        if not members.issuperset(row):
            raise ValueError(f"Tuple {row} of {name} leaves the domain.")


@dataclass(frozen=True)
class Structure:
    """
    A finite structure. `domain` lists element ids in increasing order;
    `interp` holds one relation per input symbol of `vocab`. Tape symbols
    in `vocab` are declarations only and carry no interpretation.
    """

    domain: tuple[Element, ...]
    vocab: Vocabulary
    interp: Mapping[str, Relation] = field(default_factory=dict)

    def __post_init__(self):
        if list(self.domain) != sorted(set(self.domain)):
            object.__setattr__(self, "domain", tuple(sorted(set(self.domain))))
        interp = {}
        for symbol in self.vocab.relations:
            rows = frozenset(self.interp.get(symbol.name, frozenset()))
            _check_rows(symbol.name, symbol.arity, rows, self.domain)
            interp[symbol.name] = rows
        unknown = set(self.interp) - set(interp)
        if unknown:
            raise UndeclaredSymbolError(
                f"Interpretation given for undeclared relation(s): {sorted(unknown)}"
            )
        object.__setattr__(self, "interp", interp)

    @classmethod
    def of_size(
        cls,
        size: int,
        vocab: Vocabulary,
        interp: Optional[Mapping[str, Iterable[Row]]] = None,
    ) -> "Structure":
        interp = interp or {}
        return cls(
            tuple(range(size)),
            vocab,
            {k: frozenset(tuple(r) for r in v) for k, v in interp.items()},
        )

    @property
    def size(self) -> int:
        return len(self.domain)

    def relation(self, name: str) -> Relation:
        return self.interp[name]

    def default_order(self) -> "ElementOrder":
        return ElementOrder(self.domain)

    def to_text(self) -> str:
        if self.domain != tuple(range(self.size)):
            return self.normalized().to_text()
        lines = [f"domain {self.size}"]
        lines.extend(f"{s.kind} {s.name}/{s.arity}" for s in self.vocab.relations)
        lines.extend(f"{s.kind} {s.name}/{s.arity}" for s in self.vocab.tapes)
        for s in self.vocab.relations:
            rows = ", ".join(
                "(" + ",".join(map(str, r)) + ")" for r in sorted(self.interp[s.name])
            )
            lines.append(f"{s.name} = {{{rows}}}")
        return "\n".join(lines) + "\n"

    def normalized(self) -> "Structure":
        """Rename the domain to 0..n-1, preserving the order of ids."""
        rename = {e: i for i, e in enumerate(self.domain)}
        return Structure(
            tuple(range(self.size)),
            self.vocab,
            {
                k: frozenset(tuple(rename[e] for e in r) for r in v)
                for k, v in self.interp.items()
            },
        )


@dataclass(frozen=True)
class ElementOrder:
    """A linear order listing every domain element exactly once."""

    order: tuple[Element, ...]

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise ValueError(f"Element order repeats elements: {self.order}")

    @cached_property
    def position(self) -> dict[Element, int]:
        return {e: i for i, e in enumerate(self.order)}

    def __len__(self) -> int:
        return len(self.order)

    def covers(self, domain: Iterable[Element]) -> bool:
        return set(domain) == set(self.order)


@dataclass(frozen=True)
class GameState:
    """
    A structure as it evolves during a play: the domain, every relation
    (input relations and tape predicates share `relations`), and the
    partial variable assignment. `next_id` is the next fresh element id.
    """

    vocab: Vocabulary
    domain: tuple[Element, ...]
    relations: Mapping[str, Relation]
    assignment: Mapping[str, Element]
    next_id: int

    @classmethod
    def initial(
        cls,
        structure: Structure,
        tapes: Iterable[Symbol] = (),
        assignment: Optional[Mapping[str, Element]] = None,
    ) -> "GameState":
        """The game state of `structure` with every tape predicate empty."""
        assignment = dict(assignment or {})
        missing = set(assignment.values()) - set(structure.domain)
        if missing:
            raise ValueError(f"Assignment targets outside the domain: {missing}")
        vocab = structure.vocab.merge(
            Vocabulary.of(Symbol(t.name, t.arity, SymbolKind.tape) for t in tapes)
        )
        relations: dict[str, Relation] = dict(structure.interp)
        for t in vocab.tapes:
            relations[t.name] = frozenset()
        return cls(
            vocab=vocab,
            domain=structure.domain,
            relations=relations,
            assignment=assignment,
            next_id=max(structure.domain, default=-1) + 1,
        )

    @property
    def structure(self) -> Structure:
        return Structure(
            self.domain,
            self.vocab,
            {s.name: self.relations[s.name] for s in self.vocab.relations},
        )

    @property
    def tapes(self) -> dict[str, Relation]:
        return {s.name: self.relations[s.name] for s in self.vocab.tapes}

    def holds(self, name: str, row: Row) -> bool:
        return row in self.relations[name]

    def value(self, variable: str) -> Optional[Element]:
        return self.assignment.get(variable)

    def assign(self, bindings: Mapping[str, Element]) -> "GameState":
        assignment = dict(self.assignment)
        assignment.update(bindings)
        return replace(self, assignment=assignment)

    def audit(self):
        """Raise `AssertionError` when the state breaks its invariants."""
        assert list(self.domain) == sorted(set(self.domain))
        assert all(e < self.next_id for e in self.domain)
        assert set(self.assignment.values()) <= set(self.domain)
        for symbol in self.vocab.symbols:
            _check_rows(
                symbol.name, symbol.arity, self.relations[symbol.name], self.domain
            )


def add_element(s: GameState) -> tuple[GameState, Element]:
    element = s.next_id
    return (
        replace(s, domain=s.domain + (element,), next_id=element + 1),
        element,
    )


def remove_element(s: GameState, e: Element) -> GameState:
    """
    Remove `e`, every tuple mentioning it, and every variable bound to it.
    """
    if e not in s.domain:
        raise ValueError(f"Element {e} is not in the domain.")
    relations = {
        name: frozenset(r for r in rows if e not in r) if rows else rows
        for name, rows in s.relations.items()
    }
    return replace(
        s,
        domain=tuple(x for x in s.domain if x != e),
        relations=relations,
        assignment={v: x for v, x in s.assignment.items() if x != e},
    )


def _checked_symbol(s: GameState, name: str, row: Row) -> Symbol:
    symbol = s.vocab.get(name)
    if symbol is None:
        raise UndeclaredSymbolError(f"'{name}' is not declared.")
    if symbol.arity != len(row):
        raise ArityError(f"Tuple {row} does not fit {name}/{symbol.arity}.")
    return symbol


def insert_tuple(s: GameState, name: str, row: Row) -> GameState:
    _checked_symbol(s, name, row)
    if row in s.relations[name]:
        return s
    relations = dict(s.relations)
    relations[name] = relations[name] | {row}
    return replace(s, relations=relations)


def delete_tuple(s: GameState, name: str, row: Row) -> GameState:
    _checked_symbol(s, name, row)
    if row not in s.relations[name]:
        return s
    relations = dict(s.relations)
    relations[name] = relations[name] - {row}
    return replace(s, relations=relations)


def tuple_rank(t: Row, o: ElementOrder) -> int:
    """Lexicographic rank of `t` among all tuples of its arity under `o`."""
    n = len(o)
    rank = 0
    for e in t:
        rank = rank * n + o.position[e]
    return rank


def rank_tuple(j: int, arity: int, o: ElementOrder) -> Row:
    n = len(o)
    if not 0 <= j < n**arity:
        raise RankError(f"Rank {j} is out of range for arity {arity} over {n} elements.")
    digits = []
    for _ in range(arity):
        j, digit = divmod(j, n)
        digits.append(o.order[digit])
    return tuple(reversed(digits))


def encoding_length(size: int, vocab: Vocabulary) -> int:
    return size + 1 + sum(size**s.arity for s in vocab.relations)


def encode(m: Structure, o: Optional[ElementOrder] = None) -> str:
    """
    `1` repeated |M| times, a `0`, then one bit per tuple of each relation
    in canonical order, tuples ranked lexicographically by `o`.
    """
    o = o or m.default_order()
    if not o.covers(m.domain):
        raise ValueError("The element order must list exactly the domain.")
    bits = ["1"] * m.size + ["0"]
    for symbol in m.vocab.relations:
        segment = ["0"] * (m.size**symbol.arity)
        for row in m.relation(symbol.name):
            segment[tuple_rank(row, o)] = "1"
        bits.extend(segment)
    return "".join(bits)


def decode(bits: str, vocab: Vocabulary) -> Structure:
    """
    Inverse of `encode` under the default order: the structure over
    0..n-1 whose encoding is `bits`.
    """
    size = len(bits) - len(bits.lstrip("1"))
    if len(bits) != encoding_length(size, vocab) or set(bits) - {"0", "1"}:
        raise ValueError(f"{bits!r} is not an encoding over {list(vocab.canonical_order)}.")
    o = ElementOrder(tuple(range(size)))
    offset = size + 1
    interp = {}
    for symbol in vocab.relations:
        width = size**symbol.arity
        segment = bits[offset : offset + width]
        interp[symbol.name] = frozenset(
            rank_tuple(j, symbol.arity, o) for j, bit in enumerate(segment) if bit == "1"
        )
        offset += width
    return Structure(tuple(range(size)), vocab, interp)


def count_structures(vocab: Vocabulary, size: int) -> int:
    return 2 ** sum(size**s.arity for s in vocab.relations)


def enumerate_structures(vocab: Vocabulary, size: int) -> Iterator[Structure]:
    """Every structure over `vocab` with domain 0..size-1."""
    domain = tuple(range(size))
    all_rows = [
        list(itertools.product(domain, repeat=s.arity)) for s in vocab.relations
    ]
    for masks in itertools.product(
        *(range(2 ** len(rows)) for rows in all_rows)
    ):
        interp = {
            s.name: frozenset(r for i, r in enumerate(rows) if mask >> i & 1)
            for s, rows, mask in zip(vocab.relations, all_rows, masks)
        }
        yield Structure(domain, vocab, interp)


def random_structure(vocab: Vocabulary, size: int, rng: random.Random) -> Structure:
    domain = tuple(range(size))
    return Structure(
        domain,
        vocab,
        {
            s.name: frozenset(
                r
                for r in itertools.product(domain, repeat=s.arity)
                if rng.random() < 0.5
            )
            for s in vocab.relations
        },
    )


_ROW = pp.Group(
    pp.Suppress("(") + pp.Opt(pp.DelimitedList(INTEGER)) + pp.Suppress(")")
) | pp.Group(INTEGER)
_DOMAIN = pp.Suppress(pp.Keyword("domain")) + INTEGER
_ASSIGNMENT = pp.Group(
    IDENT
    + pp.Suppress("=")
    + pp.Suppress("{")
    + pp.Group(pp.Opt(pp.DelimitedList(_ROW)))
    + pp.Suppress("}")
)
_MODEL = (
    _DOMAIN
    + pp.Group(pp.ZeroOrMore(DECLARATION))
    + pp.Group(pp.ZeroOrMore(_ASSIGNMENT))
    + pp.StringEnd()
).ignore(pp.python_style_comment)


def parse_structure(text: str) -> Structure:
    """
    Parse the line-oriented model format:

    ```
    domain 3
    rel E/2
    E = {(0,1), (1,2)}
    ```
    """
    try:
        size, declarations, relations = _MODEL.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise ParseError(f"Malformed model: {e.msg}", e.lineno, e.col) from e
    try:
        vocab = Vocabulary.of(declarations)
    except ValueError as e:
        raise ParseError(str(e)) from e
    interp: dict[str, list[Row]] = {}
    for name, rows in relations:
        if name in interp:
            raise ParseError(f"Relation '{name}' is interpreted twice.")
        symbol = vocab.get(name)
        if symbol is None or symbol.kind != SymbolKind.relation:
            raise UndeclaredSymbolError(f"'{name}' is not a declared input relation.")
        interp[name] = [tuple(r) for r in rows]
    try:
        return Structure.of_size(size, vocab, interp)
    except ValueError as e:
        raise ParseError(f"Malformed model: {e}") from e
