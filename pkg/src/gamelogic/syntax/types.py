import json
from dataclasses import dataclass, field, fields, replace
from enum import StrEnum
from functools import cached_property
from typing import Iterable, Iterator, Optional

import tabulate

from gamelogic.syntax.clock import ClockTerm


class SymbolKind(StrEnum):
    relation = "rel"
    tape = "tape"


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: SymbolKind = SymbolKind.relation

    def __str__(self) -> str:
        return f"{self.kind} {self.name}/{self.arity}"


@dataclass(frozen=True)
class Vocabulary:
    """
    Input relations and tape predicates of a formula or model.

    `canonical_order` lists exactly the input-relation names; the binary
    encoding of a structure concatenates relations in this order.
    """

    symbols: tuple[Symbol, ...] = ()
    canonical_order: tuple[str, ...] = ()

    def __post_init__(self):
        names = [s.name for s in self.symbols]
        if len(names) != len(set(names)):
            raise ValueError(f"Duplicate symbol names in vocabulary: {names}")
        if any(s.arity < 0 for s in self.symbols):
            raise ValueError("Arities must be natural numbers.")
        inputs = {s.name for s in self.symbols if s.kind == SymbolKind.relation}
        if set(self.canonical_order) != inputs or len(self.canonical_order) != len(
            inputs
        ):
            raise ValueError(
                "The canonical order must list every input relation exactly once."
            )

    @classmethod
    def of(
        cls, symbols: Iterable[Symbol], order: Optional[Iterable[str]] = None
    ) -> "Vocabulary":
        """Build a vocabulary; the canonical order defaults to declaration order."""
        symbols = tuple(symbols)
        if order is None:
            order = (s.name for s in symbols if s.kind == SymbolKind.relation)
        return cls(symbols, tuple(order))

    @classmethod
    def parse_spec(cls, spec: str) -> "Vocabulary":
        """Parse the `P/1,R/2` shorthand used on the command line."""
        symbols = []
        for item in filter(None, (i.strip() for i in spec.split(","))):
            name, _, arity = item.partition("/")
            if not arity.isdigit():
                raise ValueError(f"Malformed vocabulary entry: {item!r}")
            symbols.append(Symbol(name.strip(), int(arity)))
        return cls.of(symbols)

    @cached_property
    def _by_name(self) -> dict[str, Symbol]:
        return {s.name: s for s in self.symbols}

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def get(self, name: str) -> Optional[Symbol]:
        return self._by_name.get(name)

    def arity(self, name: str) -> int:
        return self._by_name[name].arity

    def is_tape(self, name: str) -> bool:
        return self._by_name[name].kind == SymbolKind.tape

    @property
    def relations(self) -> tuple[Symbol, ...]:
        """Input relations in canonical order."""
        return tuple(self._by_name[n] for n in self.canonical_order)

    @property
    def tapes(self) -> tuple[Symbol, ...]:
        return tuple(s for s in self.symbols if s.kind == SymbolKind.tape)

    def merge(self, other: "Vocabulary") -> "Vocabulary":
        """
        Union of two vocabularies. Symbols present in both must agree;
        input relations of `other` are appended to the canonical order.
        """
        symbols = list(self.symbols)
        for s in other.symbols:
            mine = self.get(s.name)
            if mine is None:
                symbols.append(s)
            elif mine != s:
                raise ValueError(f"Conflicting declarations: {mine} and {s}")
        order = list(self.canonical_order) + [
            n for n in other.canonical_order if n not in self.canonical_order
        ]
        return Vocabulary(tuple(symbols), tuple(order))

    def with_tapes(self, tapes: Iterable[tuple[str, int]]) -> "Vocabulary":
        return self.merge(
            Vocabulary.of(Symbol(n, a, SymbolKind.tape) for n, a in tapes)
        )

    def relations_only(self) -> "Vocabulary":
        return Vocabulary(self.relations, self.canonical_order)


class NodeKind(StrEnum):
    true = "top"
    false = "bot"
    rel_atom = "atom"
    equals = "eq"
    loop_atom = "goto"
    neg = "not"
    conj = "and"
    disj = "or"
    exists = "exists"
    forall = "forall"
    insert_elem = "Ix"
    delete_elem = "Dx"
    insert_tuple = "ins"
    delete_tuple = "del"
    label = "loop"


ATOMIC_KINDS = frozenset(
    {
        NodeKind.true,
        NodeKind.false,
        NodeKind.rel_atom,
        NodeKind.equals,
        NodeKind.loop_atom,
    }
)
PREFIX_KINDS = frozenset(
    {
        NodeKind.exists,
        NodeKind.forall,
        NodeKind.insert_elem,
        NodeKind.delete_elem,
        NodeKind.insert_tuple,
        NodeKind.delete_tuple,
        NodeKind.label,
    }
)
CLOCKABLE_KINDS = frozenset({NodeKind.insert_elem, NodeKind.label})


@dataclass(frozen=True)
class Node:
    """
    One node of a formula tree.

    `name` is the relation symbol (atoms, ins, del) or the label name (loop,
    goto); `variables` the variable list (atoms, quantifiers, Ix, Dx, ins,
    del). `node_id` is -1 until the tree is numbered by `FormulaAst`.
    """

    kind: NodeKind
    children: tuple["Node", ...] = ()
    name: Optional[str] = None
    variables: tuple[str, ...] = ()
    clock: Optional[ClockTerm] = None
    node_id: int = -1
    location: Optional[tuple[int, int]] = field(default=None, compare=False)

    @property
    def child(self) -> "Node":
        return self.children[0]

    @property
    def variable(self) -> str:
        return self.variables[0]

    def walk(self) -> Iterator["Node"]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def _number(root: Node) -> Node:
    """Rebuild `root` with pre-order ids, children before parents."""
    order = list(root.walk())
    built: list[Node] = []
    for node_id in reversed(range(len(order))):
        node = order[node_id]
        children = tuple(built.pop() for _ in node.children)
        built.append(replace(node, children=children, node_id=node_id))
    return built[0]


def _same_node(a: Node, b: Node) -> bool:
    return (
        a.kind == b.kind
        and a.name == b.name
        and a.variables == b.variables
        and a.clock == b.clock
        and a.node_id == b.node_id
        and len(a.children) == len(b.children)
    )


@dataclass(frozen=True)
class FormulaAst:
    """A formula tree with pre-order node ids and its vocabulary."""

    root: Node
    vocab: Vocabulary = field(default_factory=Vocabulary)

    def __post_init__(self):
        object.__setattr__(self, "root", _number(self.root))

    @cached_property
    def nodes(self) -> tuple[Node, ...]:
        """Nodes indexed by id."""
        return tuple(self.root.walk())

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    @property
    def size(self) -> int:
        return len(self.nodes)

    @cached_property
    def labels(self) -> dict[str, int]:
        """Label name to the id of the first Label node carrying it."""
        found: dict[str, int] = {}
        for n in self.nodes:
            if n.kind == NodeKind.label and n.name not in found:
                assert n.name is not None
                found[n.name] = n.node_id
        return found

    @cached_property
    def clocked_nodes(self) -> tuple[int, ...]:
        return tuple(n.node_id for n in self.nodes if n.clock is not None)

    @cached_property
    def variables(self) -> frozenset[str]:
        return frozenset(v for n in self.nodes for v in n.variables)

    def structurally_equal(self, other: "FormulaAst") -> bool:
        if self.size != other.size:
            return False
        return all(_same_node(a, b) for a, b in zip(self.nodes, other.nodes))


class Severity(StrEnum):
    error = "error"
    warning = "warning"


@dataclass(frozen=True)
class Violation:
    severity: Severity
    code: str
    message: str
    node_id: Optional[int] = None

    def __str__(self) -> str:
        where = "" if self.node_id is None else f" (node {self.node_id})"
        return f"{self.severity}: {self.code}: {self.message}{where}"


@dataclass(frozen=True)
class FragmentReport:
    in_T_minus_Ix: bool
    in_T_pol: bool
    in_T_kexp: Optional[int]
    in_T_Ix_kexp: Optional[int]
    in_T_allexp: bool

    def to_dict(self) -> dict[str, bool | int | None]:
        return {i.name: getattr(self, i.name) for i in fields(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_table(self) -> str:
        rows = []
        for i in fields(self):
            value = getattr(self, i.name)
            if value is None:
                value = "-"
            rows.append([i.name, value])
        return tabulate.tabulate(rows, headers=["Fragment", "Member (least k)"])
