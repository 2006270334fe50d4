import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from gamelogic.errors import NameClashError
from gamelogic.syntax.types import Vocabulary

_UNSAFE = re.compile(r"[^A-Za-z0-9_]")


def _identifier(base: str) -> str:
    name = _UNSAFE.sub("_", base)
    if not name or not (name[0].isalpha() or name[0] == "_"):
        name = f"T_{name}"
    return name


@dataclass(frozen=True)
class CellGeometry:
    """
    Where the machine tape lives. Cells are `arity`-tuples over the
    elements satisfying `cell_domain` (all elements when None), ordered
    lexicographically by the successor tape `cell_succ`. The encoded input
    is read from elements satisfying `source_domain`, ordered by
    `source_succ`.
    """

    arity: int
    cell_succ: str
    source_succ: str
    cell_domain: Optional[str] = None
    source_domain: Optional[str] = None
    source_excluded: bool = False


@dataclass
class CompilationLayout:
    """
    Generated tape predicates and labels of a compiled formula, keyed by
    role. Every generated name is distinct from the input vocabulary and
    from every other generated name.
    """

    input_vocab: Vocabulary
    cell_arity: int
    tapes: dict[str, tuple[str, int]] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)
    geometry: Optional[CellGeometry] = None

    @property
    def taken(self) -> set[str]:
        return (
            {s.name for s in self.input_vocab.symbols}
            | {n for n, _ in self.tapes.values()}
            | set(self.labels.values())
        )

    def _fresh(self, base: str) -> str:
        name = _identifier(base)
        taken = self.taken
        if name not in taken:
            return name
        suffix = 1
        while f"{name}_{suffix}" in taken:
            suffix += 1
        return f"{name}_{suffix}"

    def add_tape(self, role: str, arity: int, base: Optional[str] = None) -> str:
        if role in self.tapes:
            return self.tapes[role][0]
        name = self._fresh(base or role)
        self.tapes[role] = (name, arity)
        return name

    def add_label(self, role: str, base: Optional[str] = None) -> str:
        if role in self.labels:
            return self.labels[role]
        name = self._fresh(base or role)
        self.labels[role] = name
        return name

    def tape(self, role: str) -> str:
        return self.tapes[role][0]

    def label(self, role: str) -> str:
        return self.labels[role]

    def symbol_tape(self, symbol: str) -> str:
        return self.tape(f"X:{symbol}")

    def state_tape(self, state: str) -> str:
        return self.tape(f"Y:{state}")

    def successor_tapes(self) -> tuple[str, str, Optional[str]]:
        """
        The successor and order tapes Eloise builds over the input model,
        and the tape marking elements outside that model (if any).
        """
        if "N" in self.tapes:
            return self.tape("Sold"), self.tape("Sold_ord"), self.tape("N")
        return self.tape("S"), self.tape("Sord"), None

    def vocabulary(self) -> Vocabulary:
        """The input vocabulary extended with every generated tape."""
        return self.input_vocab.with_tapes(self.tapes.values())

    def check(self):
        """Raise `NameClashError` if a generated name shadows an input symbol."""
        inputs = {s.name for s in self.input_vocab.symbols}
        generated = [n for n, _ in self.tapes.values()] + list(self.labels.values())
        clashes = inputs.intersection(generated)
        if clashes or len(set(generated)) != len(generated):
            raise NameClashError(
                f"Generated names collide with the input vocabulary or each other: {sorted(clashes)}"
            )


def apspace_layout(
    vocab: Vocabulary,
    states: Iterable[str],
    symbols: Iterable[str],
    k: int,
) -> CompilationLayout:
    """Names for the construction over `(k+1)`-tuples of the input domain."""
    arity = k + 1
    layout = CompilationLayout(vocab.relations_only(), arity)
    succ = layout.add_tape("S", 2)
    layout.add_tape("Sord", 2)
    layout.add_tape("Placed", 1)
    layout.add_tape("Last", 1)
    _machine_tapes(layout, states, symbols, arity, {})
    _walk_tapes(layout, vocab)
    layout.geometry = CellGeometry(arity=arity, cell_succ=succ, source_succ=succ)
    _labels(layout)
    layout.check()
    return layout


def kexpspace_layout(
    vocab: Vocabulary, states: Iterable[str], symbols: Iterable[str]
) -> CompilationLayout:
    """Names for the construction over freshly inserted elements."""
    layout = CompilationLayout(vocab.relations_only(), 1)
    new = layout.add_tape("N", 1)
    succ = layout.add_tape("S", 2)
    layout.add_tape("LastN", 1)
    source_succ = layout.add_tape("Sold", 2)
    layout.add_tape("Sold_ord", 2)
    layout.add_tape("Placed", 1)
    layout.add_tape("Last", 1)
    _machine_tapes(layout, states, symbols, 1, {"0": "P0", "1": "P1"})
    _walk_tapes(layout, vocab)
    layout.geometry = CellGeometry(
        arity=1,
        cell_succ=succ,
        source_succ=source_succ,
        cell_domain=new,
        source_domain=new,
        source_excluded=True,
    )
    _labels(layout)
    layout.add_label("C_build")
    layout.add_label("C_chain")
    layout.check()
    return layout


def _machine_tapes(
    layout: CompilationLayout,
    states: Iterable[str],
    symbols: Iterable[str],
    arity: int,
    preferred: dict[str, str],
):
    layout.add_tape("Y", arity)
    for q in states:
        layout.add_tape(f"Y:{q}", arity, f"Y_{q}")
    for a in symbols:
        layout.add_tape(f"X:{a}", arity, preferred.get(a, f"X_{a}"))


def _walk_tapes(layout: CompilationLayout, vocab: Vocabulary):
    arity = layout.cell_arity
    for prefix in ("W", "V"):
        layout.add_tape(f"{prefix}Cur", arity)
        layout.add_tape(f"{prefix}SegDom", 0)
        layout.add_tape(f"{prefix}SegSep", 0)
        layout.add_tape(f"{prefix}PtrDom", 1)
        for symbol in vocab.relations:
            layout.add_tape(f"{prefix}Seg:{symbol.name}", 0, f"{prefix}Seg_{symbol.name}")
            layout.add_tape(
                f"{prefix}Ptr:{symbol.name}", symbol.arity, f"{prefix}Ptr_{symbol.name}"
            )
    layout.add_tape("WStarted", 0)
    layout.add_tape("WDone", 0)
    layout.add_tape("VTail", 0)


def _labels(layout: CompilationLayout):
    for role in ("C_succ", "C_ord", "C_enc", "C_loop"):
        layout.add_label(role)
    layout.add_label("C_chk:neg", "C_chk")
    layout.add_label("C_chk:pos", "C_chk")
