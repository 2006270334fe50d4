"""
Formula pieces shared by the compilers.

Every tape update is guarded: `put` and `drop` let the verifier pick the
tuple and then check it against the intended variables, so a wrong pick
loses on the spot. Guards are always the left conjunct. First-order
guards may reuse bound variable names freely, since a play that enters a
guard never leaves it.
"""

from typing import Callable, Optional

from gamelogic.atm.layout import CellGeometry, CompilationLayout
from gamelogic.atm.types import Atm, Direction, StateKind, Transition
from gamelogic.structure import decode
from gamelogic.syntax.build import (
    atom,
    bot,
    conj,
    dele,
    disj,
    eq,
    exists,
    exists_many,
    forall,
    forall_many,
    goto,
    ins,
    label,
    neg,
    neq,
    top,
)
from gamelogic.syntax.types import Node, Vocabulary

Emit = Callable[[str, list[str], Node], Node]


def variables(prefix: str, count: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(1, count + 1)]


def put(tape: str, values: list[str], then: Node) -> Node:
    guards = variables("g", len(values))
    return ins(tape, guards, conj(*(eq(g, v) for g, v in zip(guards, values)), then))


def drop(tape: str, values: list[str], then: Node) -> Node:
    guards = variables("g", len(values))
    return dele(tape, guards, conj(*(eq(g, v) for g, v in zip(guards, values)), then))


def lex_next(
    xs: list[str],
    ys: list[str],
    succ: str,
    is_min: Callable[[str], Node],
    is_max: Callable[[str], Node],
) -> Node:
    """`ys` is the lexicographic successor of `xs` along `succ`."""
    cases = []
    for j in reversed(range(len(xs))):
        parts = [eq(xs[i], ys[i]) for i in range(j)]
        parts.append(atom(succ, xs[j], ys[j]))
        for i in range(j + 1, len(xs)):
            parts.extend([is_max(xs[i]), is_min(ys[i])])
        cases.append(conj(*parts))
    return disj(*cases)


def small_model_sentence(bits: str, vocab: Vocabulary) -> Node:
    """A sentence true exactly on the models isomorphic to `decode(bits)`."""
    m = decode(bits, vocab)
    xs = variables("x", m.size)
    literals = []
    for symbol in vocab.relations:
        rows = m.relation(symbol.name)
        for row in _rows(m.size, symbol.arity):
            a = atom(symbol.name, *(xs[e] for e in row))
            literals.append(a if row in rows else neg(a))
    if not xs:
        return conj(neg(exists("y", top())), *literals)
    distinct = [neq(xs[i], xs[j]) for i in range(len(xs)) for j in range(i + 1, len(xs))]
    covered = forall("y", disj(*(eq("y", x) for x in xs)))
    return exists_many(xs, conj(*distinct, covered, *literals))


def _rows(size: int, arity: int) -> list[tuple[int, ...]]:
    rows: list[tuple[int, ...]] = [()]
    for _ in range(arity):
        rows = [r + (e,) for r in rows for e in range(size)]
    return rows


def at_least(size: int) -> Node:
    """The domain has at least `size` elements."""
    xs = variables("x", size)
    if not xs:
        return top()
    return exists_many(
        xs, conj(*(neq(xs[i], xs[j]) for i in range(size) for j in range(i + 1, size)))
    )


class Gadgets:
    """Formula builders over the names of one `CompilationLayout`."""

    def __init__(self, layout: CompilationLayout):
        assert layout.geometry is not None
        self.layout = layout
        self.geometry: CellGeometry = layout.geometry
        self.vocab = layout.input_vocab

    def _tape(self, role: str) -> str:
        return self.layout.tape(role)

    # elements and cells
    def _member(self, domain: Optional[str], excluded: bool, x: str) -> list[Node]:
        if domain is None:
            return []
        a = atom(domain, x)
        return [neg(a) if excluded else a]

    def _cell_member(self, x: str) -> list[Node]:
        return self._member(self.geometry.cell_domain, False, x)

    def _source_member(self, x: str) -> list[Node]:
        g = self.geometry
        return self._member(g.source_domain, g.source_excluded, x)

    def cell_min(self, x: str) -> Node:
        return conj(*self._cell_member(x), neg(exists("w", atom(self.geometry.cell_succ, "w", x))))

    def cell_max(self, x: str) -> Node:
        return conj(*self._cell_member(x), neg(exists("w", atom(self.geometry.cell_succ, x, "w"))))

    def source_min(self, x: str) -> Node:
        return conj(
            *self._source_member(x), neg(exists("w", atom(self.geometry.source_succ, "w", x)))
        )

    def source_max(self, x: str) -> Node:
        return conj(
            *self._source_member(x), neg(exists("w", atom(self.geometry.source_succ, x, "w")))
        )

    def cells(self, prefix: str) -> list[str]:
        return variables(prefix, self.geometry.arity)

    def first_cell(self, cs: list[str]) -> Node:
        return conj(*(self.cell_min(c) for c in cs))

    def last_cell(self, cs: list[str]) -> Node:
        return conj(*(self.cell_max(c) for c in cs))

    def next_cell(self, cs: list[str], ds: list[str]) -> Node:
        return lex_next(cs, ds, self.geometry.cell_succ, self.cell_min, self.cell_max)

    def first_tuple(self, ps: list[str]) -> Node:
        return conj(*(self.source_min(p) for p in ps))

    def last_tuple(self, ps: list[str]) -> Node:
        return conj(*(self.source_max(p) for p in ps))

    def next_tuple(self, ps: list[str], qs: list[str]) -> Node:
        return lex_next(ps, qs, self.geometry.source_succ, self.source_min, self.source_max)

    # tape symbols
    def holds_only(self, symbol: str, cs: list[str]) -> Node:
        others = [
            neg(atom(name, *cs))
            for a, (name, _) in self._symbol_tapes().items()
            if a != symbol
        ]
        return conj(atom(self.layout.symbol_tape(symbol), *cs), *others)

    def blank(self, cs: list[str]) -> Node:
        return conj(*(neg(atom(name, *cs)) for name, _ in self._symbol_tapes().values()))

    def reads(self, atm: Atm, symbol: str, cs: list[str]) -> Node:
        if symbol == atm.blank:
            return self.blank(cs)
        return atom(self.layout.symbol_tape(symbol), *cs)

    def _symbol_tapes(self) -> dict[str, tuple[str, int]]:
        return {
            role.removeprefix("X:"): value
            for role, value in self.layout.tapes.items()
            if role.startswith("X:")
        }

    # successor relations
    def successor_builder(
        self,
        succ: str,
        order: str,
        excluded: Optional[str] = None,
    ) -> Node:
        """
        One round of the successor builder: Eloise appends an unplaced
        element `y` after the last placed one, then records `order(u, y)`
        for every earlier `u` before returning to the successor label.
        """
        placed, last = self._tape("Placed"), self._tape("Last")
        c_succ, c_ord = self.layout.label("C_succ"), self.layout.label("C_ord")
        own = [neg(atom(excluded, "y"))] if excluded else []
        ordering = label(
            c_ord,
            disj(
                conj(
                    forall("u", disj(neg(atom(placed, "u")), eq("u", "y"), atom(order, "u", "y"))),
                    goto(c_succ),
                ),
                exists(
                    "u",
                    conj(
                        atom(placed, "u"),
                        neq("u", "y"),
                        neg(atom(order, "u", "y")),
                        put(order, ["u", "y"], goto(c_ord)),
                    ),
                ),
            ),
        )
        first = conj(neg(exists("l", atom(last, "l"))), put(last, ["y"], goto(c_succ)))
        append = exists(
            "l",
            conj(
                atom(last, "l"),
                put(succ, ["l", "y"], drop(last, ["l"], put(last, ["y"], ordering))),
            ),
        )
        return exists(
            "y",
            conj(*own, neg(atom(placed, "y")), put(placed, ["y"], disj(first, append))),
        )

    @staticmethod
    def successor_sentence(succ: str, order: str, excluded: Optional[str] = None) -> Node:
        """`order` is a strict linear order and `succ` its successor relation."""

        def outside(*vs: str) -> list[Node]:
            return [atom(excluded, v) for v in vs] if excluded else []

        def between(x: str, y: str) -> Node:
            inside = [neg(atom(excluded, "z"))] if excluded else []
            return exists("z", conj(*inside, atom(order, x, "z"), atom(order, "z", y)))

        irreflexive = forall("x", disj(*outside("x"), neg(atom(order, "x", "x"))))
        transitive = forall_many(
            ["x", "y", "z"],
            disj(
                *outside("x", "y", "z"),
                neg(atom(order, "x", "y")),
                neg(atom(order, "y", "z")),
                atom(order, "x", "z"),
            ),
        )
        total = forall_many(
            ["x", "y"],
            disj(*outside("x", "y"), eq("x", "y"), atom(order, "x", "y"), atom(order, "y", "x")),
        )
        successor = forall_many(
            ["x", "y"],
            disj(
                *outside("x", "y"),
                conj(
                    disj(neg(atom(succ, "x", "y")), conj(atom(order, "x", "y"), neg(between("x", "y")))),
                    disj(atom(succ, "x", "y"), neg(atom(order, "x", "y")), between("x", "y")),
                ),
            ),
        )
        return conj(irreflexive, transitive, total, successor)

    # encoding walks
    def walk_start(self, prefix: str, then: Node) -> Node:
        """Put the cursor on the first cell and the pointer on the first element."""
        cs = self.cells("c")
        return exists_many(
            cs,
            conj(
                self.first_cell(cs),
                put(
                    self._tape(f"{prefix}Cur"),
                    cs,
                    exists(
                        "p1",
                        conj(
                            self.source_min("p1"),
                            put(
                                self._tape(f"{prefix}PtrDom"),
                                ["p1"],
                                ins(self._tape(f"{prefix}SegDom"), [], then),
                            ),
                        ),
                    ),
                ),
            ),
        )

    def walk_step(
        self,
        prefix: str,
        emit: Emit,
        finish: Callable[[list[str]], Node],
        again: Node,
        extra: tuple[Callable[[list[str]], Node], ...] = (),
    ) -> Node:
        """
        One step along the encoding: at the cursor cell emit the bit the
        current segment dictates, then advance pointer and cursor. `emit`
        writes or checks the bit; `finish` runs after the last bit.
        """
        cs, ds = self.cells("c"), self.cells("d")
        tape = lambda role: self._tape(f"{prefix}{role}")  # noqa: E731

        def advance(then: Node) -> Node:
            return exists_many(
                ds,
                conj(
                    self.next_cell(cs, ds),
                    drop(tape("Cur"), cs, put(tape("Cur"), ds, then)),
                ),
            )

        relations = self.vocab.relations

        def enter(index: int) -> Node:
            if index == len(relations):
                return finish(cs)
            symbol = relations[index]
            flag = tape(f"Seg:{symbol.name}")
            if symbol.arity == 0:
                return ins(flag, [], advance(again))
            ps = variables("p", symbol.arity)
            return ins(
                flag,
                [],
                exists_many(
                    ps,
                    conj(self.first_tuple(ps), put(tape(f"Ptr:{symbol.name}"), ps, advance(again))),
                ),
            )

        dom_flag, sep_flag, dom_ptr = tape("SegDom"), tape("SegSep"), tape("PtrDom")
        succ = self.geometry.source_succ
        cases = [
            conj(
                atom(dom_flag),
                exists(
                    "p1",
                    conj(
                        atom(dom_ptr, "p1"),
                        emit(
                            "1",
                            cs,
                            disj(
                                conj(
                                    neg(self.source_max("p1")),
                                    exists(
                                        "q1",
                                        conj(
                                            atom(succ, "p1", "q1"),
                                            drop(dom_ptr, ["p1"], put(dom_ptr, ["q1"], advance(again))),
                                        ),
                                    ),
                                ),
                                conj(
                                    self.source_max("p1"),
                                    drop(
                                        dom_ptr,
                                        ["p1"],
                                        dele(dom_flag, [], ins(sep_flag, [], advance(again))),
                                    ),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
            conj(atom(sep_flag), emit("0", cs, dele(sep_flag, [], enter(0)))),
        ]
        for index, symbol in enumerate(relations):
            flag = tape(f"Seg:{symbol.name}")
            leave = dele(flag, [], enter(index + 1))
            if symbol.arity == 0:
                body = self._bit(symbol.name, [], cs, emit, leave)
            else:
                ps, qs = variables("p", symbol.arity), variables("q", symbol.arity)
                pointer = tape(f"Ptr:{symbol.name}")
                step = disj(
                    conj(
                        neg(self.last_tuple(ps)),
                        exists_many(
                            qs,
                            conj(
                                self.next_tuple(ps, qs),
                                drop(pointer, ps, put(pointer, qs, advance(again))),
                            ),
                        ),
                    ),
                    conj(self.last_tuple(ps), drop(pointer, ps, leave)),
                )
                body = exists_many(
                    ps, conj(atom(pointer, *ps), self._bit(symbol.name, ps, cs, emit, step))
                )
            cases.append(conj(atom(flag), body))
        cases.extend(case(cs) for case in extra)
        return exists_many(cs, conj(atom(tape("Cur"), *cs), disj(*cases)))

    @staticmethod
    def _bit(name: str, ps: list[str], cs: list[str], emit: Emit, then: Node) -> Node:
        a = atom(name, *ps)
        return disj(conj(a, emit("1", cs, then)), conj(neg(a), emit("0", cs, then)))

    def writer(self) -> Node:
        """One round of the input writer, returning to the encoding label."""
        again = goto(self.layout.label("C_enc"))
        started, done = self._tape("WStarted"), self._tape("WDone")

        def emit(bit: str, cs: list[str], then: Node) -> Node:
            return put(self.layout.symbol_tape(bit), cs, then)

        step = self.walk_step("W", emit, lambda cs: ins(done, [], again), again)
        return conj(
            neg(atom(done)),
            disj(
                conj(neg(atom(started)), ins(started, [], self.walk_start("W", again))),
                conj(atom(started), step),
            ),
        )

    def encoding_check(self, role: str = "C_chk:pos") -> Node:
        """
        True exactly when the symbol cells spell the encoding of the input
        model along the source order, every encoding cell holds one symbol
        and every later cell is blank.
        """
        c_chk = self.layout.label(role)
        again = goto(c_chk)
        tail = self._tape("VTail")

        def emit(bit: str, cs: list[str], then: Node) -> Node:
            return conj(self.holds_only(bit, cs), then)

        def rest(cs: list[str], then: Node) -> Node:
            ds = self.cells("d")
            return disj(
                self.last_cell(cs),
                conj(
                    neg(self.last_cell(cs)),
                    exists_many(
                        ds,
                        conj(
                            self.next_cell(cs, ds),
                            drop(self._tape("VCur"), cs, put(self._tape("VCur"), ds, then)),
                        ),
                    ),
                ),
            )

        step = self.walk_step(
            "V",
            emit,
            lambda cs: rest(cs, ins(tail, [], again)),
            again,
            extra=(lambda cs: conj(atom(tail), self.blank(cs), rest(cs, again)),),
        )
        return self.walk_start("V", label(c_chk, step))

    # machine
    def machine_start(self, atm: Atm) -> Node:
        kind = atm.kind(atm.start)
        if kind == StateKind.accept:
            return top()
        if kind == StateKind.reject:
            return bot()
        cs = self.cells("c")
        blocks = [
            self.transition_block(atm, q, a)
            for q, k in atm.states
            if not k.halting
            for a in atm.symbols
        ]
        return exists_many(
            cs,
            conj(
                self.first_cell(cs),
                put(
                    self._tape("Y"),
                    cs,
                    put(
                        self.layout.state_tape(atm.start),
                        cs,
                        label(self.layout.label("C_loop"), disj(*blocks)),
                    ),
                ),
            ),
        )

    def transition_block(self, atm: Atm, state: str, symbol: str) -> Node:
        """
        The head sits on a cell in `state` reading `symbol`; existential
        states let Eloise pick the transition, universal ones Abelard.
        """
        cs = self.cells("c")
        here = conj(
            atom(self._tape("Y"), *cs),
            atom(self.layout.state_tape(state), *cs),
            self.reads(atm, symbol, cs),
        )
        moves = [self._transition(atm, t, cs) for t in atm.transitions_from(state, symbol)]
        choice = disj(*moves) if atm.kind(state) == StateKind.existential else conj(*moves)
        return exists_many(cs, conj(here, choice))

    def _transition(self, atm: Atm, t: Transition, cs: list[str]) -> Node:
        target = atm.kind(t.target)
        if target == StateKind.accept:
            then = top()
        elif target == StateKind.reject:
            then = bot()
        else:
            ds = self.cells("d")
            beside = self.next_cell(ds, cs) if t.direction == Direction.left else self.next_cell(cs, ds)
            head = self._tape("Y")
            then = exists_many(
                ds,
                conj(
                    beside,
                    drop(
                        head,
                        cs,
                        put(
                            head,
                            ds,
                            put(
                                self.layout.state_tape(t.target),
                                ds,
                                goto(self.layout.label("C_loop")),
                            ),
                        ),
                    ),
                ),
            )
        result = drop(self.layout.state_tape(t.state), cs, then)
        if t.write != t.read:
            if t.write != atm.blank:
                result = put(self.layout.symbol_tape(t.write), cs, result)
            if t.read != atm.blank:
                result = drop(self.layout.symbol_tape(t.read), cs, result)
        return result
