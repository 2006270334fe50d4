import logging
from typing import Callable, Optional

from gamelogic.atm.gadgets import Gadgets, at_least, drop, put, small_model_sentence
from gamelogic.atm.layout import CompilationLayout, apspace_layout, kexpspace_layout
from gamelogic.atm.types import Atm, SmallModelTable, small_threshold
from gamelogic.errors import MachineError
from gamelogic.structure import decode
from gamelogic.syntax.build import (
    atom,
    conj,
    disj,
    exists,
    goto,
    insert_elem,
    label,
    neg,
)
from gamelogic.syntax.clock import ClockTerm, eval_clock_term
from gamelogic.syntax.render import render_clock
from gamelogic.syntax.types import FormulaAst, Node, Vocabulary

logger = logging.getLogger(name=__name__)


def small_model_table(
    atm: Atm, vocab: Vocabulary, cells: Callable[[int], int]
) -> SmallModelTable:
    """
    The machine's own table when it has one, otherwise one derived with
    the simulator below the least size at which the encoding fits.
    """
    threshold = small_threshold(cells, vocab)
    table = atm.small
    if table is None:
        return SmallModelTable.derive(atm, vocab, threshold, cells)
    if table.n0 < threshold:
        logger.warning(
            f"The small-model table of {atm.name} stops at {table.n0}, "
            f"but the encoding only fits the tape from size {threshold} on."
        )
    for bits in table.accepted:
        try:
            size = decode(bits, vocab).size
        except ValueError as e:
            error = MachineError(str(e))
            error.add_note(f"Small-model table of machine {atm.name}")
            raise error from e
        if size >= table.n0:
            raise MachineError(
                f"The small-model table of {atm.name} lists {bits!r}, a model of size {size} >= n0."
            )
    return table


def _guarded_by_small_models(table: SmallModelTable, vocab: Vocabulary, body: Node) -> Node:
    accepted = [small_model_sentence(bits, vocab) for bits in sorted(table.accepted)]
    large = at_least(table.n0)
    return disj(conj(neg(large), disj(*accepted)), conj(large, body))


def _successor_phase(g: Gadgets, then: Node) -> Node:
    succ, order, excluded = g.layout.successor_tapes()
    chi = Gadgets.successor_sentence(succ, order, excluded)
    return label(
        g.layout.label("C_succ"),
        disj(
            conj(neg(chi), g.successor_builder(succ, order, excluded)),
            conj(chi, then),
        ),
    )


def _encoding_phase(g: Gadgets, atm: Atm) -> Node:
    return label(
        g.layout.label("C_enc"),
        disj(
            conj(neg(g.encoding_check("C_chk:neg")), g.writer()),
            conj(g.encoding_check("C_chk:pos"), g.machine_start(atm)),
        ),
    )


def _finish(root: Node, layout: CompilationLayout, what: str) -> FormulaAst:
    ast = FormulaAst(root, layout.vocabulary())
    logger.info(f"Compiled {what}: {ast.size} nodes, {len(layout.tapes)} tape predicates.")
    return ast


def compile_apspace(
    atm: Atm, k: Optional[int] = None, vocab: Optional[Vocabulary] = None
) -> FormulaAst:
    """
    A formula without element insertion that holds on a model over `vocab`
    iff `atm` accepts its encoding, using `(k+1)`-tuples of the model as
    tape cells. `k` defaults to the machine's space exponent.
    """
    vocab = vocab if vocab is not None else Vocabulary()
    k = atm.space_k if k is None else k
    if k is None or k < 0:
        raise MachineError(f"Machine {atm.name} needs a space exponent k.")
    layout = apspace_layout(vocab, atm.state_names, atm.written_symbols, k)
    g = Gadgets(layout)
    table = small_model_table(atm, vocab, lambda n: n ** (k + 1))
    body = _successor_phase(g, _encoding_phase(g, atm))
    return _finish(
        _guarded_by_small_models(table, layout.input_vocab, body),
        layout,
        f"{atm.name} with k={k}",
    )


def compile_kexpspace(
    atm: Atm,
    bound: Optional[ClockTerm] = None,
    vocab: Optional[Vocabulary] = None,
    clock_bit_cap: Optional[int] = None,
) -> FormulaAst:
    """
    A formula whose only element insertion is clocked by `bound`: Eloise
    adds up to `bound(n)` fresh elements, chains them into the tape, and
    runs `atm` on the encoding of the original model.
    """
    vocab = vocab if vocab is not None else Vocabulary()
    bound = bound or atm.space_clock
    if bound is None:
        raise MachineError(f"Machine {atm.name} needs a clock space bound.")
    layout = kexpspace_layout(vocab, atm.state_names, atm.written_symbols)
    g = Gadgets(layout)
    table = small_model_table(
        atm, vocab, lambda n: eval_clock_term(bound, n, clock_bit_cap)
    )

    new, chain, last = layout.tape("N"), layout.tape("S"), layout.tape("LastN")
    c_build, c_chain = layout.label("C_build"), layout.label("C_chain")
    tail = label(c_chain, disj(goto(c_build), _successor_phase(g, _encoding_phase(g, atm))))
    link = disj(
        conj(neg(exists("l", atom(last, "l"))), put(last, ["x"], tail)),
        exists(
            "l",
            conj(
                atom(last, "l"),
                put(chain, ["l", "x"], drop(last, ["l"], put(last, ["x"], goto(c_chain)))),
            ),
        ),
    )
    body = label(c_build, insert_elem("x", put(new, ["x"], link), clock=bound))
    return _finish(
        _guarded_by_small_models(table, layout.input_vocab, body),
        layout,
        f"{atm.name} with bound {render_clock(bound)}",
    )


def gen_chi_succ(layout: CompilationLayout) -> FormulaAst:
    succ, order, excluded = layout.successor_tapes()
    return FormulaAst(
        Gadgets.successor_sentence(succ, order, excluded), layout.vocabulary()
    )


def gen_alpha_build(layout: CompilationLayout) -> FormulaAst:
    succ, order, excluded = layout.successor_tapes()
    return FormulaAst(
        Gadgets(layout).successor_builder(succ, order, excluded), layout.vocabulary()
    )


def gen_chi_enc(layout: CompilationLayout, vocab: Vocabulary, k: int) -> FormulaAst:
    cells_over_model = layout.geometry is not None and layout.geometry.cell_domain is None
    if cells_over_model and layout.cell_arity != k + 1:
        raise ValueError(f"The layout has cells of arity {layout.cell_arity}, not {k + 1}.")
    if vocab.relations_only() != layout.input_vocab:
        raise ValueError("The layout was allocated for another vocabulary.")
    return FormulaAst(Gadgets(layout).encoding_check(), layout.vocabulary())


def gen_transition_block(
    atm: Atm, layout: CompilationLayout, pair: tuple[str, str]
) -> FormulaAst:
    state, symbol = pair
    if not atm.transitions_from(state, symbol):
        raise MachineError(f"Machine {atm.name} has no transition for {pair}.")
    return FormulaAst(
        Gadgets(layout).transition_block(atm, state, symbol), layout.vocabulary()
    )
