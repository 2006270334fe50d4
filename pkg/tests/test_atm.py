import random
from dataclasses import replace

import pytest

from gamelogic.atm import (
    Atm,
    CompilationLayout,
    Direction,
    SmallModelTable,
    StateKind,
    Transition,
    always_accept,
    always_reject,
    apspace_layout,
    builtin,
    compile_apspace,
    compile_kexpspace,
    even_ones,
    gen_alpha_build,
    gen_chi_enc,
    gen_chi_succ,
    gen_transition_block,
    kexpspace_layout,
    parse_machine,
    reference_cells,
    simulate,
    small_threshold,
)
from gamelogic.atm.compiler import small_model_table
from gamelogic.errors import (
    HeadOutOfBoundsError,
    MachineError,
    NameClashError,
    ParseError,
)
from gamelogic.game import check_truth, extract_trace, solve
from gamelogic.structure import Structure, decode, encode, enumerate_structures
from gamelogic.syntax import (
    FormulaAst,
    Severity,
    Symbol,
    SymbolKind,
    Vocabulary,
    classify_fragment,
    eval_clock_term,
    parse_clock,
    parse_formula,
    render,
    validate,
)

CHOICE = """\
machine CHOICE
state u {kind}
state acc accept
state rej reject
start u
space k=1
delta (u,0) -> (0,R,acc)
delta (u,0) -> (0,R,rej)
delta (u,1) -> (1,R,acc)
delta (u,_) -> (_,R,acc)
"""

LEFT = """\
machine LEFT
state s existential
state acc accept
start s
delta (s,0) -> (0,L,s)
delta (s,1) -> (1,L,s)
delta (s,_) -> (_,L,s)
"""

BOUNCE = """\
machine BOUNCE
state s existential
state t existential
state acc accept
start s
delta (s,0) -> (0,R,t)
delta (s,1) -> (1,R,t)
delta (s,_) -> (_,R,t)
delta (t,0) -> (0,L,s)
delta (t,1) -> (1,L,s)
delta (t,_) -> (_,L,s)
"""


def as_relations(ast: FormulaAst, names: set[str]) -> FormulaAst:
    """The same formula with the tapes in `names` read from the model instead."""
    symbols = [
        Symbol(s.name, s.arity, SymbolKind.relation if s.name in names else s.kind)
        for s in ast.vocab.symbols
    ]
    return FormulaAst(ast.root, Vocabulary.of(symbols))


def test_parse_even_ones(even_ones_machine):
    atm = even_ones_machine
    assert atm.name == "EVEN-ONES"
    assert atm.start == "even"
    assert atm.kind("acc") == StateKind.accept
    assert atm.space_k == 1
    assert atm.symbols == ("0", "1", "_")
    assert len(atm.transitions) == 6
    (t,) = atm.transitions_from("odd", "1")
    assert (t.write, t.direction, t.target) == ("1", Direction.right, "even")
    assert parse_machine(atm.to_text()) == atm


def test_machine_text_round_trip_with_extras(even_ones_machine):
    atm = even_ones_machine.with_small(SmallModelTable(3, {"0", "101"}))
    text = atm.to_text()
    assert "small n0=3 accept=[0, 101]" in text
    assert parse_machine(text) == atm

    clocked = parse_machine(LEFT + "space clock=3*n+2\n")
    assert clocked.space(2) == 8
    assert parse_machine(clocked.to_text()) == clocked
    assert "space clock=3*n^1+2" in clocked.to_text()


def test_machine_extra_tape_symbols():
    text = always_accept().to_text().replace("blank _", "tape X Y\nblank _")
    atm = parse_machine(text)
    assert atm.extra_symbols == ("X", "Y")
    assert atm.symbols == ("0", "1", "X", "Y", "_")
    assert atm.space_k == 1
    assert parse_machine(atm.to_text()) == atm


def test_machine_aliases():
    atm = parse_machine(CHOICE.format(kind="forall"))
    assert atm.kind("u") == StateKind.universal
    assert parse_machine(CHOICE.format(kind="exists")).kind("u") == StateKind.existential


@pytest.mark.parametrize(
    "text",
    [
        "machine X\nstate s sideways\nstart s",
        "machine X\nstate s accept",
        "machine X\nstate s accept\nstart s\ndelta (s,0) -> (0,U,s)",
    ],
)
def test_malformed_machines(text):
    with pytest.raises(ParseError):
        parse_machine(text)


@pytest.mark.parametrize(
    "text",
    [
        # no move for (s,_)
        "machine X\nstate s existential\nstart s\n"
        "delta (s,0) -> (0,R,s)\ndelta (s,1) -> (1,R,s)",
        "machine X\nstate s accept\nstart s\ndelta (s,0) -> (0,R,s)",
        "machine X\nstate s accept\nstart t",
        "machine X\nstate s accept\nstate s reject\nstart s",
        "machine X\nstate s existential\nstart s\ndelta (s,0) -> (0,R,q)",
        "machine X\nstate s accept\nstart s\nblank 1",
    ],
)
def test_invalid_machines(text):
    with pytest.raises(MachineError):
        parse_machine(text)


def test_builtins():
    assert builtin("even-ones") == even_ones()
    assert always_accept().kind("acc") == StateKind.accept
    assert always_reject().kind("rej") == StateKind.reject
    with pytest.raises(KeyError):
        builtin("nope")


@pytest.mark.parametrize(
    "bits,accepted",
    [("0", True), ("10", False), ("101", True), ("11001", False), ("11000", True), ("11011", True)],
)
def test_simulate_even_ones(even_ones_machine, bits, accepted):
    assert simulate(even_ones_machine, bits, len(bits) + 1) == accepted


def test_simulate_needs_room_for_the_blank(even_ones_machine):
    # without a blank cell the scan walks off the tape in a non-halting state
    with pytest.raises(HeadOutOfBoundsError):
        simulate(even_ones_machine, "101", 3)


def test_simulate_rejects_bad_input(even_ones_machine):
    with pytest.raises(ValueError):
        simulate(even_ones_machine, "012", 4)
    with pytest.raises(ValueError):
        simulate(even_ones_machine, "1010", 3)


def test_simulate_alternation():
    universal = parse_machine(CHOICE.format(kind="universal"))
    existential = parse_machine(CHOICE.format(kind="existential"))
    assert not simulate(universal, "0", 2)
    assert simulate(universal, "1", 2)
    assert simulate(existential, "0", 2)
    # halting moves may leave the tape
    assert simulate(universal, "1", 1)


def test_simulate_degenerate_machines():
    with pytest.raises(HeadOutOfBoundsError):
        simulate(parse_machine(LEFT), "1", 2)
    assert not simulate(parse_machine(BOUNCE), "10", 3)
    assert simulate(always_accept(), "0", 1)
    assert not simulate(always_reject(), "0", 1)


def random_machine(rng: random.Random) -> Atm:
    """Two branching states over {0, 1, _}, one or two moves per symbol."""
    kinds = [StateKind.existential, StateKind.universal]
    states = (("q0", rng.choice(kinds)), ("q1", rng.choice(kinds)))
    states += (("acc", StateKind.accept), ("rej", StateKind.reject))
    names = [q for q, _ in states]
    transitions = []
    for q, _ in states[:2]:
        for a in ("0", "1", "_"):
            for _ in range(rng.randint(1, 2)):
                transitions.append(
                    Transition(
                        q,
                        a,
                        rng.choice(["0", "1", "_"]),
                        rng.choice(list(Direction)),
                        rng.choice(names),
                    )
                )
    return Atm(states=states, start="q0", transitions=tuple(dict.fromkeys(transitions)))


@pytest.mark.parametrize("seed", range(20))
def test_simulate_under_removed_transitions(seed):
    rng = random.Random(seed)
    atm = random_machine(rng)
    for bits in ("0", "1", "01", "110"):
        cells = len(bits) + 2
        try:
            accepted = simulate(atm, bits, cells)
        except HeadOutOfBoundsError:
            continue
        for t in atm.transitions:
            if len(atm.transitions_from(t.state, t.read)) < 2:
                continue
            reduced = replace(atm, transitions=tuple(u for u in atm.transitions if u != t))
            after = simulate(reduced, bits, cells)
            if atm.kind(t.state) == StateKind.existential:
                assert after <= accepted, (str(t), bits)
            else:
                assert after >= accepted, (str(t), bits)


def test_reference_cells(even_ones_machine, p_vocab):
    assert reference_cells(even_ones_machine, 2, p_vocab) == 6
    assert reference_cells(even_ones_machine, 3, p_vocab) == 9
    assert reference_cells(even_ones_machine, 2, p_vocab, lambda n: 40) == 40
    with pytest.raises(MachineError):
        reference_cells(parse_machine(LEFT), 2, p_vocab)


def test_small_threshold(p_vocab):
    assert small_threshold(lambda n: n**2, p_vocab) == 3
    assert small_threshold(lambda n: n**3, p_vocab) == 2
    bound = parse_clock("3*n+2")
    assert small_threshold(lambda n: eval_clock_term(bound, n), p_vocab) == 1
    assert small_threshold(lambda n: n**2, Vocabulary()) == 2


def test_derived_small_model_table(even_ones_machine, p_vocab):
    table = SmallModelTable.derive(even_ones_machine, p_vocab, 3)
    assert table.n0 == 3
    assert table.accepted == {"0", "101", "11000", "11011"}
    assert table.covers(2) and not table.covers(3)
    assert table.verdict("101") and not table.verdict("100")


def test_declared_small_model_table_is_checked(even_ones_machine, p_vocab):
    own = SmallModelTable(3, {"0", "101"})
    assert small_model_table(even_ones_machine.with_small(own), p_vocab, lambda n: n**2) == own
    with pytest.raises(MachineError):
        small_model_table(
            even_ones_machine.with_small(SmallModelTable(1, {"101"})), p_vocab, lambda n: n**2
        )
    with pytest.raises(MachineError):
        small_model_table(
            even_ones_machine.with_small(SmallModelTable(3, {"11"})), p_vocab, lambda n: n**2
        )


def test_apspace_layout_names(p_vocab):
    layout = apspace_layout(p_vocab, ["even", "acc"], ["0", "1"], 1)
    assert layout.tapes["S"] == ("S", 2)
    assert layout.tape("Sord") == "Sord"
    assert layout.symbol_tape("1") == "X_1"
    assert layout.state_tape("even") == "Y_even"
    assert layout.tapes["Y"] == ("Y", 2)
    assert layout.tapes["WPtr:P"] == ("WPtr_P", 1)
    assert layout.label("C_chk:neg") == "C_chk"
    assert layout.label("C_chk:pos") == "C_chk_1"
    assert layout.successor_tapes() == ("S", "Sord", None)
    assert layout.vocabulary().get("VTail").kind == SymbolKind.tape


def test_kexpspace_layout_names(p_vocab):
    layout = kexpspace_layout(p_vocab, ["even"], ["0", "1"])
    assert layout.symbol_tape("0") == "P0"
    assert layout.symbol_tape("1") == "P1"
    assert layout.successor_tapes() == ("Sold", "Sold_ord", "N")
    assert layout.cell_arity == 1
    assert layout.geometry.cell_domain == "N"


def test_layout_avoids_input_names():
    vocab = Vocabulary.parse_spec("S/2,X_1/1,C_succ/0")
    layout = apspace_layout(vocab, ["q"], ["0", "1"], 0)
    assert layout.tape("S") == "S_1"
    assert layout.symbol_tape("1") == "X_1_1"
    assert layout.label("C_succ") == "C_succ_1"
    layout.check()


def test_layout_check_reports_clashes(p_vocab):
    layout = CompilationLayout(p_vocab, 1, tapes={"S": ("P", 2)})
    with pytest.raises(NameClashError):
        layout.check()
    twice = CompilationLayout(p_vocab, 1, tapes={"S": ("S", 2), "Sord": ("S", 2)})
    with pytest.raises(NameClashError):
        twice.check()


def test_successor_sentence(p_vocab):
    layout = apspace_layout(p_vocab, ["q"], ["0", "1"], 0)
    chi = as_relations(gen_chi_succ(layout), {"S", "Sord"})
    vocab = chi.vocab.relations_only()

    def model(order, succ):
        return Structure.of_size(3, vocab, {"Sord": order, "S": succ})

    order = [(0, 1), (0, 2), (1, 2)]
    assert check_truth(chi, model(order, [(0, 1), (1, 2)]))
    assert not check_truth(chi, model(order, [(0, 2), (1, 2)]))
    assert not check_truth(chi, model(order, [(0, 1)]))
    assert not check_truth(chi, model([(0, 1), (1, 2)], [(0, 1), (1, 2)]))
    assert not check_truth(chi, model(order + [(2, 2)], [(0, 1), (1, 2)]))


def test_successor_builder_round(p_vocab):
    layout = apspace_layout(p_vocab, ["q"], ["0", "1"], 0)
    alpha = gen_alpha_build(layout)
    violations = validate(alpha)
    assert not [v for v in violations if v.severity == Severity.error]
    assert {v.code for v in violations} == {"unresolved-loop"}
    # one round places an element and then jumps back to the outer loop
    verdict = solve(alpha, Structure.of_size(2, p_vocab))
    assert verdict.outcome.winner is None


def test_encoding_check(p_vocab):
    layout = apspace_layout(p_vocab, ["q"], ["0", "1"], 2)
    chi = as_relations(gen_chi_enc(layout, p_vocab, 2), {"S", "Sord", "X_0", "X_1"})
    vocab = chi.vocab.relations_only()
    interp = {
        "P": [(1,)],
        "S": [(0, 1)],
        "Sord": [(0, 1)],
        "X_1": [(0, 0, 0), (0, 0, 1), (1, 0, 0)],
        "X_0": [(0, 1, 0), (0, 1, 1)],
    }
    assert check_truth(chi, Structure.of_size(2, vocab, interp)) is True

    dirty_tail = dict(interp, X_0=interp["X_0"] + [(1, 1, 1)])
    assert check_truth(chi, Structure.of_size(2, vocab, dirty_tail)) is False
    wrong_bit = dict(interp, X_1=[(0, 0, 0), (0, 0, 1)], X_0=interp["X_0"] + [(1, 0, 0)])
    assert check_truth(chi, Structure.of_size(2, vocab, wrong_bit)) is False


def test_encoding_check_arguments(p_vocab):
    layout = apspace_layout(p_vocab, ["q"], ["0", "1"], 2)
    with pytest.raises(ValueError):
        gen_chi_enc(layout, p_vocab, 1)
    with pytest.raises(ValueError):
        gen_chi_enc(layout, Vocabulary.parse_spec("E/2"), 2)


def test_transition_block(even_ones_machine, p_vocab):
    layout = apspace_layout(
        p_vocab, even_ones_machine.state_names, even_ones_machine.written_symbols, 1
    )
    block = gen_transition_block(even_ones_machine, layout, ("even", "1"))
    names = {n.name for n in block.nodes if n.name}
    assert {"Y", "Y_even", "Y_odd", "X_1"} <= names
    with pytest.raises(MachineError):
        gen_transition_block(even_ones_machine, layout, ("acc", "0"))


def test_compiled_fragments(even_ones_machine, p_vocab):
    apspace = classify_fragment(compile_apspace(even_ones_machine, 1, p_vocab))
    assert apspace.in_T_minus_Ix
    assert not apspace.in_T_allexp

    kexp = classify_fragment(compile_kexpspace(even_ones_machine, parse_clock("3*n+2"), p_vocab))
    assert not kexp.in_T_minus_Ix
    assert kexp.in_T_Ix_kexp == 0

    tower = compile_kexpspace(even_ones_machine, parse_clock("exp(1, n)"), p_vocab)
    assert classify_fragment(tower).in_T_Ix_kexp == 1


def test_compiled_formula_survives_rendering(even_ones_machine, p_vocab):
    ast = compile_kexpspace(even_ones_machine, parse_clock("3*n+2"), p_vocab)
    again = parse_formula(render(ast, declarations=True))
    assert again.structurally_equal(ast)
    assert not [v for v in validate(ast) if v.severity == Severity.error]


def test_compilers_need_a_bound(p_vocab):
    with pytest.raises(MachineError):
        compile_apspace(parse_machine(LEFT), vocab=p_vocab)
    with pytest.raises(MachineError):
        compile_kexpspace(even_ones(), vocab=p_vocab)


def test_apspace_formula_matches_the_machine_on_small_models(even_ones_machine, p_vocab):
    ast = compile_apspace(even_ones_machine, 1, p_vocab)
    for size in range(3):
        for m in enumerate_structures(p_vocab, size):
            accepted = simulate(
                even_ones_machine, encode(m), reference_cells(even_ones_machine, size, p_vocab)
            )
            assert check_truth(ast, m) == accepted, encode(m)


@pytest.mark.parametrize("bits", ["11000", "11001"])
def test_apspace_formula_runs_the_machine(even_ones_machine, p_vocab, bits):
    ast = compile_apspace(even_ones_machine, 2, p_vocab)
    m = decode(bits, p_vocab)
    expected = simulate(even_ones_machine, bits, reference_cells(even_ones_machine, 2, p_vocab))
    assert check_truth(ast, m) == expected


@pytest.mark.slow
@pytest.mark.parametrize("size", [0, 1, 2, 3])
@pytest.mark.parametrize("machine", [always_accept, always_reject])
def test_apspace_formula_on_degenerate_machines(machine, size, p_vocab):
    atm = machine()
    ast = compile_apspace(atm, 1, p_vocab)
    for m in enumerate_structures(p_vocab, size):
        accepted = simulate(atm, encode(m), reference_cells(atm, size, p_vocab))
        assert accepted == (atm.kind(atm.start) == StateKind.accept)
        assert check_truth(ast, m) == accepted, encode(m)


@pytest.mark.slow
def test_kexpspace_formula_matches_the_machine(even_ones_machine, p_vocab):
    bound = parse_clock("3*n+2")
    ast = compile_kexpspace(even_ones_machine, bound, p_vocab)
    for size in range(3):
        for m in enumerate_structures(p_vocab, size):
            bits = encode(m)
            accepted = simulate(even_ones_machine, bits, max(len(bits) + 1, eval_clock_term(bound, size)))
            assert check_truth(ast, m) == accepted, bits


def test_kexpspace_plays_respect_the_bound(even_ones_machine, p_vocab):
    bound = parse_clock("3*n+2")
    ast = compile_kexpspace(even_ones_machine, bound, p_vocab)
    m = decode("101", p_vocab)
    verdict = solve(ast, m)
    trace = extract_trace(verdict, ast, m)
    inserted = sum(s.move.startswith("Ix") for s in trace.steps)
    assert 0 < inserted <= eval_clock_term(bound, 1)
    assert trace.steps[-1].domain_size == 1 + inserted


def test_atm_requires_normalized_machine():
    with pytest.raises(MachineError):
        Atm(states=(("s", StateKind.existential),), start="s")
