import itertools
import random
from collections import deque
from typing import Iterator

import networkx as nx
import pytest

from gamelogic.errors import BudgetError, ParseError, StrategyError
from gamelogic.game import (
    OpponentPolicy,
    Outcome,
    Player,
    Role,
    TerminalStatus,
    Trace,
    check_truth,
    explore,
    extract_trace,
    fingerprint,
    initial_position,
    solve,
    successors,
    terminal_status,
)
from gamelogic.structure import Structure, enumerate_structures, random_structure
from gamelogic.syntax import ClockTerm, FormulaAst, NodeKind, PolyTerm, Vocabulary
from gamelogic.syntax import build as b
from gamelogic.syntax import parse_formula

GRAPH = Vocabulary.parse_spec("E/2,P/1")
FIRST_ORDER = Vocabulary.parse_spec("P/1,R/2")

REACH = "loop L . (P(x) | exists y . (E(x,y) & exists x . (x = y & L)))"
REACH_DX = (
    "loop L . (P(x) | exists y . (E(x,y) & x != y & Dx x . exists x . (x = y & L)))"
)
COUNTER = (
    "tape X1/0 tape X2/0 tape X3/0 "
    "loop L[{clock}] . (X3() "
    "| ((ins X3() . L) & X2()) "
    "| ((ins X2() . L) & (X1() & ~X2())) "
    "| ((ins X1() . L) & ~X1()))"
)


def reachable(m: Structure, start: int) -> bool:
    edges = m.relation("E")
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for a, c in edges:
            if a == u and c not in seen:
                seen.add(c)
                queue.append(c)
    return any((e,) in m.relation("P") for e in seen)


def all_digraphs(size: int) -> Iterator[Structure]:
    """Every edge set over `size` nodes, with the last node marked by P."""
    rows = list(itertools.product(range(size), repeat=2))
    for mask in range(2 ** len(rows)):
        edges = [r for i, r in enumerate(rows) if mask >> i & 1]
        yield Structure.of_size(size, GRAPH, {"E": edges, "P": [(size - 1,)]})


def holds(node, m: Structure, g: dict) -> bool:
    """Classical satisfaction for first-order formulas."""
    match node.kind:
        case NodeKind.true:
            return True
        case NodeKind.false:
            return False
        case NodeKind.rel_atom:
            return tuple(g[v] for v in node.variables) in m.relation(node.name)
        case NodeKind.equals:
            return g[node.variables[0]] == g[node.variables[1]]
        case NodeKind.neg:
            return not holds(node.child, m, g)
        case NodeKind.conj:
            return all(holds(c, m, g) for c in node.children)
        case NodeKind.disj:
            return any(holds(c, m, g) for c in node.children)
        case NodeKind.exists:
            return any(
                holds(node.child, m, {**g, node.variable: e}) for e in m.domain
            )
        case NodeKind.forall:
            return all(
                holds(node.child, m, {**g, node.variable: e}) for e in m.domain
            )
    raise AssertionError(node.kind)


def random_fo(rng: random.Random, depth: int):
    variables = ("x", "y")
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(
            [
                b.top(),
                b.bot(),
                b.atom("P", rng.choice(variables)),
                b.atom("R", rng.choice(variables), rng.choice(variables)),
                b.eq(rng.choice(variables), rng.choice(variables)),
            ]
        )
    match rng.randrange(5):
        case 0:
            return b.neg(random_fo(rng, depth - 1))
        case 1:
            return b.conj(random_fo(rng, depth - 1), random_fo(rng, depth - 1))
        case 2:
            return b.disj(random_fo(rng, depth - 1), random_fo(rng, depth - 1))
        case 3:
            return b.exists(rng.choice(variables), random_fo(rng, depth - 1))
        case _:
            return b.forall(rng.choice(variables), random_fo(rng, depth - 1))


def _constant(rng: random.Random) -> ClockTerm:
    return ClockTerm.polynomial(PolyTerm.constant(rng.randint(1, 2)))


def random_clocked(rng: random.Random, depth: int, labels: list[str], counter: list[int]):
    """Formulas whose labels and `Ix` nodes all carry constant clocks."""
    if depth == 0 or rng.random() < 0.2:
        options = [b.top(), b.bot(), b.atom("P", rng.choice("xyz")), b.eq("x", "z")]
        if labels:
            options.append(b.goto(rng.choice(labels)))
        return rng.choice(options)

    def sub():
        return random_clocked(rng, depth - 1, labels, counter)

    match rng.randrange(7):
        case 0:
            return b.neg(sub())
        case 1:
            return b.conj(sub(), sub())
        case 2:
            return b.disj(sub(), sub())
        case 3:
            return b.exists(rng.choice("xz"), sub())
        case 4:
            return b.forall(rng.choice("xz"), sub())
        case 5:
            return b.insert_elem(rng.choice("xyz"), sub(), _constant(rng))
        case _:
            counter[0] += 1
            name = f"L{counter[0]}"
            return b.label(
                name,
                random_clocked(rng, depth - 1, labels + [name], counter),
                _constant(rng),
            )


def test_first_order_formulas_agree_with_classical_semantics():
    rng = random.Random(11)
    for _ in range(125):
        ast = FormulaAst(random_fo(rng, 4), FIRST_ORDER)
        for size in range(1, 5):
            m = random_structure(FIRST_ORDER, size, rng)
            g = {"x": rng.randrange(size), "y": rng.randrange(size)}
            assert check_truth(ast, m, g) == holds(ast.root, m, g), ast.root


@pytest.mark.parametrize("size", [0, 1, 2])
@pytest.mark.parametrize("mode", ["local", "exhaustive"])
def test_reachability_on_all_small_graphs(size, mode):
    ast = parse_formula(REACH, GRAPH)
    for m in enumerate_structures(GRAPH, size):
        for start in m.domain:
            assert check_truth(ast, m, {"x": start}, mode=mode) == reachable(m, start)


@pytest.mark.slow
@pytest.mark.parametrize("mode", ["local", "exhaustive"])
def test_reachability_on_all_three_node_digraphs(mode):
    ast = parse_formula(REACH, GRAPH)
    for m in all_digraphs(3):
        for start in m.domain:
            assert check_truth(ast, m, {"x": start}, mode=mode) == reachable(m, start)


@pytest.mark.slow
@pytest.mark.parametrize("size", [4, 5])
def test_reachability_on_sampled_graphs(size):
    ast = parse_formula(REACH, GRAPH)
    rng = random.Random(5 + size)
    for _ in range(60):
        m = random_structure(GRAPH, size, rng)
        start = rng.randrange(size)
        for mode in ("local", "exhaustive"):
            assert check_truth(ast, m, {"x": start}, mode=mode) == reachable(m, start)


def _check_deleting_variant(m: Structure, start: int):
    ast = parse_formula(REACH_DX, GRAPH)
    verdict = solve(ast, m, {"x": start})
    assert verdict.outcome != Outcome.draw
    assert (verdict.outcome == Outcome.eloise_wins) == reachable(m, start)
    graph = explore(ast, m, {"x": start})
    assert graph.complete
    assert nx.is_directed_acyclic_graph(graph.to_networkx())


def test_deleting_reachability_small_graphs():
    for size in (1, 2):
        for m in enumerate_structures(GRAPH, size):
            for start in m.domain:
                _check_deleting_variant(m, start)


@pytest.mark.slow
def test_deleting_reachability_all_three_node_digraphs():
    for m in all_digraphs(3):
        _check_deleting_variant(m, 0)


@pytest.mark.slow
def test_deleting_reachability_sampled():
    rng = random.Random(9)
    for _ in range(40):
        _check_deleting_variant(random_structure(GRAPH, 4, rng), rng.randrange(4))


@pytest.mark.parametrize(
    "clock,outcome",
    [
        (1, "Draw"),
        (2, "Draw"),
        (3, "Draw"),
        (4, "EloiseWins"),
        (5, "EloiseWins"),
        (6, "EloiseWins"),
    ],
)
def test_clock_decides_the_counter(clock, outcome):
    ast = parse_formula(COUNTER.format(clock=clock))
    m = Structure.of_size(1, Vocabulary())
    assert solve(ast, m).outcome == Outcome(outcome)
    assert solve(ast, m, mode="exhaustive").outcome == Outcome(outcome)


def test_counter_trace_enters_the_loop_four_times():
    ast = parse_formula(COUNTER.format(clock=4))
    m = Structure.of_size(1, Vocabulary())
    verdict = solve(ast, m)
    trace = extract_trace(verdict, ast, m)
    assert sum(s.move == "enter L" for s in trace.steps) == 4
    assert trace.steps[0].clocks == (4,)
    assert trace.steps[-1].status == TerminalStatus.verifier_wins
    assert trace.steps[-1].role == Role.plus
    assert Trace.from_text(trace.to_text()) == trace


@pytest.mark.parametrize(
    "budget,outcome",
    [(1, "Unknown"), (2, "Unknown"), (4, "Unknown"), (8, "EloiseWins"), (16, "EloiseWins")],
)
def test_budget_in_exhaustive_mode(budget, outcome):
    ast = parse_formula("(loop L . Ix z . L) | exists x . exists y . x = y")
    m = Structure.of_size(2, Vocabulary())
    verdict = solve(ast, m, budget=budget, mode="exhaustive")
    assert verdict.outcome == Outcome(outcome)
    assert verdict.stats.expanded <= budget


def test_budget_exhaustion_is_unknown_in_local_mode():
    ast = parse_formula("(loop L . Ix z . L) | exists x . exists y . x = y")
    m = Structure.of_size(2, Vocabulary())
    assert solve(ast, m, budget=50).outcome == Outcome.unknown
    assert check_truth(ast, m, budget=50) is None


def test_budget_must_be_positive():
    ast = parse_formula("top")
    with pytest.raises(BudgetError):
        solve(ast, Structure.of_size(1, Vocabulary()), budget=0)


@pytest.mark.parametrize(
    "text,size,outcome",
    [
        ("top", 0, "EloiseWins"),
        ("bot", 3, "AbelardWins"),
        ("exists x . top", 0, "AbelardWins"),
        ("forall x . top", 0, "AbelardWins"),
        ("~exists x . top", 0, "EloiseWins"),
        ("Ix z[n] . top", 0, "Draw"),
        ("Ix z[n] . top", 1, "EloiseWins"),
        ("Ix z . exists x . x = z", 0, "EloiseWins"),
        ("P(x)", 2, "Draw"),
        ("loop L . L", 1, "Draw"),
        ("exists x . Dx x . forall y . top", 1, "AbelardWins"),
        ("exists x . Dx x . forall y . top", 2, "EloiseWins"),
        ("exists x . Dx x . P(x)", 2, "Draw"),
        ("tape T/1 ins T(x) . top", 0, "AbelardWins"),
        ("tape T/1 ins T(x) . T(x)", 2, "EloiseWins"),
        ("tape T/1 ins T(x) . del T(y) . T(x)", 1, "AbelardWins"),
        ("tape T/1 ins T(x) . del T(y) . T(x)", 2, "EloiseWins"),
        ("tape T/1 ins T(x) . del T(y) . ~T(y)", 2, "EloiseWins"),
        ("tape T/0 ins T() . forall x . T()", 0, "AbelardWins"),
        ("tape T/0 ins T() . T()", 0, "EloiseWins"),
    ],
)
def test_rules(text, size, outcome, p_vocab):
    ast = parse_formula(text, p_vocab)
    m = Structure.of_size(size, p_vocab, {"P": [(0,)]} if size else None)
    for mode in ("local", "exhaustive"):
        assert solve(ast, m, mode=mode).outcome == Outcome(outcome), mode


def test_tapes_start_empty_and_stay_out_of_the_model(p_vocab):
    ast = parse_formula("tape T/1 exists x . ~T(x) & P(x)", p_vocab)
    m = Structure.of_size(2, p_vocab, {"P": [(1,)]})
    assert check_truth(ast, m) is True
    p = initial_position(ast, m)
    assert p.state.tapes == {"T": frozenset()}
    assert p.state.structure.interp == m.interp


def test_model_must_interpret_the_formula_relations(p_vocab):
    ast = parse_formula("P(x)", p_vocab)
    with pytest.raises(ValueError):
        solve(ast, Structure.of_size(1, Vocabulary.parse_spec("Q/1")))


@pytest.mark.slow
def test_duality_of_negation():
    rng = random.Random(3)
    vocab = Vocabulary.parse_spec("P/1")
    for _ in range(200):
        root = random_clocked(rng, 4, [], [0])
        ast = FormulaAst(root, vocab)
        negated = FormulaAst(b.neg(root), vocab)
        for size in range(1, 4):
            m = random_structure(vocab, size, rng)
            g = {"x": 0} if rng.random() < 0.5 else {}
            for mode in ("local", "exhaustive"):
                ours = solve(ast, m, g, mode=mode).outcome
                theirs = solve(negated, m, g, mode=mode).outcome
                assert theirs == ours.swapped()
                assert ours != Outcome.unknown


def test_winning_strategies_are_sound():
    rng = random.Random(17)
    vocab = Vocabulary.parse_spec("P/1")
    played = 0
    for _ in range(60):
        ast = FormulaAst(random_clocked(rng, 4, [], [0]), vocab)
        m = random_structure(vocab, rng.randint(1, 3), rng)
        verdict = solve(ast, m, {"x": 0})
        if verdict.outcome.winner is None:
            with pytest.raises(StrategyError):
                extract_trace(verdict, ast, m, {"x": 0})
            continue
        played += 1
        for seed in range(3):
            trace = extract_trace(
                verdict, ast, m, {"x": 0}, OpponentPolicy.random, seed=seed
            )
            last = trace.steps[-1]
            assert last.status.winner(last.role) == verdict.outcome.winner
            assert all(s.status == TerminalStatus.nonterminal for s in trace.steps[:-1])
    assert played > 0


def test_trace_of_an_atomic_formula():
    ast = parse_formula("top")
    m = Structure.of_size(1, Vocabulary())
    trace = extract_trace(solve(ast, m), ast, m)
    assert len(trace) == 1
    assert trace.steps[0].move == "start"
    assert trace.outcome == Outcome.eloise_wins


def test_abelard_trace(p_vocab):
    ast = parse_formula("forall x . P(x)", p_vocab)
    m = Structure.of_size(3, p_vocab, {"P": [(0,), (2,)]})
    verdict = solve(ast, m)
    assert verdict.outcome == Outcome.abelard_wins
    assert verdict.outcome.winner == Player.abelard
    trace = extract_trace(verdict, ast, m)
    assert [s.move for s in trace.steps] == ["start", "x := 1"]
    assert trace.steps[-1].status == TerminalStatus.falsifier_wins


def test_trace_text_is_checked():
    with pytest.raises(ParseError):
        Trace.from_text("node=0 role=+ clocks=- size=1 status=nonterminal move=start")
    with pytest.raises(ParseError):
        Trace.from_text("# outcome=EloiseWins\nnot a step")


def test_explored_graph(graph_vocab):
    ast = parse_formula(REACH, graph_vocab)
    m = Structure.of_size(2, graph_vocab, {"E": [(0, 1)], "P": [(1,)]})
    graph = explore(ast, m, {"x": 0})
    assert graph.complete
    assert graph.winners[0] == Player.eloise
    nxg = graph.to_networkx()
    assert nxg.number_of_nodes() == len(graph)
    assert nxg.nodes[0]["winner"] == "Eloise"
    assert "digraph" in graph.to_dot()

    partial = explore(ast, m, {"x": 0}, budget=2)
    assert not partial.complete
    assert partial.winners[0] is None


def _joins(graph, i: int, player: Player) -> bool:
    succs = graph.successors[i]
    won = [graph.winners[j] == player for j in succs]
    return any(won) if graph.owners[i] == player else all(won)


@pytest.mark.parametrize("seed", range(8))
def test_explored_positions_split_into_won_lost_and_drawn(seed):
    rng = random.Random(seed)
    vocab = Vocabulary.parse_spec("P/1")
    for _ in range(10):
        ast = FormulaAst(random_clocked(rng, 4, [], [0]), vocab)
        m = random_structure(vocab, rng.randint(1, 3), rng)
        graph = explore(ast, m, {"x": 0})
        assert graph.complete
        won = {i for i, w in enumerate(graph.winners) if w == Player.eloise}
        lost = {i for i, w in enumerate(graph.winners) if w == Player.abelard}
        drawn = {i for i, w in enumerate(graph.winners) if w is None}
        assert len(won) + len(lost) + len(drawn) == len(graph)
        for i, status in enumerate(graph.statuses):
            if status != TerminalStatus.nonterminal:
                assert graph.winners[i] == status.winner(graph.positions[i].role)
                continue
            for player in (Player.eloise, Player.abelard):
                assert _joins(graph, i, player) == (graph.winners[i] == player)
        outcome = solve(ast, m, {"x": 0}).outcome
        assert outcome.winner == graph.winners[0]
        assert (outcome == Outcome.draw) == (0 in drawn)


def _strategy_tree(verdict, ast: FormulaAst, m: Structure, g: dict) -> nx.DiGraph:
    """Every position reachable when the winner follows its strategy."""
    winner = verdict.outcome.winner
    tree = nx.DiGraph()
    start = initial_position(ast, m, g)
    tree.add_node(fingerprint(start))
    stack = [start]
    while stack:
        p = stack.pop()
        here = fingerprint(p)
        status = terminal_status(p, ast)
        if status != TerminalStatus.nonterminal:
            tree.nodes[here]["winner"] = status.winner(p.role)
            continue
        owner, options = successors(p, ast)
        if owner == winner:
            target = verdict.winning_strategy.get(here)
            options = [q for q in options if fingerprint(q) == target]
        for q in options:
            there = fingerprint(q)
            if there not in tree:
                stack.append(q)
            tree.add_edge(here, there)
    return tree


@pytest.mark.parametrize("seed", range(6))
def test_winning_strategies_beat_every_reply(seed):
    rng = random.Random(100 + seed)
    vocab = Vocabulary.parse_spec("P/1")
    for _ in range(10):
        ast = FormulaAst(random_clocked(rng, 4, [], [0]), vocab)
        m = random_structure(vocab, rng.randint(1, 3), rng)
        verdict = solve(ast, m, {"x": 0})
        if verdict.outcome.winner is None:
            continue
        tree = _strategy_tree(verdict, ast, m, {"x": 0})
        assert nx.is_directed_acyclic_graph(tree)
        for node in tree.nodes:
            if tree.out_degree(node) == 0:
                assert tree.nodes[node].get("winner") == verdict.outcome.winner
