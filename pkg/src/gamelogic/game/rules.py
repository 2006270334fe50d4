"""
Move generation for the semantic game.

Clocked nodes (clocked labels and clocked `Ix` nodes) are checked on entry:
a node entered with its clock at 0 ends the play with no winner, otherwise
the clock is decremented as part of the node's move. Loop atoms jump to
the label node itself, so re-entries are charged to the label's clock.
"""

import itertools
import logging
from dataclasses import replace
from typing import Mapping, Optional

from gamelogic.game.types import Fingerprint, Player, Position, Role, TerminalStatus
from gamelogic.structure import (
    Element,
    GameState,
    Structure,
    add_element,
    delete_tuple,
    insert_tuple,
    remove_element,
)
from gamelogic.syntax.clock import eval_clock_term
from gamelogic.syntax.types import FormulaAst, NodeKind

logger = logging.getLogger(name=__name__)


def initial_position(
    ast: FormulaAst,
    m: Structure,
    g: Optional[Mapping[str, Element]] = None,
    clock_bit_cap: Optional[int] = None,
) -> Position:
    """
    The starting position: Eloise verifies the root, every tape is empty
    and every clock holds its term evaluated at the size of `m`.
    """
    for symbol in ast.vocab.relations:
        ours = m.vocab.get(symbol.name)
        if ours is None or ours.arity != symbol.arity:
            raise ValueError(
                f"The model does not interpret {symbol.name}/{symbol.arity}."
            )
    state = GameState.initial(m, ast.vocab.tapes, g)
    clocks = []
    for node_id in ast.clocked_nodes:
        clock = ast.node(node_id).clock
        assert clock is not None
        clocks.append(eval_clock_term(clock, m.size, clock_bit_cap))
    return Position(state, tuple(clocks), Role.plus, ast.root.node_id)


def _clock_index(ast: FormulaAst, node_id: int) -> Optional[int]:
    try:
        return ast.clocked_nodes.index(node_id)
    except ValueError:
        return None


def terminal_status(p: Position, ast: FormulaAst) -> TerminalStatus:
    node = ast.node(p.node)
    state = p.state

    def verdict(holds: bool) -> TerminalStatus:
        return TerminalStatus.verifier_wins if holds else TerminalStatus.falsifier_wins

    match node.kind:
        case NodeKind.true:
            return TerminalStatus.verifier_wins
        case NodeKind.false:
            return TerminalStatus.falsifier_wins
        case NodeKind.rel_atom | NodeKind.equals:
            values = [state.value(v) for v in node.variables]
            if any(e is None for e in values):
                return TerminalStatus.neither_wins
            if node.kind == NodeKind.equals:
                return verdict(values[0] == values[1])
            assert node.name is not None
            return verdict(state.holds(node.name, tuple(values)))  # type: ignore[arg-type]
        case NodeKind.loop_atom:
            if node.name not in ast.labels:
                return TerminalStatus.neither_wins
        case NodeKind.exists | NodeKind.forall:
            if not state.domain:
                return TerminalStatus.falsifier_wins
        case NodeKind.insert_tuple | NodeKind.delete_tuple:
            if node.variables and not state.domain:
                return TerminalStatus.falsifier_wins
        case NodeKind.delete_elem:
            if state.value(node.variable) is None:
                return TerminalStatus.neither_wins
        case NodeKind.label | NodeKind.insert_elem:
            index = _clock_index(ast, node.node_id)
            if index is not None and p.clocks[index] == 0:
                return TerminalStatus.neither_wins
    return TerminalStatus.nonterminal


def _owner(verifier_moves: bool, role: Role) -> Player:
    if verifier_moves == (role == Role.plus):
        return Player.eloise
    return Player.abelard


def _tick(p: Position, ast: FormulaAst) -> tuple[int, ...]:
    index = _clock_index(ast, p.node)
    if index is None:
        return p.clocks
    clocks = list(p.clocks)
    clocks[index] -= 1
    return tuple(clocks)


def successors(p: Position, ast: FormulaAst) -> tuple[Player, list[Position]]:
    """
    The player to move and the successor positions, in a fixed order.
    `p` must be nonterminal.
    """
    node = ast.node(p.node)
    state = p.state
    match node.kind:
        case NodeKind.neg:
            return Player.forced, [
                replace(p, role=p.role.flipped(), node=node.child.node_id, move="~")
            ]
        case NodeKind.conj | NodeKind.disj:
            owner = _owner(node.kind == NodeKind.disj, p.role)
            return owner, [
                replace(p, node=c.node_id, move=side)
                for c, side in zip(node.children, ("left", "right"))
            ]
        case NodeKind.exists | NodeKind.forall:
            owner = _owner(node.kind == NodeKind.exists, p.role)
            v = node.variable
            return owner, [
                replace(
                    p,
                    state=state.assign({v: e}),
                    node=node.child.node_id,
                    move=f"{v} := {e}",
                )
                for e in state.domain
            ]
        case NodeKind.insert_elem:
            grown, e = add_element(state)
            return _owner(True, p.role), [
                Position(
                    grown.assign({node.variable: e}),
                    _tick(p, ast),
                    p.role,
                    node.child.node_id,
                    f"Ix {node.variable} := {e}",
                )
            ]
        case NodeKind.delete_elem:
            e = state.value(node.variable)
            assert e is not None
            return Player.forced, [
                replace(
                    p,
                    state=remove_element(state, e),
                    node=node.child.node_id,
                    move=f"Dx {node.variable} ({e})",
                )
            ]
        case NodeKind.insert_tuple | NodeKind.delete_tuple:
            assert node.name is not None
            apply = insert_tuple if node.kind == NodeKind.insert_tuple else delete_tuple
            distinct = list(dict.fromkeys(node.variables))
            moves = []
            for values in itertools.product(state.domain, repeat=len(distinct)):
                binding = dict(zip(distinct, values))
                row = tuple(binding[v] for v in node.variables)
                moves.append(
                    replace(
                        p,
                        state=apply(state, node.name, row).assign(binding),
                        node=node.child.node_id,
                        move=f"{node.kind} {node.name}({','.join(map(str, row))})",
                    )
                )
            return _owner(True, p.role), moves
        case NodeKind.label:
            return Player.forced, [
                replace(
                    p,
                    clocks=_tick(p, ast),
                    node=node.child.node_id,
                    move=f"enter {node.name}",
                )
            ]
        case NodeKind.loop_atom:
            return Player.forced, [
                replace(p, node=ast.labels[node.name], move=f"goto {node.name}")  # type: ignore[index]
            ]
    raise ValueError(f"Position at a terminal {node.kind} node has no successors.")


def canonical_state(state: GameState) -> tuple:
    """
    The state with element ids renamed to 0..n-1 in increasing order.
    Fresh ids always exceed every live id, so this renaming commutes with
    every move and is sound for deduplication.
    """
    domain = state.domain
    n = len(domain)
    names = [s.name for s in state.vocab.symbols]
    if domain == tuple(range(n)):
        relations = tuple(tuple(sorted(state.relations[k])) for k in names)
        assignment = tuple(sorted(state.assignment.items()))
    else:
        rename = {e: i for i, e in enumerate(domain)}
        relations = tuple(
            tuple(sorted(tuple(rename[e] for e in row) for row in state.relations[k]))
            for k in names
        )
        assignment = tuple(sorted((v, rename[e]) for v, e in state.assignment.items()))
    return (n, relations, assignment)


def fingerprint(p: Position) -> Fingerprint:
    return (p.node, p.role, p.clocks, canonical_state(p.state))
