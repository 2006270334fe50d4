import logging
from collections import deque
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Mapping, Optional

import networkx as nx

from gamelogic.errors import BudgetError
from gamelogic.game.rules import (
    fingerprint,
    initial_position,
    successors,
    terminal_status,
)
from gamelogic.game.types import (
    Fingerprint,
    Outcome,
    Player,
    Position,
    SolveStats,
    TerminalStatus,
    Verdict,
)
from gamelogic.structure import Element, Structure
from gamelogic.syntax.types import FormulaAst

logger = logging.getLogger(name=__name__)

PROGRESS_INTERVAL = 10000


class SolverMode(StrEnum):
    local = "local"
    exhaustive = "exhaustive"


@dataclass
class GameGraph:
    """
    The explored part of a game. Positions are numbered in discovery order;
    `successors[i]` is None for positions that were never expanded.
    """

    positions: list[Position] = field(default_factory=list)
    owners: list[Optional[Player]] = field(default_factory=list)
    statuses: list[TerminalStatus] = field(default_factory=list)
    successors: list[Optional[list[int]]] = field(default_factory=list)
    winners: list[Optional[Player]] = field(default_factory=list)
    complete: bool = False

    def __len__(self) -> int:
        return len(self.positions)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for i, p in enumerate(self.positions):
            graph.add_node(
                i,
                label=f'"{p.node}{p.role} {p.move}"',
                owner=str(self.owners[i] or ""),
                status=str(self.statuses[i]),
                winner=str(self.winners[i] or "none"),
            )
        for i, succs in enumerate(self.successors):
            for j in succs or ():
                graph.add_edge(i, j)
        return graph

    def to_dot(self) -> str:
        return nx.drawing.nx_pydot.to_pydot(self.to_networkx()).to_string()


class _Arena:
    """
    Incremental attractor computation. A position joins a player's
    attractor when it is a winning terminal for that player, when it is
    owned by that player and one successor joined, or when it is owned by
    anyone else and every successor joined. The successor through which an
    owner joined is recorded as its strategy; it always joined earlier.
    """

    def __init__(self, ast: FormulaAst):
        self.ast = ast
        self.graph = GameGraph()
        self.index: dict[Fingerprint, int] = {}
        self.fingerprints: list[Fingerprint] = []
        self.preds: list[list[int]] = []
        self.need: list[dict[Player, int]] = []
        self.strategy: dict[int, int] = {}
        self.stats = SolveStats()

    def add(self, p: Position) -> tuple[int, bool]:
        fp = fingerprint(p)
        known = self.index.get(fp)
        if known is not None:
            return known, False
        i = len(self.fingerprints)
        self.index[fp] = i
        self.fingerprints.append(fp)
        self.preds.append([])
        self.need.append({})
        status = terminal_status(p, self.ast)
        g = self.graph
        g.positions.append(p)
        g.statuses.append(status)
        g.owners.append(None)
        g.successors.append(None)
        g.winners.append(None)
        self.stats.explored += 1
        if status != TerminalStatus.nonterminal:
            self.stats.terminals[status] += 1
            g.winners[i] = status.winner(p.role)
        return i, True

    def expand(self, i: int) -> list[int]:
        """Expand position `i`; returns the successors still worth visiting."""
        g = self.graph
        owner, positions = successors(g.positions[i], self.ast)
        succs = list(dict.fromkeys(self.add(p)[0] for p in positions))
        g.owners[i] = owner
        g.successors[i] = succs
        for player in (Player.eloise, Player.abelard):
            self.need[i][player] = 1 if owner == player else len(succs)
        for j in succs:
            self.preds[j].append(i)
        self.stats.expanded += 1
        if self.stats.expanded % PROGRESS_INTERVAL == 0:
            logger.debug(
                f"Expanded {self.stats.expanded} positions, {self.stats.explored} discovered."
            )
        for j in succs:
            winner = g.winners[j]
            if winner is not None:
                self._notify(i, winner, j)
        return [
            j
            for j in succs
            if g.winners[j] is None
            and g.successors[j] is None
            and g.statuses[j] == TerminalStatus.nonterminal
        ]

    def _notify(self, i: int, player: Player, via: int):
        queue = deque([(i, via)])
        g = self.graph
        while queue:
            u, w = queue.popleft()
            if g.winners[u] is not None:
                continue
            self.need[u][player] -= 1
            if self.need[u][player] > 0:
                continue
            g.winners[u] = player
            if g.owners[u] == player:
                self.strategy[u] = w
            queue.extend((pred, u) for pred in self.preds[u])

    def live(self, i: int) -> bool:
        """Whether some undecided position still points at `i`."""
        g = self.graph
        return i == 0 or any(g.winners[u] is None for u in self.preds[i])

    def verdict(self, complete: bool) -> Verdict:
        g = self.graph
        g.complete = complete
        winner = g.winners[0]
        if winner is None:
            outcome = Outcome.draw if complete else Outcome.unknown
            return Verdict(outcome, self.stats)
        strategy = {
            self.fingerprints[u]: self.fingerprints[w]
            for u, w in self.strategy.items()
            if g.winners[u] == winner and g.owners[u] == winner
        }
        return Verdict(Outcome.won_by(winner), self.stats, strategy)


def _check_budget(budget: Optional[int]):
    if budget is not None and budget < 1:
        raise BudgetError(f"The exploration budget must be positive, got {budget}.")


def _run(
    ast: FormulaAst,
    m: Structure,
    g: Optional[Mapping[str, Element]],
    budget: Optional[int],
    mode: SolverMode,
    clock_bit_cap: Optional[int],
) -> Verdict:
    _check_budget(budget)
    arena = _Arena(ast)
    root, _ = arena.add(initial_position(ast, m, g, clock_bit_cap))
    winners = arena.graph.winners
    expanded = arena.graph.successors
    statuses = arena.graph.statuses
    frontier = deque([root])

    def stale(i: int) -> bool:
        if winners[i] is not None or expanded[i] is not None:
            return True
        if statuses[i] != TerminalStatus.nonterminal:
            return True
        if mode == SolverMode.local and not arena.live(i):
            arena.stats.skipped += 1
            return True
        return False

    while frontier and winners[root] is None:
        i = frontier.popleft() if mode == SolverMode.exhaustive else frontier.pop()
        if stale(i):
            continue
        if budget is not None and arena.stats.expanded >= budget:
            frontier.append(i)
            break
        fresh = arena.expand(i)
        if mode == SolverMode.exhaustive:
            frontier.extend(fresh)
        else:
            frontier.extend(reversed(fresh))
    if winners[root] is None:
        frontier = deque(i for i in frontier if not stale(i))
    return arena.verdict(complete=not frontier)


def solve(
    ast: FormulaAst,
    m: Structure,
    g: Optional[Mapping[str, Element]] = None,
    budget: Optional[int] = None,
    mode: SolverMode | str = SolverMode.local,
    clock_bit_cap: Optional[int] = None,
) -> Verdict:
    """
    Decide the semantic game of `ast` on `m` under assignment `g`.

    `budget` bounds the number of expanded positions. In `local` mode the
    game is explored depth-first, left operand first, and positions that
    no undecided position points at any more are skipped; `exhaustive`
    mode expands every reachable position breadth-first. Both stop as soon
    as the root is decided.
    """
    mode = SolverMode(mode)
    verdict = _run(ast, m, g, budget, mode, clock_bit_cap)
    logger.info(
        f"Solved in {mode} mode: {verdict.outcome}, {verdict.stats.explored} positions explored."
    )
    return verdict


def check_truth(
    ast: FormulaAst,
    m: Structure,
    g: Optional[Mapping[str, Element]] = None,
    budget: Optional[int] = None,
    mode: SolverMode | str = SolverMode.local,
) -> Optional[bool]:
    """True iff Eloise wins; None when the budget ran out undecided."""
    outcome = solve(ast, m, g, budget, mode).outcome
    if outcome == Outcome.unknown:
        return None
    return outcome == Outcome.eloise_wins


def explore(
    ast: FormulaAst,
    m: Structure,
    g: Optional[Mapping[str, Element]] = None,
    budget: Optional[int] = None,
    clock_bit_cap: Optional[int] = None,
) -> GameGraph:
    """
    Expand every reachable position (up to `budget` expansions) and label
    each with the player whose attractor it lies in.
    """
    _check_budget(budget)
    arena = _Arena(ast)
    graph = arena.graph
    root, _ = arena.add(initial_position(ast, m, g, clock_bit_cap))
    frontier = deque([root])
    while frontier:
        i = frontier.popleft()
        if (
            graph.successors[i] is not None
            or graph.statuses[i] != TerminalStatus.nonterminal
        ):
            continue
        if budget is not None and arena.stats.expanded >= budget:
            frontier.append(i)
            break
        arena.expand(i)
        frontier.extend(graph.successors[i] or ())
    graph.complete = not frontier
    return graph
