import random
import re
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Mapping, Optional

from gamelogic.errors import ParseError, StrategyError
from gamelogic.game.rules import (
    fingerprint,
    initial_position,
    successors,
    terminal_status,
)
from gamelogic.game.types import Outcome, Player, Position, Role, TerminalStatus, Verdict
from gamelogic.structure import Element, Structure
from gamelogic.syntax.types import FormulaAst


class OpponentPolicy(StrEnum):
    first = "first"
    random = "random"


@dataclass(frozen=True)
class TraceStep:
    node: int
    role: Role
    clocks: tuple[int, ...]
    move: str
    status: TerminalStatus = TerminalStatus.nonterminal
    domain_size: int = 0

    def to_text(self) -> str:
        clocks = ",".join(map(str, self.clocks)) or "-"
        return (
            f"node={self.node} role={self.role} clocks={clocks} "
            f"size={self.domain_size} status={self.status} move={self.move}"
        )


_LINE = re.compile(
    r"node=(?P<node>\d+) role=(?P<role>[+-]) clocks=(?P<clocks>[\d,]+|-) "
    r"size=(?P<size>\d+) status=(?P<status>[\w-]+) move=(?P<move>.*)$"
)


@dataclass
class Trace:
    outcome: Outcome
    steps: list[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def to_text(self) -> str:
        lines = [f"# outcome={self.outcome}"]
        lines.extend(s.to_text() for s in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Trace":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or not lines[0].startswith("# outcome="):
            raise ParseError("A trace starts with an '# outcome=' line.", 1, 1)
        try:
            outcome = Outcome(lines[0].removeprefix("# outcome=").strip())
        except ValueError as e:
            raise ParseError(str(e), 1, 1) from e
        steps = []
        for lineno, line in enumerate(lines[1:], start=2):
            match = _LINE.match(line)
            if match is None:
                raise ParseError("Malformed trace line.", lineno, 1)
            clocks = match["clocks"]
            steps.append(
                TraceStep(
                    node=int(match["node"]),
                    role=Role(match["role"]),
                    clocks=()
                    if clocks == "-"
                    else tuple(int(c) for c in clocks.split(",")),
                    move=match["move"],
                    status=TerminalStatus(match["status"]),
                    domain_size=int(match["size"]),
                )
            )
        return cls(outcome, steps)


def _step(p: Position, status: TerminalStatus) -> TraceStep:
    return TraceStep(
        node=p.node,
        role=p.role,
        clocks=p.clocks,
        move=p.move,
        status=status,
        domain_size=len(p.state.domain),
    )


def extract_trace(
    verdict: Verdict,
    ast: FormulaAst,
    m: Structure,
    g: Optional[Mapping[str, Element]] = None,
    opponent_policy: OpponentPolicy | str = OpponentPolicy.first,
    seed: int = 0,
    clock_bit_cap: Optional[int] = None,
) -> Trace:
    """
    Play the winner's strategy from the initial position against the given
    opponent policy and record the play.
    """
    winner = verdict.outcome.winner
    strategy = verdict.winning_strategy
    if winner is None or strategy is None:
        raise StrategyError(f"No winning strategy for outcome {verdict.outcome}.")
    policy = OpponentPolicy(opponent_policy)
    rng = random.Random(seed)

    p = initial_position(ast, m, g, clock_bit_cap)
    steps = []
    while True:
        status = terminal_status(p, ast)
        steps.append(_step(p, status))
        if status != TerminalStatus.nonterminal:
            break
        owner, options = successors(p, ast)
        if owner == winner:
            target = strategy.get(fingerprint(p))
            chosen = next((q for q in options if fingerprint(q) == target), None)
            if chosen is None:
                raise StrategyError(
                    f"The strategy has no move at node {p.node} (step {len(steps)})."
                )
            p = chosen
        elif owner == Player.forced or policy == OpponentPolicy.first:
            p = options[0]
        else:
            p = rng.choice(options)
    return Trace(verdict.outcome, steps)
