from collections import Counter
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Hashable, Optional

import tabulate

from gamelogic.structure import GameState

Fingerprint = Hashable


class Role(StrEnum):
    """`plus` when Eloise is the current verifier."""

    plus = "+"
    minus = "-"

    def flipped(self) -> "Role":
        return Role.minus if self == Role.plus else Role.plus


class Player(StrEnum):
    eloise = "Eloise"
    abelard = "Abelard"
    forced = "Forced"

    def opponent(self) -> "Player":
        match self:
            case Player.eloise:
                return Player.abelard
            case Player.abelard:
                return Player.eloise
        return self


class TerminalStatus(StrEnum):
    nonterminal = "nonterminal"
    verifier_wins = "verifier-wins"
    falsifier_wins = "falsifier-wins"
    neither_wins = "neither-wins"

    def winner(self, role: Role) -> Optional[Player]:
        """The player winning a play that ends here, if any."""
        match self:
            case TerminalStatus.verifier_wins:
                return Player.eloise if role == Role.plus else Player.abelard
            case TerminalStatus.falsifier_wins:
                return Player.abelard if role == Role.plus else Player.eloise
        return None


class Outcome(StrEnum):
    eloise_wins = "EloiseWins"
    abelard_wins = "AbelardWins"
    draw = "Draw"
    unknown = "Unknown"

    def swapped(self) -> "Outcome":
        match self:
            case Outcome.eloise_wins:
                return Outcome.abelard_wins
            case Outcome.abelard_wins:
                return Outcome.eloise_wins
        return self

    @property
    def winner(self) -> Optional[Player]:
        match self:
            case Outcome.eloise_wins:
                return Player.eloise
            case Outcome.abelard_wins:
                return Player.abelard
        return None

    @classmethod
    def won_by(cls, player: Player) -> "Outcome":
        return cls.eloise_wins if player == Player.eloise else cls.abelard_wins


@dataclass(frozen=True)
class Position:
    """
    A position of the semantic game. `clocks` is aligned with the clocked
    node ids of the formula (`FormulaAst.clocked_nodes`). `move` describes
    the mutation or choice that led here and takes no part in comparisons.
    """

    state: GameState
    clocks: tuple[int, ...]
    role: Role
    node: int
    move: str = field(default="start", compare=False)

    def clock_map(self, clocked_nodes: tuple[int, ...]) -> dict[int, int]:
        return dict(zip(clocked_nodes, self.clocks))


@dataclass
class SolveStats:
    explored: int = 0
    expanded: int = 0
    skipped: int = 0
    terminals: Counter = field(default_factory=Counter)

    def to_dict(self) -> dict[str, Any]:
        return {
            "explored": self.explored,
            "expanded": self.expanded,
            "skipped": self.skipped,
            "terminals": {str(k): v for k, v in sorted(self.terminals.items())},
        }

    def to_table(self) -> str:
        rows = [
            ["explored positions", self.explored],
            ["expanded positions", self.expanded],
            ["skipped positions", self.skipped],
        ]
        rows.extend(
            [f"terminal: {k}", v] for k, v in sorted(self.terminals.items())
        )
        return tabulate.tabulate(rows, headers=["Statistic", "Value"])


@dataclass
class Verdict:
    outcome: Outcome
    stats: SolveStats = field(default_factory=SolveStats)
    winning_strategy: Optional[dict[Fingerprint, Fingerprint]] = None

    def __post_init__(self):
        if (self.winning_strategy is not None) != (self.outcome.winner is not None):
            raise ValueError(
                "A strategy accompanies exactly the EloiseWins and AbelardWins outcomes."
            )

    def to_dict(self) -> dict[str, Any]:
        return {"outcome": str(self.outcome), "stats": self.stats.to_dict()}
