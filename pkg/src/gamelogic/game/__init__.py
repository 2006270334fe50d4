from gamelogic.game.rules import (
    fingerprint,
    initial_position,
    successors,
    terminal_status,
)
from gamelogic.game.solver import GameGraph, SolverMode, check_truth, explore, solve
from gamelogic.game.trace import OpponentPolicy, Trace, TraceStep, extract_trace
from gamelogic.game.types import (
    Outcome,
    Player,
    Position,
    Role,
    SolveStats,
    TerminalStatus,
    Verdict,
)

__all__ = [
    "GameGraph",
    "OpponentPolicy",
    "Outcome",
    "Player",
    "Position",
    "Role",
    "SolveStats",
    "SolverMode",
    "TerminalStatus",
    "Trace",
    "TraceStep",
    "Verdict",
    "check_truth",
    "explore",
    "extract_trace",
    "fingerprint",
    "initial_position",
    "solve",
    "successors",
    "terminal_status",
]
