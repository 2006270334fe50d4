from gamelogic.subcommands.capture import capture
from gamelogic.subcommands.compile import compile_formula
from gamelogic.subcommands.encode import encode
from gamelogic.subcommands.eval import evaluate
from gamelogic.subcommands.fragment import fragment
from gamelogic.subcommands.simulate import simulate

__all__ = [
    "capture",
    "compile_formula",
    "encode",
    "evaluate",
    "fragment",
    "simulate",
]
