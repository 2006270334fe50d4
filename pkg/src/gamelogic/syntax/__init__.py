from gamelogic.syntax.analysis import classify_fragment, is_valid, validate
from gamelogic.syntax.clock import ClockTerm, PolyTerm, eval_clock_term
from gamelogic.syntax.parser import parse_clock, parse_declarations, parse_formula
from gamelogic.syntax.render import render, render_clock
from gamelogic.syntax.types import (
    FormulaAst,
    FragmentReport,
    Node,
    NodeKind,
    Severity,
    Symbol,
    SymbolKind,
    Violation,
    Vocabulary,
)

__all__ = [
    "ClockTerm",
    "FormulaAst",
    "FragmentReport",
    "Node",
    "NodeKind",
    "PolyTerm",
    "Severity",
    "Symbol",
    "SymbolKind",
    "Violation",
    "Vocabulary",
    "classify_fragment",
    "eval_clock_term",
    "is_valid",
    "parse_clock",
    "parse_declarations",
    "parse_formula",
    "render",
    "render_clock",
    "validate",
]
