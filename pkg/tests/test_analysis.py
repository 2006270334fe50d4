import json

import pytest

from gamelogic.syntax import (
    FormulaAst,
    Severity,
    classify_fragment,
    is_valid,
    parse_formula,
    validate,
)
from gamelogic.syntax.build import atom, goto, label, top
from gamelogic.syntax.clock import ClockTerm, PolyTerm
from gamelogic.syntax.types import Node, NodeKind


@pytest.mark.parametrize(
    "text, expected",
    [
        ("rel P/1 exists x . P(x)", (True, True, 0, 0, True)),
        ("rel P/1 loop L[n^2] . (P(x) | L)", (True, True, 0, 0, True)),
        ("loop L[0] . L", (True, True, 0, 0, True)),
        ("loop L[exp(1, n)] . L", (True, False, 1, 0, True)),
        ("loop L . L", (True, False, None, 0, False)),
        ("loop A[n] . loop B[2*exp(2, n)+1] . B", (True, False, 2, 0, True)),
        ("Ix x[3*n+2] . top", (False, False, 0, 0, True)),
        ("Ix x . loop L[n] . L", (False, False, 0, None, True)),
        ("Ix x[exp(1, n)] . loop L[n] . L", (False, False, 0, 1, True)),
    ],
)
def test_classify_fragment(text, expected):
    report = classify_fragment(parse_formula(text))
    assert (
        report.in_T_minus_Ix,
        report.in_T_pol,
        report.in_T_kexp,
        report.in_T_Ix_kexp,
        report.in_T_allexp,
    ) == expected


def test_fragment_report_outputs():
    report = classify_fragment(parse_formula("loop L . L"))
    assert json.loads(report.to_json())["in_T_kexp"] is None
    table = report.to_table()
    assert "in_T_pol" in table
    assert "-" in table


def test_validate_accepts_parsed_formulas():
    ast = parse_formula("rel E/2 loop L . exists y . (E(x,y) & L)")
    assert validate(ast) == []
    assert is_valid(ast)


def test_validate_unresolved_loop_is_a_warning():
    violations = validate(parse_formula("top & Nowhere"))
    assert [v.code for v in violations] == ["unresolved-loop"]
    assert violations[0].severity == Severity.warning
    assert is_valid(parse_formula("top & Nowhere"))


def test_validate_reports_built_tree_errors():
    duplicate = label("L", label("L", goto("L")))
    codes = [v.code for v in validate(FormulaAst(duplicate))]
    assert codes == ["duplicate-label"]

    undeclared = FormulaAst(atom("P", "x"))
    assert [v.code for v in validate(undeclared)] == ["undeclared-symbol"]

    clock = ClockTerm.polynomial(PolyTerm.constant(1))
    misplaced = FormulaAst(
        Node(NodeKind.exists, children=(top(),), variables=("x",), clock=clock)
    )
    assert [v.code for v in validate(misplaced)] == ["misplaced-clock"]

    malformed = FormulaAst(Node(NodeKind.neg))
    violations = validate(malformed)
    assert violations[0].code == "malformed-node"
    assert violations[0].severity == Severity.error
    assert not is_valid(malformed)
    assert "node 0" in str(violations[0])
