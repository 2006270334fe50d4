from gamelogic.syntax import FormulaAst, Vocabulary, parse_formula, render
from gamelogic.syntax.build import conj, disj, exists, goto, label, neg, neq, top
from gamelogic.syntax.clock import ClockTerm, PolyTerm


def test_render_operators():
    assert render(parse_formula("~(exists x . x = x)")) == "~(exists x . x = x)"
    assert render(parse_formula("x != y")) == "~x = y"


def test_render_chains_keep_parentheses():
    assert render(parse_formula("top & bot & top")) == "(top & (bot & top))"
    assert render(parse_formula("(top | bot) & top")) == "((top | bot) & top)"


def test_render_clocks():
    ast = parse_formula("loop L[n^2+1] . Ix z[exp(1, n)] . L")
    assert render(ast) == "loop L[1*n^2+1] . Ix z[1*exp(1,1*n^1)+0] . L"


def test_render_declarations():
    ast = parse_formula("rel E/2 tape Seen/1 exists x . ins Seen(x) . Seen(x)")
    assert render(ast, declarations=True) == (
        "rel E/2\ntape Seen/1\nexists x . ins Seen(x) . Seen(x)"
    )


def test_render_built_trees():
    clock = ClockTerm.polynomial(PolyTerm.constant(4))
    root = label("L", disj(neg(top()), exists("x", conj(neq("x", "y"), goto("L")))), clock)
    text = render(FormulaAst(root, Vocabulary()))
    assert text == "loop L[4] . ((~top) | (exists x . ((~x = y) & L)))"
    assert parse_formula(text).structurally_equal(FormulaAst(root))
