"""
Parsers for formulas, clock terms and symbol declarations.

Formula text is split into tokens by the pyparsing grammar below and the
tree is assembled from the token stream with an explicit frame stack, so
the nesting depth of a formula is only bounded by memory.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import pyparsing as pp

from gamelogic.errors import (
    ArityError,
    DuplicateLabelError,
    ParseError,
    UndeclaredSymbolError,
)
from gamelogic.syntax.clock import ClockTerm, PolyTerm
from gamelogic.syntax.types import (
    FormulaAst,
    Node,
    NodeKind,
    Symbol,
    SymbolKind,
    Vocabulary,
)

logger = logging.getLogger(name=__name__)

pp.ParserElement.enable_packrat()

KEYWORDS = (
    "exists",
    "forall",
    "Ix",
    "Dx",
    "ins",
    "del",
    "loop",
    "top",
    "bot",
    "tape",
    "rel",
)

_keyword = {k: pp.Keyword(k) for k in KEYWORDS}
IDENT = (
    ~pp.MatchFirst(list(_keyword.values()))
    + pp.Word(pp.alphas + "_", pp.alphanums + "_'")
).set_name("identifier")
INTEGER = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0])).set_name("natural")

_LPAR, _RPAR, _LBRACK, _RBRACK, _DOT, _COMMA, _STAR, _PLUS, _CARET, _SLASH = map(
    pp.Suppress, "()[].,*+^/"
)


def _location(s: str, loc: int) -> tuple[int, int]:
    return pp.lineno(loc, s), pp.col(loc, s)


# clock terms
_n_power = pp.Suppress(pp.Keyword("n")) + pp.Opt(_CARET + INTEGER, default=1)
_poly_term = (
    (INTEGER + _STAR + _n_power).set_parse_action(lambda t: [(t[0], t[1])])
    | _n_power.copy().set_parse_action(lambda t: [(1, t[0])])
    | INTEGER.copy().add_parse_action(lambda t: [(t[0], 0)])
)
POLY = (_poly_term + pp.ZeroOrMore(_PLUS + _poly_term)).set_parse_action(
    lambda t: PolyTerm.from_terms(list(t))
)
_tower = (
    pp.Opt(INTEGER + _STAR, default=1)
    + pp.Suppress(pp.Keyword("exp"))
    + _LPAR
    + INTEGER
    + _COMMA
    + POLY
    + _RPAR
    + pp.Opt(_PLUS + INTEGER, default=0)
).set_parse_action(lambda t: ClockTerm(c=t[0], k=t[1], poly=t[2], d=t[3]))
CLOCK = (
    _tower | POLY.copy().add_parse_action(lambda t: ClockTerm.polynomial(t[0]))
).set_name("clock term")
_clock_spec = pp.Opt(_LBRACK + CLOCK + _RBRACK, default=None)

# declarations
DECLARATION = (
    (_keyword["tape"] | _keyword["rel"]) + IDENT + _SLASH + INTEGER
).set_parse_action(
    lambda t: Symbol(
        t[1], t[2], SymbolKind.tape if t[0] == "tape" else SymbolKind.relation
    )
)


# formula tokens
@dataclass(frozen=True)
class _Token:
    """
    `kind` is one of not, open, close, and, or, atom, binder. Atoms carry
    their finished node; binders carry their node without the body.
    """

    kind: str
    text: str
    location: tuple[int, int]
    node: Optional[Node] = None


def _punctuation(kind: str, literal: str) -> pp.ParserElement:
    return pp.Literal(literal).set_parse_action(
        lambda s, loc, t: _Token(kind, literal, _location(s, loc))
    )


def _with_node(token_kind: str, kind: NodeKind):
    def action(s: str, loc: int, t: pp.ParseResults):
        node = _build(kind, s, loc, t)
        return _Token(token_kind, str(node.kind), node.location or (0, 0), node)

    return action


def _build(kind: NodeKind, s: str, loc: int, t: pp.ParseResults) -> Node:
    where = _location(s, loc)
    match kind:
        case NodeKind.true | NodeKind.false:
            return Node(kind, location=where)
        case NodeKind.rel_atom:
            return Node(kind, name=t[0], variables=tuple(t[1]), location=where)
        case NodeKind.equals:
            node = Node(kind, variables=(t[0], t[2]), location=where)
            if t[1] == "!=":
                return Node(NodeKind.neg, children=(node,), location=where)
            return node
        case NodeKind.loop_atom:
            return Node(kind, name=t[0], location=where)
        case NodeKind.exists | NodeKind.forall:
            return Node(NodeKind(t[0]), variables=(t[1],), location=where)
        case NodeKind.delete_elem:
            return Node(kind, variables=(t[1],), location=where)
        case NodeKind.insert_elem:
            return Node(kind, variables=(t[1],), clock=t[2], location=where)
        case NodeKind.insert_tuple | NodeKind.delete_tuple:
            return Node(
                NodeKind(t[0]), name=t[1], variables=tuple(t[2]), location=where
            )
        case NodeKind.label:
            return Node(kind, name=t[1], clock=t[2], location=where)
    raise AssertionError(kind)  # pragma: nocover


_var_list = pp.Group(_LPAR + pp.Opt(IDENT + pp.ZeroOrMore(_COMMA + IDENT)) + _RPAR)

_ATOM = (
    _keyword["top"].copy().set_parse_action(_with_node("atom", NodeKind.true))
    | _keyword["bot"].copy().set_parse_action(_with_node("atom", NodeKind.false))
    | (IDENT + _var_list).set_parse_action(_with_node("atom", NodeKind.rel_atom))
    | (IDENT + (pp.Literal("!=") | pp.Literal("=")) + IDENT).set_parse_action(
        _with_node("atom", NodeKind.equals)
    )
    | IDENT.copy().set_parse_action(_with_node("atom", NodeKind.loop_atom))
)
_BINDER = (
    ((_keyword["exists"] | _keyword["forall"]) + IDENT + _DOT).set_parse_action(
        _with_node("binder", NodeKind.exists)
    )
    | (_keyword["Ix"] + IDENT + _clock_spec + _DOT).set_parse_action(
        _with_node("binder", NodeKind.insert_elem)
    )
    | (_keyword["Dx"] + IDENT + _DOT).set_parse_action(
        _with_node("binder", NodeKind.delete_elem)
    )
    | ((_keyword["ins"] | _keyword["del"]) + IDENT + _var_list + _DOT).set_parse_action(
        _with_node("binder", NodeKind.insert_tuple)
    )
    | (_keyword["loop"] + IDENT + _clock_spec + _DOT).set_parse_action(
        _with_node("binder", NodeKind.label)
    )
)
TOKEN = (
    _BINDER
    | _punctuation("not", "~")
    | _punctuation("open", "(")
    | _punctuation("close", ")")
    | _punctuation("and", "&")
    | _punctuation("or", "|")
    | _ATOM
).set_name("formula")

DOCUMENT = (
    pp.Group(pp.ZeroOrMore(DECLARATION))
    + pp.Group(pp.OneOrMore(TOKEN))
    + pp.StringEnd()
)
DOCUMENT.ignore(pp.python_style_comment)


@dataclass
class _Frame:
    """
    A formula under construction: the whole text, a parenthesized group,
    or the body of a binder. Bodies extend as far right as possible, so a
    binder frame only closes at `)` or at the end of the text.
    """

    opener: Optional[_Token] = None
    operands: list[Node] = field(default_factory=list)
    operator: Optional[_Token] = None
    negations: list[_Token] = field(default_factory=list)

    @property
    def is_binder(self) -> bool:
        return self.opener is not None and self.opener.kind == "binder"

    def push(self, node: Node):
        for token in reversed(self.negations):
            node = Node(NodeKind.neg, children=(node,), location=token.location)
        self.negations.clear()
        self.operands.append(node)

    def close(self) -> Node:
        chain = self.operands[-1]
        if self.operator is not None:
            kind = NodeKind.conj if self.operator.kind == "and" else NodeKind.disj
            for operand in reversed(self.operands[:-1]):
                chain = Node(kind, children=(operand, chain), location=operand.location)
        if self.is_binder:
            assert self.opener is not None and self.opener.node is not None
            return replace(self.opener.node, children=(chain,))
        return chain


def _close_binders(stack: list[_Frame]) -> _Frame:
    while stack[-1].is_binder:
        frame = stack.pop()
        stack[-1].push(frame.close())
    return stack[-1]


def _assemble(tokens: list[_Token], end: tuple[int, int]) -> Node:
    stack = [_Frame()]
    expecting_operand = True
    for token in tokens:
        top = stack[-1]
        if expecting_operand:
            match token.kind:
                case "not":
                    top.negations.append(token)
                case "binder" | "open":
                    stack.append(_Frame(token))
                case "atom":
                    assert token.node is not None
                    top.push(token.node)
                    expecting_operand = False
                case _:
                    raise ParseError(
                        f"Expected a formula before '{token.text}'", *token.location
                    )
            continue
        match token.kind:
            case "and" | "or":
                if top.operator is not None and top.operator.kind != token.kind:
                    raise ParseError(
                        "'&' and '|' cannot be mixed without parentheses",
                        *token.location,
                    )
                top.operator = token
                expecting_operand = True
            case "close":
                top = _close_binders(stack)
                if top.opener is None:
                    raise ParseError("Unbalanced ')'", *token.location)
                stack.pop()
                stack[-1].push(top.close())
            case _:
                raise ParseError(
                    f"Expected '&', '|' or ')' before '{token.text}'", *token.location
                )
    if expecting_operand:
        raise ParseError("Expected a formula", *end)
    top = _close_binders(stack)
    if top.opener is not None:
        raise ParseError("Unclosed '('", *top.opener.location)
    return top.close()


def _check(root: Node, vocab: Vocabulary):
    seen_labels: dict[str, Node] = {}
    for node in root.walk():
        line, column = node.location or (None, None)
        if node.kind in (
            NodeKind.rel_atom,
            NodeKind.insert_tuple,
            NodeKind.delete_tuple,
        ):
            assert node.name is not None
            symbol = vocab.get(node.name)
            if symbol is None:
                raise UndeclaredSymbolError(
                    f"Undeclared relation symbol '{node.name}'", line, column
                )
            if symbol.arity != len(node.variables):
                raise ArityError(
                    f"'{node.name}' has arity {symbol.arity} but is applied to {len(node.variables)} variable(s)",
                    line,
                    column,
                )
        elif node.kind == NodeKind.label:
            assert node.name is not None
            if node.name in seen_labels:
                raise DuplicateLabelError(
                    f"Label '{node.name}' is defined more than once", line, column
                )
            seen_labels[node.name] = node


def parse_formula(text: str, vocab: Optional[Vocabulary] = None) -> FormulaAst:
    """
    Parse formula text. Leading `tape NAME/ARITY` and `rel NAME/ARITY`
    declarations are merged into `vocab`.
    """
    vocab = vocab or Vocabulary()
    try:
        declarations, tokens = DOCUMENT.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise ParseError(e.msg, e.lineno, e.col) from e
    except RecursionError as e:
        raise ParseError("Formula nests too deeply to be tokenized.") from e
    except ValueError as e:
        raise ParseError(str(e)) from e
    root = _assemble(list(tokens), _location(text, len(text)))
    try:
        vocab = vocab.merge(Vocabulary.of(declarations))
    except ValueError as e:
        raise ParseError(str(e)) from e
    _check(root, vocab)
    ast = FormulaAst(root, vocab)
    logger.debug(f"Parsed a formula with {ast.size} nodes.")
    return ast


def parse_declarations(text: str) -> Vocabulary:
    """Parse a block consisting only of declarations."""
    try:
        symbols = (
            pp.ZeroOrMore(DECLARATION)
            .ignore(pp.python_style_comment)
            .parse_string(text, parse_all=True)
        )
    except pp.ParseException as e:
        raise ParseError(e.msg, e.lineno, e.col) from e
    try:
        return Vocabulary.of(symbols)
    except ValueError as e:
        raise ParseError(str(e)) from e


def parse_clock(text: str) -> ClockTerm:
    try:
        return CLOCK.parse_string(text, parse_all=True)[0]
    except pp.ParseException as e:
        raise ParseError(f"Malformed clock term: {e.msg}", e.lineno, e.col) from e
    except ValueError as e:
        raise ParseError(f"Malformed clock term: {e}") from e
