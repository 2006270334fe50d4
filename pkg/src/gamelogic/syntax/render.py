from gamelogic.syntax.clock import ClockTerm, PolyTerm
from gamelogic.syntax.types import ATOMIC_KINDS, FormulaAst, Node, NodeKind


def render_poly(poly: PolyTerm) -> str:
    return "+".join(f"{c}*n^{e}" if e else str(c) for c, e in poly.coefficients)


def render_clock(clock: ClockTerm) -> str:
    if clock.is_bare_polynomial:
        return render_poly(clock.poly)
    return f"{clock.c}*exp({clock.k},{render_poly(clock.poly)})+{clock.d}"


def _clock_suffix(node: Node) -> str:
    return "" if node.clock is None else f"[{render_clock(node.clock)}]"


def _operand(node: Node) -> list[str | Node]:
    if node.kind in ATOMIC_KINDS or node.kind in (NodeKind.conj, NodeKind.disj):
        return [node]
    return ["(", node, ")"]


def _pieces(node: Node) -> list[str | Node]:
    """Text fragments of `node`, with child nodes left to be expanded."""
    variables = ",".join(node.variables)
    match node.kind:
        case NodeKind.true:
            return ["top"]
        case NodeKind.false:
            return ["bot"]
        case NodeKind.rel_atom:
            return [f"{node.name}({variables})"]
        case NodeKind.equals:
            return [f"{node.variables[0]} = {node.variables[1]}"]
        case NodeKind.loop_atom:
            return [str(node.name)]
        case NodeKind.neg:
            return ["~", *_operand(node.child)]
        case NodeKind.conj | NodeKind.disj:
            op = " & " if node.kind == NodeKind.conj else " | "
            left, right = node.children
            return ["(", *_operand(left), op, *_operand(right), ")"]
        case NodeKind.exists | NodeKind.forall | NodeKind.delete_elem:
            return [f"{node.kind} {node.variable} . ", node.child]
        case NodeKind.insert_elem:
            return [f"Ix {node.variable}{_clock_suffix(node)} . ", node.child]
        case NodeKind.insert_tuple | NodeKind.delete_tuple:
            return [f"{node.kind} {node.name}({variables}) . ", node.child]
        case NodeKind.label:
            return [f"loop {node.name}{_clock_suffix(node)} . ", node.child]
    raise AssertionError(node.kind)  # pragma: nocover


def render_node(node: Node) -> str:
    out: list[str] = []
    stack: list[str | Node] = [node]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        else:
            stack.extend(reversed(_pieces(item)))
    return "".join(out)


def render(ast: FormulaAst, declarations: bool = False) -> str:
    """
    Print `ast` in the concrete grammar. With `declarations`, the vocabulary
    is emitted as `rel`/`tape` lines so the text is self-contained.
    """
    body = render_node(ast.root)
    if not declarations:
        return body
    header = [
        f"{s.kind} {s.name}/{s.arity}"
        for s in ast.vocab.relations + ast.vocab.tapes
    ]
    return "\n".join(header + [body])
