"""
Small constructors for formula trees. The compilers emit their formulas
through these instead of going through text.

Chains built by `conj` and `disj` are right-nested, so the first argument is
always the left operand of the outermost node.
"""

from typing import Iterable, Optional

from gamelogic.syntax.clock import ClockTerm
from gamelogic.syntax.types import Node, NodeKind


def top() -> Node:
    return Node(NodeKind.true)


def bot() -> Node:
    return Node(NodeKind.false)


def atom(name: str, *variables: str) -> Node:
    return Node(NodeKind.rel_atom, name=name, variables=tuple(variables))


def eq(a: str, b: str) -> Node:
    return Node(NodeKind.equals, variables=(a, b))


def neq(a: str, b: str) -> Node:
    return neg(eq(a, b))


def goto(label_name: str) -> Node:
    return Node(NodeKind.loop_atom, name=label_name)


def neg(child: Node) -> Node:
    return Node(NodeKind.neg, children=(child,))


def _chain(kind: NodeKind, parts: list[Node], empty: Node) -> Node:
    if not parts:
        return empty
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Node(kind, children=(part, result))
    return result


def conj(*parts: Node) -> Node:
    return _chain(NodeKind.conj, list(parts), top())


def disj(*parts: Node) -> Node:
    return _chain(NodeKind.disj, list(parts), bot())


def conj_all(parts: Iterable[Node]) -> Node:
    return conj(*parts)


def disj_all(parts: Iterable[Node]) -> Node:
    return disj(*parts)


def implies(a: Node, b: Node) -> Node:
    return disj(neg(a), b)


def exists(variable: str, child: Node) -> Node:
    return Node(NodeKind.exists, children=(child,), variables=(variable,))


def forall(variable: str, child: Node) -> Node:
    return Node(NodeKind.forall, children=(child,), variables=(variable,))


def exists_many(variables: Iterable[str], child: Node) -> Node:
    for v in reversed(list(variables)):
        child = exists(v, child)
    return child


def forall_many(variables: Iterable[str], child: Node) -> Node:
    for v in reversed(list(variables)):
        child = forall(v, child)
    return child


def insert_elem(variable: str, child: Node, clock: Optional[ClockTerm] = None) -> Node:
    return Node(
        NodeKind.insert_elem, children=(child,), variables=(variable,), clock=clock
    )


def delete_elem(variable: str, child: Node) -> Node:
    return Node(NodeKind.delete_elem, children=(child,), variables=(variable,))


def ins(name: str, variables: Iterable[str], child: Node) -> Node:
    return Node(
        NodeKind.insert_tuple,
        children=(child,),
        name=name,
        variables=tuple(variables),
    )


def dele(name: str, variables: Iterable[str], child: Node) -> Node:
    return Node(
        NodeKind.delete_tuple,
        children=(child,),
        name=name,
        variables=tuple(variables),
    )


def label(name: str, child: Node, clock: Optional[ClockTerm] = None) -> Node:
    return Node(NodeKind.label, children=(child,), name=name, clock=clock)
