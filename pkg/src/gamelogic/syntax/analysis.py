from typing import Optional

from gamelogic.syntax.types import (
    CLOCKABLE_KINDS,
    FormulaAst,
    FragmentReport,
    NodeKind,
    Severity,
    Violation,
)

_CHILD_COUNT = {
    NodeKind.neg: 1,
    NodeKind.conj: 2,
    NodeKind.disj: 2,
    NodeKind.exists: 1,
    NodeKind.forall: 1,
    NodeKind.insert_elem: 1,
    NodeKind.delete_elem: 1,
    NodeKind.insert_tuple: 1,
    NodeKind.delete_tuple: 1,
    NodeKind.label: 1,
}
_VARIABLE_COUNT = {
    NodeKind.equals: 2,
    NodeKind.exists: 1,
    NodeKind.forall: 1,
    NodeKind.insert_elem: 1,
    NodeKind.delete_elem: 1,
}


def _max_height(heights: list[Optional[int]]) -> Optional[int]:
    if any(h is None for h in heights):
        return None
    return max((h for h in heights if h is not None), default=0)


def classify_fragment(ast: FormulaAst) -> FragmentReport:
    labels = [n for n in ast.nodes if n.kind == NodeKind.label]
    inserts = [n for n in ast.nodes if n.kind == NodeKind.insert_elem]

    label_heights = [None if n.clock is None else n.clock.k for n in labels]
    insert_heights = [None if n.clock is None else n.clock.k for n in inserts]

    minus_ix = not inserts
    return FragmentReport(
        in_T_minus_Ix=minus_ix,
        in_T_pol=minus_ix and all(h == 0 for h in label_heights),
        in_T_kexp=_max_height(label_heights),
        in_T_Ix_kexp=_max_height(insert_heights),
        in_T_allexp=all(h is not None for h in label_heights),
    )


def validate(ast: FormulaAst) -> list[Violation]:
    """
    Check the well-formedness conditions of a formula tree.

    Loop atoms without a matching label are legal (the game ends there with
    no winner) and reported as warnings only.
    """
    violations: list[Violation] = []

    def error(code: str, message: str, node_id: int):
        violations.append(Violation(Severity.error, code, message, node_id))

    seen_labels: set[str] = set()
    for node in ast.nodes:
        expected_children = _CHILD_COUNT.get(node.kind, 0)
        if len(node.children) != expected_children:
            error(
                "malformed-node",
                f"{node.kind} node has {len(node.children)} children, expected {expected_children}",
                node.node_id,
            )
        expected_variables = _VARIABLE_COUNT.get(node.kind)
        if (
            expected_variables is not None
            and len(node.variables) != expected_variables
        ):
            error(
                "malformed-node",
                f"{node.kind} node binds {len(node.variables)} variables, expected {expected_variables}",
                node.node_id,
            )
        if node.clock is not None and node.kind not in CLOCKABLE_KINDS:
            error(
                "misplaced-clock",
                f"{node.kind} nodes cannot carry a clock",
                node.node_id,
            )

        match node.kind:
            case NodeKind.rel_atom | NodeKind.insert_tuple | NodeKind.delete_tuple:
                assert node.name is not None
                symbol = ast.vocab.get(node.name)
                if symbol is None:
                    error(
                        "undeclared-symbol",
                        f"'{node.name}' is not declared",
                        node.node_id,
                    )
                elif symbol.arity != len(node.variables):
                    error(
                        "arity-mismatch",
                        f"'{node.name}' has arity {symbol.arity}, applied to {len(node.variables)}",
                        node.node_id,
                    )
            case NodeKind.label:
                assert node.name is not None
                if node.name in seen_labels:
                    error(
                        "duplicate-label",
                        f"label '{node.name}' is defined more than once",
                        node.node_id,
                    )
                seen_labels.add(node.name)
            case NodeKind.loop_atom:
                if node.name not in ast.labels:
                    violations.append(
                        Violation(
                            Severity.warning,
                            "unresolved-loop",
                            f"no label named '{node.name}'; plays reaching it have no winner",
                            node.node_id,
                        )
                    )
    return violations


def is_valid(ast: FormulaAst) -> bool:
    return not any(v.severity == Severity.error for v in validate(ast))
