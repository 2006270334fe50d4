import logging
from collections import deque
from typing import Callable, Optional

from gamelogic.atm.types import INPUT_ALPHABET, Atm, StateKind
from gamelogic.errors import HeadOutOfBoundsError
from gamelogic.structure import encoding_length
from gamelogic.syntax.types import Vocabulary

logger = logging.getLogger(name=__name__)

Configuration = tuple[str, int, tuple[str, ...]]


def _moves(atm: Atm, config: Configuration, cells: int) -> list[Configuration]:
    state, head, tape = config
    result = []
    for t in atm.transitions_from(state, tape[head]):
        written = tape[:head] + (t.write,) + tape[head + 1 :]
        target = head + t.direction.step
        if atm.kind(t.target).halting:
            # the head position of a halted machine is irrelevant
            target = min(max(target, 0), cells - 1)
        elif not 0 <= target < cells:
            raise HeadOutOfBoundsError(
                f"{atm.name} moves its head to cell {target} of {cells} in state {state}."
            )
        result.append((t.target, target, written))
    return result


def simulate(atm: Atm, input: str, cells: int) -> bool:
    """
    Whether `atm` accepts `input` within `cells` tape cells.

    Acceptance is the least fixpoint over the reachable configurations:
    accepting configurations are in, existential ones join once some
    successor is in, universal ones once all successors are. Whatever
    never joins (rejecting configurations, unproductive cycles) rejects.
    """
    if set(input) - set(INPUT_ALPHABET):
        raise ValueError(f"Inputs are bitstrings, got {input!r}.")
    if len(input) > cells or cells < 1:
        raise ValueError(f"An input of length {len(input)} does not fit {cells} cells.")
    start: Configuration = (
        atm.start,
        0,
        tuple(input) + (atm.blank,) * (cells - len(input)),
    )

    index = {start: 0}
    configs = [start]
    preds: list[list[int]] = [[]]
    need: dict[int, int] = {}
    accepted: set[int] = set()
    seeds = deque()
    frontier = deque([0])
    while frontier:
        i = frontier.popleft()
        state = configs[i][0]
        kind = atm.kind(state)
        if kind == StateKind.accept:
            need[i] = 0
            seeds.append(i)
            continue
        if kind == StateKind.reject:
            need[i] = -1
            continue
        succs = []
        for c in _moves(atm, configs[i], cells):
            j = index.get(c)
            if j is None:
                j = index[c] = len(configs)
                configs.append(c)
                preds.append([])
                frontier.append(j)
            if j not in succs:
                succs.append(j)
        need[i] = 1 if kind == StateKind.existential else len(succs)
        for j in succs:
            preds[j].append(i)

    while seeds:
        i = seeds.popleft()
        if i in accepted:
            continue
        accepted.add(i)
        for p in preds[i]:
            if p in accepted:
                continue
            need[p] -= 1
            if need[p] == 0:
                seeds.append(p)
    logger.debug(
        f"Simulated {atm.name} on {input!r}: {len(configs)} configurations, "
        f"{'accept' if 0 in accepted else 'reject'}."
    )
    return 0 in accepted


def reference_cells(
    atm: Atm,
    size: int,
    vocab: Vocabulary,
    cells: Optional[Callable[[int], int]] = None,
) -> int:
    """
    The tape length the simulator gets for models of `size` elements: the
    machine's space (or `cells(size)`), but never less than the encoding
    plus one blank.
    """
    room = cells(size) if cells is not None else atm.space(size)
    return max(room, encoding_length(size, vocab) + 1)
