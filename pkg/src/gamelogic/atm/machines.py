"""Machines shipped with the package, written in the machine text format."""

from gamelogic.atm.types import Atm, parse_machine

EVEN_ONES = """\
# Scans right and accepts iff the input holds an even number of 1s.
machine EVEN-ONES
state even existential
state odd existential
state acc accept
state rej reject
start even
space k=1
delta (even,0) -> (0,R,even)
delta (even,1) -> (1,R,odd)
delta (even,_) -> (_,R,acc)
delta (odd,0) -> (0,R,odd)
delta (odd,1) -> (1,R,even)
delta (odd,_) -> (_,R,rej)
"""

ALWAYS_ACCEPT = """\
machine ALWAYS-ACCEPT
state acc accept
start acc
space k=1
"""

ALWAYS_REJECT = """\
machine ALWAYS-REJECT
state rej reject
start rej
space k=1
"""

BUILTIN = {
    "EVEN-ONES": EVEN_ONES,
    "ALWAYS-ACCEPT": ALWAYS_ACCEPT,
    "ALWAYS-REJECT": ALWAYS_REJECT,
}


def even_ones() -> Atm:
    return parse_machine(EVEN_ONES)


def always_accept() -> Atm:
    return parse_machine(ALWAYS_ACCEPT)


def always_reject() -> Atm:
    return parse_machine(ALWAYS_REJECT)


def builtin(name: str) -> Atm:
    try:
        return parse_machine(BUILTIN[name.upper()])
    except KeyError as e:
        raise KeyError(f"No built-in machine {name!r}; known: {sorted(BUILTIN)}") from e
