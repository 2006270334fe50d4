import logging
import os
from typing import Optional

from gamelogic.atm import (
    Atm,
    builtin,
    compile_apspace,
    compile_kexpspace,
    parse_machine,
)
from gamelogic.cli_utils import Config
from gamelogic.errors import ParseError
from gamelogic.structure import Structure, parse_structure
from gamelogic.syntax import FormulaAst, Vocabulary, parse_clock, parse_formula
from gamelogic.syntax.clock import ClockTerm

logger = logging.getLogger(name=__name__)


def read_file(path: str) -> str:
    """Raise OSError when `path` is not a readable file."""
    expanded = os.path.expanduser(os.path.expandvars(path))
    with open(expanded) as fin:
        return fin.read()


def load_formula(source: str, vocab: Optional[Vocabulary] = None) -> FormulaAst:
    """`source` is a file path when such a file exists, otherwise formula text."""
    if os.path.isfile(os.path.expanduser(source)):
        logger.debug(f"Reading formula from {source}")
        source = read_file(source)
    return parse_formula(source, vocab)


def load_model(path: str) -> Structure:
    return parse_structure(read_file(path))


def load_machine(source: str) -> Atm:
    """A machine file, or the name of a built-in machine."""
    if os.path.isfile(os.path.expanduser(source)):
        return parse_machine(read_file(source))
    try:
        return builtin(source)
    except KeyError:
        raise FileNotFoundError(f"{source} is neither a machine file nor a built-in machine.")


def load_vocabulary(spec: Optional[str]) -> Vocabulary:
    if not spec:
        return Vocabulary()
    try:
        return Vocabulary.parse_spec(spec)
    except ValueError as e:
        raise ParseError(f"Malformed vocabulary {spec!r}: {e}") from e


def load_bound(configs: Config, atm: Atm) -> Optional[ClockTerm]:
    """The clock bound of the element-inserting construction, if it applies."""
    if configs.bound:
        return parse_clock(configs.bound)
    if configs.k is None:
        return atm.space_clock
    return None


def write_output(configs: Config, text: str):
    """Write to `--out` when it is set, otherwise to stdout."""
    if configs.out:
        with open(configs.out, "w") as fout:
            fout.write(text)
        logger.info(f"Saved output to {configs.out}.")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def compile_machine(configs: Config, atm: Atm, vocab: Vocabulary) -> FormulaAst:
    bound = load_bound(configs, atm)
    if bound is not None:
        return compile_kexpspace(atm, bound, vocab, configs.clock_bit_cap)
    return compile_apspace(atm, configs.k, vocab)
