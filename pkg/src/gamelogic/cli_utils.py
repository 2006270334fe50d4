import argparse
import logging
import os
import sys
from dataclasses import dataclass, fields
from datetime import datetime
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import json5
import shtab

from gamelogic import __version__
from gamelogic.game.solver import SolverMode
from gamelogic.syntax.parser import IDENT

logger = logging.getLogger(name=__name__)


GLOBAL_CONFIG_DIR = os.path.join(
    os.path.expanduser("~"),
    ".config",
    "gamelogic",
)
PROJECT_ANCHOR = ".gamelogic"

TRACE_FORMATS = ("text", "dot")


class CliAction(Enum):
    eval = "eval"
    fragment = "fragment"
    encode = "encode"
    capture = "capture"
    compile = "compile"
    simulate = "simulate"
    version = "version"


class ExitCode(IntEnum):
    success = 0
    negative = 1
    unknown = 2
    usage = 10
    unreadable = 11
    config = 12


def parse_size_range(text: str) -> tuple[int, int]:
    """
    `A..B` is the inclusive range of model sizes; a bare `N` means `1..N`.
    An empty range (`B < A`) is allowed.
    """
    low, sep, high = str(text).strip().partition("..")
    try:
        bounds = (int(low), int(high)) if sep else (1, int(low))
    except ValueError as e:
        raise ValueError(f"Malformed size range {text!r}, expected A..B.") from e
    if min(bounds) < 0:
        raise ValueError(f"Model sizes are natural numbers, got {text!r}.")
    return bounds


def parse_assignment(text: str) -> tuple[str, int]:
    """`x=3` binds the variable `x` to the model element 3."""
    name, sep, value = str(text).partition("=")
    name = name.strip()
    try:
        if not sep or not IDENT.matches(name):
            raise ValueError
        element = int(value)
    except ValueError as e:
        raise ValueError(f"Malformed assignment {text!r}, expected VAR=ELEMENT.") from e
    if element < 0:
        raise ValueError(f"Model elements are natural numbers, got {text!r}.")
    return name, element


@dataclass
class Config:
    debug: bool = False
    no_stderr: bool = False
    pipe: bool = False
    action: Optional[CliAction] = None
    project_root: Optional[Union[str, Path]] = None
    formula: Optional[str] = None
    model: Optional[str] = None
    machine: Optional[str] = None
    vocab: Optional[str] = None
    budget: Optional[int] = None
    trace: Optional[str] = None
    out: Optional[str] = None
    sizes: Optional[tuple[int, int]] = None
    seed: int = 0
    assign: Optional[dict[str, int]] = None
    jobs: int = 1
    k: Optional[int] = None
    bound: Optional[str] = None
    solver: str = "local"
    exhaustive_threshold: int = 5000
    clock_bit_cap: int = 1_000_000

    def __post_init__(self):
        if self.budget is not None and self.budget < 1:
            raise ValueError(f"budget must be at least 1, got {self.budget}.")
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs}.")
        if self.k is not None and self.k < 0:
            raise ValueError(f"k must be a natural number, got {self.k}.")
        if self.exhaustive_threshold < 1 or self.clock_bit_cap < 1:
            raise ValueError("exhaustive_threshold and clock_bit_cap must be positive.")
        if self.trace is not None and self.trace not in TRACE_FORMATS:
            raise ValueError(f"Unknown trace format {self.trace!r}.")
        try:
            SolverMode(self.solver)
        except ValueError as e:
            e.add_note(f"Available solvers: {', '.join(m.value for m in SolverMode)}")
            raise
        if self.sizes is not None and not isinstance(self.sizes, tuple):
            if isinstance(self.sizes, str):
                self.sizes = parse_size_range(self.sizes)
            else:
                self.sizes = tuple(self.sizes)  # type:ignore

    @classmethod
    async def import_from(cls, config_dict: dict[str, Any]) -> "Config":
        """
        Build a config from the content of a config file.
        Raise ValueError for invalid values.
        """
        default_config = Config()
        return Config(
            **{
                name: config_dict.get(name, getattr(default_config, name))
                for name in (
                    "vocab",
                    "budget",
                    "trace",
                    "out",
                    "sizes",
                    "seed",
                    "jobs",
                    "k",
                    "bound",
                    "solver",
                    "exhaustive_threshold",
                    "clock_bit_cap",
                )
            }
        )

    async def merge_from(self, other: "Config") -> "Config":
        """Return the merged config."""
        final_config = {}
        default_config = Config()
        for merged_field in fields(self):
            field_name = merged_field.name
            other_val = getattr(other, field_name)
            self_val = getattr(self, field_name)
            final_config[field_name] = other_val
            if other_val is None or other_val == getattr(default_config, field_name):
                final_config[field_name] = self_val
        return Config(**final_config)


class CliParser(argparse.ArgumentParser):
    """Reports usage errors with the dedicated exit code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.usage, f"{self.prog}: error: {message}\n")


def _size_range(text: str) -> tuple[int, int]:
    try:
        return parse_size_range(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _assignment(text: str) -> tuple[str, int]:
    try:
        return parse_assignment(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def get_cli_parser():
    __default_config = Config()
    shared_parser = argparse.ArgumentParser(add_help=False)
    shared_parser.add_argument(
        "--debug",
        default=False,
        action="store_true",
        help="Enable debug mode.",
    )
    shared_parser.add_argument(
        "--project_root",
        default=None,
        help="Directory holding the project-local `.gamelogic/` config.",
    ).complete = shtab.DIRECTORY  # type:ignore
    shared_parser.add_argument(
        "--pipe",
        "-p",
        action="store_true",
        default=False,
        help="Print structured output for other programs to process.",
    )
    shared_parser.add_argument(
        "--no_stderr",
        action="store_true",
        default=False,
        help="Suppress all STDERR messages.",
    )
    shared_parser.add_argument(
        "--out",
        default=None,
        help="Write the artifact (trace, compiled formula, CSV report) to this path.",
    ).complete = shtab.FILE  # type:ignore

    formula_parser = argparse.ArgumentParser(add_help=False)
    formula_parser.add_argument(
        "--formula",
        "-f",
        required=True,
        help="Formula text, or a file containing it.",
    ).complete = shtab.FILE  # type:ignore

    model_parser = argparse.ArgumentParser(add_help=False)
    model_parser.add_argument(
        "--model",
        "-m",
        required=True,
        help="Model file in the `domain N` text format.",
    ).complete = shtab.FILE  # type:ignore

    machine_parser = argparse.ArgumentParser(add_help=False)
    machine_parser.add_argument(
        "--machine",
        required=True,
        help="Machine file, or the name of a built-in machine (EVEN-ONES, ALWAYS-ACCEPT, ALWAYS-REJECT).",
    ).complete = shtab.FILE  # type:ignore
    machine_parser.add_argument(
        "--vocab",
        default=None,
        help="Input vocabulary of the models, e.g. `P/1,R/2`.",
    )
    machine_parser.add_argument(
        "--k",
        type=int,
        default=None,
        help="Override the space exponent of the machine (models of size n get n^(k+1) cells).",
    )
    machine_parser.add_argument(
        "--bound",
        default=None,
        help="Compile with clocked element insertion up to this clock term, e.g. `3*n+2`.",
    )

    solver_parser = argparse.ArgumentParser(add_help=False)
    solver_parser.add_argument(
        "--budget",
        type=int,
        default=None,
        help="Maximum number of expanded game positions per instance.",
    )
    solver_parser.add_argument(
        "--solver",
        choices=[str(i) for i in SolverMode],
        default=__default_config.solver,
        help="Exploration strategy of the game solver.",
    )

    main_parser = CliParser(
        "gamelogic",
        parents=[shared_parser],
        description=f"GameLogic {__version__}: semantic games for a logic with loops and tapes.",
    )
    shtab.add_argument_to(
        main_parser,
        ["-s", "--print-completion"],
        parent=main_parser,
        help="Print completion script.",
    )
    subparsers = main_parser.add_subparsers(
        dest="action",
        required=False,
        title="subcommands",
    )

    eval_parser = subparsers.add_parser(
        "eval",
        parents=[shared_parser, formula_parser, model_parser, solver_parser],
        help="Decide the semantic game of a formula on a model.",
    )
    eval_parser.add_argument(
        "--trace",
        choices=TRACE_FORMATS,
        default=None,
        help="Also export a winning play (text) or the explored game graph (dot).",
    )
    eval_parser.add_argument(
        "--seed",
        type=int,
        default=__default_config.seed,
        help="Seed of the random opponent in the exported play.",
    )
    eval_parser.add_argument(
        "--assign",
        type=_assignment,
        action="append",
        default=None,
        metavar="VAR=ELEMENT",
        help="Bind a free variable of the formula to a model element. Repeatable.",
    )

    fragment_parser = subparsers.add_parser(
        "fragment",
        parents=[shared_parser, formula_parser],
        help="Report the syntactic fragments a formula belongs to.",
    )
    fragment_parser.add_argument(
        "--vocab",
        default=None,
        help="Input relations the formula may use without declaring them, e.g. `E/2`.",
    )

    subparsers.add_parser(
        "encode",
        parents=[shared_parser, model_parser],
        help="Print the binary encoding of a model.",
    )

    capture_parser = subparsers.add_parser(
        "capture",
        parents=[shared_parser, machine_parser, solver_parser],
        help="Compare a compiled machine formula with the simulator on many models.",
    )
    capture_parser.add_argument(
        "--sizes",
        type=_size_range,
        default=None,
        help="Model sizes to enumerate, `A..B` (inclusive) or `N` for 1..N.",
    )
    capture_parser.add_argument(
        "--seed",
        type=int,
        default=__default_config.seed,
        help="Seed for sampling models when the range is too large to enumerate.",
    )
    capture_parser.add_argument(
        "--jobs",
        "-j",
        type=int,
        default=__default_config.jobs,
        help="Number of worker processes.",
    )

    subparsers.add_parser(
        "compile",
        parents=[shared_parser, machine_parser],
        help="Print the formula compiled from a machine.",
    )

    simulate_parser = subparsers.add_parser(
        "simulate",
        parents=[shared_parser, model_parser],
        help="Run a machine on the encoding of a model.",
    )
    simulate_parser.add_argument(
        "--machine",
        required=True,
        help="Machine file, or the name of a built-in machine.",
    ).complete = shtab.FILE  # type:ignore

    subparsers.add_parser(
        "version", parents=[shared_parser], help="Print the version number."
    )
    return main_parser


async def parse_cli_args(args: Optional[Sequence[str]] = None):
    main_parser = get_cli_parser()
    main_args = main_parser.parse_args(args)
    if main_args.action is None:
        main_args = main_parser.parse_args(["--help"])
    configs_items: dict[str, Any] = {
        "no_stderr": main_args.no_stderr,
        "action": CliAction(main_args.action),
        "project_root": main_args.project_root,
        "pipe": main_args.pipe,
        "debug": main_args.debug,
        "out": main_args.out,
    }
    match main_args.action:
        case "eval":
            configs_items["formula"] = main_args.formula
            configs_items["model"] = main_args.model
            configs_items["budget"] = main_args.budget
            configs_items["solver"] = main_args.solver
            configs_items["trace"] = main_args.trace
            configs_items["seed"] = main_args.seed
            if main_args.assign is not None:
                configs_items["assign"] = dict(main_args.assign)
        case "fragment":
            configs_items["formula"] = main_args.formula
            configs_items["vocab"] = main_args.vocab
        case "encode":
            configs_items["model"] = main_args.model
        case "capture":
            configs_items["machine"] = main_args.machine
            configs_items["vocab"] = main_args.vocab
            configs_items["k"] = main_args.k
            configs_items["bound"] = main_args.bound
            configs_items["budget"] = main_args.budget
            configs_items["solver"] = main_args.solver
            configs_items["sizes"] = main_args.sizes
            configs_items["seed"] = main_args.seed
            configs_items["jobs"] = main_args.jobs
        case "compile":
            configs_items["machine"] = main_args.machine
            configs_items["vocab"] = main_args.vocab
            configs_items["k"] = main_args.k
            configs_items["bound"] = main_args.bound
        case "simulate":
            configs_items["machine"] = main_args.machine
            configs_items["model"] = main_args.model
    return Config(**configs_items)


def expand_envs_in_dict(d: dict):
    if not isinstance(d, dict):
        return
    stack = [d]
    while stack:
        curr = stack.pop()
        for k in curr.keys():
            if isinstance(curr[k], str):
                curr[k] = os.path.expandvars(curr[k])
            elif isinstance(curr[k], dict):
                stack.append(curr[k])


async def load_config_file(path: Optional[Union[str, Path]] = None):
    """Load config file from ~/.config/gamelogic/config.json(5)"""
    if path is None:
        for name in ("config.json5", "config.json"):
            p = os.path.join(GLOBAL_CONFIG_DIR, name)
            if os.path.isfile(p):
                path = str(p)
                break
    if path and os.path.isfile(path):
        logger.debug(f"Loading config from {path}")
        with open(path) as fin:
            content = fin.read()
        if content:
            config = json5.loads(content)
            if isinstance(config, dict):
                expand_envs_in_dict(config)
                return await Config.import_from(config)
            else:
                logger.error("Invalid configuration format!")
                raise ValueError("Invalid configuration format!")
        else:
            logger.debug("Skipping empty json file.")
    else:
        logger.debug("Loading default config.")
    return Config()


def find_project_root(
    start_from: Union[str, Path], root_anchor: Union[str, Path] = PROJECT_ANCHOR
) -> str | None:
    start_from = Path(start_from)
    if os.path.isfile(start_from):
        start_from = start_from.parent

    while start_from:
        if (start_from / Path(root_anchor)).is_dir():
            return str(start_from.absolute())
        if start_from == start_from.parent:
            return
        start_from = start_from.parent


async def get_project_config(project_root: Union[str, Path]) -> Config:
    """
    Load config file for `project_root`.
    Fallback to global config, and then default config.
    """
    if not os.path.isabs(project_root):
        project_root = os.path.abspath(project_root)
    config = None
    for ext in ("json5", "json"):
        local_config_path = os.path.join(project_root, PROJECT_ANCHOR, f"config.{ext}")
        if os.path.isfile(local_config_path):
            config = await load_config_file(local_config_path)
            break
    if config is None:
        config = await load_config_file()
    config.project_root = project_root
    return config


def config_logging(name: str = "gamelogic", stdio: bool = True):  # pragma: nocover
    """
    Configure the logging module. This should be called before `main`.

    `GAMELOGIC_LOG_LEVEL` sets the level. A log file is only written when
    `GAMELOGIC_LOG_DIR` names a directory.
    """

    logging.root.handlers = []

    level_from_env = os.environ.get("GAMELOGIC_LOG_LEVEL")
    level = None
    if level_from_env:
        level = logging._nameToLevel.get(level_from_env.upper())
        if level is None:
            logging.warning(
                "Invalid log level: %s. Falling back to default levels.", level_from_env
            )

    handlers = []
    log_dir = os.environ.get("GAMELOGIC_LOG_DIR")
    if log_dir and os.path.isdir(os.path.expanduser(log_dir)):
        log_file_path = os.path.join(
            os.path.expanduser(log_dir),
            f"{name}-{datetime.now().strftime('%Y-%m-%d_%H-%M-%S')}.log",
        )
        file_handler = logging.FileHandler(log_file_path)
        file_handler.setLevel(level or logging.WARN)
        handlers.append(file_handler)

    if stdio:
        import colorlog

        console_handler = colorlog.StreamHandler(sys.stderr)
        console_handler.setFormatter(
            colorlog.ColoredFormatter(
                fmt="%(log_color)s%(levelname)s%(reset)s: %(name)s : %(message)s",
                log_colors={
                    "DEBUG": "cyan",
                    "INFO": "green",
                    "WARNING": "yellow",
                    "ERROR": "red",
                    "CRITICAL": "bold_red",
                },
                reset=True,
            )
        )
        console_handler.setLevel(level or logging.WARN)
        handlers.append(console_handler)

    logging.basicConfig(
        handlers=handlers,
        level=level,
    )
