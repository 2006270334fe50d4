import asyncio
import logging
import os
import sys
import traceback

from gamelogic import __version__
from gamelogic.cli_utils import (
    CliAction,
    ExitCode,
    config_logging,
    find_project_root,
    get_project_config,
    parse_cli_args,
)
from gamelogic.errors import GameLogicError, ParseError

logger = logging.getLogger(name=__name__)


async def async_main():
    try:
        cli_args = await parse_cli_args()
    except ValueError as e:
        traceback.print_exception(e, file=sys.stderr)
        return ExitCode.config
    if cli_args.no_stderr:
        sys.stderr = open(os.devnull, "w")

    if cli_args.debug:
        from gamelogic import debugging

        debugging.enable()

    logger.info("Collected CLI arguments: %s", cli_args)

    if cli_args.project_root is None:
        cwd = os.getcwd()
        cli_args.project_root = (
            find_project_root(cwd, ".gamelogic") or find_project_root(cwd, ".git") or cwd
        )

    logger.info(f"Project root is set to {cli_args.project_root}")

    try:
        final_configs = await (
            await get_project_config(cli_args.project_root)
        ).merge_from(cli_args)
    except IOError as e:
        traceback.print_exception(e, file=sys.stderr)
        return ExitCode.unreadable
    except ValueError as e:
        traceback.print_exception(e, file=sys.stderr)
        return ExitCode.config

    logger.info("Final configuration has been built: %s", final_configs)

    if final_configs.action == CliAction.version:
        print(__version__)
        return ExitCode.success

    return_val = ExitCode.success
    try:
        match final_configs.action:
            case CliAction.eval:
                from gamelogic.subcommands import evaluate

                return_val = await evaluate(final_configs)
            case CliAction.fragment:
                from gamelogic.subcommands import fragment

                return_val = await fragment(final_configs)
            case CliAction.encode:
                from gamelogic.subcommands import encode

                return_val = await encode(final_configs)
            case CliAction.capture:
                from gamelogic.subcommands import capture

                return_val = await capture(final_configs)
            case CliAction.compile:
                from gamelogic.subcommands import compile_formula

                return_val = await compile_formula(final_configs)
            case CliAction.simulate:
                from gamelogic.subcommands import simulate

                return_val = await simulate(final_configs)
    except ParseError as e:
        return_val = ExitCode.usage
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
    except OSError as e:
        return_val = ExitCode.unreadable
        print(f"Cannot read input: {e}", file=sys.stderr)
    except GameLogicError:
        return_val = ExitCode.usage
        logger.error(traceback.format_exc())
    except Exception:
        return_val = ExitCode.negative
        logger.error(traceback.format_exc())
    return int(return_val)


def main():  # pragma: nocover
    config_logging("gamelogic")
    return asyncio.run(async_main())


if __name__ == "__main__":  # pragma: nocover
    sys.exit(main())
