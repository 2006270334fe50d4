"""Profiling for `--debug` runs."""

import atexit
import cProfile
import io
import logging
import pstats
import sys

logger = logging.getLogger(name=__name__)

SUMMARY_LINES = 20


def report(profiler: cProfile.Profile):
    """Stop `profiler` and print its hottest calls to stderr."""
    profiler.disable()
    out = io.StringIO()
    stats = pstats.Stats(profiler, stream=out)
    stats.sort_stats("cumulative").print_stats(SUMMARY_LINES)
    print(out.getvalue(), file=sys.stderr)


def enable() -> cProfile.Profile:
    """Profile the rest of the run; the summary is printed at exit."""
    profiler = cProfile.Profile()
    profiler.enable()
    atexit.register(report, profiler)
    logger.info("cProfile profiling enabled.")
    return profiler
