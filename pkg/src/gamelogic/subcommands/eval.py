import json
import logging

from gamelogic.cli_utils import Config, ExitCode
from gamelogic.common import load_formula, load_model, write_output
from gamelogic.game import (
    OpponentPolicy,
    Outcome,
    explore,
    extract_trace,
    solve,
)
from gamelogic.syntax import Severity, validate

logger = logging.getLogger(name=__name__)

OUTCOME_EXIT_CODES = {
    Outcome.eloise_wins: ExitCode.success,
    Outcome.abelard_wins: ExitCode.negative,
    Outcome.draw: ExitCode.negative,
    Outcome.unknown: ExitCode.unknown,
}


async def evaluate(configs: Config) -> int:
    assert configs.formula is not None and configs.model is not None
    model = load_model(configs.model)
    ast = load_formula(configs.formula, model.vocab)
    violations = validate(ast)
    for v in violations:
        logger.warning(str(v))
    if any(v.severity == Severity.error for v in violations):
        return ExitCode.usage
    assignment = configs.assign or {}
    outside = {v: e for v, e in assignment.items() if e not in model.domain}
    if outside:
        logger.error(f"Assigned elements are outside the model's domain: {outside}")
        return ExitCode.usage

    verdict = solve(
        ast,
        model,
        assignment,
        budget=configs.budget,
        mode=configs.solver,
        clock_bit_cap=configs.clock_bit_cap,
    )
    if configs.pipe:
        print(json.dumps(verdict.to_dict()))
    else:
        print(f"Outcome: {verdict.outcome}")
        print(verdict.stats.to_table())

    match configs.trace:
        case "text":
            if verdict.outcome.winner is None:
                logger.warning(f"No winning play to export for outcome {verdict.outcome}.")
            else:
                trace = extract_trace(
                    verdict,
                    ast,
                    model,
                    assignment,
                    opponent_policy=OpponentPolicy.random
                    if configs.seed
                    else OpponentPolicy.first,
                    seed=configs.seed,
                    clock_bit_cap=configs.clock_bit_cap,
                )
                write_output(configs, trace.to_text())
        case "dot":
            graph = explore(
                ast,
                model,
                assignment,
                budget=configs.budget,
                clock_bit_cap=configs.clock_bit_cap,
            )
            write_output(configs, graph.to_dot())
    return OUTCOME_EXIT_CODES[verdict.outcome]
