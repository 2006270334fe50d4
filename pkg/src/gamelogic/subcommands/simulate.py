import json
import logging

from gamelogic.atm import reference_cells
from gamelogic.atm import simulate as run_machine
from gamelogic.cli_utils import Config, ExitCode
from gamelogic.common import load_machine, load_model
from gamelogic.structure import encode

logger = logging.getLogger(name=__name__)


async def simulate(configs: Config) -> int:
    assert configs.machine is not None and configs.model is not None
    atm = load_machine(configs.machine)
    model = load_model(configs.model)
    bits = encode(model)
    cells = reference_cells(atm, model.size, model.vocab.relations_only())
    accepted = run_machine(atm, bits, cells)
    logger.info(f"{atm.name} ran on {bits!r} with {cells} cells.")
    if configs.pipe:
        print(
            json.dumps(
                {
                    "machine": atm.name,
                    "encoding": bits,
                    "cells": cells,
                    "accepted": accepted,
                }
            )
        )
    else:
        print("accept" if accepted else "reject")
    return ExitCode.success if accepted else ExitCode.negative
