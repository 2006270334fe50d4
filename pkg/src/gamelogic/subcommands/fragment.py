from gamelogic.cli_utils import Config
from gamelogic.common import load_formula, load_vocabulary
from gamelogic.syntax import classify_fragment


async def fragment(configs: Config) -> int:
    assert configs.formula is not None
    ast = load_formula(configs.formula, load_vocabulary(configs.vocab))
    report = classify_fragment(ast)
    if configs.pipe:
        print(report.to_json())
    else:
        print(report.to_table())
    return 0
