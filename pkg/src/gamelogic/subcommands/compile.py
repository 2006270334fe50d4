import json

from gamelogic.cli_utils import Config
from gamelogic.common import (
    compile_machine,
    load_machine,
    load_vocabulary,
    write_output,
)
from gamelogic.syntax import classify_fragment, render


async def compile_formula(configs: Config) -> int:
    assert configs.machine is not None
    atm = load_machine(configs.machine)
    ast = compile_machine(configs, atm, load_vocabulary(configs.vocab))
    report = classify_fragment(ast)
    text = render(ast, declarations=True)
    if configs.out:
        write_output(configs, text)
    if configs.pipe:
        result = {"machine": atm.name, "size": ast.size, "fragment": report.to_dict()}
        if not configs.out:
            result["formula"] = text
        print(json.dumps(result))
        return 0

    if not configs.out:
        write_output(configs, text)
    print(f"# {atm.name}: {ast.size} nodes")
    print(report.to_table())
    return 0
