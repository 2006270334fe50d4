import json

from gamelogic.cli_utils import Config
from gamelogic.common import load_model
from gamelogic.structure import encode as encode_structure


async def encode(configs: Config) -> int:
    assert configs.model is not None
    model = load_model(configs.model)
    bits = encode_structure(model)
    if configs.pipe:
        print(
            json.dumps(
                {
                    "size": model.size,
                    "vocabulary": list(model.vocab.canonical_order),
                    "encoding": bits,
                }
            )
        )
    else:
        print(bits)
    return 0
