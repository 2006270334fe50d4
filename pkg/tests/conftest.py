import pytest

from gamelogic.atm import even_ones
from gamelogic.syntax import Vocabulary


@pytest.fixture(autouse=True)
def isolated_global_config(tmp_path, monkeypatch):
    monkeypatch.setattr(
        "gamelogic.cli_utils.GLOBAL_CONFIG_DIR", str(tmp_path / "global_config")
    )
    monkeypatch.delenv("GAMELOGIC_LOG_DIR", raising=False)
    yield


@pytest.fixture
def p_vocab() -> Vocabulary:
    return Vocabulary.parse_spec("P/1")


@pytest.fixture
def graph_vocab() -> Vocabulary:
    return Vocabulary.parse_spec("E/2,P/1")


@pytest.fixture
def even_ones_machine():
    return even_ones()
