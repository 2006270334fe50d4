import json

import pytest

from gamelogic.cli_utils import Config
from gamelogic.errors import ParseError
from gamelogic.subcommands.fragment import fragment


async def _report(capsys, formula: str, vocab=None) -> dict:
    assert await fragment(Config(formula=formula, vocab=vocab, pipe=True)) == 0
    return json.loads(capsys.readouterr().out)


@pytest.mark.asyncio
async def test_fragment_first_order(capsys):
    report = await _report(capsys, "exists x . forall y . E(x,y)", "E/2")
    assert report == {
        "in_T_minus_Ix": True,
        "in_T_pol": True,
        "in_T_kexp": 0,
        "in_T_Ix_kexp": 0,
        "in_T_allexp": True,
    }


@pytest.mark.asyncio
async def test_fragment_unclocked_loop(capsys):
    report = await _report(capsys, "tape X/0 loop L . (X() | ins X() . L)")
    assert report["in_T_minus_Ix"]
    assert not report["in_T_pol"]
    assert report["in_T_kexp"] is None
    assert not report["in_T_allexp"]


@pytest.mark.asyncio
async def test_fragment_clocked_insertion(capsys):
    report = await _report(capsys, "loop L[3*n+2] . Ix x[exp(1, n)] . L")
    assert not report["in_T_minus_Ix"]
    assert not report["in_T_pol"]
    assert report["in_T_kexp"] == 0
    assert report["in_T_Ix_kexp"] == 1
    assert report["in_T_allexp"]


@pytest.mark.asyncio
async def test_fragment_table(capsys):
    assert await fragment(Config(formula="top")) == 0
    out = capsys.readouterr().out
    assert "in_T_pol" in out
    assert "Member (least k)" in out


@pytest.mark.asyncio
async def test_fragment_errors():
    with pytest.raises(ParseError):
        await fragment(Config(formula="exists x . E(x,x)"))
    with pytest.raises(ParseError):
        await fragment(Config(formula="top", vocab="E/two"))
