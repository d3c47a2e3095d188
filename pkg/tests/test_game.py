import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from elicitation import Belief, GameSpec, classify_game, game_to_raw, validate_game
from elicitation.exceptions import (
    DuplicateLabel,
    EmptyAxis,
    GameError,
    InvalidDistribution,
    MissingUtilityEntry,
)
from elicitation.fixtures import FINITE_FIXTURES, intra_firm, transparent_motives_two
from elicitation.game import (
    as_fraction,
    best_actions,
    expected_receiver_utilities,
    joint_best_actions,
    pooling_value,
    pure_support_actions,
)
from elicitation.io import dump_game, parse_game
from elicitation.scenarios import regime_change_game

from gen import random_game


def raw_intra():
    return game_to_raw(intra_firm())


def test_as_fraction_accepts_exact_inputs():
    assert as_fraction("2/3") == F(2, 3)
    assert as_fraction(" 0.6 ") == F(3, 5)
    assert as_fraction(4) == 4
    for bad in (0.5, True, None, "x", "1/0"):
        with pytest.raises(GameError):
            as_fraction(bad)


def test_belief_checks_and_helpers():
    assert Belief.uniform(4) == (F(1, 4),) * 4
    assert Belief.degenerate(3, 1) == (0, 1, 0)
    assert Belief((1, 0)).mix(Belief((0, 1)), F(1, 3)) == (F(2, 3), F(1, 3))
    with pytest.raises(InvalidDistribution):
        Belief((F(1, 2), F(1, 3)))
    with pytest.raises(InvalidDistribution):
        Belief((F(3, 2), F(-1, 2)))
    with pytest.raises(InvalidDistribution):
        Belief(())


def test_intra_firm_table():
    g = intra_firm()
    assert (g.n, g.t, g.k) == (2, 2, 2)
    assert [g.u_s(s, m, a) for s in "GB" for m in "IN" for a in "OC"] == [3, 1, 2, 0, 2, 0, 3, 1]
    assert g.u_r("G", "N", "O") == 1 and g.u_r("B", "I", "C") == 1 and g.u_r("G", "I", "C") == 0
    assert g.is_simple and not g.is_cheap_talk


def test_transparent_motives_two_table():
    g = transparent_motives_two()
    assert g.is_cheap_talk
    rows = {a: tuple(g.u_r(s, "g", a) for s in g.states) for a in g.actions}
    assert rows == {"l": (0, 1, 2), "s": (F(13, 24), F(13, 24), 1), "x": (1, 0, 1)}


def test_missing_field_and_entry_diagnostics():
    raw = raw_intra()
    del raw["actions"]
    with pytest.raises(GameError, match="actions"):
        validate_game(raw)
    raw = raw_intra()
    del raw["sender_utility"]["B"]["N"]["C"]
    with pytest.raises(MissingUtilityEntry, match=r"sender_utility\.B\.N"):
        validate_game(raw)


def test_label_errors():
    raw = raw_intra()
    raw["states"] = ["G", "G"]
    with pytest.raises(DuplicateLabel):
        validate_game(raw)
    raw["states"] = []
    with pytest.raises(EmptyAxis):
        validate_game(raw)


def test_prior_errors():
    raw = raw_intra()
    raw["prior"] = ["1/2", "1/3"]
    with pytest.raises(InvalidDistribution):
        validate_game(raw)
    raw["prior"] = ["1/2", "1/4", "1/4"]
    with pytest.raises(InvalidDistribution):
        validate_game(raw)
    raw["prior"] = [0.5, 0.5]
    with pytest.raises(GameError, match="float"):
        validate_game(raw)


def test_simple_flag_skips_message_level():
    raw = raw_intra()
    raw["simple"] = True
    raw["receiver_utility"] = {"G": {"O": "1", "C": "0"}, "B": {"O": 0, "C": 1}}
    assert validate_game(raw).receiver == intra_firm().receiver


def test_no_prior_is_an_error_only_when_needed():
    raw = raw_intra()
    del raw["prior"]
    g = validate_game(raw)
    assert g.prior is None
    with pytest.raises(GameError):
        g.resolve_prior()
    assert g.resolve_prior((F(1, 2), F(1, 2))) == (F(1, 2), F(1, 2))


@pytest.mark.parametrize("name", sorted(FINITE_FIXTURES))
def test_fixture_round_trip(name):
    g = FINITE_FIXTURES[name]()
    back = parse_game(dump_game(g))
    assert back == g
    assert json.loads(dump_game(back)) == json.loads(dump_game(g))


@given(st.integers(0, 10**6))
def test_random_round_trip(seed):
    g = random_game(random.Random(seed))
    assert parse_game(dump_game(g)) == g


def test_best_responses_intra_firm():
    g = intra_firm()
    assert expected_receiver_utilities(g, (F(2, 3), F(1, 3))) == (F(2, 3), F(1, 3))
    assert best_actions(g, (F(1, 2), F(1, 2))) == ("O", "C")
    assert pooling_value(g, (F(2, 3), F(1, 3))) == (F(2, 3), "O")
    assert pooling_value(g, (F(1, 4), F(3, 4))) == (F(3, 4), "C")
    assert joint_best_actions(g, [[F(1), 0], [0, F(2)]]) == (1,)
    assert pure_support_actions(g) == frozenset({0, 1})


def test_classify():
    rep = classify_game(intra_firm())
    assert rep.is_simple and rep.condition1 and rep.strong_condition
    rep = classify_game(regime_change_game())
    assert not rep.is_simple and rep.strong_condition
    assert rep.favorite_message == "3/5"
    assert rep.message_order == ("3/5", "13/20", "7/10")
    g = GameSpec.from_functions(
        ("s",), ("a", "b"), ("x", "y"),
        lambda s, m, a: (1 if a == "x" else 0) if m == "a" else (1 if a == "y" else 0),
        lambda s, m, a: 0,
    )
    rep = classify_game(g)
    assert not rep.condition1 and not rep.strong_condition and rep.favorite_message is None
