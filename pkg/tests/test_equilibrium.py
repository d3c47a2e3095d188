import random
from fractions import Fraction as F

import pytest

from elicitation import (
    EquilibriumTriple,
    GameSpec,
    ReceiverStrategy,
    SenderProfile,
    Signal,
    solve_commitment,
    solve_full_transparency,
    solve_full_transparency_pure,
    solve_transparency_pure,
    to_direct_signal,
    to_separating,
    verify_equilibrium,
)
from elicitation.exceptions import (
    InputNotEquilibrium,
    InputNotIC,
    NoEquilibriumFound,
    NonDirectSignal,
    NotCheapTalk,
    ProfileLimitExceeded,
    TooFewMessages,
)
from elicitation.fixtures import (
    FINITE_FIXTURES,
    TM_PRIORS,
    intra_firm,
    transparent_motives_three,
    transparent_motives_two,
)
from elicitation.game import best_actions
from elicitation.scenarios import investor_game

from gen import random_game

MU = (F(2, 3), F(1, 3))


def test_pooling_full_transparency():
    g = intra_firm()
    prof = SenderProfile.from_assignment((0, 0), 2)
    resp = ReceiverStrategy.pure(g.messages, g.actions, (0, 1))
    rep = verify_equilibrium(g, MU, EquilibriumTriple(Signal.identity(g), prof, resp))
    assert rep.ic_ok and rep.sequential_ok and rep.ok
    assert rep.receiver_value == F(2, 3) == rep.receiver_value_by_posterior
    assert rep.realization_probabilities == {"I": 1, "N": 0}


def test_constant_signal_with_separation():
    g = intra_firm()
    prof = SenderProfile.from_assignment((0, 1), 2)
    triple = EquilibriumTriple(Signal.constant(g, "O"), prof, ReceiverStrategy.identity(g))
    rep = verify_equilibrium(g, MU, triple)
    assert rep.ok and rep.receiver_value == F(2, 3)


def test_optimal_signal_triple():
    g = intra_firm()
    sol = solve_commitment(g, MU)
    rep = verify_equilibrium(g, MU, EquilibriumTriple(sol.signal, sol.profile, ReceiverStrategy.identity(g)))
    assert rep.ok and rep.receiver_value == F(5, 6)
    assert rep.type_values == {"G": 3, "B": 2}


def test_violating_signal_reports_bad_type():
    g = intra_firm()
    # p = pi(C|I) = 0 and q = pi(C|N) = 1: the bad type prefers I.
    bad = Signal.direct_signal(g, ((1, 0), (0, 1)))
    rep = verify_equilibrium(g, MU, EquilibriumTriple(bad, SenderProfile.from_assignment((0, 1), 2), ReceiverStrategy.identity(g)))
    assert not rep.ic_ok
    assert rep.ic_violation == ("B", "N", 1)


def test_sequential_violation_on_and_off_path():
    g = intra_firm()
    prof = SenderProfile.from_assignment((0, 0), 2)
    resp = ReceiverStrategy.pure(g.messages, g.actions, (1, 1))
    rep = verify_equilibrium(g, MU, EquilibriumTriple(Signal.identity(g), prof, resp))
    assert not rep.sequential_ok
    assert rep.sequential_violation == ("I", F(1, 3))
    # An action that no belief supports after an off-path realization.
    h = GameSpec.from_functions(
        ("a",), ("x", "y"), ("u", "z"), lambda s, m, a: 1 if a == "u" else 0, lambda s, m, a: 0, prior=(1,)
    )
    resp = ReceiverStrategy.pure(h.messages, h.actions, (0, 1))
    rep = verify_equilibrium(h, None, EquilibriumTriple(Signal.identity(h), SenderProfile.from_assignment((0,), 2), resp))
    assert rep.sequential_violation == ("y", None)


def test_to_direct_signal_preserves_value():
    g = intra_firm()
    prof = SenderProfile.from_assignment((0, 0), 2)
    resp = ReceiverStrategy.pure(g.messages, g.actions, (0, 1))
    triple = EquilibriumTriple(Signal.identity(g), prof, resp)
    direct = to_direct_signal(g, triple, MU)
    assert direct.signal.is_direct_for(g)
    assert direct.signal.kernel == ((1, 0), (0, 1))
    rep = verify_equilibrium(g, MU, direct)
    assert rep.ok and rep.receiver_value == F(2, 3)
    bad = EquilibriumTriple(Signal.identity(g), prof, ReceiverStrategy.pure(g.messages, g.actions, (1, 1)))
    with pytest.raises(InputNotEquilibrium):
        to_direct_signal(g, bad, MU)


def _mixed_candidate(w):
    """L sends b, H sends g, M sends g with probability w; pure best replies."""
    g = transparent_motives_two()
    mu = TM_PRIORS[0]
    prof = SenderProfile(((0, 1), (w, 1 - w), (1, 0)))
    choice = []
    for j in range(2):
        post = [mu[i] * prof.strategy[i][j] for i in range(3)]
        total = sum(post)
        choice.append(g.action_index(best_actions(g, [p / total for p in post])[0]))
    return g, EquilibriumTriple(Signal.identity(g), prof, ReceiverStrategy.pure(g.messages, g.actions, choice))


def test_mixing_weight_by_grid_search():
    best = None
    for step in range(1, 130):
        w = F(step, 130)
        g, triple = _mixed_candidate(w)
        rep = verify_equilibrium(g, TM_PRIORS[0], triple)
        if rep.ok and (best is None or rep.receiver_value > best[0]):
            best = (rep.receiver_value, w)
    assert best == (F(67, 52), F(2, 13))


def test_exact_mixed_solver_matches_grid():
    v, triple = solve_full_transparency(transparent_motives_two(), TM_PRIORS[0])
    assert v == F(67, 52)
    assert triple.profile.strategy[1] == (F(2, 13), F(11, 13))


def _embed_in_three_messages():
    g2, t2 = _mixed_candidate(F(2, 13))
    g3 = transparent_motives_three()
    # Columns (g, m, b); message m goes unused and is answered like b.
    prof = SenderProfile(tuple((row[0], 0, row[1]) for row in t2.profile.strategy))
    resp_rows = t2.response.response
    resp = ReceiverStrategy(g3.messages, g3.actions, (resp_rows[0], resp_rows[1], resp_rows[1]))
    return g3, EquilibriumTriple(Signal.identity(g3), prof, resp)


def test_to_separating_on_mixed_equilibrium():
    g3, triple = _embed_in_three_messages()
    mu = TM_PRIORS[0]
    rep = verify_equilibrium(g3, mu, triple)
    assert rep.ok and rep.receiver_value == F(67, 52)
    direct = to_direct_signal(g3, triple, mu)
    signal, profile = to_separating(g3, mu, direct.signal, direct.profile)
    assert profile.assignment == (0, 1, 2)
    assert signal.kernel[1] == (F(2, 13), F(11, 13), 0)
    after = verify_equilibrium(g3, mu, EquilibriumTriple(signal, profile, ReceiverStrategy.identity(g3)))
    assert after.ok
    assert after.receiver_value == F(67, 52)
    assert after.type_values == rep.type_values


def test_to_separating_errors():
    g = intra_firm()
    sol = solve_commitment(g, MU)
    with pytest.raises(NotCheapTalk):
        to_separating(g, MU, sol.signal, sol.profile)
    g2 = transparent_motives_two()
    sol = solve_transparency_pure(g2)
    with pytest.raises(TooFewMessages):
        to_separating(g2, None, sol.signal, sol.profile)
    g3 = transparent_motives_three()
    sol = solve_transparency_pure(g3)
    with pytest.raises(NonDirectSignal):
        to_separating(g3, None, Signal.identity(g3), sol.profile)
    lying = Signal.direct_signal(g3, ((0, 0, 1), (0, 1, 0), (1, 0, 0)))
    with pytest.raises(InputNotIC):
        to_separating(g3, None, lying, SenderProfile.from_assignment((0, 0, 0), 3))


def test_full_transparency_pure_fixtures():
    g = intra_firm()
    v, triple = solve_full_transparency_pure(g, MU)
    assert v == F(2, 3)
    assert verify_equilibrium(g, MU, triple).ok
    one = GameSpec.from_functions(("s",), ("m",), ("a", "b"), lambda s, m, a: 2 if a == "b" else 1, lambda s, m, a: 0, prior=(1,))
    assert solve_full_transparency_pure(one)[0] == 2
    with pytest.raises(NoEquilibriumFound):
        solve_full_transparency_pure(g, (F(1, 4), F(3, 4)))


def test_full_transparency_mixed_intra_firm():
    g = intra_firm()
    v, triple = solve_full_transparency(g, (F(1, 4), F(3, 4)))
    assert v == F(3, 4)
    assert verify_equilibrium(g, (F(1, 4), F(3, 4)), triple).ok
    assert solve_full_transparency(g, MU)[0] == F(2, 3)
    with pytest.raises(ProfileLimitExceeded):
        solve_full_transparency(g, MU, max_combinations=10)


def test_investor_discrete_has_no_pure_equilibrium():
    with pytest.raises(NoEquilibriumFound):
        solve_full_transparency_pure(investor_game())


@pytest.mark.parametrize("name", sorted(FINITE_FIXTURES))
def test_solver_chain_ordering(name):
    g = FINITE_FIXTURES[name]()
    c = solve_commitment(g).value
    tr = solve_transparency_pure(g).value
    assert tr <= c
    try:
        full = solve_full_transparency_pure(g)[0]
    except NoEquilibriumFound:
        return
    assert full <= tr


def test_random_pure_equilibria_verify():
    rng = random.Random(4)
    found = 0
    for _ in range(80):
        g = random_game(rng, max_dim=3)
        try:
            v, triple = solve_full_transparency_pure(g)
        except NoEquilibriumFound:
            continue
        rep = verify_equilibrium(g, None, triple)
        assert rep.ok and rep.receiver_value == v
        found += 1
    assert found > 30


def test_random_mixed_at_least_pure():
    rng = random.Random(8)
    for _ in range(25):
        g = random_game(rng, n=2, t=2, k=2)
        v, triple = solve_full_transparency(g)
        assert verify_equilibrium(g, None, triple).ok
        try:
            assert solve_full_transparency_pure(g)[0] <= v
        except NoEquilibriumFound:
            pass
