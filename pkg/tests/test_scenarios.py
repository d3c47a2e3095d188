import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from elicitation import GameSpec, ParametricScenario, load_scenario, solve_commitment
from elicitation.exceptions import ParameterConditionViolated, UnknownScenario
from elicitation.scenarios import (
    Kind,
    email_pooling_value,
    email_value,
    investor_closed_form,
    investor_game,
    myopic_investment,
    regime_change_game,
    solve_email_filter,
    solve_investor,
    solve_regime_change,
    solve_scenario,
)

INVESTOR_VALUE = (5 - 6 * math.sqrt(2) + math.sqrt(41)) / 90


def test_load_scenario_names():
    g = load_scenario("intra-firm")
    assert isinstance(g, GameSpec)
    assert [g.u_s(s, m, a) for s in "GB" for m in "IN" for a in "OC"] == [3, 1, 2, 0, 2, 0, 3, 1]
    assert load_scenario("prop22").name == "transparent-motives-2"
    assert load_scenario("prop43").t == 3
    for name in ("beer-quiche-h", "four-state"):
        assert load_scenario(name).metadata["expected"]
    assert load_scenario("investor").kind is Kind.INVESTOR
    with pytest.raises(UnknownScenario, match="unknown"):
        load_scenario("unknown")


def test_parameter_overrides():
    sc = load_scenario("regime-change")
    assert sc["mu0"] == 0.5
    sc2 = sc.with_params(b=0.25)
    assert sc2["b"] == 0.25 and sc["b"] == 0.5
    with pytest.raises(KeyError):
        sc.with_params(nope=1)
    assert ParametricScenario("EmailFilter", {"d": 0.5})["k"] == pytest.approx(1 / 3)


def test_myopic_choices():
    assert myopic_investment(0.3) == 0
    assert myopic_investment(0.6) == pytest.approx(5 / 13)
    assert myopic_investment(0.9) == pytest.approx(40 / 41)


def test_investor_default():
    start = time.perf_counter()
    sol = solve_investor(load_scenario("investor"))
    assert time.perf_counter() - start < 10
    assert sol.regime == "separating"
    assert abs(sol.value - INVESTOR_VALUE) < 1e-6
    cf = investor_closed_form()
    assert abs(sol.variables["r"] - 40 / 41) < 1e-6
    assert abs(sol.variables["l"] - cf["l"]) < 1e-5
    assert abs(sol.variables["m"] - cf["m"]) < 1e-5
    assert sol.variables["k"] == pytest.approx(0, abs=1e-12)
    assert sol.feasible
    assert sol.extras["pooling_value"] == 0


def test_investor_exact_grid():
    sol = solve_investor(load_scenario("investor"), grid=[0, 40 / 41, 1], refine=False)
    cf = investor_closed_form()
    assert abs(sol.variables["l"] - (5 / 3 - 17 / (3 * math.sqrt(41)))) < 1e-9
    assert abs(sol.variables["m"] - (5 / 3 - math.sqrt(2) + 4 / math.sqrt(41))) < 1e-9
    assert abs(sol.value - cf["value"]) < 1e-9
    assert min(sol.residuals.values()) >= -1e-9


def test_investor_grid_refinement_is_monotone():
    sc = load_scenario("investor")
    coarse = solve_investor(sc, grid_step=0.05, refine=False).value
    fine = solve_investor(sc, grid=np.linspace(0, 1, 41), refine=False).value
    refined = solve_investor(sc, grid_step=0.05).value
    assert coarse <= fine + 1e-12
    assert coarse <= refined + 1e-12
    assert refined <= INVESTOR_VALUE + 1e-9


def test_investor_unprofitable_price_pools_at_zero():
    sol = solve_investor(load_scenario("investor").with_params(price=9.5), grid_step=0.01)
    assert sol.regime == "pooling"
    assert sol.value == 0


def test_investor_discrete_game_agrees():
    # Receiver payoffs are exact and unscaled; the float solver reports per-period values.
    g = investor_game()
    v = solve_commitment(g).value
    assert abs(float(v) * (1 - 0.9) - INVESTOR_VALUE) < 1e-8


def test_regime_change_reference_point():
    sol = solve_regime_change(load_scenario("regime-change"))
    v = sol.variables
    assert (v["p"], v["x"], v["y"], v["r"], v["r'"]) == (1, 1, 0, 0.6, 0.7)
    assert v["q"] == pytest.approx(0.4, abs=1e-12)
    assert sol.value == pytest.approx(0.14, abs=1e-12)
    assert sol.extras["pooling_value"] == pytest.approx(0.10, abs=1e-12)
    assert sol.extras["pooling_value_unscaled"] == pytest.approx(0.20, abs=1e-12)
    assert sol.value > sol.extras["pooling_value"]
    assert sol.residuals["IC[bad]"] == pytest.approx(0, abs=1e-12)
    assert sol.residuals["IC[good] reduced"] >= 0
    assert sol.feasible


def test_regime_change_degenerate_frictions():
    sol = solve_regime_change(load_scenario("regime-change").with_params(r_hi=0.6))
    assert sol.variables["q"] == 0
    assert sol.value == pytest.approx(sol.extras["pooling_value"])


@pytest.mark.parametrize(
    "override, condition",
    [
        ({"b": 0.85}, "b < (x_b"),
        ({"x_b": 0.05}, "x_b > r_hi - r_lo"),
        ({"x_g": 0.9}, "x_g > 1 > x_b"),
        ({"mu0": 0.9}, "mu0 (1 - b)"),
        ({"r_lo": 0.8}, "r_lo <= r_hi"),
        ({"g": 0.1}, "g = 0"),
    ],
)
def test_regime_change_conditions(override, condition):
    with pytest.raises(ParameterConditionViolated) as info:
        solve_regime_change(load_scenario("regime-change").with_params(**override))
    assert condition in info.value.condition


def test_regime_change_ic_over_a_grid_of_parameters():
    for b in (0.1, 0.3, 0.5, 0.7):
        for lo, hi in ((0.5, 0.55), (0.6, 0.7), (0.65, 0.75)):
            sc = load_scenario("regime-change").with_params(b=b, r_lo=lo, r_hi=hi)
            try:
                sol = solve_regime_change(sc)
            except ParameterConditionViolated:
                continue
            assert sol.feasible
            assert 0 <= sol.variables["q"] <= 1
            assert sol.value == pytest.approx(sol.extras["closed_form_value"])


def test_regime_change_discrete_game_without_news():
    # With no news (b = 0) the closed form gives q = (r_hi - r_lo)/x_b and V = mu0 (1 - r_lo) q.
    g = regime_change_game()
    sol = solve_commitment(g)
    assert sol.value == F(1, 2) * (1 - F(3, 5)) * (F(1, 10) / F(1, 2))
    assert sol.profile.as_dict(g) == {"bad": {"3/5": 1}, "good": {"7/10": 1}}


def test_email_filter_families():
    sc = load_scenario("email-filter")
    eq4 = solve_email_filter(sc, "eq4")
    assert abs(eq4.variables["theta_hat"] - 1 / 3) < 1e-9
    assert eq4.variables["p"] == 1 and abs(eq4.variables["q"]) < 1e-9
    assert abs(eq4.value - 2 / 3) < 1e-9
    eq5 = solve_email_filter(sc, "eq5")
    assert abs(eq5.variables["theta_hat"] - 1 / math.sqrt(3)) < 1e-6
    assert abs(eq5.value - (8 - math.sqrt(3)) / 9) < 1e-9
    assert eq5.value >= eq4.value
    both = solve_email_filter(sc)
    assert both.extras["family"] == "eq5"
    assert both.feasible
    with pytest.raises(ValueError):
        solve_email_filter(sc, "eq6")


def test_email_filter_brute_force():
    sc = load_scenario("email-filter")
    grid = np.linspace(1 / 3, 1, 20001)
    for fam in ("eq4", "eq5"):
        brute = max(email_value(sc, t, fam)[0] for t in grid)
        assert solve_email_filter(sc, fam).value >= brute - 1e-9


def test_email_filter_quadrature_matches_closed_form():
    sc = load_scenario("email-filter")
    via_quad = sc.with_params(cdf=lambda t: min(1.0, max(0.0, t)))
    for t in (0.2, 0.5, 0.9):
        assert email_value(via_quad, t, "eq4")[0] == pytest.approx(email_value(sc, t, "eq4")[0], abs=1e-10)
    assert solve_email_filter(via_quad).value == pytest.approx((8 - math.sqrt(3)) / 9, abs=1e-9)


def test_email_filter_pooling_when_waving_never_pays():
    sc = load_scenario("email-filter").with_params(k=1.2)
    sol = solve_email_filter(sc)
    assert sol.regime == "pooling"
    assert sol.value == pytest.approx(email_pooling_value(sc)) == pytest.approx(2 / 3)


def test_solve_scenario_dispatch():
    assert solve_scenario(load_scenario("regime-change")).value == pytest.approx(0.14)
    assert solve_scenario(load_scenario("email-filter"), family="eq4").value == pytest.approx(2 / 3)


def test_email_filter_parameter_checks():
    sc = load_scenario("email-filter")
    with pytest.raises(ParameterConditionViolated):
        solve_email_filter(sc.with_params(d=1.5))
    with pytest.raises(ParameterConditionViolated):
        solve_email_filter(sc.with_params(k=0))
