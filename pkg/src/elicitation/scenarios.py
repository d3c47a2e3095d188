"""Built-in scenarios: finite fixture games and three parametric models.

The parametric models have irrational optima, so they are solved in
double precision with scipy. Finite fixtures stay exact.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy import integrate, optimize

from .exceptions import InfeasibleAtAllGridPoints, ParameterConditionViolated, UnknownScenario
from .fixtures import ALIASES, FINITE_FIXTURES
from .game import GameSpec

FEAS_TOL = 1e-9


class Kind(str, Enum):
    INVESTOR = "Investor"
    REGIME_CHANGE = "RegimeChange"
    EMAIL_FILTER = "EmailFilter"


DEFAULTS = {
    Kind.INVESTOR: {
        "types": (0.3, 0.6, 0.9),
        "weights": (1 / 3, 1 / 3, 1 / 3),
        "discount": 0.9,
        "price": 7.0,
        "bonus": 0.6,
    },
    Kind.REGIME_CHANGE: {
        "mu0": 0.5,
        "b": 0.5,
        "g": 0.0,
        "x_b": 0.5,
        "x_g": 2.0,
        "r_lo": 0.6,
        "r_hi": 0.7,
    },
    Kind.EMAIL_FILTER: {
        "d": 2 / 3,
        "k": 1 / 3,
        "cdf": "uniform",
        "x": "identity",
    },
}


@dataclass(frozen=True)
class ParametricScenario:
    kind: Kind
    parameters: Mapping

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        merged = dict(DEFAULTS[self.kind])
        merged.update(self.parameters)
        object.__setattr__(self, "parameters", MappingProxyType(merged))

    def with_params(self, **overrides):
        unknown = set(overrides) - set(DEFAULTS[self.kind])
        if unknown:
            raise KeyError(f"unknown parameter(s) for {self.kind.value}: {', '.join(sorted(unknown))}")
        return ParametricScenario(self.kind, {**self.parameters, **overrides})

    def __getitem__(self, name):
        return self.parameters[name]


@dataclass(frozen=True)
class ScenarioSolution:
    variables: Mapping
    value: float
    residuals: Mapping
    regime: str = "separating"
    extras: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for name in ("variables", "residuals", "extras"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))

    @property
    def feasible(self):
        return all(r >= -FEAS_TOL for r in self.residuals.values())


# --- investor ---------------------------------------------------------------


def _investment_utility(gamma, r):
    return gamma * math.sqrt(1 + r) + (1 - gamma) * math.sqrt(max(0.0, 1 - r))


def myopic_investment(gamma):
    """Risky share maximizing the investment utility alone.

    Setting the derivative to zero gives ``r = (g^2 - (1-g)^2) / (g^2 + (1-g)^2)``.
    """
    a, b = gamma * gamma, (1 - gamma) ** 2
    return min(1.0, max(0.0, (a - b) / (a + b)))


def _investor_lp(sc, r_mid):
    """Best buy probabilities when the types invest ``(0, r_mid, 1)``.

    Returns ``(value, (k, l, m), residuals)`` or ``None`` if infeasible.
    Value is in per-period units: ``sum_i w_i pi_i (gamma_i - (1 - delta) price)``.
    """
    gammas = sc["types"]
    w = sc["weights"]
    bonus = sc["bonus"]
    hurdle = (1 - sc["discount"]) * sc["price"]
    msgs = (0.0, r_mid, 1.0)
    n = len(gammas)
    base = [[_investment_utility(g, r) for r in msgs] for g in gammas]
    outside = [_investment_utility(g, myopic_investment(g)) for g in gammas]
    c = np.array([-w[i] * (gammas[i] - hurdle) for i in range(n)])
    A, b, names = [], [], []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            # base_ii + bonus pi_i >= base_ij + bonus pi_j
            row = np.zeros(n)
            row[i] -= bonus
            row[j] += bonus
            A.append(row)
            b.append(base[i][i] - base[i][j])
            names.append(f"IC[{gammas[i]:g}->{msgs[j]:g}]")
        # Off-path investments are answered with no purchase.
        row = np.zeros(n)
        row[i] -= bonus
        A.append(row)
        b.append(base[i][i] - outside[i])
        names.append(f"IC[{gammas[i]:g}->off]")
    A_eq, b_eq = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if msgs[i] == msgs[j]:
                row = np.zeros(n)
                row[i], row[j] = 1, -1
                A_eq.append(row)
                b_eq.append(0.0)
    res = optimize.linprog(
        c,
        A_ub=np.array(A),
        b_ub=np.array(b),
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=[(0, 1)] * n,
        method="highs",
    )
    if res.status != 0:
        return None
    x = res.x
    residuals = {name: float(bi - row @ x) for name, row, bi in zip(names, A, b)}
    return -res.fun, tuple(float(v) for v in x), residuals


def solve_investor(scenario: ParametricScenario, grid_step=1e-3, grid=None, refine=True) -> ScenarioSolution:
    """Receiver-optimal disclosure rule with the types separating on ``0 < r < 1``.

    The lowest type invests 0 and the highest invests 1; the middle type's
    ``r`` is searched on a grid (step ``grid_step``, or the explicit ``grid``)
    and then refined by bounded scalar minimization around the best cell.
    """
    sc = scenario
    if grid is None:
        grid = np.linspace(0.0, 1.0, int(round(1 / grid_step)) + 1)
    grid = [float(r) for r in grid]
    best = None
    for r in grid:
        found = _investor_lp(sc, r)
        if found is not None and (best is None or found[0] > best[1][0] + 1e-15):
            best = (r, found)
    if best is None:
        raise InfeasibleAtAllGridPoints("the separating program is infeasible on the whole grid")
    if refine and len(grid) > 2:
        r0 = best[0]
        idx = grid.index(r0)
        lo, hi = grid[max(0, idx - 1)], grid[min(len(grid) - 1, idx + 1)]

        def neg(r):
            found = _investor_lp(sc, r)
            return -found[0] if found is not None else math.inf

        res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if res.success and -res.fun > best[1][0]:
            found = _investor_lp(sc, float(res.x))
            if found is not None:
                best = (float(res.x), found)
    r, (value, (k, l, m), residuals) = best
    gammas, w = sc["types"], sc["weights"]
    hurdle = (1 - sc["discount"]) * sc["price"]
    pooling = max(0.0, sum(wi * (g - hurdle) for wi, g in zip(w, gammas)))
    extras = {"pooling_value": pooling, "separating_value": value}
    if pooling >= value:
        return ScenarioSolution(
            {"k": 0.0, "l": 0.0, "m": 0.0, "r": r} if pooling == 0 else {"k": 1.0, "l": 1.0, "m": 1.0, "r": r},
            pooling,
            {},
            "pooling",
            extras,
        )
    return ScenarioSolution({"k": k, "l": l, "m": m, "r": r}, value, residuals, "separating", extras)


def investor_closed_form():
    """Closed-form optimum at the default parameters."""
    s41 = math.sqrt(41)
    return {
        "r": 40 / 41,
        "l": 5 / 3 - 17 / (3 * s41),
        "m": 5 / 3 - math.sqrt(2) + 4 / s41,
        "value": (5 - 6 * math.sqrt(2) + s41) / 90,
    }


def investor_game(scenario=None, investments=(Fraction(0), Fraction(40, 41), Fraction(1))):
    """Finite investor game with the given investment levels as messages.

    Square roots make the sender payoffs irrational; they are rounded to
    rationals with denominators up to 10^9. Receiver payoffs stay exact.
    """
    sc = scenario or load_scenario("investor")
    gammas = [Fraction(g).limit_denominator(1000) for g in sc["types"]]
    price = Fraction(sc["price"]).limit_denominator(1000)
    per = 1 / (1 - Fraction(sc["discount"]).limit_denominator(1000))
    bonus = Fraction(sc["bonus"]).limit_denominator(1000)
    states = tuple(str(g) for g in gammas)
    messages = tuple(str(Fraction(r)) for r in investments)
    weights = [Fraction(x).limit_denominator(1000) for x in sc["weights"]]

    def sender(s, m, a):
        g = gammas[states.index(s)]
        base = Fraction(_investment_utility(float(g), float(Fraction(m)))).limit_denominator(10**9)
        return base + (bonus if a == "buy" else 0)

    def receiver(s, m, a):
        return gammas[states.index(s)] * per - price if a == "buy" else 0

    return GameSpec.from_functions(
        states, messages, ("not", "buy"), receiver, sender, prior=weights, name="investor-discrete"
    )


# --- regime change ----------------------------------------------------------


def check_regime_conditions(sc):
    """Raise :class:`ParameterConditionViolated` naming the first failed condition."""
    mu0, b, g = sc["mu0"], sc["b"], sc["g"]
    x_b, x_g, lo, hi = sc["x_b"], sc["x_g"], sc["r_lo"], sc["r_hi"]
    checks = (
        ("0 < mu0 < 1", 0 < mu0 < 1),
        ("0 < r_lo <= r_hi < 1", 0 < lo <= hi < 1),
        ("x_g > 1 > x_b", x_g > 1 > x_b),
        ("1 > b > g = 0", 1 > b > g and g == 0),
        ("x_b > r_hi - r_lo", x_b > hi - lo),
        ("b < (x_b - (r_hi - r_lo)) / x_b", b < (x_b - (hi - lo)) / x_b),
        ("mu0 (1 - b)(1 - r_lo) - (1 - mu0) r_lo < 0", mu0 * (1 - b) * (1 - lo) - (1 - mu0) * lo < 0),
    )
    for name, ok in checks:
        if not ok:
            raise ParameterConditionViolated(name, f"parameters {dict(sc.parameters)}")


def _regime_value(sc, p, q, x, y, r, r2):
    mu0, b = sc["mu0"], sc["b"]
    return mu0 * (b * p * (1 - r) + (1 - b) * q * (1 - r)) + (1 - mu0) * y * (-r2)


def _regime_ic(sc, p, q, x, y, r, r2):
    b, x_b, x_g = sc["b"], sc["x_b"], sc["x_g"]
    bad_stay = b * (p * -r + (1 - p) * (x_b - r)) + (1 - b) * (q * -r + (1 - q) * (x_b - r))
    bad_dev = b * (x * -r2 + (1 - x) * (x_b - r2)) + (1 - b) * (y * -r2 + (1 - y) * (x_b - r2))
    good_stay = y * (x_g - 1 - r2) + (1 - y) * (x_g - r2)
    good_dev = q * (x_g - 1 - r) + (1 - q) * (x_g - r)
    return bad_stay - bad_dev, good_stay - good_dev


def solve_regime_change(scenario: ParametricScenario) -> ScenarioSolution:
    """Commitment optimum: the bad type picks ``r_lo``, the good type ``r_hi``.

    After ``(r_lo, B)`` the receiver attacks, after ``(r_lo, G)`` she attacks
    with probability ``q``, after ``(r_hi, B)`` she attacks and after
    ``(r_hi, G)`` she does not. Off-path frictions are met with an attack.
    """
    sc = scenario
    check_regime_conditions(sc)
    mu0, b, x_b, lo, hi = sc["mu0"], sc["b"], sc["x_b"], sc["r_lo"], sc["r_hi"]
    p, x, y = 1.0, 1.0, 0.0
    q = (hi - lo) / (x_b * (1 - b))
    value = _regime_value(sc, p, q, x, y, lo, hi)
    ic_bad, ic_good = _regime_ic(sc, p, q, x, y, lo, hi)
    reduced = (hi - lo) * (1 - x_b * (1 - b))
    pooling = mu0 * b * (1 - lo)
    return ScenarioSolution(
        {"p": p, "q": q, "x": x, "y": y, "r": lo, "r'": hi},
        value,
        {"IC[bad]": ic_bad, "IC[good]": ic_good, "IC[good] reduced": reduced},
        "separating",
        {
            "closed_form_value": mu0 * (1 - lo) * (b + (hi - lo) / x_b),
            "pooling_value": pooling,
            "pooling_value_unscaled": b * (1 - lo),
        },
    )


def regime_change_game(scenario=None, grid=(Fraction(3, 5), Fraction(13, 20), Fraction(7, 10))):
    """Finite version with friction levels ``grid`` as messages; news is left out."""
    sc = scenario or load_scenario("regime-change")
    x_b = Fraction(sc["x_b"]).limit_denominator(10**6)
    x_g = Fraction(sc["x_g"]).limit_denominator(10**6)
    mu0 = Fraction(sc["mu0"]).limit_denominator(10**6)
    messages = tuple(str(Fraction(r)) for r in grid)

    def receiver(s, m, a):
        r = Fraction(m)
        if a == "not":
            return 0
        return 1 - r if s == "bad" else -r

    def sender(s, m, a):
        r = Fraction(m)
        if s == "bad":
            return -r if a == "attack" else x_b - r
        return x_g - (1 if a == "attack" else 0) - r

    return GameSpec.from_functions(
        ("bad", "good"), messages, ("not", "attack"), receiver, sender,
        prior=(mu0, 1 - mu0), name="regime-change-discrete",
    )


# --- email filter -----------------------------------------------------------


def _as_callable(spec, kind):
    if callable(spec):
        return spec
    if spec == "uniform" and kind == "cdf":
        return lambda t: min(1.0, max(0.0, t))
    if spec == "identity" and kind == "x":
        return lambda t: t
    raise ValueError(f"unknown {kind} {spec!r}")


def _email_integrals(sc, cut):
    """``(int_0^cut (t - d) dF, int_cut^1 (t - d) dF)``."""
    d = sc["d"]
    if sc["cdf"] == "uniform":
        low = cut * cut / 2 - d * cut
        high = (1 - cut * cut) / 2 - d * (1 - cut)
        return low, high
    F = _as_callable(sc["cdf"], "cdf")

    # Integration by parts: int_a^b (t - d) dF = [(t - d) F]_a^b - int_a^b F.
    def part(a, b):
        area = integrate.quad(F, a, b, epsabs=1e-13, epsrel=1e-13)[0]
        return (b - d) * F(b) - (a - d) * F(a) - area

    return part(0.0, cut), part(cut, 1.0)


def email_value(sc, cut, family):
    x = _as_callable(sc["x"], "x")
    k = sc["k"]
    if family == "eq4":
        p, q = 1.0, 1 - k / x(cut)
    else:
        p, q = k / x(cut), 0.0
    low, high = _email_integrals(sc, cut)
    return q * low + p * high + sc["d"], p, q


def email_pooling_value(sc):
    low, high = _email_integrals(sc, 0.0)
    return max(sc["d"], sc["d"] + low + high)


def solve_email_filter(scenario: ParametricScenario, family="both") -> ScenarioSolution:
    """Best threshold signal for the wave/no-wave game, or pooling if better.

    ``eq4`` interviews every waver (``p = 1``) and ``eq5`` never
    interviews a non-waver (``q = 0``). Either way the threshold type must
    satisfy ``x(cut) >= k`` for the probabilities to be valid.
    """
    sc = scenario
    k = sc["k"]
    x = _as_callable(sc["x"], "x")
    if not 0 < sc["d"] < 1:
        raise ParameterConditionViolated("0 < d < 1", f"d = {sc['d']}")
    if not k > 0:
        raise ParameterConditionViolated("k > 0", f"k = {k}")
    if family not in ("eq4", "eq5", "both"):
        raise ValueError("family must be eq4, eq5 or both")
    pooling = email_pooling_value(sc)
    families = ("eq4", "eq5") if family == "both" else (family,)
    if x(1.0) <= k:
        return ScenarioSolution(
            {"p": 0.0, "q": 0.0, "theta_hat": 1.0}, pooling, {}, "pooling", {"pooling_value": pooling}
        )
    lo = 0.0 if x(0.0) >= k else optimize.brentq(lambda t: x(t) - k, 0.0, 1.0, xtol=1e-15, rtol=1e-15)
    lo = max(lo, 1e-12)
    best = None
    for fam in families:
        res = optimize.minimize_scalar(
            lambda t: -email_value(sc, t, fam)[0], bounds=(lo, 1.0), method="bounded",
            options={"xatol": 1e-12},
        )
        for cut in (lo, float(res.x), 1.0):
            v, p, q = email_value(sc, cut, fam)
            if best is None or v > best[0] + 1e-15:
                best = (v, p, q, cut, fam)
    v, p, q, cut, fam = best
    extras = {"pooling_value": pooling, "family": fam}
    # Ties go to the threshold signal; it weakly improves on pooling.
    if pooling > v + FEAS_TOL:
        return ScenarioSolution({"p": 0.0, "q": 0.0, "theta_hat": cut}, pooling, {}, "pooling", extras)
    residuals = {"IC[theta_hat]": (p - q) * x(cut) - k, "p<=1": 1 - p, "q>=0": q}
    return ScenarioSolution({"p": p, "q": q, "theta_hat": cut}, v, residuals, "threshold", extras)


# --- registry ---------------------------------------------------------------

PARAMETRIC = {
    "investor": Kind.INVESTOR,
    "regime-change": Kind.REGIME_CHANGE,
    "email-filter": Kind.EMAIL_FILTER,
}

SCENARIO_NAMES = tuple(FINITE_FIXTURES) + tuple(ALIASES) + tuple(PARAMETRIC)


def load_scenario(name: str):
    """A fixture :class:`GameSpec` or a :class:`ParametricScenario` by name."""
    key = ALIASES.get(name, name)
    if key in FINITE_FIXTURES:
        return FINITE_FIXTURES[key]()
    if key in PARAMETRIC:
        return ParametricScenario(PARAMETRIC[key], {})
    raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(SCENARIO_NAMES)}")


def solve_scenario(scenario: ParametricScenario, **options) -> ScenarioSolution:
    if scenario.kind is Kind.INVESTOR:
        return solve_investor(scenario, **options)
    if scenario.kind is Kind.REGIME_CHANGE:
        return solve_regime_change(scenario)
    return solve_email_filter(scenario, **options)
