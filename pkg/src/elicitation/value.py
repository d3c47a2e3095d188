"""Value functions over priors, convexity, and ex-ante experiments."""

import csv
import io
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional

from .design import solve_commitment, solve_transparency_pure
from .equilibrium import solve_full_transparency, solve_full_transparency_pure
from .exceptions import DegenerateExperiment, DimensionMismatch, GameError
from .game import Belief, GameSpec, check_distribution

_ZERO = Fraction(0)


class SolverTag(str, Enum):
    COMMITMENT = "Commitment"
    TRANSPARENCY_PURE = "TransparencyPure"
    FULL_TRANSPARENCY_PURE = "FullTransparencyPure"
    FULL_TRANSPARENCY = "FullTransparency"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).replace("-", "").replace("_", "").lower()
        aliases = {
            "commitment": cls.COMMITMENT,
            "transparency": cls.TRANSPARENCY_PURE,
            "transparencypure": cls.TRANSPARENCY_PURE,
            "full": cls.FULL_TRANSPARENCY_PURE,
            "fulltransparencypure": cls.FULL_TRANSPARENCY_PURE,
            "fullmixed": cls.FULL_TRANSPARENCY,
            "fulltransparency": cls.FULL_TRANSPARENCY,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown solver tag {value!r}") from None


def solve_value(game: GameSpec, prior, tag) -> Fraction:
    """Receiver value at ``prior`` under the tagged solver."""
    tag = SolverTag.parse(tag)
    if tag is SolverTag.COMMITMENT:
        return solve_commitment(game, prior).value
    if tag is SolverTag.TRANSPARENCY_PURE:
        return solve_transparency_pure(game, prior).value
    if tag is SolverTag.FULL_TRANSPARENCY_PURE:
        return solve_full_transparency_pure(game, prior)[0]
    return solve_full_transparency(game, prior)[0]


@dataclass(frozen=True)
class Experiment:
    """Public signal with ``likelihoods[i][y] = P(y | state i)``."""

    outcomes: tuple
    likelihoods: tuple

    def __post_init__(self):
        outcomes = tuple(str(y) for y in self.outcomes)
        if not outcomes:
            raise GameError("experiment needs at least one outcome", "outcomes")
        rows = []
        for i, row in enumerate(self.likelihoods):
            row = check_distribution(row, f"likelihoods[{i}]")
            if len(row) != len(outcomes):
                raise DimensionMismatch(f"likelihood row {i} has {len(row)} entries for {len(outcomes)} outcomes")
            rows.append(row)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "likelihoods", tuple(rows))

    @classmethod
    def from_posteriors(cls, prior, posteriors, weights, outcomes=None):
        """Experiment inducing ``posteriors`` with the given weights (Bayes-plausible)."""
        prior = Belief(prior)
        weights = check_distribution(weights, "weights")
        rows = []
        for i, mu in enumerate(prior):
            if mu == 0:
                rows.append(tuple(weights))
                continue
            rows.append(tuple(w * Belief(p)[i] / mu for p, w in zip(posteriors, weights)))
        outcomes = outcomes or tuple(f"y{e + 1}" for e in range(len(weights)))
        return cls(outcomes, tuple(rows))

    def posteriors(self, prior):
        """``[(outcome, posterior, weight)]`` for outcomes with positive probability."""
        prior = Belief(prior)
        if len(prior) != len(self.likelihoods):
            raise DimensionMismatch("experiment has one likelihood row per state")
        out = []
        for e, y in enumerate(self.outcomes):
            joint = [mu * row[e] for mu, row in zip(prior, self.likelihoods)]
            w = sum(joint, _ZERO)
            if w:
                out.append((y, Belief(x / w for x in joint), w))
        if not out:
            raise DegenerateExperiment("every outcome has probability zero")
        return out


class ExperimentEvaluation(NamedTuple):
    posteriors: list
    expected_value: Fraction
    value_at_prior: Fraction
    information_helps: bool


def evaluate_experiment(game: GameSpec, prior, experiment: Experiment, tag=SolverTag.COMMITMENT):
    """Expected receiver value after public learning versus the value at the prior.

    ``information_helps`` is the weak comparison ``expected >= at prior``.
    """
    prior = game.resolve_prior(prior)
    posts = experiment.posteriors(prior)
    expected = sum((w * solve_value(game, mu, tag) for _, mu, w in posts), _ZERO)
    at_prior = solve_value(game, prior, tag)
    return ExperimentEvaluation(
        [(mu, w) for _, mu, w in posts], expected, at_prior, expected >= at_prior
    )


@dataclass(frozen=True)
class ValueCurve:
    lambdas: tuple
    values: tuple
    solver: Optional[SolverTag] = None
    mu_a: Optional[Belief] = None
    mu_b: Optional[Belief] = None

    def __post_init__(self):
        lambdas = tuple(Fraction(x) for x in self.lambdas)
        values = tuple(Fraction(v) for v in self.values)
        if len(lambdas) != len(values):
            raise DimensionMismatch("one value per grid point")
        if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "values", values)

    def beliefs(self):
        if self.mu_a is None or self.mu_b is None:
            raise ValueError("curve endpoints unknown")
        return [self.mu_a.mix(self.mu_b, lam) for lam in self.lambdas]


DEFAULT_STEPS = 64


def value_curve(game: GameSpec, mu_a, mu_b, steps=DEFAULT_STEPS, tag=SolverTag.COMMITMENT) -> ValueCurve:
    """Exact values at ``(1 - lam) mu_a + lam mu_b`` for ``lam = 0, 1/steps, ..., 1``."""
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer")
    tag = SolverTag.parse(tag)
    mu_a, mu_b = game.resolve_prior(mu_a), game.resolve_prior(mu_b)
    lambdas = tuple(Fraction(e, steps) for e in range(steps + 1))
    values = tuple(solve_value(game, mu_a.mix(mu_b, lam), tag) for lam in lambdas)
    return ValueCurve(lambdas, values, tag, mu_a, mu_b)


class ConvexityResult(NamedTuple):
    convex: bool
    worst_violation: Fraction
    witness: Optional[tuple]


def convexity_check(curve: ValueCurve) -> ConvexityResult:
    """Midpoint convexity over every equally spaced grid triple, exactly.

    Assumes a uniform grid, as produced by :func:`value_curve`.
    """
    v = curve.values
    n = len(v)
    if n < 3:
        raise ValueError("convexity needs at least three grid points")
    worst, witness = _ZERO, None
    for mid in range(1, n - 1):
        for h in range(1, min(mid, n - 1 - mid) + 1):
            gap = v[mid] - (v[mid - h] + v[mid + h]) / 2
            if gap > worst:
                worst, witness = gap, (mid - h, mid, mid + h)
    return ConvexityResult(witness is None, worst, witness)


CSV_COLUMNS = ("lambda", "value_numerator", "value_denominator", "value_decimal")


def curve_to_csv(curve: ValueCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for lam, val in zip(curve.lambdas, curve.values):
        lam_text = str(lam.numerator) if lam.denominator == 1 else f"{lam.numerator}/{lam.denominator}"
        writer.writerow((lam_text, val.numerator, val.denominator, f"{float(val):.12g}"))
    return buf.getvalue()


def curve_from_csv(text: str, solver=None) -> ValueCurve:
    """Parse a curve CSV; the numerator/denominator columns are authoritative."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"expected columns {','.join(CSV_COLUMNS)}")
    lambdas, values = [], []
    for row in reader:
        lambdas.append(Fraction(row["lambda"]))
        values.append(Fraction(int(row["value_numerator"]), int(row["value_denominator"])))
    return ValueCurve(tuple(lambdas), tuple(values), SolverTag.parse(solver) if solver else None)
