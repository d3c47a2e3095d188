"""Receiver-optimal design: commitment, obedience, and transparency.

The receiver picks a direct signal (a kernel from messages to action
recommendations). Under commitment she is bound to follow it; under
transparency each recommendation must also be a best response at the
posterior it induces. For a fixed pure sender profile both problems are
linear programs in the kernel entries, and the solvers below enumerate
pure profiles and keep the exact maximum.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional

from .exceptions import (
    DimensionMismatch,
    NoEquilibriumFound,
    NonDirectSignal,
    NonPureProfile,
    ProfileLimitExceeded,
)
from .game import Belief, GameSpec, check_distribution, pure_support_actions
from .lp import EQ, GE, Constraint, LinearProgram, solve_lp

_ZERO = Fraction(0)
_ONE = Fraction(1)

MAX_PROFILES = 10**6


class Mode(str, Enum):
    COMMITMENT = "Commitment"
    TRANSPARENCY_PURE = "TransparencyPure"


class RecStatus(str, Enum):
    ON_PATH_SATISFIED = "OnPathSatisfied"
    ON_PATH_VIOLATED = "OnPathViolated"
    OFF_PATH_SUPPORTABLE = "OffPathSupportable"
    OFF_PATH_UNSUPPORTABLE = "OffPathUnsupportable"


def _rows(rows, width, what):
    out = []
    for idx, row in enumerate(rows):
        row = check_distribution(row, f"{what}[{idx}]")
        if len(row) != width:
            raise DimensionMismatch(f"{what}[{idx}] has {len(row)} entries, expected {width}")
        out.append(row)
    return tuple(out)


@dataclass(frozen=True)
class SenderProfile:
    """Per-state distributions over messages, ``strategy[i][j] = sigma(m_j | theta_i)``."""

    strategy: tuple

    def __post_init__(self):
        width = len(self.strategy[0]) if self.strategy else 0
        object.__setattr__(self, "strategy", _rows(self.strategy, width, "profile"))

    @classmethod
    def from_assignment(cls, assignment, t):
        """Pure profile where state ``i`` sends message index ``assignment[i]``."""
        return cls(tuple(tuple(_ONE if j == a else _ZERO for j in range(t)) for a in assignment))

    @property
    def pure(self):
        return all(max(row) == 1 for row in self.strategy)

    @property
    def assignment(self):
        if not self.pure:
            raise NonPureProfile("profile is mixed")
        return tuple(row.index(_ONE) for row in self.strategy)

    def as_dict(self, game):
        return {
            s: {m: self.strategy[i][j] for j, m in enumerate(game.messages) if self.strategy[i][j]}
            for i, s in enumerate(game.states)
        }


@dataclass(frozen=True)
class Signal:
    """A kernel from messages to realizations, ``kernel[j][e] = pi(x_e | m_j)``."""

    realizations: tuple
    kernel: tuple
    direct: bool = False

    def __post_init__(self):
        object.__setattr__(self, "realizations", tuple(str(x) for x in self.realizations))
        object.__setattr__(self, "kernel", _rows(self.kernel, len(self.realizations), "kernel"))

    @classmethod
    def direct_signal(cls, game, kernel):
        return cls(game.actions, kernel, direct=True)

    @classmethod
    def constant(cls, game, action):
        l = game.action_index(action)
        row = tuple(_ONE if x == l else _ZERO for x in range(game.k))
        return cls(game.actions, (row,) * game.t, direct=True)

    @classmethod
    def identity(cls, game):
        """Full transparency: the receiver sees the message itself."""
        t = game.t
        return cls(
            game.messages,
            tuple(tuple(_ONE if e == j else _ZERO for e in range(t)) for j in range(t)),
            direct=game.messages == game.actions,
        )

    def is_direct_for(self, game):
        return self.direct and self.realizations == game.actions

    def as_dict(self, game):
        return {
            m: {x: self.kernel[j][e] for e, x in enumerate(self.realizations)}
            for j, m in enumerate(game.messages)
        }


@dataclass(frozen=True)
class ObedienceReport:
    status: Mapping
    slacks: Mapping
    posteriors: Mapping
    probabilities: Mapping
    overall: bool

    def __post_init__(self):
        for name in ("status", "slacks", "posteriors", "probabilities"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))

    @property
    def failures(self):
        bad = (RecStatus.ON_PATH_VIOLATED, RecStatus.OFF_PATH_UNSUPPORTABLE)
        return tuple(a for a, s in self.status.items() if s in bad)


@dataclass(frozen=True)
class DesignSolution:
    profile: SenderProfile
    signal: Signal
    value: Fraction
    mode: Mode
    binding_ic: tuple
    obedience: ObedienceReport
    diagnostics: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "diagnostics", MappingProxyType(dict(self.diagnostics)))


class OpacityGap(NamedTuple):
    commitment: Fraction
    transparency_pure: Fraction
    equal: bool
    theorem_applies: bool


# --- evaluation -------------------------------------------------------------


def _check_shapes(game, profile, signal):
    if len(profile.strategy) != game.n or any(len(r) != game.t for r in profile.strategy):
        raise DimensionMismatch("profile shape does not match the game")
    if len(signal.kernel) != game.t:
        raise DimensionMismatch("signal kernel must have one row per message")


def design_value(game: GameSpec, prior, profile: SenderProfile, signal: Signal) -> Fraction:
    """Receiver payoff when she follows the recommendations of a direct signal."""
    if not signal.is_direct_for(game):
        raise NonDirectSignal("design_value needs a direct signal")
    prior = game.resolve_prior(prior)
    _check_shapes(game, profile, signal)
    total = _ZERO
    for i, mu in enumerate(prior):
        if not mu:
            continue
        for j, s in enumerate(profile.strategy[i]):
            if not s:
                continue
            total += mu * s * sum(
                (p * game.receiver[i][j][l] for l, p in enumerate(signal.kernel[j]) if p), _ZERO
            )
    return total


def sender_message_values(game: GameSpec, signal: Signal) -> tuple:
    """``U[i][j]``: state ``i``'s expected utility from message ``j`` under an obeyed direct signal."""
    return tuple(
        tuple(
            sum((p * game.sender[i][j][l] for l, p in enumerate(signal.kernel[j]) if p), _ZERO)
            for j in range(game.t)
        )
        for i in range(game.n)
    )


def ic_holds(game, profile, signal):
    values = sender_message_values(game, signal)
    for i, row in enumerate(profile.strategy):
        best = max(values[i])
        if any(s and values[i][j] != best for j, s in enumerate(row)):
            return False
    return True


def binding_ic_pairs(game, profile, signal):
    """(state, deviation message) pairs whose IC constraint holds with equality."""
    values = sender_message_values(game, signal)
    pairs = []
    for i, row in enumerate(profile.strategy):
        for j, s in enumerate(row):
            if not s:
                continue
            for jj in range(game.t):
                if jj != j and values[i][jj] == values[i][j]:
                    pairs.append((game.states[i], game.messages[jj]))
    return tuple(dict.fromkeys(pairs))


def check_obedience(game: GameSpec, prior, profile: SenderProfile, signal: Signal) -> ObedienceReport:
    """Sequential rationality of each recommendation of a direct signal.

    On-path recommendations are checked exactly at the posterior they
    induce; the recorded slack is the smallest unnormalized advantage over
    an alternative action. A recommendation never reached on path is
    supportable when some degenerate (state, message) belief makes it weakly
    optimal; one that no message ever sends is vacuously supportable.
    """
    if not signal.is_direct_for(game):
        raise NonDirectSignal("obedience is defined for direct signals only")
    prior = game.resolve_prior(prior)
    _check_shapes(game, profile, signal)
    pure_ok = pure_support_actions(game)
    status, slacks, posteriors, probs = {}, {}, {}, {}
    for l, a in enumerate(game.actions):
        weights = [
            [prior[i] * profile.strategy[i][j] * signal.kernel[j][l] for j in range(game.t)]
            for i in range(game.n)
        ]
        p = sum((w for row in weights for w in row), _ZERO)
        probs[a] = p
        if p > 0:
            diffs = [
                sum(
                    (
                        w * (game.receiver[i][j][l] - game.receiver[i][j][ll])
                        for i, row in enumerate(weights)
                        for j, w in enumerate(row)
                        if w
                    ),
                    _ZERO,
                )
                for ll in range(game.k)
                if ll != l
            ]
            slack = min(diffs) if diffs else _ZERO
            slacks[a] = slack
            posteriors[a] = Belief(sum(row, _ZERO) / p for row in weights)
            status[a] = RecStatus.ON_PATH_SATISFIED if slack >= 0 else RecStatus.ON_PATH_VIOLATED
        else:
            sent = any(signal.kernel[j][l] for j in range(game.t))
            ok = (not sent) or l in pure_ok
            status[a] = RecStatus.OFF_PATH_SUPPORTABLE if ok else RecStatus.OFF_PATH_UNSUPPORTABLE
    bad = (RecStatus.ON_PATH_VIOLATED, RecStatus.OFF_PATH_UNSUPPORTABLE)
    overall = not any(s in bad for s in status.values())
    return ObedienceReport(status, slacks, posteriors, probs, overall)


# --- linear programs --------------------------------------------------------


def _var(game, j, l):
    return j * game.k + l


def build_commitment_lp(
    game: GameSpec, prior, profile: SenderProfile, obedience=False, forbid=()
) -> LinearProgram:
    """The commitment program for a fixed pure profile.

    Variables are ``pi(a_l | m_j)`` laid out message-major. Rows are
    row-stochasticity, one IC row per (state, alternative message), then
    with ``obedience=True`` the linear obedience rows for every ordered
    pair of actions. ``forbid`` lists ``(message, action)`` index pairs
    pinned to zero.
    """
    if not profile.pure:
        raise NonPureProfile("the commitment program is built for pure profiles")
    prior = game.resolve_prior(prior)
    return _commitment_lp(game, prior, profile.assignment, obedience, forbid)


def _commitment_lp(game, prior, assignment, obedience=False, forbid=()):
    n, t, k = game.n, game.t, game.k
    width = t * k
    names = tuple(f"pi[{a}|{m}]" for m in game.messages for a in game.actions)
    obj = [_ZERO] * width
    for i, mu in enumerate(prior):
        if mu:
            j = assignment[i]
            for l in range(k):
                obj[j * k + l] += mu * game.receiver[i][j][l]
    rows = []
    for j, m in enumerate(game.messages):
        c = [_ZERO] * width
        for l in range(k):
            c[j * k + l] = _ONE
        rows.append(Constraint(tuple(c), EQ, _ONE, f"sum[{m}]"))
    for i, s in enumerate(game.states):
        j = assignment[i]
        for jj, m2 in enumerate(game.messages):
            if jj == j:
                continue
            c = [_ZERO] * width
            for l in range(k):
                c[j * k + l] += game.sender[i][j][l]
                c[jj * k + l] -= game.sender[i][jj][l]
            rows.append(Constraint(tuple(c), GE, _ZERO, f"IC[{s}:{game.messages[j]}->{m2}]"))
    if obedience:
        for l, a in enumerate(game.actions):
            for ll, a2 in enumerate(game.actions):
                if ll == l:
                    continue
                c = [_ZERO] * width
                for i, mu in enumerate(prior):
                    if mu:
                        j = assignment[i]
                        c[j * k + l] += mu * (game.receiver[i][j][l] - game.receiver[i][j][ll])
                rows.append(Constraint(tuple(c), GE, _ZERO, f"O[{a}>{a2}]"))
    for j, l in forbid:
        c = [_ZERO] * width
        c[j * k + l] = _ONE
        rows.append(Constraint(tuple(c), EQ, _ZERO, f"off[{game.actions[l]}|{game.messages[j]}]"))
    return LinearProgram(tuple(obj), tuple(rows), None, names)


def _kernel_from(game, x):
    k = game.k
    return tuple(tuple(x[j * k + l] for l in range(k)) for j in range(game.t))


def _full_info_bound(game, prior, assignment):
    """Value if the receiver could act on the message alone, ignoring IC.

    Types pooled on one message share one action, so this bounds every
    kernel the profile admits.
    """
    k = game.k
    totals = {}
    for i, mu in enumerate(prior):
        if mu:
            j = assignment[i]
            acc = totals.setdefault(j, [_ZERO] * k)
            row = game.receiver[i][j]
            for l in range(k):
                acc[l] += mu * row[l]
    return sum((max(acc) for acc in totals.values()), _ZERO)


def _dominant_action(game):
    """First action weakly optimal in every state of a simple game, if any."""
    if not game.is_simple:
        return None
    for l in range(game.k):
        if all(game.receiver[i][0][l] == max(game.receiver[i][0]) for i in range(game.n)):
            return l
    return None


def _short_circuit(game, prior, mode, l):
    signal = Signal.constant(game, game.actions[l])
    assignment = tuple(
        max(range(game.t), key=lambda j, i=i: (game.sender[i][j][l], -j)) for i in range(game.n)
    )
    profile = SenderProfile.from_assignment(assignment, game.t)
    return _finish(game, prior, profile, signal, mode, optima_count=1, profiles_evaluated=0,
                   profiles_pruned=0, short_circuit=True)


def _finish(game, prior, profile, signal, mode, **diag):
    value = design_value(game, prior, profile, signal)
    return DesignSolution(
        profile=profile,
        signal=signal,
        value=value,
        mode=mode,
        binding_ic=binding_ic_pairs(game, profile, signal),
        obedience=check_obedience(game, prior, profile, signal),
        diagnostics=diag,
    )


def iter_pure_assignments(game, max_profiles=MAX_PROFILES):
    total = game.t ** game.n
    if total > max_profiles:
        raise ProfileLimitExceeded(
            f"{game.t}^{game.n} = {total} pure profiles exceeds the limit {max_profiles}"
        )
    return itertools.product(range(game.t), repeat=game.n)


def _search(game, prior, mode, max_profiles, solve_one):
    # Visit profiles by decreasing bound so the scan can stop early; ties in
    # value still go to the first profile in lexicographic order.
    ranked = sorted(
        ((_full_info_bound(game, prior, a), idx, a)
         for idx, a in enumerate(iter_pure_assignments(game, max_profiles))),
        key=lambda r: (-r[0], r[1]),
    )
    best_value, best_idx, best = None, None, None
    optima = evaluated = 0
    for bound, idx, assignment in ranked:
        if best_value is not None and bound < best_value:
            break
        evaluated += 1
        found = solve_one(assignment)
        if found is None:
            continue
        value, kernel = found
        if best_value is None or value > best_value:
            best_value, best_idx, best, optima = value, idx, (assignment, kernel), 1
        elif value == best_value:
            optima += 1
            if idx < best_idx:
                best_idx, best = idx, (assignment, kernel)
    if best is None:
        raise NoEquilibriumFound(f"no pure profile admits a feasible {mode.value} signal")
    assignment, kernel = best
    profile = SenderProfile.from_assignment(assignment, game.t)
    signal = Signal.direct_signal(game, kernel)
    return _finish(game, prior, profile, signal, mode, optima_count=optima,
                   profiles_evaluated=evaluated, profiles_pruned=len(ranked) - evaluated,
                   short_circuit=False)


def solve_commitment(game: GameSpec, prior=None, max_profiles=MAX_PROFILES) -> DesignSolution:
    """Best commitment kernel over all pure sender profiles.

    Ties between profiles go to the first in lexicographic enumeration
    order; ``diagnostics["optima_count"]`` counts how many profiles attain
    the optimum.
    """
    prior = game.resolve_prior(prior)
    l = _dominant_action(game)
    if l is not None:
        return _short_circuit(game, prior, Mode.COMMITMENT, l)

    def solve_one(assignment):
        res = solve_lp(_commitment_lp(game, prior, assignment))
        if not res.optimal:
            return None
        return res.optimal_value, _kernel_from(game, res.solution)

    return _search(game, prior, Mode.COMMITMENT, max_profiles, solve_one)


def solve_transparency_pure(game: GameSpec, prior=None, max_profiles=MAX_PROFILES) -> DesignSolution:
    """Best obedient direct signal over all pure sender profiles.

    This is the optimum over pure profiles. It equals the unrestricted
    optimum for two-action simple games and for cheap talk with at least
    as many messages as states; otherwise it is a lower bound.
    """
    prior = game.resolve_prior(prior)
    l = _dominant_action(game)
    if l is not None:
        return _short_circuit(game, prior, Mode.TRANSPARENCY_PURE, l)
    pure_ok = pure_support_actions(game)

    def solve_one(assignment):
        forbid = ()
        while True:
            res = solve_lp(_commitment_lp(game, prior, assignment, True, forbid))
            if not res.optimal:
                return None
            kernel = _kernel_from(game, res.solution)
            # Recommendations that are off path yet sent after some deviation
            # need a supporting belief; when none exists, stop sending them.
            extra = []
            for l in range(game.k):
                if l in pure_ok:
                    continue
                on_path = any(prior[i] and kernel[assignment[i]][l] for i in range(game.n))
                if not on_path and any(kernel[j][l] for j in range(game.t)):
                    extra.extend((j, l) for j in range(game.t))
            if not extra:
                return res.optimal_value, kernel
            forbid = tuple(dict.fromkeys(forbid + tuple(extra)))

    return _search(game, prior, Mode.TRANSPARENCY_PURE, max_profiles, solve_one)


def opacity_gap(game: GameSpec, prior=None, max_profiles=MAX_PROFILES) -> OpacityGap:
    """Compare the commitment value with the pure-profile transparency value."""
    c = solve_commitment(game, prior, max_profiles).value
    tr = solve_transparency_pure(game, prior, max_profiles).value
    return OpacityGap(c, tr, c == tr, game.k == 2 and game.is_simple)
