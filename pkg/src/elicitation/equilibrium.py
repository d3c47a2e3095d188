"""Equilibrium transforms, verification, and full-transparency search."""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional

from .design import (
    MAX_PROFILES,
    SenderProfile,
    Signal,
    _full_info_bound,
    iter_pure_assignments,
    sender_message_values,
)
from .exceptions import (
    DimensionMismatch,
    InputNotEquilibrium,
    InputNotIC,
    NoEquilibriumFound,
    NonDirectSignal,
    NotCheapTalk,
    ProfileLimitExceeded,
    TooFewMessages,
)
from .game import GameSpec, check_distribution
from .lp import EQ, GE, Constraint, LinearProgram, solve_lp

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class ReceiverStrategy:
    """``response[e][l] = rho(a_l | x_e)`` over the signal's realizations."""

    realizations: tuple
    actions: tuple
    response: tuple

    def __post_init__(self):
        object.__setattr__(self, "realizations", tuple(str(x) for x in self.realizations))
        object.__setattr__(self, "actions", tuple(str(a) for a in self.actions))
        if len(self.response) != len(self.realizations):
            raise DimensionMismatch("one response row per realization is required")
        rows = []
        for e, row in enumerate(self.response):
            row = check_distribution(row, f"response[{self.realizations[e]}]")
            if len(row) != len(self.actions):
                raise DimensionMismatch(f"response row {e} has the wrong number of actions")
            rows.append(row)
        object.__setattr__(self, "response", tuple(rows))

    @classmethod
    def identity(cls, game):
        """Follow the recommendation of a direct signal."""
        k = game.k
        rows = tuple(tuple(_ONE if l == e else _ZERO for l in range(k)) for e in range(k))
        return cls(game.actions, game.actions, rows)

    @classmethod
    def pure(cls, realizations, actions, choice):
        """``choice[e]`` is the action index played after realization ``e``."""
        rows = tuple(tuple(_ONE if l == c else _ZERO for l in range(len(actions))) for c in choice)
        return cls(realizations, actions, rows)


@dataclass(frozen=True)
class EquilibriumTriple:
    signal: Signal
    profile: SenderProfile
    response: ReceiverStrategy

    def __post_init__(self):
        if self.signal.realizations != self.response.realizations:
            raise DimensionMismatch("response domain must equal the signal realizations")


@dataclass(frozen=True)
class VerificationReport:
    ic_ok: bool
    ic_violation: Optional[tuple]
    sequential_ok: bool
    sequential_violation: Optional[tuple]
    receiver_value: Fraction
    type_values: Mapping
    realization_probabilities: Mapping
    receiver_value_by_posterior: Fraction

    def __post_init__(self):
        object.__setattr__(self, "type_values", MappingProxyType(dict(self.type_values)))
        object.__setattr__(
            self, "realization_probabilities", MappingProxyType(dict(self.realization_probabilities))
        )

    @property
    def ok(self):
        return self.ic_ok and self.sequential_ok


def _check_triple(game, triple):
    sig, prof, resp = triple.signal, triple.profile, triple.response
    if len(prof.strategy) != game.n or any(len(r) != game.t for r in prof.strategy):
        raise DimensionMismatch("profile shape does not match the game")
    if len(sig.kernel) != game.t:
        raise DimensionMismatch("signal needs one kernel row per message")
    if resp.actions != game.actions:
        raise DimensionMismatch("response actions must be the game's actions")


def _effective_kernel(game, signal, response):
    """Action distribution after each message, ``sum_e pi(x_e|m) rho(a|x_e)``."""
    return tuple(
        tuple(
            sum((p * response.response[e][l] for e, p in enumerate(signal.kernel[j]) if p), _ZERO)
            for l in range(game.k)
        )
        for j in range(game.t)
    )


def _supportable(game, realization, signal, response):
    """Is there a belief over (state, sending message) making rho(.|x) a best response?"""
    senders = [j for j in range(game.t) if signal.kernel[j][realization]]
    if not senders:
        return True
    support = [l for l, p in enumerate(response.response[realization]) if p]
    pairs = [(i, j) for i in range(game.n) for j in senders]
    width = len(pairs)
    rows = [Constraint((_ONE,) * width, EQ, _ONE)]
    for l in support:
        for ll in range(game.k):
            if ll != l:
                coeffs = tuple(game.receiver[i][j][l] - game.receiver[i][j][ll] for i, j in pairs)
                rows.append(Constraint(coeffs, GE, _ZERO))
    return solve_lp(LinearProgram((_ZERO,) * width, rows)).optimal


def verify_equilibrium(game: GameSpec, prior, triple: EquilibriumTriple) -> VerificationReport:
    """Check sender IC and receiver sequential rationality exactly.

    Off-path realizations (positive probability under some message but
    zero on path) pass when some belief over the states and the messages
    that can produce them rationalizes the prescribed response.
    """
    prior = game.resolve_prior(prior)
    _check_triple(game, triple)
    sig, prof, resp = triple.signal, triple.profile, triple.response
    eff = _effective_kernel(game, sig, resp)
    values = tuple(
        tuple(
            sum((p * game.sender[i][j][l] for l, p in enumerate(eff[j]) if p), _ZERO)
            for j in range(game.t)
        )
        for i in range(game.n)
    )

    ic_violation = None
    worst = _ZERO
    type_values = {}
    for i, s in enumerate(game.states):
        row = prof.strategy[i]
        best = max(values[i])
        type_values[s] = sum((q * values[i][j] for j, q in enumerate(row) if q), _ZERO)
        for j, q in enumerate(row):
            gap = best - values[i][j]
            if q and gap > worst:
                worst = gap
                ic_violation = (s, game.messages[j], gap)

    seq_violation = None
    worst = _ZERO
    probs = {}
    by_posterior = _ZERO
    for e, x in enumerate(sig.realizations):
        weights = [
            [prior[i] * prof.strategy[i][j] * sig.kernel[j][e] for j in range(game.t)]
            for i in range(game.n)
        ]
        p = sum((w for row in weights for w in row), _ZERO)
        probs[x] = p
        if p == 0:
            if not _supportable(game, e, sig, resp):
                if seq_violation is None:
                    seq_violation = (x, None)
            continue
        # Expected utility of each action at the (state, message) posterior.
        eu = [
            sum(
                (w * game.receiver[i][j][l] for i, row in enumerate(weights) for j, w in enumerate(row) if w),
                _ZERO,
            )
            / p
            for l in range(game.k)
        ]
        got = sum((r * eu[l] for l, r in enumerate(resp.response[e]) if r), _ZERO)
        by_posterior += p * got
        gap = max(eu) - got
        if gap > worst:
            worst = gap
            seq_violation = (x, gap)

    value = _ZERO
    for i, mu in enumerate(prior):
        for j, q in enumerate(prof.strategy[i]):
            if not (mu and q):
                continue
            for e, pe in enumerate(sig.kernel[j]):
                if not pe:
                    continue
                for l, r in enumerate(resp.response[e]):
                    if r:
                        value += mu * q * pe * r * game.receiver[i][j][l]
    if value != by_posterior:
        raise AssertionError("receiver value decompositions disagree")

    return VerificationReport(
        ic_ok=ic_violation is None,
        ic_violation=ic_violation,
        sequential_ok=seq_violation is None,
        sequential_violation=seq_violation,
        receiver_value=value,
        type_values=type_values,
        realization_probabilities=probs,
        receiver_value_by_posterior=by_posterior,
    )


def to_direct_signal(game: GameSpec, triple: EquilibriumTriple, prior=None) -> EquilibriumTriple:
    """Fold the response into the signal so realizations become recommendations."""
    report = verify_equilibrium(game, prior, triple)
    if not report.ok:
        raise InputNotEquilibrium(
            f"triple is not an equilibrium (ic: {report.ic_violation}, sequential: {report.sequential_violation})"
        )
    kernel = _effective_kernel(game, triple.signal, triple.response)
    return EquilibriumTriple(
        Signal.direct_signal(game, kernel), triple.profile, ReceiverStrategy.identity(game)
    )


def to_separating(game: GameSpec, prior, signal: Signal, profile: SenderProfile):
    """Replace a (possibly mixed) profile by full separation with a garbled kernel.

    Type ``i`` sends message ``i`` and that message carries the mixture of
    rows type ``i`` used to reach. Messages beyond the n-th reuse the first
    row, which no type strictly prefers. Both players' payoffs must be
    message-independent for the garbling to preserve values.
    """
    prior = game.resolve_prior(prior)
    if not game.is_cheap_talk:
        raise NotCheapTalk("sender utility depends on the message")
    if not game.is_simple:
        raise NotCheapTalk("receiver utility depends on the message")
    if game.t < game.n:
        raise TooFewMessages(f"{game.t} messages for {game.n} states")
    if len(signal.kernel) != game.t or len(profile.strategy) != game.n:
        raise DimensionMismatch("signal or profile shape does not match the game")
    if not signal.is_direct_for(game):
        raise NonDirectSignal("to_separating needs a direct signal")
    values = sender_message_values(game, signal)
    for i, row in enumerate(profile.strategy):
        best = max(values[i])
        for j, q in enumerate(row):
            if q and values[i][j] != best:
                raise InputNotIC(f"type {game.states[i]} gains by leaving {game.messages[j]}")
    width = len(signal.realizations)
    rows = [
        tuple(
            sum((q * signal.kernel[j][e] for j, q in enumerate(profile.strategy[i]) if q), _ZERO)
            for e in range(width)
        )
        for i in range(game.n)
    ]
    rows += [rows[0]] * (game.t - game.n)
    new_signal = Signal(signal.realizations, tuple(rows), signal.direct)
    new_profile = SenderProfile.from_assignment(tuple(range(game.n)), game.t)
    return new_signal, new_profile


def solve_full_transparency_pure(game: GameSpec, prior=None, max_profiles=MAX_PROFILES):
    """Best pure-profile equilibrium when the receiver sees the message itself.

    On path the receiver plays a pure best response at the posterior; off
    path she may hold any degenerate belief. All best responses give her
    the same value, so a profile is kept as soon as one response survives
    the sender's IC. Returns ``(value, triple)``; this is a lower bound on
    the receiver-optimal equilibrium value since mixing is excluded.
    """
    prior = game.resolve_prior(prior)
    n, t, k = game.n, game.t, game.k
    # Actions a degenerate belief supports after each message.
    off_candidates = [
        sorted({l for i in range(n) for l in range(k) if game.receiver[i][j][l] == max(game.receiver[i][j])})
        for j in range(t)
    ]
    best_value, best_choice = None, None
    for assignment in iter_pure_assignments(game, max_profiles):
        if best_value is not None and _full_info_bound(game, prior, assignment) <= best_value:
            continue
        choice = _sustain(game, prior, assignment, off_candidates)
        if choice is None:
            continue
        value = sum(
            (mu * game.receiver[i][assignment[i]][choice[assignment[i]]] for i, mu in enumerate(prior) if mu),
            _ZERO,
        )
        if best_value is None or value > best_value:
            best_value, best_choice = value, (assignment, choice)
    if best_choice is None:
        raise NoEquilibriumFound("no pure-profile equilibrium under degenerate off-path beliefs")
    assignment, choice = best_choice
    signal = Signal.identity(game)
    triple = EquilibriumTriple(
        signal,
        SenderProfile.from_assignment(assignment, t),
        ReceiverStrategy.pure(game.messages, game.actions, choice),
    )
    return best_value, triple


def _sustain(game, prior, assignment, off_candidates):
    n, t, k = game.n, game.t, game.k
    weight = [[_ZERO] * n for _ in range(t)]
    for i, j in enumerate(assignment):
        weight[j][i] = prior[i]
    # Messages sent only by zero-prior types are off path but still need a response.
    used = sorted(set(assignment))
    options = {}
    for j in used:
        if not any(weight[j]):
            options[j] = off_candidates[j]
            continue
        eu = [sum((w * game.receiver[i][j][l] for i, w in enumerate(weight[j]) if w), _ZERO) for l in range(k)]
        top = max(eu)
        options[j] = [l for l in range(k) if eu[l] == top]

    def search(idx, choice):
        if idx == len(used):
            own = [game.sender[i][assignment[i]][choice[assignment[i]]] for i in range(n)]
            for j in used:
                if any(game.sender[i][j][choice[j]] > own[i] for i in range(n)):
                    return None
            full = dict(choice)
            for j in range(t):
                if j in full:
                    continue
                deter = next(
                    (l for l in off_candidates[j] if all(game.sender[i][j][l] <= own[i] for i in range(n))),
                    None,
                )
                if deter is None:
                    return None
                full[j] = deter
            return tuple(full[j] for j in range(t))
        j = used[idx]
        for l in options[j]:
            choice[j] = l
            found = search(idx + 1, choice)
            if found is not None:
                return found
        del choice[j]
        return None

    return search(0, {})


MAX_SUPPORT_COMBINATIONS = 200_000


def _nonempty_subsets(size):
    return [
        tuple(x for x in range(size) if mask >> x & 1) for mask in range(1, 1 << size)
    ]


def _jointly_optimal_somewhere(game, j, actions):
    """Is there a belief over states at which every action in ``actions`` is optimal after ``j``?"""
    n, k = game.n, game.k
    rows = [Constraint((_ONE,) * n, EQ, _ONE)]
    for l in actions:
        for ll in range(k):
            if ll != l:
                rows.append(
                    Constraint(tuple(game.receiver[i][j][l] - game.receiver[i][j][ll] for i in range(n)), GE, _ZERO)
                )
    return solve_lp(LinearProgram((_ZERO,) * n, rows)).optimal


def solve_full_transparency(game: GameSpec, prior=None, max_combinations=MAX_SUPPORT_COMBINATIONS):
    """Receiver-optimal equilibrium under full transparency, sender mixing allowed.

    Fix the support of every type's message distribution and of every
    response. Receiver optimality is then linear in the sender's mixture and
    sender indifference is linear in the receiver's mixture, so each support
    choice is one LP in each. Enumerating supports is exact but exponential;
    ``max_combinations`` caps the work. Returns ``(value, triple)``.
    """
    prior = game.resolve_prior(prior)
    n, t, k = game.n, game.t, game.k
    msg_sets = _nonempty_subsets(t)
    act_sets = [
        [a for a in _nonempty_subsets(k) if _jointly_optimal_somewhere(game, j, a)] for j in range(t)
    ]
    total = len(msg_sets) ** n
    for cands in act_sets:
        total *= len(cands)
    if total > max_combinations:
        raise ProfileLimitExceeded(
            f"{total} support combinations exceed the limit {max_combinations}"
        )

    best_value, best = None, None
    for A in itertools.product(*act_sets):
        # Receiver side first: the sender supports only enter its IC.
        for S in itertools.product(msg_sets, repeat=n):
            rho = _response_for(game, S, A)
            if rho is None:
                continue
            found = _sender_mixture_for(game, prior, S, A)
            if found is None:
                continue
            value, sigma = found
            if best_value is None or value > best_value:
                best_value, best = value, (sigma, rho)
    if best is None:
        raise NoEquilibriumFound("no equilibrium found under full transparency")
    sigma, rho = best
    triple = EquilibriumTriple(
        Signal.identity(game), SenderProfile(sigma), ReceiverStrategy(game.messages, game.actions, rho)
    )
    return best_value, triple


def _response_for(game, S, A):
    n, t, k = game.n, game.t, game.k
    cols = [(j, l) for j in range(t) for l in A[j]]
    where = {c: idx for idx, c in enumerate(cols)}
    width = len(cols)
    rows = []
    for j in range(t):
        c = [_ZERO] * width
        for l in A[j]:
            c[where[j, l]] = _ONE
        rows.append(Constraint(tuple(c), EQ, _ONE))
    for i in range(n):
        for j in S[i]:
            for jj in range(t):
                if jj == j:
                    continue
                c = [_ZERO] * width
                for l in A[j]:
                    c[where[j, l]] += game.sender[i][j][l]
                for l in A[jj]:
                    c[where[jj, l]] -= game.sender[i][jj][l]
                rows.append(Constraint(tuple(c), GE, _ZERO))
    res = solve_lp(LinearProgram((_ZERO,) * width, rows))
    if not res.optimal:
        return None
    x = res.solution
    return tuple(
        tuple(x[where[j, l]] if l in A[j] else _ZERO for l in range(k)) for j in range(t)
    )


def _sender_mixture_for(game, prior, S, A):
    n, t, k = game.n, game.t, game.k
    cols = [(i, j) for i in range(n) for j in S[i]]
    where = {c: idx for idx, c in enumerate(cols)}
    width = len(cols)
    obj = [_ZERO] * width
    for (i, j), idx in where.items():
        obj[idx] = prior[i] * game.receiver[i][j][A[j][0]]
    rows = []
    for i in range(n):
        c = [_ZERO] * width
        for j in S[i]:
            c[where[i, j]] = _ONE
        rows.append(Constraint(tuple(c), EQ, _ONE))
    for j in range(t):
        senders = [i for i in range(n) if j in S[i] and prior[i]]
        if not senders:
            continue
        for l in A[j]:
            for ll in range(k):
                if ll == l:
                    continue
                c = [_ZERO] * width
                for i in senders:
                    c[where[i, j]] = prior[i] * (game.receiver[i][j][l] - game.receiver[i][j][ll])
                rows.append(Constraint(tuple(c), GE, _ZERO))
    res = solve_lp(LinearProgram(tuple(obj), rows))
    if not res.optimal:
        return None
    x = res.solution
    sigma = tuple(
        tuple(x[where[i, j]] if j in S[i] else _ZERO for j in range(t)) for i in range(n)
    )
    return res.optimal_value, sigma
