"""Finite sender-receiver games with exact rational payoffs.

Utilities are stored as dense nested tuples indexed ``[state][message][action]``
so that solvers can work with plain integer indices; labels are kept only
for validation and display.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Callable, Mapping, Optional, Sequence

from .exceptions import (
    DuplicateLabel,
    EmptyAxis,
    GameError,
    InvalidDistribution,
    MissingUtilityEntry,
    NotSimpleWithoutReferenceMessage,
)

_ZERO = Fraction(0)


def as_fraction(value, path=None) -> Fraction:
    """Parse ``value`` as an exact rational.

    Accepts integers, :class:`~fractions.Fraction` and strings such as
    ``"2/3"`` or ``"0.6"``. Floats are rejected: each one is a binary
    approximation and would leak rounding into exact comparisons.
    """
    if isinstance(value, bool):
        raise GameError(f"expected a rational, got boolean {value!r}", path)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise GameError(f"cannot parse {value!r} as a rational", path) from None
    if isinstance(value, float):
        raise GameError(
            f"float {value!r} is not exact; write it as a string like '3/5'", path
        )
    raise GameError(f"expected a rational, got {type(value).__name__}", path)


def check_distribution(weights, path=None) -> tuple:
    """Validate and return ``weights`` as a tuple of fractions summing to 1."""
    row = tuple(as_fraction(w, path) for w in weights)
    if not row:
        raise InvalidDistribution("empty distribution", path)
    if any(w < 0 for w in row):
        raise InvalidDistribution(f"negative weight in {_fmt_row(row)}", path)
    if sum(row) != 1:
        raise InvalidDistribution(f"weights {_fmt_row(row)} sum to {sum(row)}, not 1", path)
    return row


def _fmt_row(row):
    return "(" + ", ".join(str(w) for w in row) + ")"


class Belief(tuple):
    """A probability vector over states, aligned with ``GameSpec.states``."""

    def __new__(cls, weights, path=None):
        if isinstance(weights, Belief):
            return weights
        return super().__new__(cls, check_distribution(weights, path))

    @classmethod
    def degenerate(cls, n, i):
        return cls(Fraction(int(j == i)) for j in range(n))

    @classmethod
    def uniform(cls, n):
        return cls([Fraction(1, n)] * n)

    def mix(self, other, lam):
        """``(1 - lam) * self + lam * other``."""
        lam = Fraction(lam)
        return Belief((1 - lam) * a + lam * b for a, b in zip(self, other))

    def __repr__(self):
        return f"Belief{_fmt_row(self)}"


def _check_labels(labels, axis):
    labels = tuple(str(x) for x in labels)
    if not labels:
        raise EmptyAxis(f"no {axis} given", axis)
    seen = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(f"duplicate label {lab!r}", axis)
        seen.add(lab)
    return labels


@dataclass(frozen=True)
class GameSpec:
    """A finite signaling game.

    ``receiver[i][j][l]`` and ``sender[i][j][l]`` are the utilities in state
    ``i`` after message ``j`` and action ``l``. Construct through
    :meth:`from_functions` or :func:`validate_game` rather than directly.
    """

    states: tuple
    messages: tuple
    actions: tuple
    receiver: tuple
    sender: tuple
    prior: Optional[Belief] = None
    name: str = ""
    metadata: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @property
    def n(self):
        return len(self.states)

    @property
    def t(self):
        return len(self.messages)

    @property
    def k(self):
        return len(self.actions)

    def state_index(self, label):
        return _index(self.states, label, "states")

    def message_index(self, label):
        return _index(self.messages, label, "messages")

    def action_index(self, label):
        return _index(self.actions, label, "actions")

    def u_r(self, state, message, action):
        """Receiver utility by label."""
        return self.receiver[self.state_index(state)][self.message_index(message)][
            self.action_index(action)
        ]

    def u_s(self, state, message, action):
        """Sender utility by label."""
        return self.sender[self.state_index(state)][self.message_index(message)][
            self.action_index(action)
        ]

    @property
    def is_simple(self):
        return all(
            len(set(self.receiver[i][j][l] for j in range(self.t))) == 1
            for i in range(self.n)
            for l in range(self.k)
        )

    @property
    def is_cheap_talk(self):
        return all(
            len(set(self.sender[i][j][l] for j in range(self.t))) == 1
            for i in range(self.n)
            for l in range(self.k)
        )

    def with_prior(self, prior):
        return GameSpec(
            self.states, self.messages, self.actions, self.receiver, self.sender,
            self.resolve_prior(prior), self.name, dict(self.metadata),
        )

    def resolve_prior(self, prior=None) -> Belief:
        """``prior`` as a validated Belief, falling back to the game's own."""
        if prior is None:
            if self.prior is None:
                raise GameError("no prior given and the game carries none", "prior")
            return self.prior
        belief = Belief(prior, "prior")
        if len(belief) != self.n:
            raise InvalidDistribution(
                f"prior has {len(belief)} weights for {self.n} states", "prior"
            )
        return belief

    @classmethod
    def from_functions(
        cls,
        states: Sequence,
        messages: Sequence,
        actions: Sequence,
        receiver: Callable,
        sender: Callable,
        prior=None,
        name="",
        metadata=None,
    ) -> "GameSpec":
        """Build a game from utility callables ``f(state, message, action)``."""
        states = _check_labels(states, "states")
        messages = _check_labels(messages, "messages")
        actions = _check_labels(actions, "actions")
        u_r = tuple(
            tuple(
                tuple(as_fraction(receiver(s, m, a), f"receiver_utility.{s}.{m}.{a}") for a in actions)
                for m in messages
            )
            for s in states
        )
        u_s = tuple(
            tuple(
                tuple(as_fraction(sender(s, m, a), f"sender_utility.{s}.{m}.{a}") for a in actions)
                for m in messages
            )
            for s in states
        )
        game = cls(states, messages, actions, u_r, u_s, None, name, metadata or {})
        if prior is not None:
            game = game.with_prior(prior)
        return game


def _index(labels, label, axis):
    if isinstance(label, int) and not isinstance(label, bool):
        if 0 <= label < len(labels):
            return label
        raise GameError(f"index {label} out of range", axis)
    try:
        return labels.index(str(label))
    except ValueError:
        raise GameError(f"unknown label {label!r}", axis) from None


def validate_game(raw: Mapping) -> GameSpec:
    """Validate a raw game description (the game-file mapping).

    Keys: ``states``, ``messages``, ``actions`` (label lists), optional
    ``prior`` (list of rationals), ``receiver_utility`` and
    ``sender_utility`` as nested ``state -> message -> action`` maps. With
    ``simple: true`` the receiver table may skip the message level.
    """
    if not isinstance(raw, Mapping):
        raise GameError("game description must be a mapping")
    for key in ("states", "messages", "actions", "receiver_utility", "sender_utility"):
        if key not in raw:
            raise GameError("required field missing", key)
    states = _check_labels(_as_list(raw["states"], "states"), "states")
    messages = _check_labels(_as_list(raw["messages"], "messages"), "messages")
    actions = _check_labels(_as_list(raw["actions"], "actions"), "actions")
    simple = raw.get("simple", False)
    if not isinstance(simple, bool):
        raise GameError("must be true or false", "simple")

    def table(name, skip_message):
        top = raw[name]
        out = []
        for s in states:
            by_state = _lookup(top, s, f"{name}")
            rows = []
            for m in messages:
                if skip_message:
                    by_msg = by_state
                    path = f"{name}.{s}"
                else:
                    by_msg = _lookup(by_state, m, f"{name}.{s}")
                    path = f"{name}.{s}.{m}"
                rows.append(
                    tuple(as_fraction(_lookup(by_msg, a, path), f"{path}.{a}") for a in actions)
                )
            out.append(tuple(rows))
        return tuple(out)

    receiver = table("receiver_utility", simple)
    sender = table("sender_utility", False)
    game = GameSpec(states, messages, actions, receiver, sender, None, str(raw.get("name", "")))
    if raw.get("prior") is not None:
        game = game.with_prior(_as_list(raw["prior"], "prior"))
    return game


def _as_list(value, path):
    if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
        raise GameError("expected a list", path)
    return list(value)


def _lookup(mapping, key, path):
    if not isinstance(mapping, Mapping):
        raise GameError("expected a mapping", path)
    if key not in mapping:
        raise MissingUtilityEntry(f"no entry for {key!r}", path)
    return mapping[key]


def game_to_raw(game: GameSpec) -> dict:
    """Inverse of :func:`validate_game`; rationals become ``"num/den"`` strings."""
    raw = {
        "name": game.name,
        "states": list(game.states),
        "messages": list(game.messages),
        "actions": list(game.actions),
    }
    if game.prior is not None:
        raw["prior"] = [fraction_str(w) for w in game.prior]
    for key, tab in (("receiver_utility", game.receiver), ("sender_utility", game.sender)):
        raw[key] = {
            s: {
                m: {a: fraction_str(tab[i][j][l]) for l, a in enumerate(game.actions)}
                for j, m in enumerate(game.messages)
            }
            for i, s in enumerate(game.states)
        }
    return raw


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# --- beliefs and best responses -------------------------------------------


def _reference_message(game, message):
    if message is None:
        if not game.is_simple:
            raise NotSimpleWithoutReferenceMessage(
                "receiver utility depends on the message; pass message="
            )
        return 0
    return game.message_index(message)


def expected_receiver_utilities(game: GameSpec, belief, message=None) -> tuple:
    """Expected receiver utility of each action at ``belief`` after ``message``."""
    j = _reference_message(game, message)
    return tuple(
        sum((w * game.receiver[i][j][l] for i, w in enumerate(belief) if w), _ZERO)
        for l in range(game.k)
    )


def best_actions(game: GameSpec, belief, message=None) -> tuple:
    """All actions maximizing expected receiver utility, in declaration order."""
    belief = Belief(belief)
    values = expected_receiver_utilities(game, belief, message)
    top = max(values)
    return tuple(game.actions[l] for l, v in enumerate(values) if v == top)


def pooling_value(game: GameSpec, prior=None, message=None) -> tuple:
    """Receiver payoff from acting on the prior alone.

    Returns ``(value, action)``; ties go to the first declared action.
    """
    prior = game.resolve_prior(prior)
    values = expected_receiver_utilities(game, prior, message)
    top = max(values)
    return top, game.actions[values.index(top)]


def joint_best_actions(game: GameSpec, weights) -> tuple:
    """Best action indices against a joint weight table ``weights[i][j]``.

    The weights need not be normalized; only their direction matters.
    """
    values = [
        sum(
            (w * game.receiver[i][j][l] for i, row in enumerate(weights) for j, w in enumerate(row) if w),
            _ZERO,
        )
        for l in range(game.k)
    ]
    top = max(values)
    return tuple(l for l, v in enumerate(values) if v == top)


def pure_support_actions(game: GameSpec) -> frozenset:
    """Action indices that are weakly optimal at some degenerate (state, message)."""
    out = set()
    for i in range(game.n):
        for j in range(game.t):
            row = game.receiver[i][j]
            top = max(row)
            out.update(l for l, v in enumerate(row) if v == top)
    return frozenset(out)


# --- structural predicates ------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    is_simple: bool
    is_cheap_talk: bool
    condition1: bool
    strong_condition: bool
    favorite_message: Optional[str]
    message_order: Optional[tuple] = None


def _dominates(game, a, b):
    """Does message ``a`` weakly dominate ``b`` for the receiver everywhere?"""
    return all(
        game.receiver[i][a][l] >= game.receiver[i][b][l]
        for i in range(game.n)
        for l in range(game.k)
    )


def classify_game(game: GameSpec) -> ConditionReport:
    """Structural predicates on ``game``.

    ``condition1`` holds when some message is the receiver's favorite for
    every state and action; ``strong_condition`` when all messages can be
    totally ordered that way. The favorite reported is the first such
    message in declaration order.
    """
    t = game.t
    favorite = next(
        (a for a in range(t) if all(_dominates(game, a, b) for b in range(t))), None
    )
    comparable = all(
        _dominates(game, a, b) or _dominates(game, b, a)
        for a in range(t)
        for b in range(a + 1, t)
    )
    order = None
    if comparable:
        # Count of messages each one dominates gives a consistent linear order.
        score = [sum(_dominates(game, a, b) for b in range(t)) for a in range(t)]
        order = tuple(game.messages[a] for a in sorted(range(t), key=lambda a: (-score[a], a)))
    return ConditionReport(
        is_simple=game.is_simple,
        is_cheap_talk=game.is_cheap_talk,
        condition1=favorite is not None,
        strong_condition=comparable,
        favorite_message=None if favorite is None else game.messages[favorite],
        message_order=order,
    )
