"""Finite fixture games with their known exact values.

Each game carries ``metadata["expected"]``: a tuple of
``(solver, prior, value)`` records, where ``solver`` is one of
``"pooling"``, ``"commitment"``, ``"transparency"``, ``"full"`` (pure
full-transparency search) or ``"full-mixed"`` (exact full-transparency
search). ``metadata["disputed"]`` holds published values the exact solvers
do not reproduce, as ``(solver, prior, claimed, computed)``.
"""

from fractions import Fraction as F

from .game import Belief, GameSpec


def intra_firm(prior=None):
    """A branch manager (G viable, B not) reports to a COO who keeps open (O) or closes (C)."""
    sender = {
        ("G", "I", "O"): 3, ("G", "I", "C"): 1, ("G", "N", "C"): 0, ("G", "N", "O"): 2,
        ("B", "I", "O"): 2, ("B", "I", "C"): 0, ("B", "N", "C"): 1, ("B", "N", "O"): 3,
    }
    receiver = {("G", "O"): 1, ("B", "C"): 1}
    expected = (
        ("pooling", (F(2, 3), F(1, 3)), F(2, 3)),
        ("commitment", (F(2, 3), F(1, 3)), F(5, 6)),
        ("commitment", (F(1, 4), F(3, 4)), F(7, 8)),
        ("commitment", (F(1, 2), F(1, 2)), F(3, 4)),
        ("transparency", (F(2, 3), F(1, 3)), F(5, 6)),
        ("transparency", (F(1, 4), F(3, 4)), F(7, 8)),
        ("full", (F(2, 3), F(1, 3)), F(2, 3)),
        ("full-mixed", (F(2, 3), F(1, 3)), F(2, 3)),
        ("full-mixed", (F(1, 4), F(3, 4)), F(3, 4)),
    )
    return GameSpec.from_functions(
        ("G", "B"),
        ("I", "N"),
        ("O", "C"),
        lambda s, m, a: receiver.get((s, a), 0),
        lambda s, m, a: sender[(s, m, a)],
        prior=prior or (F(2, 3), F(1, 3)),
        name="intra-firm",
        metadata={"expected": expected},
    )


def beer_quiche_h(prior=None):
    """Beer-Quiche with a third, hedging action ``h`` worth 1/2 to the receiver in every state."""
    receiver = {("S", "nf"): 1, ("W", "f"): 1}
    sender = {
        "S": {"B": {"f": 1, "nf": 6, "h": 1}, "Q": {"f": 0, "nf": 4, "h": 0}},
        "W": {"B": {"f": 0, "nf": 4, "h": 4}, "Q": {"f": 1, "nf": 6, "h": 6}},
    }

    expected = tuple(
        ("commitment", (mu, 1 - mu), (F(7, 5) + F(3, 5) * mu) / 2)
        for mu in (F(3, 5), F(3, 4), F(9, 10))
    )
    return GameSpec.from_functions(
        ("S", "W"),
        ("B", "Q"),
        ("f", "nf", "h"),
        lambda s, m, a: F(1, 2) if a == "h" else receiver.get((s, a), 0),
        lambda s, m, a: sender[s][m][a],
        prior=prior or (F(3, 4), F(1, 4)),
        name="beer-quiche-h",
        metadata={"expected": expected},
    )


_TM_RECEIVER = {
    "l": (0, 1, 2),
    "s": (F(13, 24), F(13, 24), 1),
    "x": (1, 0, 1),
}

# Prior and the two posteriors of the binary public experiment.
TM_PRIORS = (
    (F(1, 4), F(1, 4), F(1, 2)),
    (F(1, 12), F(1, 4), F(2, 3)),
    (F(5, 12), F(1, 4), F(1, 3)),
)


def transparent_motives(messages=("g", "b"), prior=None, name="transparent-motives"):
    """Three-state cheap talk where the sender gets 1 from ``l`` or ``s`` and 0 from ``x``."""
    states = ("L", "M", "H")
    return GameSpec.from_functions(
        states,
        messages,
        ("l", "s", "x"),
        lambda s, m, a: _TM_RECEIVER[a][states.index(s)],
        lambda s, m, a: 0 if a == "x" else 1,
        prior=prior or TM_PRIORS[0],
        name=name,
    )


def transparent_motives_two(prior=None):
    game = transparent_motives(("g", "b"), prior, "transparent-motives-2")
    expected = (
        ("pooling", TM_PRIORS[0], F(5, 4)),
        ("full-mixed", TM_PRIORS[0], F(67, 52)),
    )
    # L and M pooling on g (answered by s) with H on b (answered by l) is a
    # pure equilibrium worth 61/48, above the pooling value.
    disputed = (("transparency", TM_PRIORS[0], F(5, 4), F(61, 48)),)
    return _with_expected(game, expected, disputed)


def transparent_motives_three(prior=None):
    game = transparent_motives(("g", "m", "b"), prior, "transparent-motives-3")
    mu0, mu1, mu2 = TM_PRIORS
    expected = (
        ("pooling", mu0, F(5, 4)),
        ("transparency", mu0, F(67, 52)),
        ("transparency", mu1, F(83, 52)),
        ("transparency", mu2, F(127, 132)),
        ("commitment", mu0, F(133, 96)),
        ("commitment", mu1, F(469, 288)),
        ("commitment", mu2, F(329, 288)),
    )
    return _with_expected(game, expected)


def four_state_point(mu):
    """Prior on the four-state segment with ``mu1 = 1/3``, ``mu3 = 1/8`` and ``mu2 = mu``."""
    mu = F(mu)
    return Belief((F(1, 3), mu, F(1, 8), F(13, 24) - mu))


def four_state_published_value(mu):
    """Published piecewise value along the four-state segment.

    The middle branch is exact only at its endpoints; see ``disputed``.
    """
    mu = F(mu)
    if mu <= F(13, 36):
        return F(37, 24) - 2 * mu
    if mu <= F(35, 72):
        return F(59, 72)
    return F(1, 3) + mu


def four_state(prior=None):
    receiver = {"a1": (0, 0, 1, 2), "a2": (1, 1, 0, 0)}
    sender = {
        "t1": {"a1": (1, 0, 0), "a2": (1, 0, 0)},
        "t2": {"a1": (0, 1, 0), "a2": (0, 1, 0)},
        "t3": {"a1": (0, 1, 3), "a2": (2, 4, 0)},
        "t4": {"a1": (-1, 2, -2), "a2": (F(5, 4), 0, -1)},
    }
    states = ("t1", "t2", "t3", "t4")
    messages = ("m1", "m2", "m3")
    points = (0, F(1, 6), F(13, 36), F(35, 72), F(1, 2), F(13, 24))
    expected = tuple(
        ("commitment", tuple(four_state_point(mu)), four_state_published_value(mu)) for mu in points
    )
    # Strictly between the kinks the optimum is max(109/96 - 7mu/8, 1/3 + mu).
    disputed = tuple(
        ("commitment", tuple(four_state_point(mu)), F(59, 72), v)
        for mu, v in ((F(5, 12), F(37, 48)), (F(77, 180), F(137, 180)), (F(4, 9), F(7, 9)))
    )
    return GameSpec.from_functions(
        states,
        messages,
        ("a1", "a2"),
        lambda s, m, a: receiver[a][states.index(s)],
        lambda s, m, a: sender[s][a][messages.index(m)],
        prior=prior or four_state_point(F(13, 36)),
        name="four-state",
        metadata={"expected": expected, "disputed": disputed},
    )


def _with_expected(game, expected, disputed=()):
    return GameSpec(
        game.states, game.messages, game.actions, game.receiver, game.sender,
        game.prior, game.name, {"expected": expected, "disputed": disputed},
    )


FINITE_FIXTURES = {
    "intra-firm": intra_firm,
    "beer-quiche-h": beer_quiche_h,
    "transparent-motives-2": transparent_motives_two,
    "transparent-motives-3": transparent_motives_three,
    "four-state": four_state,
}

ALIASES = {"prop22": "transparent-motives-2", "prop43": "transparent-motives-3"}
