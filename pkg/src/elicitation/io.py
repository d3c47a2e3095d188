"""Game, equilibrium and experiment files.

All three are JSON documents. Rationals are written as ``"num/den"``
strings; ints and strings like ``"0.6"`` are accepted on input.

Equilibrium and experiment tables are sparse maps: a missing entry is 0.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .design import SenderProfile, Signal
from .equilibrium import EquilibriumTriple, ReceiverStrategy
from .exceptions import GameError
from .game import GameSpec, as_fraction, check_distribution, fraction_str, game_to_raw, validate_game
from .value import Experiment

_ZERO = Fraction(0)


def _load_json(text, what):
    if not text.strip():
        raise GameError(f"{what} file is empty")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise GameError(f"cannot read file: {exc.strerror}", str(path)) from None


def parse_game(text: str) -> GameSpec:
    return validate_game(_load_json(text, "game"))


def dump_game(game: GameSpec) -> str:
    return json.dumps(game_to_raw(game), indent=2) + "\n"


def load_game(path) -> GameSpec:
    return parse_game(_read(path))


def save_game(game: GameSpec, path):
    Path(path).write_text(dump_game(game))


def _sparse_rows(table, rows, cols, path):
    """Read a ``row -> col -> rational`` map (or list rows) into dense tuples."""
    if not isinstance(table, Mapping):
        raise GameError("expected a mapping", path)
    extra = set(table) - set(rows)
    if extra:
        raise GameError(f"unknown label(s) {sorted(extra)}", path)
    out = []
    for r in rows:
        if r not in table:
            raise GameError(f"no row for {r!r}", path)
        entry = table[r]
        where = f"{path}.{r}"
        if isinstance(entry, Mapping):
            bad = set(entry) - set(cols)
            if bad:
                raise GameError(f"unknown label(s) {sorted(bad)}", where)
            row = [as_fraction(entry.get(c, 0), f"{where}.{c}") for c in cols]
        elif isinstance(entry, list):
            if len(entry) != len(cols):
                raise GameError(f"expected {len(cols)} entries, got {len(entry)}", where)
            row = [as_fraction(v, f"{where}[{e}]") for e, v in enumerate(entry)]
        else:
            raise GameError("expected a mapping or a list", where)
        out.append(check_distribution(row, where))
    return tuple(out)


def _dense_to_sparse(rows, row_labels, col_labels):
    return {
        r: {c: fraction_str(p) for c, p in zip(col_labels, row) if p}
        for r, row in zip(row_labels, rows)
    }


def parse_equilibrium(text: str, game: GameSpec) -> EquilibriumTriple:
    """Equilibrium file keys: ``signal`` (``realizations`` and ``kernel``), ``profile``, ``response``."""
    raw = _load_json(text, "equilibrium")
    if not isinstance(raw, Mapping):
        raise GameError("equilibrium description must be a mapping")
    for key in ("signal", "profile", "response"):
        if key not in raw:
            raise GameError("required field missing", key)
    sig = raw["signal"]
    if not isinstance(sig, Mapping) or "kernel" not in sig:
        raise GameError("expected realizations and kernel", "signal")
    realizations = sig.get("realizations", list(game.actions))
    if not isinstance(realizations, list) or not realizations:
        raise GameError("expected a non-empty list", "signal.realizations")
    realizations = tuple(str(x) for x in realizations)
    if len(set(realizations)) != len(realizations):
        raise GameError("duplicate realization label", "signal.realizations")
    kernel = _sparse_rows(sig["kernel"], game.messages, realizations, "signal.kernel")
    direct = realizations == game.actions
    signal = Signal(realizations, kernel, direct=direct)
    profile = SenderProfile(_sparse_rows(raw["profile"], game.states, game.messages, "profile"))
    response = ReceiverStrategy(
        realizations, game.actions, _sparse_rows(raw["response"], realizations, game.actions, "response")
    )
    return EquilibriumTriple(signal, profile, response)


def dump_equilibrium(game: GameSpec, triple: EquilibriumTriple) -> str:
    sig = triple.signal
    raw = {
        "signal": {
            "realizations": list(sig.realizations),
            "kernel": _dense_to_sparse(sig.kernel, game.messages, sig.realizations),
        },
        "profile": _dense_to_sparse(triple.profile.strategy, game.states, game.messages),
        "response": _dense_to_sparse(triple.response.response, sig.realizations, game.actions),
    }
    return json.dumps(raw, indent=2) + "\n"


def load_equilibrium(path, game: GameSpec) -> EquilibriumTriple:
    return parse_equilibrium(_read(path), game)


def parse_experiment(text: str, game: GameSpec) -> Experiment:
    """Experiment file keys: ``outcomes`` and ``likelihoods`` (one row per state)."""
    raw = _load_json(text, "experiment")
    if not isinstance(raw, Mapping):
        raise GameError("experiment description must be a mapping")
    for key in ("outcomes", "likelihoods"):
        if key not in raw:
            raise GameError("required field missing", key)
    outcomes = raw["outcomes"]
    if not isinstance(outcomes, list) or not outcomes:
        raise GameError("expected a non-empty list", "outcomes")
    outcomes = tuple(str(y) for y in outcomes)
    rows = _sparse_rows(raw["likelihoods"], game.states, outcomes, "likelihoods")
    return Experiment(outcomes, rows)


def dump_experiment(game: GameSpec, experiment: Experiment) -> str:
    raw = {
        "outcomes": list(experiment.outcomes),
        "likelihoods": {
            s: [fraction_str(p) for p in row] for s, row in zip(game.states, experiment.likelihoods)
        },
    }
    return json.dumps(raw, indent=2) + "\n"


def load_experiment(path, game: GameSpec) -> Experiment:
    return parse_experiment(_read(path), game)


def parse_prior(text: str, n=None):
    """``"2/3,1/3"`` to a tuple of Fractions (validated as a distribution)."""
    parts = [p.strip() for p in str(text).split(",")]
    if not all(parts):
        raise GameError(f"malformed prior {text!r}", "prior")
    weights = check_distribution([as_fraction(p, "prior") for p in parts], "prior")
    if n is not None and len(weights) != n:
        raise GameError(f"prior has {len(weights)} entries for {n} states", "prior")
    return weights
