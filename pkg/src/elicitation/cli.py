"""Command-line front end.

Exit codes: 0 success, 1 verification failure or no solution,
2 input error, 3 resource limit.
"""

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import io as gio
from .design import solve_commitment, solve_transparency_pure
from .equilibrium import solve_full_transparency, solve_full_transparency_pure, verify_equilibrium
from .exceptions import (
    ElicitationError,
    GameError,
    InfeasibleAtAllGridPoints,
    NoEquilibriumFound,
    ProfileLimitExceeded,
    UnknownScenario,
)
from .fixtures import ALIASES, FINITE_FIXTURES
from .game import GameSpec, fraction_str, pooling_value
from .scenarios import DEFAULTS, load_scenario, solve_scenario
from .value import (
    DEFAULT_STEPS,
    SolverTag,
    convexity_check,
    curve_to_csv,
    evaluate_experiment,
    solve_value,
    value_curve,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    mode: Optional[str] = None
    priors: list = field(default_factory=list)
    solver: Optional[str] = None
    steps: int = DEFAULT_STEPS
    output: Optional[str] = None
    format: str = "text"
    params: list = field(default_factory=list)


def fmt(x):
    x = Fraction(x)
    return f"{fraction_str(x)} ({float(x):.6g})"


def _short(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else fraction_str(x)


def resolve_game(spec: str) -> GameSpec:
    """A game file path, or the name of a built-in finite fixture."""
    path = Path(spec)
    if path.exists() or (spec.endswith((".game", ".json")) and not _fixture_name(spec)):
        return gio.load_game(path)
    name = _fixture_name(spec)
    if name is None:
        raise GameError("no such file or fixture", spec)
    return FINITE_FIXTURES[name]()


def _fixture_name(spec):
    stem = Path(spec).name
    for suffix in (".game", ".json"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    stem = stem.replace("_", "-")
    stem = ALIASES.get(stem, stem)
    return stem if stem in FINITE_FIXTURES else None


def _prior(cfg, game, index=0):
    if len(cfg.priors) <= index:
        return game.resolve_prior(None)
    return gio.parse_prior(cfg.priors[index], game.n)


def _table(rows, row_labels, col_labels, title):
    width = max(len(str(r)) for r in row_labels)
    out = [f"{title}:"]
    for label, row in zip(row_labels, rows):
        cells = ", ".join(f"{c}={_short(p)}" for c, p in zip(col_labels, row) if p)
        out.append(f"  {str(label).ljust(width)}  {cells or '-'}")
    return out


def render_design(game, prior, sol):
    lines = [
        f"game: {game.name or '(unnamed)'}",
        f"mode: {sol.mode.value}",
        f"prior: {', '.join(_short(w) for w in prior)}",
        f"value: {fmt(sol.value)}",
    ]
    lines += _table(sol.profile.strategy, game.states, game.messages, "profile")
    lines += _table(sol.signal.kernel, game.messages, sol.signal.realizations, "signal")
    ob = sol.obedience
    lines.append(f"obedience: {'satisfied' if ob.overall else 'violated'}")
    for a in game.actions:
        status = ob.status[a].value
        extra = ""
        if a in ob.posteriors:
            extra = f"  posterior=({', '.join(_short(p) for p in ob.posteriors[a])})"
        slack = ob.slacks.get(a)
        if slack is not None:
            extra += f"  slack={_short(slack)}"
        lines.append(f"  {a}: {status}{extra}")
    if sol.binding_ic:
        pairs = ", ".join(f"{s}->{m}" for s, m in sol.binding_ic)
        lines.append(f"binding IC: {pairs}")
    diag = sol.diagnostics
    if diag:
        lines.append("diagnostics: " + ", ".join(f"{k}={v}" for k, v in sorted(diag.items())))
    return "\n".join(lines) + "\n"


def render_triple(game, prior, triple, value, note=None):
    lines = [
        f"game: {game.name or '(unnamed)'}",
        "mode: FullTransparency",
        f"prior: {', '.join(_short(w) for w in prior)}",
        f"value: {fmt(value)}",
    ]
    if note:
        lines.append(f"note: {note}")
    lines += _table(triple.profile.strategy, game.states, game.messages, "profile")
    lines += _table(triple.response.response, triple.signal.realizations, game.actions, "response")
    return "\n".join(lines) + "\n"


def design_csv(game, sol):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("table", "row", "column", "numerator", "denominator"))
    for tab, rows, cols, name in (
        (sol.profile.strategy, game.states, game.messages, "profile"),
        (sol.signal.kernel, game.messages, sol.signal.realizations, "signal"),
    ):
        for r, row in zip(rows, tab):
            for c, p in zip(cols, row):
                w.writerow((name, r, c, p.numerator, p.denominator))
    w.writerow(("value", "", "", sol.value.numerator, sol.value.denominator))
    return buf.getvalue()


def _emit(cfg, text, out):
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)


def run_solve(cfg: RunConfig, out=sys.stdout):
    game = resolve_game(cfg.inputs[0])
    prior = _prior(cfg, game)
    if cfg.mode == "commitment":
        sol = solve_commitment(game, prior)
    elif cfg.mode == "transparency":
        sol = solve_transparency_pure(game, prior)
    else:
        note = None
        try:
            value, triple = solve_full_transparency_pure(game, prior)
        except NoEquilibriumFound:
            value, triple = solve_full_transparency(game, prior)
            note = "no pure-profile equilibrium; exact mixed search used"
        _emit(cfg, render_triple(game, prior, triple, value, note), out)
        return EXIT_OK
    text = design_csv(game, sol) if cfg.format == "csv" else render_design(game, prior, sol)
    _emit(cfg, text, out)
    return EXIT_OK


def run_verify(cfg: RunConfig, out=sys.stdout):
    if len(cfg.inputs) != 2:
        raise GameError("verify needs a game file and an equilibrium file")
    game = resolve_game(cfg.inputs[0])
    triple = gio.load_equilibrium(cfg.inputs[1], game)
    prior = _prior(cfg, game)
    rep = verify_equilibrium(game, prior, triple)
    lines = [f"ic_ok: {str(rep.ic_ok).lower()}"]
    if rep.ic_violation:
        s, m, gap = rep.ic_violation
        lines.append(f"  violation: type {s} sends {m}, {_short(gap)} below its best message")
    lines.append(f"sequential_ok: {str(rep.sequential_ok).lower()}")
    if rep.sequential_violation:
        x, gap = rep.sequential_violation
        lines.append(f"  violation: realization {x}" + (f" loses {_short(gap)}" if gap is not None else " unsupportable"))
    lines.append(f"value: {fmt(rep.receiver_value)}")
    for s, w in rep.type_values.items():
        lines.append(f"  W[{s}] = {_short(w)}")
    _emit(cfg, "\n".join(lines) + "\n", out)
    return EXIT_OK if rep.ok else EXIT_FAILED


def run_sweep(cfg: RunConfig, out=sys.stdout):
    game = resolve_game(cfg.inputs[0])
    if len(cfg.priors) != 2:
        raise GameError("sweep needs two endpoint priors (--prior A --prior B)", "prior")
    mu_a, mu_b = (gio.parse_prior(p, game.n) for p in cfg.priors)
    tag = SolverTag.parse(cfg.solver or "commitment")
    curve = value_curve(game, mu_a, mu_b, cfg.steps, tag)
    verdict = convexity_check(curve) if len(curve.values) >= 3 else None
    if verdict is None:
        line = "convex: n/a (fewer than three points)"
    else:
        line = f"convex: {str(verdict.convex).lower()}"
        if not verdict.convex:
            a, m, b = verdict.witness
            line += f" worst_violation={_short(verdict.worst_violation)} at lambda={_short(curve.lambdas[m])}"
            line += f" (between {_short(curve.lambdas[a])} and {_short(curve.lambdas[b])})"
    if cfg.format == "csv":
        _emit(cfg, curve_to_csv(curve), out)
        # The verdict goes to stdout as a comment so the CSV stays parseable.
        out.write(f"# {line}\n")
    else:
        rows = [f"{'lambda':>10}  value"]
        rows += [f"{_short(lam):>10}  {fmt(v)}" for lam, v in zip(curve.lambdas, curve.values)]
        _emit(cfg, "\n".join(rows + [line]) + "\n", out)
    return EXIT_OK


def _parse_param(item, kind):
    if "=" not in item:
        raise GameError(f"expected name=value, got {item!r}", "param")
    name, value = (s.strip() for s in item.split("=", 1))
    defaults = DEFAULTS[kind]
    if name not in defaults:
        raise GameError(f"unknown parameter for {kind.value}; known: {', '.join(defaults)}", f"param {name}")
    current = defaults[name]
    try:
        if isinstance(current, tuple):
            return name, tuple(float(Fraction(v)) for v in value.split(","))
        if isinstance(current, str):
            return name, value
        return name, float(Fraction(value))
    except (ValueError, ZeroDivisionError):
        raise GameError(f"not a number: {value!r}", f"param {name}") from None


def _fixture_report(game):
    lines = [f"fixture: {game.name}", f"{'solver':<14} {'prior':<28} {'expected':<12} {'computed':<12} match"]
    records = [(s, p, v, None) for s, p, v in game.metadata.get("expected", ())]
    records += list(game.metadata.get("disputed", ()))
    all_ok = True
    for rec in records:
        solver, prior, expected, _ = rec
        if solver == "pooling":
            computed = pooling_value(game, prior)[0]
        else:
            computed = solve_value(game, prior, solver)
        disputed = rec[3] is not None
        ok = computed == expected
        if not disputed:
            all_ok &= ok
        mark = "yes" if ok else ("no (disputed)" if disputed else "NO")
        prior_text = "(" + ", ".join(_short(w) for w in prior) + ")"
        lines.append(f"{solver:<14} {prior_text:<28} {_short(expected):<12} {_short(computed):<12} {mark}")
    return "\n".join(lines) + "\n", all_ok


def run_scenario(cfg: RunConfig, out=sys.stdout):
    name = cfg.inputs[0]
    sc = load_scenario(name)
    if isinstance(sc, GameSpec):
        if cfg.params:
            raise GameError("finite fixtures take no parameters", "param")
        text, ok = _fixture_report(sc)
        _emit(cfg, text, out)
        return EXIT_OK if ok else EXIT_FAILED
    overrides = dict(_parse_param(p, sc.kind) for p in cfg.params)
    sc = sc.with_params(**overrides)
    options = {}
    if cfg.solver and sc.kind.value == "EmailFilter":
        options["family"] = cfg.solver
    sol = solve_scenario(sc, **options)
    lines = [f"scenario: {name} ({sc.kind.value})", f"regime: {sol.regime}", f"value: {sol.value:.6g}"]
    lines += [f"  {k} = {v:.6g}" for k, v in sol.variables.items()]
    if sol.residuals:
        lines.append("residuals:")
        lines += [f"  {k} = {v:.3g}" for k, v in sol.residuals.items()]
    if sol.extras:
        lines.append("extras:")
        lines += [f"  {k} = {v:.6g}" if isinstance(v, float) else f"  {k} = {v}" for k, v in sol.extras.items()]
    _emit(cfg, "\n".join(lines) + "\n", out)
    return EXIT_OK


def run_learn(cfg: RunConfig, out=sys.stdout):
    if len(cfg.inputs) != 2:
        raise GameError("learn needs a game file and an experiment file")
    game = resolve_game(cfg.inputs[0])
    exp = gio.load_experiment(cfg.inputs[1], game)
    prior = _prior(cfg, game)
    tag = SolverTag.parse(cfg.solver or "commitment")
    ev = evaluate_experiment(game, prior, exp, tag)
    lines = [f"solver: {tag.value}"]
    for mu, w in ev.posteriors:
        lines.append(f"  posterior ({', '.join(_short(p) for p in mu)}) weight {_short(w)}")
    lines.append(f"expected value: {fmt(ev.expected_value)}")
    lines.append(f"value at prior: {fmt(ev.value_at_prior)}")
    lines.append(f"information helps: {str(ev.information_helps).lower()}")
    _emit(cfg, "\n".join(lines) + "\n", out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="elicit", description="Exact receiver-optimal information design.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, steps=False, solver=False):
        p.add_argument("--prior", action="append", default=[], help="comma-separated rationals, e.g. 2/3,1/3")
        p.add_argument("--output", help="write the report to this file")
        p.add_argument("--format", choices=("text", "csv"), default="text")
        if steps:
            p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
        if solver:
            p.add_argument("--solver")

    p = sub.add_parser("solve", help="solve a game file")
    p.add_argument("mode", choices=("commitment", "transparency", "full"))
    p.add_argument("game")
    common(p)
    p = sub.add_parser("verify", help="verify an equilibrium file")
    p.add_argument("game")
    p.add_argument("equilibrium")
    common(p)
    p = sub.add_parser("sweep", help="value curve between two priors")
    p.add_argument("game")
    common(p, steps=True, solver=True)
    p = sub.add_parser("scenario", help="solve a built-in scenario")
    p.add_argument("name")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    common(p, solver=True)
    p = sub.add_parser("learn", help="evaluate a public experiment")
    p.add_argument("game")
    p.add_argument("experiment")
    common(p, solver=True)
    return parser


def config_from_args(args) -> RunConfig:
    inputs = [getattr(args, k) for k in ("game", "equilibrium", "experiment", "name") if getattr(args, k, None)]
    return RunConfig(
        command=args.command,
        inputs=inputs,
        mode=getattr(args, "mode", None),
        priors=list(args.prior),
        solver=getattr(args, "solver", None),
        steps=getattr(args, "steps", DEFAULT_STEPS),
        output=args.output,
        format=args.format,
        params=list(getattr(args, "param", [])),
    )


RUNNERS = {
    "solve": run_solve,
    "verify": run_verify,
    "sweep": run_sweep,
    "scenario": run_scenario,
    "learn": run_learn,
}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cfg = config_from_args(args)
    try:
        return RUNNERS[cfg.command](cfg, out)
    except ProfileLimitExceeded as exc:
        err.write(f"error: resource limit: {exc}\n")
        return EXIT_LIMIT
    except UnknownScenario as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (NoEquilibriumFound, InfeasibleAtAllGridPoints) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_FAILED
    except (ElicitationError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
