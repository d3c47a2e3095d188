"""Exact rational linear programming.

A two-phase tableau simplex over :class:`fractions.Fraction` with Bland's
rule, so every pivot is exact and the method terminates on degenerate
problems. Problem sizes here are tiny (tens of variables), so the dense
tableau is the simplest thing that works.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .exceptions import DimensionMismatch

LE, GE, EQ = "<=", ">=", "="
_RELATIONS = (LE, GE, EQ)

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coefficients: tuple
    relation: str
    rhs: Fraction
    name: str = ""

    def activity(self, point):
        return sum((a * x for a, x in zip(self.coefficients, point) if a), _ZERO)

    def satisfied(self, point):
        lhs = self.activity(point)
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective . x`` subject to linear constraints and bounds.

    ``bounds`` holds one ``(lower, upper)`` pair per variable; ``None`` on
    either side means unbounded in that direction. The default is ``x >= 0``.
    """

    objective: tuple
    constraints: tuple = ()
    bounds: Optional[tuple] = None
    variable_names: Optional[tuple] = None

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(Fraction(c) for c in self.objective))
        cons = []
        for idx, c in enumerate(self.constraints):
            if not isinstance(c, Constraint):
                c = Constraint(*c)
            if len(c.coefficients) != n:
                raise DimensionMismatch(
                    f"constraint {idx} has {len(c.coefficients)} coefficients, expected {n}"
                )
            if c.relation not in _RELATIONS:
                raise ValueError(f"unknown relation {c.relation!r}")
            cons.append(
                Constraint(tuple(Fraction(a) for a in c.coefficients), c.relation, Fraction(c.rhs), c.name)
            )
        object.__setattr__(self, "constraints", tuple(cons))
        if self.bounds is None:
            bounds = ((_ZERO, None),) * n
        else:
            if len(self.bounds) != n:
                raise DimensionMismatch(f"{len(self.bounds)} bounds for {n} variables")
            bounds = tuple(
                (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
                for lo, hi in self.bounds
            )
        object.__setattr__(self, "bounds", bounds)
        if self.variable_names is None:
            object.__setattr__(self, "variable_names", tuple(f"x{j}" for j in range(n)))
        elif len(self.variable_names) != n:
            raise DimensionMismatch("variable_names length differs from objective")

    @property
    def n_variables(self):
        return len(self.objective)

    def value(self, point):
        return sum((c * x for c, x in zip(self.objective, point) if c), _ZERO)


@dataclass(frozen=True)
class LPResult:
    status: Status
    optimal_value: Optional[Fraction] = None
    solution: Optional[tuple] = None
    binding_constraints: frozenset = field(default_factory=frozenset)

    @property
    def optimal(self):
        return self.status is Status.OPTIMAL


def check_feasible(lp: LinearProgram, point: Sequence) -> tuple:
    """Exact feasibility test of ``point``.

    Returns ``(feasible, violated)`` where ``violated`` is the set of
    constraint indices that fail. Bound violations are reported with
    negative indices ``-(j + 1)`` for variable ``j``.
    """
    if len(point) != lp.n_variables:
        raise DimensionMismatch(f"point has {len(point)} entries, expected {lp.n_variables}")
    point = [Fraction(x) for x in point]
    violated = set()
    for idx, c in enumerate(lp.constraints):
        if not c.satisfied(point):
            violated.add(idx)
    for j, (lo, hi) in enumerate(lp.bounds):
        if (lo is not None and point[j] < lo) or (hi is not None and point[j] > hi):
            violated.add(-(j + 1))
    return not violated, frozenset(violated)


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly; the optimum returned is a vertex."""
    n = lp.n_variables

    # Substitute every original variable by nonnegative columns:
    # x = lo + y, x = hi - y, or x = y+ - y-.
    columns = []  # per original variable: list of (column index, sign)
    offsets = []
    extra_rows = []
    ncols = 0
    for lo, hi in lp.bounds:
        if lo is not None:
            columns.append(((ncols, 1),))
            offsets.append(lo)
            if hi is not None:
                extra_rows.append((ncols, hi - lo))
            ncols += 1
        elif hi is not None:
            columns.append(((ncols, -1),))
            offsets.append(hi)
            ncols += 1
        else:
            columns.append(((ncols, 1), (ncols + 1, -1)))
            offsets.append(_ZERO)
            ncols += 2

    for lo, hi in lp.bounds:
        if lo is not None and hi is not None and hi < lo:
            return LPResult(Status.INFEASIBLE)

    rows = []
    seen = set()
    for c in lp.constraints:
        coeffs = [_ZERO] * ncols
        rhs = c.rhs
        for j, a in enumerate(c.coefficients):
            if not a:
                continue
            rhs -= a * offsets[j]
            for col, sign in columns[j]:
                coeffs[col] += a * sign
        key = (tuple(coeffs), c.relation, rhs)
        if key in seen:
            continue
        seen.add(key)
        rows.append([coeffs, c.relation, rhs])
    for col, ub in extra_rows:
        coeffs = [_ZERO] * ncols
        coeffs[col] = _ONE
        rows.append([coeffs, LE, ub])

    cost = [_ZERO] * ncols
    const = _ZERO
    for j, cj in enumerate(lp.objective):
        if not cj:
            continue
        const += cj * offsets[j]
        for col, sign in columns[j]:
            cost[col] += cj * sign

    y = _two_phase(rows, cost, ncols)
    if isinstance(y, Status):
        return LPResult(y)

    x = []
    for j in range(n):
        v = offsets[j]
        for col, sign in columns[j]:
            v += sign * y[col]
        x.append(v)
    x = tuple(x)
    binding = frozenset(
        idx for idx, c in enumerate(lp.constraints) if c.activity(x) == c.rhs
    )
    return LPResult(Status.OPTIMAL, lp.value(x), x, binding)


def _two_phase(rows, cost, ncols):
    """Maximize ``cost . y`` over ``rows`` with ``y >= 0``.

    Returns the optimal ``y`` as a list, or a :class:`Status` on failure.
    """
    m = len(rows)
    if m == 0:
        if any(c > 0 for c in cost):
            return Status.UNBOUNDED
        return [_ZERO] * ncols

    # Normalize to nonnegative right-hand sides; a >= row with zero rhs is
    # negated so its slack can start in the basis without an artificial.
    for r in rows:
        if r[2] < 0 or (r[2] == 0 and r[1] == GE):
            r[0] = [-a for a in r[0]]
            r[2] = -r[2]
            r[1] = {LE: GE, GE: LE, EQ: EQ}[r[1]]

    n_slack = sum(1 for r in rows if r[1] != EQ)
    n_art = sum(1 for r in rows if r[1] != LE)
    width = ncols + n_slack + n_art
    art_start = ncols + n_slack

    tab = []
    basis = []
    s = ncols
    a = art_start
    for coeffs, rel, rhs in rows:
        row = coeffs + [_ZERO] * (n_slack + n_art) + [rhs]
        if rel == LE:
            row[s] = _ONE
            basis.append(s)
            s += 1
        elif rel == GE:
            row[s] = -_ONE
            s += 1
            row[a] = _ONE
            basis.append(a)
            a += 1
        else:
            row[a] = _ONE
            basis.append(a)
            a += 1
        tab.append(row)

    allowed = [True] * width
    if n_art:
        # Phase 1: maximize -(sum of artificials).
        obj = [_ZERO] * (width + 1)
        for i, row in enumerate(tab):
            if basis[i] >= art_start:
                for j in range(art_start):
                    if row[j]:
                        obj[j] += row[j]
                obj[width] += row[width]
        res = _simplex(tab, basis, obj, allowed, width)
        if res is Status.UNBOUNDED:  # cannot happen for phase 1
            raise AssertionError("phase 1 unbounded")
        if obj[width] != 0:
            return Status.INFEASIBLE
        # Drive zero-level artificials out of the basis.
        i = 0
        while i < len(tab):
            if basis[i] >= art_start:
                row = tab[i]
                piv_col = next((j for j in range(art_start) if row[j]), None)
                if piv_col is None:
                    del tab[i]
                    del basis[i]
                    continue
                _pivot(tab, basis, None, i, piv_col, width)
            i += 1
        for j in range(art_start, width):
            allowed[j] = False

    obj = [_ZERO] * (width + 1)
    for j in range(ncols):
        obj[j] = cost[j]
    for i, row in enumerate(tab):
        cb = cost[basis[i]] if basis[i] < ncols else _ZERO
        if cb:
            for j in range(width + 1):
                if row[j]:
                    obj[j] -= cb * row[j]
    # obj[width] now holds -(current value), matching the pivot convention.
    res = _simplex(tab, basis, obj, allowed, width)
    if res is Status.UNBOUNDED:
        return res
    y = [_ZERO] * ncols
    for i, b in enumerate(basis):
        if b < ncols:
            y[b] = tab[i][width]
    return y


def _simplex(tab, basis, obj, allowed, width):
    # Bland: entering = lowest eligible index; leaving = lowest basic index
    # among minimum-ratio rows.
    while True:
        enter = -1
        for j in range(width):
            if allowed[j] and obj[j] > 0:
                enter = j
                break
        if enter < 0:
            return Status.OPTIMAL
        leave = -1
        best = None
        for i, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                ratio = row[width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return Status.UNBOUNDED
        _pivot(tab, basis, obj, leave, enter, width)


def _pivot(tab, basis, obj, r, c, width):
    prow = tab[r]
    piv = prow[c]
    if piv != 1:
        inv = 1 / piv
        prow = [v * inv if v else v for v in prow]
        tab[r] = prow
    nz = [j for j in range(width + 1) if prow[j]]
    for i, row in enumerate(tab):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    if obj is not None:
        f = obj[c]
        if f:
            for j in nz:
                obj[j] -= f * prow[j]
    basis[r] = c
