"""Exact linear programming over rationals.

Small dense two-phase simplex used by the belief-feasibility engine. All
coefficients are `fractions.Fraction`; every certificate it returns is exact,
which is what lets the solvers freeze witnesses into reports without rounding.

Variables are implicitly nonnegative (every caller's unknowns are probability
masses or slack-like quantities). Constraints may be <=, >= or ==.
"""

from fractions import Fraction

LE = "<="
GE = ">="
EQ = "=="

_OPS = (LE, GE, EQ)

ZERO = Fraction(0)
ONE = Fraction(1)


class LpResult:
    """Outcome of a solve: status in {'optimal', 'infeasible', 'unbounded'}."""

    __slots__ = ("status", "value", "x")

    def __init__(self, status, value=None, x=None):
        self.status = status
        self.value = value
        self.x = x

    def __repr__(self):
        return "LpResult(%r, value=%r)" % (self.status, self.value)


def _as_row(coeffs, n):
    row = [ZERO] * n
    if isinstance(coeffs, dict):
        for j, c in coeffs.items():
            row[j] = Fraction(c)
    else:
        for j, c in enumerate(coeffs):
            row[j] = Fraction(c)
    return row


def solve(num_vars, objective, rows):
    """Maximize objective . x subject to rows, x >= 0.

    objective: dict or sequence of coefficients.
    rows: iterable of (coeffs, op, rhs) with op one of '<=', '>=', '=='.
    """
    c = _as_row(objective, num_vars)
    norm = []
    for coeffs, op, rhs in rows:
        if op not in _OPS:
            raise ValueError("bad op %r" % (op,))
        a = _as_row(coeffs, num_vars)
        b = Fraction(rhs)
        if b < 0:
            a = [-v for v in a]
            b = -b
            if op == LE:
                op = GE
            elif op == GE:
                op = LE
        norm.append((a, op, b))

    m = len(norm)
    # Column layout: structural vars, then one slack/surplus per inequality,
    # then artificials. Basis starts on slacks where possible.
    slack_of = [None] * m
    art_of = [None] * m
    ncols = num_vars
    for i, (_, op, _b) in enumerate(norm):
        if op in (LE, GE):
            slack_of[i] = ncols
            ncols += 1
    for i, (_, op, _b) in enumerate(norm):
        if op in (GE, EQ):
            art_of[i] = ncols
            ncols += 1

    tab = []
    basis = []
    for i, (a, op, b) in enumerate(norm):
        row = a + [ZERO] * (ncols - num_vars)
        if op == LE:
            row[slack_of[i]] = ONE
            basis.append(slack_of[i])
        elif op == GE:
            row[slack_of[i]] = -ONE
            row[art_of[i]] = ONE
            basis.append(art_of[i])
        else:
            row[art_of[i]] = ONE
            basis.append(art_of[i])
        row.append(b)
        tab.append(row)

    n_art = sum(1 for a in art_of if a is not None)

    if n_art:
        # Phase 1: maximize -sum(artificials).
        obj = [ZERO] * (ncols + 1)
        for a in art_of:
            if a is not None:
                obj[a] = -ONE
        _price_out(obj, tab, basis)
        status = _iterate(obj, tab, basis, ncols)
        if status != "optimal":
            # Phase 1 objective is bounded above by zero, so this is unreachable,
            # but stay defensive.
            return LpResult("infeasible")
        if -obj[-1] != 0:
            return LpResult("infeasible")
        _expel_artificials(tab, basis, art_of, num_vars, slack_of)

    art_cols = set(a for a in art_of if a is not None)
    obj = [ZERO] * (ncols + 1)
    for j in range(num_vars):
        obj[j] = c[j]
    _price_out(obj, tab, basis)
    status = _iterate(obj, tab, basis, ncols, banned=art_cols)
    if status == "unbounded":
        return LpResult("unbounded")

    x = [ZERO] * num_vars
    for i, bj in enumerate(basis):
        if bj < num_vars:
            x[bj] = tab[i][-1]
    value = sum(c[j] * x[j] for j in range(num_vars))
    return LpResult("optimal", value, x)


def _price_out(obj, tab, basis):
    """Make the objective row consistent with the current basis."""
    for i, bj in enumerate(basis):
        coef = obj[bj]
        if coef != 0:
            row = tab[i]
            for j in range(len(obj)):
                obj[j] -= coef * row[j]


def _iterate(obj, tab, basis, ncols, banned=frozenset()):
    """Primal simplex with Bland's rule. Mutates obj/tab/basis in place."""
    m = len(tab)
    while True:
        enter = -1
        for j in range(ncols):
            if j in banned:
                continue
            if obj[j] > 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(obj, tab, basis, leave, enter)


def _pivot(obj, tab, basis, i, j):
    piv = tab[i][j]
    row = tab[i]
    inv = ONE / piv
    for k in range(len(row)):
        row[k] *= inv
    for r in range(len(tab)):
        if r == i:
            continue
        f = tab[r][j]
        if f != 0:
            other = tab[r]
            for k in range(len(row)):
                other[k] -= f * row[k]
    f = obj[j]
    if f != 0:
        for k in range(len(row)):
            obj[k] -= f * row[k]
    basis[i] = j


def _expel_artificials(tab, basis, art_of, num_vars, slack_of):
    """Pivot zero-level artificials out of the basis where possible."""
    art_cols = set(a for a in art_of if a is not None)
    for i in range(len(tab)):
        if basis[i] in art_cols:
            row = tab[i]
            target = -1
            for j in range(len(row) - 1):
                if j in art_cols:
                    continue
                if row[j] != 0:
                    target = j
                    break
            if target >= 0:
                dummy = [ZERO] * len(row)
                _pivot(dummy, tab, basis, i, target)
            # else the row is 0 = 0 and stays parked on the artificial.


def feasible(num_vars, rows):
    """Feasibility-only convenience wrapper; returns a point or None."""
    res = solve(num_vars, [ZERO] * num_vars, rows)
    if res.status == "optimal":
        return res.x
    return None
