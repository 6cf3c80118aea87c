"""Sparse linear programs solved in exact rational or floating arithmetic.

The exact solver is a two-phase tableau simplex over :class:`Fraction`
with sparse rows. Pricing is Dantzig's rule until a run of degenerate
pivots is seen, after which Bland's rule takes over for the rest of the
solve, so it terminates on the highly degenerate flow LPs.

The float path goes through HiGHS (``scipy.optimize.linprog``). Any
float solution can be re-verified exactly with :func:`verify_exact`,
which rationalises the primal and dual vectors and checks feasibility
and a zero duality gap in exact arithmetic. Large LPs whose optimal
vertex has big denominators go through :func:`solve_basic` and
:func:`exact_from_basis` instead: the optimal basis reported by HiGHS is
re-solved over the rationals with FLINT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

INF = math.inf
LE, EQ, GE = "<=", "=", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED, NUMERICAL_FAILURE = "optimal", "infeasible", "unbounded", "numerical_failure"

_DEGENERATE_SWITCH = 50


class LPError(ValueError):
    pass


@dataclass
class Constraint:
    terms: dict  # variable index -> coefficient
    relation: str
    rhs: Fraction
    name: str | None = None


class LinearProgram:
    """Maximisation LP with named variables.

    Variables default to bounds ``[0, +inf)``; pass ``lb=-math.inf`` for a
    free variable. Coefficients may be ints or Fractions.
    """

    def __init__(self, name: str = "lp"):
        self.name = name
        self.names: list[str] = []
        self.lower: list = []
        self.upper: list = []
        self._index: dict[str, int] = {}
        self.constraints: list[Constraint] = []
        self.objective: dict[int, Fraction] = {}

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def add_variable(self, name: str, lb=0, ub=INF) -> int:
        if name in self._index:
            raise LPError(f"duplicate variable {name!r}")
        self._index[name] = len(self.names)
        self.names.append(name)
        self.lower.append(lb if lb in (INF, -INF) else Fraction(lb))
        self.upper.append(ub if ub in (INF, -INF) else Fraction(ub))
        return self._index[name]

    def var(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise LPError(f"unknown variable {name!r}") from None

    def has_var(self, name: str) -> bool:
        return name in self._index

    def _terms(self, terms: Mapping) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for key, coef in terms.items():
            j = key if isinstance(key, int) else self.var(key)
            if not 0 <= j < len(self.names):
                raise LPError(f"variable index {j} out of range")
            c = out.get(j, 0) + coef
            if c:
                out[j] = c
            else:
                out.pop(j, None)
        return out

    def add_constraint(self, terms: Mapping, relation: str, rhs=0, name: str | None = None) -> int:
        if relation not in (LE, EQ, GE):
            raise LPError(f"bad relation {relation!r}")
        self.constraints.append(Constraint(self._terms(terms), relation, Fraction(rhs), name))
        return len(self.constraints) - 1

    def set_objective(self, terms: Mapping) -> None:
        self.objective = self._terms(terms)

    def to_arrays(self):
        """Sparse float matrices ``(c, A_ub, b_ub, A_eq, b_eq, bounds, row_map)``.

        ``row_map[i] = (kind, position, sign)`` locates constraint ``i``.
        """
        import scipy.sparse as sp

        n = self.num_vars
        ub_rows, ub_cols, ub_vals, b_ub = [], [], [], []
        eq_rows, eq_cols, eq_vals, b_eq = [], [], [], []
        row_map = []
        for con in self.constraints:
            if con.relation == EQ:
                r = len(b_eq)
                for j, v in con.terms.items():
                    eq_rows.append(r)
                    eq_cols.append(j)
                    eq_vals.append(float(v))
                b_eq.append(float(con.rhs))
                row_map.append(("eq", r, 1))
            else:
                sign = 1 if con.relation == LE else -1
                r = len(b_ub)
                for j, v in con.terms.items():
                    ub_rows.append(r)
                    ub_cols.append(j)
                    ub_vals.append(sign * float(v))
                b_ub.append(sign * float(con.rhs))
                row_map.append(("ub", r, sign))
        c = np.zeros(n)
        for j, v in self.objective.items():
            c[j] = float(v)
        A_ub = sp.csr_matrix((ub_vals, (ub_rows, ub_cols)), shape=(len(b_ub), n))
        A_eq = sp.csr_matrix((eq_vals, (eq_rows, eq_cols)), shape=(len(b_eq), n))
        bounds = [(None if lb == -INF else float(lb), None if ub == INF else float(ub))
                  for lb, ub in zip(self.lower, self.upper)]
        return c, A_ub, np.array(b_ub), A_eq, np.array(b_eq), bounds, row_map


@dataclass
class LPSolution:
    status: str
    values: dict = field(default_factory=dict)  # name -> value
    objective: object = None
    duals: list = field(default_factory=list)  # one per constraint
    exact: bool = True
    residuals: dict = field(default_factory=dict)
    iterations: int = 0

    def __getitem__(self, name: str):
        return self.values[name]

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


# -- exact simplex -----------------------------------------------------------


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols, artificial):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.artificial = artificial  # set of column ids
        self.obj: dict[int, Fraction] = {}
        self.z = Fraction(0)
        self.pivots = 0

    def pivot(self, p: int, q: int) -> None:
        rowp = self.rows[p]
        a = rowp[q]
        if a != 1:
            inv = 1 / a
            for j in rowp:
                rowp[j] *= inv
            self.rhs[p] *= inv
        bp = self.rhs[p]
        items = list(rowp.items())
        for i, row in enumerate(self.rows):
            if i == p:
                continue
            f = row.get(q)
            if f is None:
                continue
            for j, v in items:
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            if bp:
                self.rhs[i] -= f * bp
        f = self.obj.get(q)
        if f is not None:
            obj = self.obj
            for j, v in items:
                nv = obj.get(j, 0) - f * v
                if nv:
                    obj[j] = nv
                else:
                    obj.pop(j, None)
            self.z -= f * bp
        self.basis[p] = q
        self.pivots += 1

    def run(self, barred: set[int]) -> str:
        bland = False
        degenerate_run = 0
        while True:
            entering = None
            if bland:
                cands = [j for j, v in self.obj.items() if v < 0 and j not in barred]
                entering = min(cands) if cands else None
            else:
                best = 0
                for j, v in self.obj.items():
                    if v < best or (v == best and v < 0 and entering is not None and j < entering):
                        if j in barred:
                            continue
                        best, entering = v, j
            if entering is None:
                return OPTIMAL
            leave = None
            ratio = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                r = self.rhs[i] / a
                if ratio is None or r < ratio or (r == ratio and self.basis[i] < self.basis[leave]):
                    ratio, leave = r, i
            if leave is None:
                return UNBOUNDED
            if ratio == 0:
                degenerate_run += 1
                if degenerate_run > _DEGENERATE_SWITCH:
                    bland = True
            else:
                degenerate_run = 0
            self.pivot(leave, entering)


def _standard_form(lp: LinearProgram):
    """Shift/split variables so every column is >= 0; returns the pieces."""
    cols: list[tuple[int, int]] = []  # (original var, sign)
    offset: list[Fraction] = []
    var_cols: list[list[tuple[int, int]]] = []
    extra_rows = []
    for j in range(lp.num_vars):
        lb, ub = lp.lower[j], lp.upper[j]
        if lb != -INF:
            if ub != INF and ub < lb:
                raise LPError(f"variable {lp.names[j]!r} has empty bounds")
            c = len(cols)
            cols.append((j, 1))
            offset.append(lb)
            var_cols.append([(c, 1)])
            if ub != INF:
                extra_rows.append(({c: Fraction(1)}, LE, ub - lb))
        elif ub != INF:
            c = len(cols)
            cols.append((j, -1))
            offset.append(ub)
            var_cols.append([(c, -1)])
        else:
            c = len(cols)
            cols.append((j, 1))
            cols.append((j, -1))
            offset.append(Fraction(0))
            var_cols.append([(c, 1), (c + 1, -1)])
    return cols, offset, var_cols, extra_rows


def solve_exact(lp: LinearProgram) -> LPSolution:
    """Exact rational optimum by two-phase simplex (deterministic)."""
    cols, offset, var_cols, extra_rows = _standard_form(lp)
    ncols = len(cols)
    std_rows = []
    for con in lp.constraints:
        row: dict[int, Fraction] = {}
        b = con.rhs
        for j, a in con.terms.items():
            b -= a * offset[j]
            for c, s in var_cols[j]:
                row[c] = row.get(c, 0) + s * Fraction(a)
        std_rows.append((row, con.relation, b))
    std_rows.extend(extra_rows)

    rows, rhs, basis, flips, ident = [], [], [], [], []
    artificial = set()
    for row, rel, b in std_rows:
        row = {c: v for c, v in row.items() if v}
        flip = b < 0
        if flip:
            row = {c: -v for c, v in row.items()}
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        if rel == LE:
            s = ncols
            ncols += 1
            row[s] = Fraction(1)
            basis.append(s)
            ident.append(s)
        else:
            if rel == GE:
                row[ncols] = Fraction(-1)
                ncols += 1
            a = ncols
            ncols += 1
            row[a] = Fraction(1)
            artificial.add(a)
            basis.append(a)
            ident.append(a)
        rows.append(row)
        rhs.append(Fraction(b))
        flips.append(flip)

    tab = _Tableau(rows, rhs, basis, ncols, artificial)
    if artificial:
        obj: dict[int, Fraction] = {}
        z = Fraction(0)
        for i, row in enumerate(rows):
            if basis[i] in artificial:
                for c, v in row.items():
                    if c not in artificial:
                        obj[c] = obj.get(c, 0) - v
                z -= rhs[i]
        tab.obj = {c: v for c, v in obj.items() if v}
        tab.z = z
        tab.run(barred=set())
        if tab.z < 0:
            return LPSolution(INFEASIBLE, iterations=tab.pivots)
        # drive zero-level artificials out of the basis
        keep = []
        for i in range(len(tab.rows)):
            if tab.basis[i] in artificial:
                q = min((c for c in tab.rows[i] if c not in artificial), default=None)
                if q is None:
                    continue  # redundant row
                tab.pivot(i, q)
            keep.append(i)
        if len(keep) != len(tab.rows):
            drop = set(range(len(tab.rows))) - set(keep)
            tab.rows = [tab.rows[i] for i in keep]
            tab.rhs = [tab.rhs[i] for i in keep]
            tab.basis = [tab.basis[i] for i in keep]
            # rows that vanished keep a zero dual
            ident = [None if i in drop else ident[i] for i in range(len(ident))]

    cost: dict[int, Fraction] = {}
    const = Fraction(0)
    for j, a in lp.objective.items():
        const += a * offset[j]
        for c, s in var_cols[j]:
            cost[c] = cost.get(c, 0) + s * Fraction(a)
    obj = {c: -v for c, v in cost.items() if v}
    z = Fraction(0)
    for i, row in enumerate(tab.rows):
        cb = cost.get(tab.basis[i])
        if cb:
            for c, v in row.items():
                nv = obj.get(c, 0) + cb * v
                if nv:
                    obj[c] = nv
                else:
                    obj.pop(c, None)
            z += cb * tab.rhs[i]
    tab.obj = obj
    tab.z = z
    status = tab.run(barred=artificial)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, iterations=tab.pivots)

    colval = [Fraction(0)] * ncols
    for i, c in enumerate(tab.basis):
        colval[c] = tab.rhs[i]
    values = {}
    for j, name in enumerate(lp.names):
        values[name] = offset[j] + sum((s * colval[c] for c, s in var_cols[j]), Fraction(0))
    duals = []
    for i in range(len(lp.constraints)):
        c = ident[i]
        y = Fraction(0) if c is None else tab.obj.get(c, Fraction(0))
        duals.append(-y if flips[i] else y)
    return LPSolution(OPTIMAL, values, tab.z + const, duals, exact=True, iterations=tab.pivots)


# -- certificates ------------------------------------------------------------


def certificate(lp: LinearProgram, x: list, y: list, exact: bool = True) -> dict:
    """Primal/dual residuals and duality gap for a candidate pair ``(x, y)``.

    ``x`` and ``y`` are indexed like ``lp.names`` and ``lp.constraints``.
    With Fractions every quantity is exact.
    """
    zero = Fraction(0) if exact else 0.0
    primal = zero
    for j in range(lp.num_vars):
        if lp.lower[j] != -INF:
            primal = max(primal, lp.lower[j] - x[j])
        if lp.upper[j] != INF:
            primal = max(primal, x[j] - lp.upper[j])
    reduced = [zero] * lp.num_vars
    for j, a in lp.objective.items():
        reduced[j] = a if exact else float(a)
    dual_sign = zero
    dual_obj = zero
    for i, con in enumerate(lp.constraints):
        lhs = zero
        for j, a in con.terms.items():
            lhs += (a if exact else float(a)) * x[j]
        rhs = con.rhs if exact else float(con.rhs)
        if con.relation == LE:
            primal = max(primal, lhs - rhs)
            dual_sign = max(dual_sign, -y[i])
        elif con.relation == GE:
            primal = max(primal, rhs - lhs)
            dual_sign = max(dual_sign, y[i])
        else:
            primal = max(primal, abs(lhs - rhs))
        if y[i]:
            dual_obj += y[i] * rhs
            for j, a in con.terms.items():
                reduced[j] -= (a if exact else float(a)) * y[i]
    dual = dual_sign
    for j, d in enumerate(reduced):
        if d > 0:
            if lp.upper[j] == INF:
                dual = max(dual, d)
            else:
                dual_obj += d * (lp.upper[j] if exact else float(lp.upper[j]))
        elif d < 0:
            if lp.lower[j] == -INF:
                dual = max(dual, -d)
            else:
                dual_obj += d * (lp.lower[j] if exact else float(lp.lower[j]))
    primal_obj = zero
    for j, a in lp.objective.items():
        primal_obj += (a if exact else float(a)) * x[j]
    return {"primal_infeasibility": primal, "dual_infeasibility": dual,
            "primal_objective": primal_obj, "dual_objective": dual_obj,
            "gap": dual_obj - primal_obj}


def check_optimal(lp: LinearProgram, sol: LPSolution) -> bool:
    """Exact optimality check of an exact solution via its dual certificate."""
    x = [sol.values[n] for n in lp.names]
    cert = certificate(lp, x, sol.duals, exact=True)
    return cert["primal_infeasibility"] == 0 and cert["dual_infeasibility"] == 0 and cert["gap"] == 0


# -- float path --------------------------------------------------------------


def solve_float(lp: LinearProgram, tolerance: float = 1e-6, method: str = "highs") -> LPSolution:
    """Floating-point optimum via HiGHS with residuals reported."""
    from scipy.optimize import linprog

    if tolerance <= 0:
        raise LPError("tolerance must be positive")
    c, A_ub, b_ub, A_eq, b_eq, bounds, row_map = lp.to_arrays()
    kwargs = {}
    if A_ub.shape[0]:
        kwargs.update(A_ub=A_ub, b_ub=b_ub)
    if A_eq.shape[0]:
        kwargs.update(A_eq=A_eq, b_eq=b_eq)
    res = linprog(-c, bounds=bounds, method=method, **kwargs)
    if res.status in (2, 3):
        # presolve can mistake one for the other; confirm on the raw model
        res = linprog(-c, bounds=bounds, method=method, options={"presolve": False}, **kwargs)
    if res.status == 2:
        return LPSolution(INFEASIBLE, exact=False)
    if res.status == 3:
        return LPSolution(UNBOUNDED, exact=False)
    if res.status != 0 or res.x is None:
        return LPSolution(NUMERICAL_FAILURE, exact=False, residuals={"message": res.message})
    ub_m = res.ineqlin.marginals if A_ub.shape[0] else np.zeros(0)
    eq_m = res.eqlin.marginals if A_eq.shape[0] else np.zeros(0)
    duals = []
    for kind, r, sign in row_map:
        if kind == "eq":
            duals.append(-float(eq_m[r]))
        else:
            duals.append(-sign * float(ub_m[r]))
    x = [float(v) for v in res.x]
    cert = certificate(lp, x, duals, exact=False)
    residuals = {"primal_infeasibility": float(cert["primal_infeasibility"]),
                 "dual_infeasibility": float(cert["dual_infeasibility"]),
                 "gap": float(abs(cert["gap"]))}
    status = OPTIMAL
    if max(residuals.values()) > tolerance:
        status = NUMERICAL_FAILURE
    return LPSolution(status, dict(zip(lp.names, x)), float(-res.fun), duals, exact=False,
                      residuals=residuals, iterations=int(getattr(res, "nit", 0)))


def _rationalize(values: Iterable[float], max_den: int, snap: float) -> list[Fraction]:
    out = []
    for v in values:
        if abs(v) < snap:
            out.append(Fraction(0))
        else:
            out.append(Fraction(v).limit_denominator(max_den))
    return out


def verify_exact(lp: LinearProgram, sol: LPSolution,
                 denominators: Iterable[int] = (12, 60, 1000, 10**4, 10**6)) -> LPSolution | None:
    """Re-verify a float optimum in exact arithmetic.

    Both primal and dual vectors are rounded to nearby rationals with
    bounded denominators; the result is returned only when the rounded
    pair is exactly primal feasible, exactly dual feasible and has zero
    duality gap, which certifies the exact optimum. Returns ``None`` when
    no tried denominator bound yields a certificate.
    """
    if sol.status != OPTIMAL:
        return None
    xs = [sol.values[n] for n in lp.names]
    for den in denominators:
        x = _rationalize(xs, den, 1e-9)
        y = _rationalize(sol.duals, den, 1e-9)
        cert = certificate(lp, x, y, exact=True)
        if cert["primal_infeasibility"] == 0 and cert["dual_infeasibility"] == 0 and cert["gap"] == 0:
            return LPSolution(OPTIMAL, dict(zip(lp.names, x)), cert["primal_objective"], y,
                              exact=True, residuals={"max_denominator": den})
    return None


# -- basis path ----------------------------------------------------------------


@dataclass
class Basis:
    basic_cols: np.ndarray  # bool per variable
    col_at_upper: np.ndarray  # bool per nonbasic variable sitting at its upper bound
    basic_rows: np.ndarray  # bool per constraint
    row_at_upper: np.ndarray  # bool per tight constraint pinned at its upper side


def _row_bounds(con: Constraint) -> tuple[float, float]:
    r = float(con.rhs)
    if con.relation == LE:
        return -INF, r
    if con.relation == GE:
        return r, INF
    return r, r


def solve_basic(lp: LinearProgram, method: str = "ipm", tolerance: float = 1e-6) -> tuple[LPSolution, Basis | None]:
    """Float solve through ``highspy`` that also returns the optimal basis.

    ``method`` is a HiGHS solver name (``ipm``, ``simplex``, ``choose``);
    interior point runs crossover, so a basis is always available.
    """
    import highspy
    import scipy.sparse as sp

    n, m = lp.num_vars, len(lp.constraints)
    rows, cols, vals = [], [], []
    for i, con in enumerate(lp.constraints):
        for j, v in con.terms.items():
            rows.append(i)
            cols.append(j)
            vals.append(float(v))
    A = sp.csc_matrix((vals, (rows, cols)), shape=(m, n))
    inf = highspy.kHighsInf
    model = highspy.HighsLp()
    model.num_col_, model.num_row_ = n, m
    c = np.zeros(n)
    for j, v in lp.objective.items():
        c[j] = float(v)
    model.col_cost_ = -c
    model.col_lower_ = np.array([-inf if v == -INF else float(v) for v in lp.lower])
    model.col_upper_ = np.array([inf if v == INF else float(v) for v in lp.upper])
    rb = np.array([_row_bounds(con) for con in lp.constraints]).reshape(m, 2)
    model.row_lower_ = np.where(np.isinf(rb[:, 0]), -inf, rb[:, 0])
    model.row_upper_ = np.where(np.isinf(rb[:, 1]), inf, rb[:, 1])
    model.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    model.a_matrix_.start_ = A.indptr
    model.a_matrix_.index_ = A.indices
    model.a_matrix_.value_ = A.data
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", method)
    h.passModel(model)
    h.run()
    S = highspy.HighsModelStatus
    status = h.getModelStatus()
    if status in (S.kInfeasible, S.kUnbounded, S.kUnboundedOrInfeasible):
        # presolve can mistake one for the other; confirm on the raw model
        h.setOptionValue("presolve", "off")
        h.setOptionValue("solver", "simplex")
        h.clearSolver()
        h.run()
        status = h.getModelStatus()
    if status == S.kInfeasible:
        return LPSolution(INFEASIBLE, exact=False), None
    if status == S.kUnbounded:
        return LPSolution(UNBOUNDED, exact=False), None
    if status != highspy.HighsModelStatus.kOptimal:
        return LPSolution(NUMERICAL_FAILURE, exact=False, residuals={"message": h.modelStatusToString(status)}), None
    sol = h.getSolution()
    x = list(np.asarray(sol.col_value, dtype=float))
    # HiGHS minimised -c, so its row duals are the negated multipliers of the max problem
    y = [-float(v) for v in sol.row_dual]
    cert = certificate(lp, x, y, exact=False)
    residuals = {"primal_infeasibility": float(cert["primal_infeasibility"]),
                 "dual_infeasibility": float(cert["dual_infeasibility"]),
                 "gap": float(abs(cert["gap"]))}
    st = OPTIMAL if max(residuals.values()) <= tolerance else NUMERICAL_FAILURE
    basis = None
    hb = h.getBasis()
    if hb.valid:
        B = highspy.HighsBasisStatus
        basis = Basis(np.array([s == B.kBasic for s in hb.col_status]),
                      np.array([s == B.kUpper for s in hb.col_status]),
                      np.array([s == B.kBasic for s in hb.row_status]),
                      np.array([s == B.kUpper for s in hb.row_status]))
    return LPSolution(st, dict(zip(lp.names, x)), float(cert["primal_objective"]), y, exact=False,
                      residuals=residuals), basis


def _solve_rational(rows: list[dict], cols: list[int], rhs: list[Fraction]) -> list[Fraction]:
    """Solve the square system ``sum_j rows[i][cols[j]] * x_j = rhs[i]`` over Q."""
    import flint

    pos = {j: k for k, j in enumerate(cols)}
    n = len(cols)
    den = 1
    for r in rows:
        for v in r.values():
            den = math.lcm(den, Fraction(v).denominator)
    M = flint.fmpz_mat(n, n)
    for i, r in enumerate(rows):
        for j, v in r.items():
            if j in pos:
                M[i, pos[j]] = int(Fraction(v) * den)
    rdn = 1
    for v in rhs:
        rdn = math.lcm(rdn, v.denominator)
    R = flint.fmpz_mat(n, 1, [int(v * rdn) for v in rhs])
    X = M.solve(R)  # fmpq_mat; raises ZeroDivisionError when singular
    scale = Fraction(den, rdn)
    return [Fraction(int(X[k, 0].p), int(X[k, 0].q)) * scale for k in range(n)]


def exact_from_basis(lp: LinearProgram, basis: Basis, duals: list | None = None) -> LPSolution | None:
    """Exact vertex and multipliers for a HiGHS basis, certified by :func:`certificate`.

    Nonbasic variables sit at a bound, tight constraints at their
    right-hand side; the basic variables follow from one rational solve.
    Multipliers are first tried by rationalising ``duals`` and otherwise
    come from the transposed basis system. Returns ``None`` if the basis
    is singular or the resulting pair is not an exact optimal certificate.
    """
    n = lp.num_vars
    x = [Fraction(0)] * n
    for j in range(n):
        if not basis.basic_cols[j]:
            lo, hi = lp.lower[j], lp.upper[j]
            v = hi if basis.col_at_upper[j] and hi != INF else (lo if lo != -INF else (hi if hi != INF else 0))
            x[j] = Fraction(v)
    bcols = [j for j in range(n) if basis.basic_cols[j]]
    tight = [i for i in range(len(lp.constraints)) if not basis.basic_rows[i]]
    if len(tight) != len(bcols):
        return None
    rows, rhs = [], []
    for i in tight:
        con = lp.constraints[i]
        rows.append(con.terms)
        rhs.append(con.rhs - sum((a * x[j] for j, a in con.terms.items() if not basis.basic_cols[j]), Fraction(0)))
    try:
        xb = _solve_rational(rows, bcols, rhs) if bcols else []
    except ZeroDivisionError:
        return None
    for j, v in zip(bcols, xb):
        x[j] = v

    def ok(y):
        cert = certificate(lp, x, y, exact=True)
        good = cert["primal_infeasibility"] == 0 and cert["dual_infeasibility"] == 0 and cert["gap"] == 0
        return cert if good else None

    if duals is not None:
        for den in (12, 60, 1000, 10**4, 10**6):
            y = _rationalize(duals, den, 1e-9)
            cert = ok(y)
            if cert:
                return LPSolution(OPTIMAL, dict(zip(lp.names, x)), cert["primal_objective"], y, exact=True,
                                  residuals={"max_denominator": den, "primal": "basis"})
    # y on tight rows solves B^T y = c_B
    cols_t = {}
    for k, i in enumerate(tight):
        for j, a in lp.constraints[i].terms.items():
            if basis.basic_cols[j]:
                cols_t.setdefault(j, {})[k] = a
    trows = [cols_t.get(j, {}) for j in bcols]
    try:
        yt = _solve_rational(trows, list(range(len(tight))), [Fraction(lp.objective.get(j, 0)) for j in bcols])
    except ZeroDivisionError:
        return None
    y = [Fraction(0)] * len(lp.constraints)
    for i, v in zip(tight, yt):
        y[i] = v
    cert = ok(y)
    if cert is None:
        return None
    return LPSolution(OPTIMAL, dict(zip(lp.names, x)), cert["primal_objective"], y, exact=True,
                      residuals={"primal": "basis", "dual": "basis"})


# -- export ------------------------------------------------------------------


def _fmt(v, digits: int = 12) -> str:
    return f"{float(v):.{digits}g}"


def to_lp_format(lp: LinearProgram) -> str:
    """CPLEX LP text (debugging aid; rationals are rendered as decimals, lossy)."""

    def expr(terms):
        parts = []
        for j, a in sorted(terms.items()):
            sign = "-" if a < 0 else "+"
            parts.append(f"{sign} {_fmt(abs(a))} {_safe(lp.names[j])}")
        s = " ".join(parts) if parts else "0"
        return s[2:] if s.startswith("+ ") else s

    out = [f"\\ {lp.name} (decimal rendering of rationals, lossy)", "Maximize", f" obj: {expr(lp.objective)}",
           "Subject To"]
    for i, con in enumerate(lp.constraints):
        name = _safe(con.name) if con.name else f"c{i}"
        out.append(f" {name}: {expr(con.terms)} {con.relation} {_fmt(con.rhs)}")
    out.append("Bounds")
    for j, n in enumerate(lp.names):
        lb, ub = lp.lower[j], lp.upper[j]
        lo = "-inf" if lb == -INF else _fmt(lb)
        hi = "+inf" if ub == INF else _fmt(ub)
        out.append(f" {lo} <= {_safe(n)} <= {hi}")
    out.append("End")
    return "\n".join(out) + "\n"


def _safe(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "_.[]" else "_" for ch in name)
