"""Shannon-type outer bounds via linear programming over the entropy cone.

Joint entropies of a fixed list of random variables are the LP
coordinates, one per nonempty subset (indexed by bitmask in variable
order). Maximizing a linear objective subject to the elemental
inequalities plus problem constraints gives the tightest bound that
Shannon-type reasoning can certify.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import lp as lpm
from .lp import EQ, GE, LE, LinearProgram

MAX_VARIABLES = 16


class EntropyError(ValueError):
    pass


class DSLSyntaxError(EntropyError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class VariableUniverse:
    """An ordered list of named random variables."""

    def __init__(self, names: Sequence[str], cap: int = MAX_VARIABLES):
        names = list(names)
        if not names:
            raise EntropyError("universe needs at least one variable")
        if len(names) > cap:
            raise EntropyError(f"{len(names)} variables exceeds the cap of {cap}")
        if len(set(names)) != len(names):
            raise EntropyError("variable names must be unique")
        self.names = tuple(names)
        self._bit = {v: 1 << i for i, v in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, VariableUniverse) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    @property
    def full(self) -> int:
        return (1 << len(self.names)) - 1

    def mask(self, variables: Iterable[str] | str) -> int:
        if isinstance(variables, str):
            variables = [variables]
        m = 0
        for v in variables:
            try:
                m |= self._bit[v]
            except KeyError:
                raise EntropyError(f"unknown variable {v!r}") from None
        return m

    def label(self, mask: int) -> str:
        return ",".join(v for i, v in enumerate(self.names) if mask >> i & 1)


@dataclass(frozen=True)
class InfoExpression:
    """Linear combination of joint entropies, ``{mask: coefficient}``."""

    universe: VariableUniverse
    coeffs: tuple = ()  # sorted (mask, Fraction) pairs, zeros dropped

    @classmethod
    def from_dict(cls, universe, d: dict) -> "InfoExpression":
        return cls(universe, tuple(sorted((m, Fraction(c)) for m, c in d.items() if c and m)))

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def _combine(self, other, sign):
        if other.universe != self.universe:
            raise EntropyError("expressions live in different universes")
        d = self.as_dict()
        for m, c in other.coeffs:
            d[m] = d.get(m, 0) + sign * c
        return InfoExpression.from_dict(self.universe, d)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, k) -> "InfoExpression":
        return InfoExpression.from_dict(self.universe, {m: c * Fraction(k) for m, c in self.coeffs})

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, entropy) -> float:
        """Value under ``entropy(mask)``."""
        return sum(c * entropy(m) for m, c in self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in self.coeffs:
            term = f"H({self.universe.label(m)})"
            if c == 1:
                parts.append(f"+ {term}")
            elif c == -1:
                parts.append(f"- {term}")
            else:
                parts.append(f"{'-' if c < 0 else '+'} {abs(c)} {term}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else s


def H(universe: VariableUniverse, a, b=()) -> InfoExpression:
    """``H(A|B) = H(A,B) - H(B)``."""
    ma, mb = universe.mask(a), universe.mask(b)
    d = {ma | mb: 1}
    d[mb] = d.get(mb, 0) - 1
    return InfoExpression.from_dict(universe, d)


def I(universe: VariableUniverse, a, b, c=()) -> InfoExpression:
    """``I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)``."""
    ma, mb, mc = universe.mask(a), universe.mask(b), universe.mask(c)
    d: dict = {}
    for m, s in ((ma | mc, 1), (mb | mc, 1), (ma | mb | mc, -1), (mc, -1)):
        d[m] = d.get(m, 0) + s
    return InfoExpression.from_dict(universe, d)


@dataclass
class EntropyConstraint:
    expr: InfoExpression
    relation: str
    rhs: Fraction = Fraction(0)
    tag: str | None = None

    def key(self):
        return (self.expr.coeffs, self.relation, self.rhs)


@dataclass
class EntropyConstraintSystem:
    universe: VariableUniverse
    constraints: list = field(default_factory=list)
    objective: InfoExpression | None = None

    def add(self, expr: InfoExpression, relation: str, rhs=0, tag: str | None = None) -> None:
        if expr.universe != self.universe:
            raise EntropyError("constraint refers to a different universe")
        if relation not in (LE, EQ, GE):
            raise EntropyError(f"bad relation {relation!r}")
        self.constraints.append(EntropyConstraint(expr, relation, Fraction(rhs), tag))

    def without(self, tags: Iterable[str]) -> "EntropyConstraintSystem":
        tags = set(tags)
        return EntropyConstraintSystem(self.universe, [c for c in self.constraints if c.tag not in tags],
                                       self.objective)

    def structurally_equal(self, other: "EntropyConstraintSystem") -> bool:
        return (self.universe == other.universe
                and [c.key() for c in self.constraints] == [c.key() for c in other.constraints]
                and self.objective == other.objective)


# -- elemental inequalities ---------------------------------------------------


def elemental_count(n: int) -> int:
    return n + (n * (n - 1) // 2) * (1 << max(n - 2, 0))


def elemental_masks(n: int):
    """Yield each elemental inequality as ``{mask: coef}`` with ``sum >= 0``.

    Order: ``H(X_i | rest)`` for each i, then ``I(X_i; X_j | K)`` for
    ``i < j`` and ``K`` running over subsets of the remaining variables in
    increasing bitmask order.
    """
    full = (1 << n) - 1
    for i in range(n):
        rest = full & ~(1 << i)
        yield {full: 1, rest: -1} if rest else {full: 1}
    for i in range(n):
        for j in range(i + 1, n):
            rest = [k for k in range(n) if k not in (i, j)]
            for s in range(1 << len(rest)):
                K = 0
                for t, k in enumerate(rest):
                    if s >> t & 1:
                        K |= 1 << k
                d = {K | 1 << i: 1, K | 1 << j: 1, K | 1 << i | 1 << j: -1}
                if K:
                    d[K] = -1
                yield d


def elemental_inequalities(universe: VariableUniverse) -> list[InfoExpression]:
    return [InfoExpression.from_dict(universe, d) for d in elemental_masks(len(universe))]


# -- solving --------------------------------------------------------------------


@dataclass
class BoundResult:
    status: str
    optimum: float | None
    exact_optimum: Fraction | None
    residuals: dict
    num_constraints: int
    solution: object = None

    @property
    def optimal(self) -> bool:
        return self.status == lpm.OPTIMAL


def system_lp(system: EntropyConstraintSystem) -> LinearProgram:
    """The maximization LP; variable ``mask - 1`` is ``H(mask)``."""
    if system.objective is None:
        raise EntropyError("system has no objective")
    u = system.universe
    prog = LinearProgram("entropy")
    for m in range(1, u.full + 1):
        prog.add_variable(f"H({u.label(m)})")
    for d in elemental_masks(len(u)):
        prog.add_constraint({m - 1: c for m, c in d.items()}, GE, 0)
    for con in system.constraints:
        prog.add_constraint({m - 1: c for m, c in con.expr.coeffs}, con.relation, con.rhs, con.tag)
    prog.set_objective({m - 1: c for m, c in system.objective.coeffs})
    return prog


def prove_bound(system: EntropyConstraintSystem, exact: bool = True, tolerance: float = 1e-6,
                method: str = "ipm") -> BoundResult:
    """Maximize the objective over the Shannon outer bound.

    The float optimum and its basis come from HiGHS. With ``exact`` the
    primal/dual pair is first rounded to small-denominator rationals; if
    that does not certify, the basis is re-solved over the rationals.
    ``exact_optimum`` is set only when an exact certificate was found.
    """
    prog = system_lp(system)
    sol, basis = lpm.solve_basic(prog, method=method, tolerance=tolerance)
    n_cons = len(prog.constraints)
    if not sol.optimal:
        return BoundResult(sol.status, None, None, sol.residuals, n_cons, sol)
    float_opt = float(sol.objective)
    exact_opt = None
    if exact:
        ex = lpm.verify_exact(prog, sol)
        if ex is None and basis is not None:
            ex = lpm.exact_from_basis(prog, basis, sol.duals)
        if ex is not None:
            exact_opt = ex.objective
            sol = ex
    return BoundResult(sol.status, float_opt, exact_opt, sol.residuals, n_cons, sol)


# -- the layered example ---------------------------------------------------------

FIG4_VARIABLES = ("X", "Z1", "Z2", "Z3", "S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8")


def build_fig4_system(secrecy: bool = True) -> EntropyConstraintSystem:
    """Constraint system for the three-layer network with five tappable middle links.

    Tags: ``capacity``, ``decoding``, ``relay`` (last-layer nodes only
    combine their inputs), ``secrecy`` (any three middle links) and
    ``layer`` (middle links depend on the first layer as wired).
    """
    u = VariableUniverse(FIG4_VARIABLES)
    sysm = EntropyConstraintSystem(u)
    Z = ["Z1", "Z2", "Z3"]

    def S(*ix):
        return [f"S{i}" for i in ix]

    for v in Z + S(*range(1, 9)):
        sysm.add(H(u, [v]), LE, 1, "capacity")
    sysm.add(H(u, ["X"], S(6, 7, 8)), EQ, 0, "decoding")
    sysm.add(I(u, ["X", *Z, *S(4, 5, 7, 8)], S(6), S(1, 2, 3)), EQ, 0, "relay")
    sysm.add(I(u, ["X", *Z, *S(1, 3, 5, 6, 8)], S(7), S(2, 4)), EQ, 0, "relay")
    sysm.add(I(u, ["X", *Z, *S(2, 3, 6, 7)], S(8), S(1, 4, 5)), EQ, 0, "relay")
    if secrecy:
        for t in itertools.combinations(range(1, 6), 3):
            sysm.add(I(u, ["X"], S(*t)), EQ, 0, "secrecy")
    layer = [
        (S(1), ["Z2"], ["Z1", "Z3"]),
        (S(2), ["Z2", "Z3"], ["Z1"]),
        (S(3), ["Z3"], ["Z1", "Z2"]),
        (S(4), ["Z1", "Z3"], ["Z2"]),
        (S(5), ["Z1", "Z2"], ["Z3"]),
        (S(1), S(4), Z),
        (S(2), S(4, 5), Z),
        (S(3), S(5), Z),
        (S(4), S(1, 2, 5), Z),
        (S(5), S(2, 3, 4), Z),
        (S(1, 2, 3, 4, 5), ["X"], Z),
    ]
    for a, b, c in layer:
        sysm.add(I(u, a, b, c), EQ, 0, "layer")
    sysm.objective = H(u, ["X"])
    return sysm


# -- DSL ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<comment>\#[^\n]*) | (?P<nl>\n) |
    (?P<rel><=|>=|=) | (?P<num>\d+(?:/\d+|\.\d+)?) |
    (?P<name>[A-Za-z_][A-Za-z0-9_]*) | (?P<tag>@[A-Za-z_][A-Za-z0-9_-]*) |
    (?P<punct>[();|,+\-*])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            toks.append(_Tok("end", "\n", line, pos - start + 1))
            line += 1
            start = m.end()
        elif kind == "punct" and m.group() == ";":
            toks.append(_Tok("end", ";", line, pos - start + 1))
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.universe = None
        self.system = None

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, text=None):
        t = self.peek()
        if (kind and t.kind != kind) or (text and t.text != text):
            want = text or kind
            got = t.text if t.kind != "eof" else "end of input"
            raise DSLSyntaxError(f"expected {want!r}, got {got!r}", t.line, t.col)
        self.i += 1
        return t

    def error(self, msg, t=None):
        t = t or self.peek()
        raise DSLSyntaxError(msg, t.line, t.col)

    def parse(self):
        while self.peek().kind != "eof":
            if self.peek().kind == "end":
                self.i += 1
                continue
            self.statement()
        if self.system is None:
            self.error("missing 'vars' declaration")
        if self.system.objective is None:
            self.error("missing 'max' objective")
        return self.system

    def statement(self):
        t = self.peek()
        if t.kind == "name" and t.text == "vars":
            if self.universe is not None:
                self.error("duplicate 'vars' declaration")
            self.i += 1
            names = []
            while self.peek().kind in ("name", "punct") and self.peek().text != ";":
                tok = self.take()
                if tok.kind == "name":
                    names.append(tok.text)
                elif tok.text != ",":
                    self.error(f"unexpected {tok.text!r} in variable list", tok)
            if not names:
                self.error("empty variable list", t)
            try:
                self.universe = VariableUniverse(names)
            except EntropyError as e:
                self.error(str(e), t)
            self.system = EntropyConstraintSystem(self.universe)
            self.end_statement()
            return
        if self.system is None:
            self.error("'vars' must come first")
        if t.kind == "name" and t.text == "max":
            self.i += 1
            if self.system.objective is not None:
                self.error("duplicate objective", t)
            self.system.objective = self.expression()
            self.end_statement()
            return
        tag = None
        if t.kind == "tag":
            tag = t.text[1:]
            self.i += 1
        if self.system.objective is not None:
            self.error("constraints must precede the objective")
        expr = self.expression()
        rel = self.take("rel").text
        rhs = self.number()
        self.system.add(expr, {"<=": LE, ">=": GE, "=": EQ}[rel], rhs, tag)
        self.end_statement()

    def end_statement(self):
        if self.peek().kind not in ("end", "eof"):
            self.error(f"expected end of statement, got {self.peek().text!r}")

    def number(self):
        sign = 1
        if self.peek().text == "-":
            self.i += 1
            sign = -1
        return sign * Fraction(self.take("num").text)

    def expression(self):
        expr = InfoExpression(self.universe)
        first = True
        while True:
            sign = 1
            t = self.peek()
            if t.text in ("+", "-"):
                sign = -1 if t.text == "-" else 1
                self.i += 1
            elif not first:
                return expr
            coef = Fraction(1)
            if self.peek().kind == "num":
                coef = Fraction(self.take().text)
                if self.peek().text == "*":
                    self.i += 1
            expr = expr + self.term().scale(sign * coef)
            first = False

    def varlist(self):
        names = [self.take("name").text]
        while self.peek().text == ",":
            self.i += 1
            names.append(self.take("name").text)
        for n in names:
            if n not in self.universe.names:
                self.error(f"unknown variable {n!r}")
        return names

    def term(self):
        t = self.peek()
        if t.kind != "name" or t.text not in ("H", "I"):
            self.error(f"expected H(...) or I(...), got {t.text or 'end of input'!r}")
        self.i += 1
        self.take(text="(")
        if t.text == "H":
            a = self.varlist()
            b = []
            if self.peek().text == "|":
                self.i += 1
                b = self.varlist()
            self.take(text=")")
            return H(self.universe, a, b)
        a = self.varlist()
        if self.peek().kind == "end" and self.peek().text == ";":
            self.i += 1
        else:
            self.error("expected ';' inside I(...)")
        b = self.varlist()
        c = []
        if self.peek().text == "|":
            self.i += 1
            c = self.varlist()
        self.take(text=")")
        return I(self.universe, a, b, c)


def parse_constraints(text: str) -> EntropyConstraintSystem:
    """Parse the constraint language.

    ``vars A B C;`` declares variables; each further statement is
    ``[@tag] expr (<=|=|>=) number`` where ``expr`` sums optionally scaled
    ``H(A,B|C)`` and ``I(A;B|C)`` terms; the last statement is ``max expr``.
    Statements end at ``;`` or a newline, and ``#`` starts a comment.

    Raises:
        DSLSyntaxError: with the 1-based line and column of the problem.
    """
    return _Parser(text).parse()


def format_system(system: EntropyConstraintSystem) -> str:
    """Render a system back to the constraint language (expanded joint entropies)."""
    rel = {LE: "<=", GE: ">=", EQ: "="}
    lines = ["vars " + " ".join(system.universe.names)]
    for c in system.constraints:
        body = f"{c.expr} {rel[c.relation]} {c.rhs}"
        lines.append((f"@{c.tag} " if c.tag else "") + body)
    if system.objective is not None:
        lines.append(f"max {system.objective}")
    return "\n".join(lines) + "\n"


def fixture_system(name: str = "fig4") -> EntropyConstraintSystem:
    from importlib import resources
    return parse_constraints(resources.files("wiretapnc.data").joinpath(f"{name}.ent").read_text())
