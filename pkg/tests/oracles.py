"""Independent oracles: sympy function calculus and numerical first variations."""
from __future__ import annotations

import numpy as np
import sympy as sp_
from sympy.calculus.euler import euler_equations

from jetvar.jetforms import VectorField, contract, d_total, horizontalize
from jetvar.symexpr import Coord, Expr, JetSpace, Kernel, base_coord, field_coord, param
from jetvar.varseq import Lagrangian

_FUNCS = {"sin": sp_.sin, "cos": sp_.cos, "exp": sp_.exp}


class SympyFrame:
    """Sections u_a(x) as sympy functions; jet coordinates become derivatives."""

    def __init__(self, space: JetSpace):
        self.space = space
        self.xs = sp_.symbols(" ".join(f"x{i}" for i in range(space.n)) + " ,")[: space.n]
        self.fs = [sp_.Function(f"u{a}")(*self.xs) for a in range(space.m)]
        self.params: dict = {}

    def coord(self, c: Coord):
        if c.kind == "x":
            return self.xs[c.index]
        if c.kind == "y":
            f = self.fs[c.index]
            return sp_.diff(f, *[self.xs[i] for i in c.multi]) if c.multi else f
        if c.kind == "p":
            if c.name == "pi":
                return sp_.pi
            return self.params.setdefault(c.name, sp_.Symbol(c.name))
        raise ValueError(f"no sympy image for {c!r}")

    def __call__(self, e: Expr):
        total = sp_.Integer(0)
        for mono, coef in e.terms():
            term = sp_.Rational(coef.numerator, coef.denominator)
            for atom, p in mono:
                if isinstance(atom, Kernel):
                    term *= _FUNCS[atom.func](self(atom.arg)) ** p
                else:
                    term *= self.coord(atom) ** p
            total += term
        return total

    def el(self, L: Expr) -> list:
        """Euler-Lagrange expressions by sympy's variational calculus."""
        eqs = euler_equations(self(L), self.fs, self.xs)
        return [eq.lhs - eq.rhs for eq in eqs]

    def jet_vars(self, expr) -> list:
        return sorted(expr.atoms(sp_.Derivative), key=sp_.default_sort_key) + list(self.fs)

    def lie_lagrangian(self, L: Expr, Xi: VectorField):
        """pr Xi_V(L) + D_mu(xi^mu L), by the classical prolongation formula."""
        Ls = self(L)
        Q = [self(Xi.components[a]) - sum(self(Xi.xi[mu]) * sp_.diff(self.fs[a], self.xs[mu]) for mu in range(self.space.n)) for a in range(self.space.m)]
        total = sp_.Integer(0)
        for v in self.jet_vars(Ls):
            if isinstance(v, sp_.Derivative):
                a = self.fs.index(v.expr)
                vars_ = [s for s, k in v.variable_count for _ in range(k)]
                total += sp_.diff(Ls, v) * sp_.diff(Q[a], *vars_)
            else:
                total += sp_.diff(Ls, v) * Q[self.fs.index(v)]
        for mu in range(self.space.n):
            total += sp_.diff(self(Xi.xi[mu]) * Ls, self.xs[mu])
        return total


def sym_zero(expr) -> bool:
    expr = sp_.expand(expr)
    if expr == 0:
        return True
    return sp_.simplify(sp_.expand_trig(expr)) == 0


def cartan_lie_lagrangian(lag: Lagrangian, Xi: VectorField) -> Expr:
    """h(i_X d(L w) + d(i_X L w)) computed on raw forms."""
    form = lag.to_form()
    out = contract(Xi, d_total(form)) + d_total(contract(Xi, form))
    return horizontalize(out).scalar()


# ------------------------------------------------------------ numerics
def gauss(nodes: int = 64, lo: float = 0.0, hi: float = 1.0):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def gateaux_check(lag: Lagrangian, sections: list, variations: list, params=None, eps: float = 1e-5):
    """(dS/de by central differences, integral of E(u) . h) on [0, 1] for n = 1.

    ``sections`` and ``variations`` are sympy expressions in the symbol t;
    variations must vanish to high order at both ends.
    """
    from jetvar.varseq import euler_lagrange

    space = lag.space
    if space.n != 1:
        raise ValueError("Gateaux oracle is one-dimensional")
    t = sp_.Symbol("t")
    params = params or {}
    order = max(lag.order, 2 * lag.order)
    ts, ws = gauss(96)

    def jets(funcs):
        table = {}
        for a, f in enumerate(funcs):
            for k in range(order + 1):
                fn = sp_.lambdify(t, sp_.diff(f, t, k), "numpy")
                table[(a, k)] = np.broadcast_to(np.asarray(fn(ts), dtype=float), ts.shape)
        return table

    def evaluate(expr: Expr, table) -> np.ndarray:
        out = np.zeros_like(ts)
        for i, tv in enumerate(ts):
            env = {base_coord(0): tv}
            for (a, k), arr in table.items():
                env[field_coord(a, (0,) * k)] = arr[i]
            for name, val in params.items():
                env[param(name)] = val
            out[i] = expr.evaluate(env)
        return out

    def action(e):
        funcs = [s + e * h for s, h in zip(sections, variations)]
        return float(np.dot(ws, evaluate(lag.expr, jets(funcs))))

    numeric = (action(eps) - action(-eps)) / (2 * eps)
    table = jets(sections)
    htable = jets(variations)
    E = euler_lagrange(lag)
    pairing = sum(evaluate(E.components[a], table) * htable[(a, 0)] for a in range(space.m))
    return numeric, float(np.dot(ws, pairing))


def bump(k: int = 6):
    t = sp_.Symbol("t")
    return (4 * t * (1 - t)) ** k
