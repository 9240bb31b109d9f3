"""Variational-sequence morphisms on a single chart.

Lagrangians, source (dynamical) forms and currents are stored through their
coefficients: ``L`` for ``L * omega``, ``eta_a`` for ``eta_a theta^a ^ omega``
and ``J^mu`` for ``J^mu omega_mu`` where ``omega = dx0 ^ ... ^ dx{n-1}`` and
``omega_mu`` is ``d/dx^mu`` contracted into ``omega``.  ``to_form`` gives the
corresponding :class:`~jetvar.jetforms.Form`.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.sdm import SDM

from .errors import (
    DimensionMismatch,
    JetVarError,
    NoSolution,
    NotClosed,
    NotLocallyVariational,
    OrderTooHigh,
)
from .jetforms import Form, d_H, wedge
from .symexpr import (
    HOMOTOPY,
    ONE,
    ZERO,
    Coord,
    Expr,
    JetSpace,
    Kernel,
    base_coord,
    expr_sum,
    field_coord,
    variation_coord,
)


def _as_expr(v) -> Expr:
    return v if isinstance(v, Expr) else Expr.const(v)


@dataclass(frozen=True)
class Lagrangian:
    """The class of ``expr * dx0 ^ ... ^ dx{n-1}``."""

    expr: Expr
    space: JetSpace

    @property
    def order(self) -> int:
        return self.expr.jet_order()

    def to_form(self) -> Form:
        return self.expr * Form.volume(self.space)

    @property
    def is_zero(self) -> bool:
        return self.expr.is_zero

    def __add__(self, other: "Lagrangian") -> "Lagrangian":
        return Lagrangian(self.expr + other.expr, self.space)

    def __sub__(self, other: "Lagrangian") -> "Lagrangian":
        return Lagrangian(self.expr - other.expr, self.space)

    def __neg__(self) -> "Lagrangian":
        return Lagrangian(-self.expr, self.space)

    def substitute(self, mapping) -> "Lagrangian":
        return Lagrangian(self.expr.substitute(mapping), self.space)

    def __str__(self):
        return self.space.fmt(self.expr)


@dataclass(frozen=True)
class SourceForm:
    """Dynamical form ``eta_a theta^a ^ omega``."""

    components: tuple
    space: JetSpace

    def __post_init__(self):
        comps = tuple(_as_expr(c) for c in self.components)
        if len(comps) != self.space.m:
            raise DimensionMismatch(f"source form needs {self.space.m} components")
        object.__setattr__(self, "components", comps)

    @staticmethod
    def zero(space: JetSpace) -> "SourceForm":
        return SourceForm((ZERO,) * space.m, space)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    @property
    def order(self) -> int:
        return max(c.jet_order() for c in self.components)

    def to_form(self) -> Form:
        vol = Form.volume(self.space)
        out = Form.zero(self.space, self.space.n + 1)
        for a, c in enumerate(self.components):
            out = out + c * wedge(Form.theta(self.space, a), vol)
        return out

    def __add__(self, other: "SourceForm") -> "SourceForm":
        return SourceForm(tuple(a + b for a, b in zip(self.components, other.components)), self.space)

    def __sub__(self, other: "SourceForm") -> "SourceForm":
        return SourceForm(tuple(a - b for a, b in zip(self.components, other.components)), self.space)

    def __neg__(self):
        return SourceForm(tuple(-a for a in self.components), self.space)

    def substitute(self, mapping) -> "SourceForm":
        return SourceForm(tuple(c.substitute(mapping) for c in self.components), self.space)

    def __str__(self):
        return "[" + ", ".join(self.space.fmt(c) for c in self.components) + "]"


@dataclass(frozen=True)
class Current:
    """Horizontal (n-1)-form ``J^mu omega_mu``; for n = 1 just a function."""

    components: tuple
    space: JetSpace

    def __post_init__(self):
        comps = tuple(_as_expr(c) for c in self.components)
        if len(comps) != self.space.n:
            raise DimensionMismatch(f"current needs {self.space.n} components")
        object.__setattr__(self, "components", comps)

    @staticmethod
    def zero(space: JetSpace) -> "Current":
        return Current((ZERO,) * space.n, space)

    @staticmethod
    def from_form(form: Form) -> "Current":
        sp = form.space
        if form.degree != sp.n - 1 or form.contact_degrees()[1] != 0:
            raise DimensionMismatch("a current is a horizontal (n-1)-form")
        comps = []
        for mu in range(sp.n):
            hook = Form.volume_hook(sp, mu)
            (word, sign), = hook.terms()
            comps.append(form.coefficient(word) * sign)
        return Current(tuple(comps), sp)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def to_form(self) -> Form:
        out = Form.zero(self.space, self.space.n - 1)
        for mu, c in enumerate(self.components):
            out = out + c * Form.volume_hook(self.space, mu)
        return out

    def divergence(self) -> Expr:
        return expr_sum(self.space.D(c, mu) for mu, c in enumerate(self.components))

    def d_H(self) -> Lagrangian:
        """d_H of the current, as the coefficient of the volume form."""
        return Lagrangian(self.divergence(), self.space)

    def __add__(self, other: "Current") -> "Current":
        return Current(tuple(a + b for a, b in zip(self.components, other.components)), self.space)

    def __sub__(self, other: "Current") -> "Current":
        return Current(tuple(a - b for a, b in zip(self.components, other.components)), self.space)

    def __neg__(self):
        return Current(tuple(-a for a in self.components), self.space)

    def scale(self, factor) -> "Current":
        f = _as_expr(factor)
        return Current(tuple(f * c for c in self.components), self.space)

    def substitute(self, mapping) -> "Current":
        return Current(tuple(c.substitute(mapping) for c in self.components), self.space)

    def __str__(self):
        if self.space.n == 1:
            return self.space.fmt(self.components[0])
        return "(" + ", ".join(self.space.fmt(c) for c in self.components) + ")"


# ------------------------------------------------------------ Euler-Lagrange
def _field_coords(e: Expr, a: int | None = None) -> list:
    return sorted(
        (c for c in e.free_coords() if c.kind == "y" and (a is None or c.index == a)),
        key=lambda c: c.key,
    )


def euler_lagrange(lag: Lagrangian) -> SourceForm:
    """E_a(L) = sum_I (-1)^|I| D_I (dL/dy^a_I)."""
    sp = lag.space
    L = lag.expr
    comps = []
    for a in range(sp.m):
        comps.append(
            expr_sum(
                sp.D_multi(L.partial(c), c.multi) * ((-1) ** c.order) for c in _field_coords(L, a)
            )
        )
    return SourceForm(tuple(comps), sp)


@dataclass(frozen=True)
class HelmholtzResult:
    is_locally_variational: bool
    residuals: tuple


def linearization(eta: SourceForm) -> tuple:
    """Components sum_{b,I} d eta_a / d y^b_I * v^b_I on formal test fields v."""
    out = []
    for ea in eta.components:
        out.append(
            expr_sum(ea.partial(c) * Expr.coord(variation_coord(c.index, c.multi)) for c in _field_coords(ea))
        )
    return tuple(out)


def adjoint_linearization(eta: SourceForm) -> tuple:
    """Formal adjoint sum_{b,I} (-1)^|I| D_I(d eta_b / d y^a_I * v^b)."""
    sp = eta.space
    out = []
    for a in range(sp.m):
        pieces = []
        for b, eb in enumerate(eta.components):
            vb = Expr.coord(variation_coord(b))
            for c in _field_coords(eb, a):
                pieces.append(sp.D_multi(eb.partial(c) * vb, c.multi) * ((-1) ** c.order))
        out.append(expr_sum(pieces))
    return tuple(out)


def helmholtz_check(eta: SourceForm) -> HelmholtzResult:
    """Local variationality via self-adjointness of the linearization."""
    lin = linearization(eta)
    adj = adjoint_linearization(eta)
    residuals = tuple(l - r for l, r in zip(lin, adj))
    return HelmholtzResult(all(r.is_zero for r in residuals), residuals)


def tonti_lagrangian(eta: SourceForm, center: Sequence | None = None) -> Lagrangian:
    """Fiber-radial homotopy Lagrangian, centred at the fiber point ``center``."""
    sp = eta.space
    if not helmholtz_check(eta).is_locally_variational:
        raise NotLocallyVariational("source form fails the Helmholtz conditions")
    center = tuple(_as_expr(c) for c in (center if center is not None else [0] * sp.m))
    t = Expr.coord(HOMOTOPY)
    mapping = {}
    for ea in eta.components:
        for c in _field_coords(ea):
            if c.order == 0:
                mapping[c] = center[c.index] + t * (Expr.coord(c) - center[c.index])
            else:
                mapping[c] = t * Expr.coord(c)
    integrand = expr_sum(
        (sp.y(a) - center[a]) * ea.substitute(mapping) for a, ea in enumerate(eta.components)
    )
    lag = Lagrangian(integrand.integrate_homotopy(), sp)
    if euler_lagrange(lag) != eta:
        raise JetVarError("homotopy Lagrangian does not reproduce the source form")
    return lag


# ------------------------------------------------------------------ momenta
def _second_order_momentum(L: Expr, a: int, mu: int, nu: int) -> Expr:
    c = field_coord(a, (mu, nu))
    d = L.partial(c)
    return d if mu == nu else d / 2


def momenta(lag: Lagrangian) -> Form:
    """Canonical momentum form p, normalized so that d_V(lambda) = eta_lambda - d_H(p).

    Order 1: p = dL/dy^a_mu theta^a ^ omega_mu.  Order 2 adds the symmetrized
    second-order terms P^{mu nu} theta^a_nu ^ omega_mu and corrects the first
    coefficient by -D_nu P^{mu nu}.
    """
    sp = lag.space
    L = lag.expr
    order = L.jet_order()
    if order >= 3:
        raise OrderTooHigh("momenta are only defined for Lagrangians of order <= 2")
    out = Form.zero(sp, sp.n)
    for a in range(sp.m):
        for mu in range(sp.n):
            hook = Form.volume_hook(sp, mu)
            first = L.partial(field_coord(a, (mu,)))
            if order == 2:
                for nu in range(sp.n):
                    p2 = _second_order_momentum(L, a, mu, nu)
                    if p2.is_zero:
                        continue
                    first = first - sp.D(p2, nu)
                    out = out + p2 * wedge(Form.theta(sp, a, (nu,)), hook)
            out = out + first * wedge(Form.theta(sp, a), hook)
    return out


def first_variation_defect(lag: Lagrangian) -> Form:
    """d_V(lambda) - eta_lambda + d_H(p); identically zero for order <= 2."""
    from .jetforms import d_V

    return d_V(lag.to_form()) - euler_lagrange(lag).to_form() + d_H(momenta(lag))


# --------------------------------------------------------- d_H exactness
@dataclass(frozen=True)
class AnsatzSpec:
    """Bounds of the polynomial-times-kernel ansatz used by :func:`solve_dH_exact`."""

    max_poly_degree: int = 4
    max_jet_order: int = 2
    include_kernels_from_target: bool = True
    angle_fields: frozenset = field(default_factory=frozenset)

    def with_angles(self, angles: Iterable[int]) -> "AnsatzSpec":
        return AnsatzSpec(
            self.max_poly_degree,
            self.max_jet_order,
            self.include_kernels_from_target,
            frozenset(self.angle_fields) | frozenset(angles),
        )


def _split_parameters(e: Expr) -> dict:
    """{parameter monomial: parameter-free part}; parameters inside kernels stay."""
    parts: dict = {}
    for mono, coef in e.terms():
        pmono = tuple((a, p) for a, p in mono if isinstance(a, Coord) and a.kind == "p")
        rest = tuple((a, p) for a, p in mono if not (isinstance(a, Coord) and a.kind == "p"))
        parts.setdefault(pmono, {})[rest] = coef
    return {pm: Expr(d) for pm, d in parts.items()}


def _kernel_part(mono: tuple) -> tuple:
    return tuple((a, p) for a, p in mono if isinstance(a, Kernel))


def _poly_part(mono: tuple) -> tuple:
    return tuple((a, p) for a, p in mono if not isinstance(a, Kernel))


def _kernel_candidates(target: Expr) -> list:
    """Kernel products that may occur in a potential of ``target``."""
    parts = {_kernel_part(m) for m, _ in target.terms()}
    grown = set(parts)
    for part in parts:
        atoms = [a for a, _ in part]
        base = Expr({part: 1})
        variants = [base]
        for atom in atoms:
            if atom.func in ("sin", "cos"):
                other = Kernel("cos" if atom.func == "sin" else "sin", atom.arg)
                without = Expr({_drop_one(part, atom): 1})
                variants.append(without)
                variants.append(without * Expr({((other, 1),): 1}))
                variants.append(base * Expr({((other, 1),): 1}))
                variants.append(base * Expr({((atom, 1),): 1}))
            else:
                variants.append(Expr({_drop_one(part, atom): 1}))
        for v in variants:
            grown |= {_kernel_part(m) for m, _ in v.terms()}
    grown.add(())
    return sorted(grown, key=lambda p: Expr({p: 1}).key)


def _drop_one(part: tuple, atom) -> tuple:
    out = []
    for a, p in part:
        if a == atom:
            if p > 1:
                out.append((a, p - 1))
        else:
            out.append((a, p))
    return tuple(out)


def _poly_degree(mono: tuple) -> int:
    return sum(p for a, p in mono if isinstance(a, Coord) and a.kind in ("x", "y"))


def _monomials(variables: list, degree: int, linear_only: set) -> list:
    """All monomials (as Expr) in ``variables`` of total degree <= degree."""
    out = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(variables, d):
            counts: dict = {}
            for v in combo:
                counts[v] = counts.get(v, 0) + 1
            if any(counts[v] > 1 for v in counts if v in linear_only):
                continue
            e = ONE
            for v, k in counts.items():
                e = e * Expr.coord(v) ** k
            out.append(e)
    return out


def _rational_solve(columns: list, target: Expr):
    """Particular solution of sum_k x_k columns[k] = target, or None."""
    rows: dict = {}
    for k, col in enumerate(columns):
        for mono, coef in col.terms():
            rows.setdefault(mono, {})[k] = coef
    ncols = len(columns)
    for mono, coef in target.terms():
        rows.setdefault(mono, {})[ncols] = coef
    if not rows:
        return [0] * ncols
    sdm = {
        i: {k: QQ(c.numerator, c.denominator) for k, c in row.items()}
        for i, row in enumerate(rows.values())
    }
    mat = DomainMatrix.from_rep(SDM(sdm, (len(rows), ncols + 1), QQ))
    rref, pivots = mat.rref()
    if ncols in pivots:
        return None
    rep = rref.rep.to_sdm()
    solution = [QQ(0)] * ncols
    for i, p in enumerate(pivots):
        solution[p] = rep.get(i, {}).get(ncols, QQ(0))
    return [_to_fraction(q) for q in solution]


def _to_fraction(q):
    return Fraction(int(q.numerator), int(q.denominator))


def _solve_parameter_free(target: Expr, sp: JetSpace, ansatz: AnsatzSpec) -> Current | None:
    order = min(ansatz.max_jet_order, max(target.jet_order() - 1, 0))
    degree = max((_poly_degree(_poly_part(m)) for m, _ in target.terms()), default=0) + 1
    degree = min(degree, ansatz.max_poly_degree)
    base_vars = [base_coord(mu) for mu in range(sp.n)]
    x_deg = {
        mu: max((p for m, _ in target.terms() for a, p in m if a == base_coord(mu)), default=0)
        for mu in range(sp.n)
    }
    field_vars = [
        field_coord(a, multi) for a in range(sp.m) for multi in sp.multi_indices(order)
    ]
    angles = {field_coord(a) for a in ansatz.angle_fields}
    variables = base_vars + field_vars
    kernels = _kernel_candidates(target) if ansatz.include_kernels_from_target else [()]
    polys = [
        e
        for e in _monomials(variables, degree, angles)
        if all(_x_power(e, mu) <= x_deg[mu] + 1 for mu in range(sp.n))
    ]
    basis = []
    for kp in kernels:
        kexpr = Expr({kp: 1})
        for poly in polys:
            b = kexpr * poly
            if not b.is_zero:
                basis.append(b)
    columns = []
    labels = []
    for mu in range(sp.n):
        for b in basis:
            db = sp.D(b, mu)
            if db.is_zero:
                continue
            columns.append(db)
            labels.append((mu, b))
    sol = _rational_solve(columns, target)
    if sol is None:
        return None
    comps = [[] for _ in range(sp.n)]
    for (mu, b), c in zip(labels, sol):
        if c:
            comps[mu].append(b * c)
    return Current(tuple(expr_sum(c) for c in comps), sp)


def _x_power(e: Expr, mu: int) -> int:
    (mono, _), = e.terms()
    return sum(p for a, p in mono if a == base_coord(mu))


def _target_expr(mu, space: JetSpace | None):
    if isinstance(mu, Lagrangian):
        return mu.expr, mu.space
    if isinstance(mu, Form):
        if mu.degree != mu.space.n or mu.contact_degrees()[1] != 0:
            raise DimensionMismatch("solve_dH_exact needs a horizontal n-form")
        return mu.scalar(), mu.space
    if space is None:
        raise ValueError("a bare expression target needs its JetSpace")
    return _as_expr(mu), space


def solve_dH_exact(mu, ansatz: AnsatzSpec | None = None, space: JetSpace | None = None) -> Current:
    """Find a current nu with d_H nu = mu by linear algebra over an ansatz.

    Raises :class:`NotClosed` when the Euler-Lagrange image of ``mu`` is
    nonzero and :class:`NoSolution` when the ansatz space is exhausted.
    """
    ansatz = ansatz or AnsatzSpec()
    target, sp = _target_expr(mu, space)
    if target.is_zero:
        return Current.zero(sp)
    if not euler_lagrange(Lagrangian(target, sp)).is_zero:
        raise NotClosed(f"{sp.fmt(target)} is not variationally trivial")
    total = Current.zero(sp)
    for pmono, part in _split_parameters(target).items():
        piece = _solve_parameter_free(part, sp, ansatz)
        if piece is None:
            raise NoSolution(f"no potential for {sp.fmt(part)} within {ansatz}")
        total = total + piece.scale(Expr({pmono: 1}))
    if total.divergence() != target:
        raise JetVarError("internal error: potential does not reproduce the target")
    return total


__all__ = [
    "Lagrangian",
    "SourceForm",
    "Current",
    "HelmholtzResult",
    "AnsatzSpec",
    "euler_lagrange",
    "linearization",
    "adjoint_linearization",
    "helmholtz_check",
    "tonti_lagrangian",
    "momenta",
    "first_variation_defect",
    "solve_dH_exact",
]
