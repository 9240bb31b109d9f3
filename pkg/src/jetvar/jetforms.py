"""Exterior forms on jet spaces in the contact basis (dx^mu, theta^a_I).

Conventions (fixed once, checked by the d_H**2 == 0 tests):

* theta^a_I = dy^a_I - y^a_{I+mu} dx^mu;
* d_H theta^a_I = dx^mu ^ theta^a_{I+mu} and d_V theta^a_I = 0;
* inside a wedge term every dx precedes every theta; dx sorted by mu,
  thetas sorted by (a, |I|, I).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DegreeZero, DimensionMismatch, MaxOrderExceeded
from .symexpr import (
    ONE,
    ZERO,
    Coord,
    Expr,
    JetSpace,
    expr_sum,
    field_coord,
)


@dataclass(frozen=True)
class Covector:
    """Basis 1-form: ``Covector("dx", mu)`` or ``Covector("theta", a, I)``."""

    kind: str
    index: int
    multi: tuple = ()
    key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        multi = tuple(sorted(self.multi))
        object.__setattr__(self, "multi", multi)
        rank = 0 if self.kind == "dx" else 1
        object.__setattr__(self, "key", (rank, self.index, len(multi), multi))

    @property
    def is_contact(self) -> bool:
        return self.kind == "theta"

    def label(self) -> str:
        if self.kind == "dx":
            return f"dx{self.index}"
        return f"theta[{self.index};{','.join(map(str, self.multi))}]"


def _sort_with_sign(factors: tuple):
    """Sort a wedge word; returns (sign, sorted tuple) or (0, None) on repeats."""
    if len(set(factors)) != len(factors):
        return 0, None
    items = list(factors)
    sign = 1
    # insertion sort counting transpositions; words are short
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1].key > items[j].key:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


class Form:
    """Homogeneous p-form with Expr coefficients over a :class:`JetSpace`."""

    __slots__ = ("space", "degree", "_terms")

    def __init__(self, space: JetSpace, degree: int, terms: Mapping | None = None):
        self.space = space
        self.degree = degree
        clean = {}
        for word, coef in (terms or {}).items():
            if len(word) != degree:
                raise DimensionMismatch(f"term {word} does not have degree {degree}")
            if not coef.is_zero:
                clean[word] = coef
        self._terms = clean

    # ----------------------------------------------------------- constructors
    @staticmethod
    def function(space: JetSpace, f) -> "Form":
        return Form(space, 0, {(): _as_expr(f)})

    @staticmethod
    def dx(space: JetSpace, mu: int) -> "Form":
        return Form(space, 1, {(Covector("dx", mu),): ONE})

    @staticmethod
    def theta(space: JetSpace, a: int, multi: Iterable[int] = ()) -> "Form":
        return Form(space, 1, {(Covector("theta", a, tuple(multi)),): ONE})

    @staticmethod
    def dy(space: JetSpace, a: int, multi: Iterable[int] = ()) -> "Form":
        """dy^a_I written in the contact basis."""
        multi = tuple(multi)
        out = Form.theta(space, a, multi)
        for mu in range(space.n):
            c = field_coord(a, multi).raised(mu)
            out = out + Expr.coord(c) * Form.dx(space, mu)
        return out

    @staticmethod
    def volume(space: JetSpace) -> "Form":
        return Form(space, space.n, {tuple(Covector("dx", mu) for mu in range(space.n)): ONE})

    @staticmethod
    def volume_hook(space: JetSpace, mu: int) -> "Form":
        """omega_mu = d/dx^mu contracted into the volume form."""
        word = tuple(Covector("dx", nu) for nu in range(space.n) if nu != mu)
        return Form(space, space.n - 1, {word: Expr.const((-1) ** mu)})

    @staticmethod
    def zero(space: JetSpace, degree: int) -> "Form":
        return Form(space, degree)

    # ----------------------------------------------------------------- access
    def terms(self) -> list:
        return sorted(self._terms.items(), key=lambda wc: tuple(c.key for c in wc[0]))

    def coefficient(self, word: Iterable[Covector]) -> Expr:
        return self._terms.get(tuple(word), ZERO)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def contact_degrees(self) -> tuple:
        """(min, max) number of theta factors over the terms; (0, 0) if zero."""
        if not self._terms:
            return 0, 0
        degs = [sum(c.is_contact for c in w) for w in self._terms]
        return min(degs), max(degs)

    def jet_order(self) -> int:
        orders = [0]
        for w, c in self._terms.items():
            orders.append(c.jet_order())
            orders.extend(len(cv.multi) for cv in w if cv.is_contact)
        return max(orders)

    def scalar(self) -> Expr:
        """Coefficient of a 0-form, or of dx0^...^dx{n-1} for a horizontal n-form."""
        if self.degree == 0:
            return self._terms.get((), ZERO)
        if self.degree == self.space.n and self.contact_degrees()[1] == 0:
            return self.coefficient(tuple(Covector("dx", mu) for mu in range(self.space.n)))
        raise DimensionMismatch("form has no single scalar coefficient")

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None

    # ------------------------------------------------------------- arithmetic
    def _check(self, other: "Form"):
        if (other.space.n, other.space.m) != (self.space.n, self.space.m):
            raise DimensionMismatch("forms live on different jet spaces")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        if other.degree != self.degree:
            if self.is_zero:
                return other
            if other.is_zero:
                return self
            raise DimensionMismatch(f"cannot add degree {self.degree} and {other.degree}")
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms.get(w, ZERO) + c
        return Form(self.space, self.degree, terms)

    def __neg__(self) -> "Form":
        return Form(self.space, self.degree, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __rmul__(self, scalar) -> "Form":
        s = _as_expr(scalar)
        return Form(self.space, self.degree, {w: s * c for w, c in self._terms.items()})

    __mul__ = __rmul__

    def map_coefficients(self, fn) -> "Form":
        return Form(self.space, self.degree, {w: fn(c) for w, c in self._terms.items()})

    def substitute(self, mapping: Mapping) -> "Form":
        return self.map_coefficients(lambda c: c.substitute(mapping))

    def wedge(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def to_str(self) -> str:
        """Deterministic text: ``(coef) * dx0^theta[a;I] + ...``."""
        if not self._terms:
            return "0"
        parts = []
        for w, c in self.terms():
            coef = f"({self.space.fmt(c)})"
            parts.append(coef if not w else coef + " * " + "^".join(cv.label() for cv in w))
        return " + ".join(parts)

    __str__ = to_str

    def __repr__(self):
        return f"Form[{self.degree}]({self.to_str()})"


def _as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, Coord):
        return Expr.coord(v)
    return Expr.const(v)


def wedge(alpha: Form, beta: Form) -> Form:
    alpha._check(beta)
    terms: dict = {}
    for wa, ca in alpha._terms.items():
        for wb, cb in beta._terms.items():
            sign, word = _sort_with_sign(wa + wb)
            if not sign:
                continue
            c = ca * cb
            terms[word] = terms.get(word, ZERO) + (c if sign > 0 else -c)
    return Form(alpha.space, alpha.degree + beta.degree, terms)


def _word_form(space: JetSpace, word: tuple) -> Form:
    return Form(space, len(word), {word: ONE})


def _d_h_covector(space: JetSpace, cv: Covector) -> Form:
    if cv.kind == "dx":
        return Form.zero(space, 2)
    if len(cv.multi) + 1 > space.max_order:
        raise MaxOrderExceeded(f"d_H of {cv.label()} exceeds jet order cap {space.max_order}")
    out = Form.zero(space, 2)
    for mu in range(space.n):
        out = out + wedge(Form.dx(space, mu), Form.theta(space, cv.index, cv.multi + (mu,)))
    return out


def d_H(alpha: Form) -> Form:
    """Horizontal differential."""
    space = alpha.space
    out = Form.zero(space, alpha.degree + 1)
    for word, coef in alpha._terms.items():
        w_form = _word_form(space, word)
        for mu in range(space.n):
            dc = space.D(coef, mu)
            if not dc.is_zero:
                out = out + dc * wedge(Form.dx(space, mu), w_form)
        for j, cv in enumerate(word):
            dcv = _d_h_covector(space, cv)
            if dcv.is_zero:
                continue
            piece = wedge(wedge(_word_form(space, word[:j]), dcv), _word_form(space, word[j + 1 :]))
            out = out + ((-1) ** j) * coef * piece
    return out


def vertical_differential(f: Expr, space: JetSpace) -> Form:
    """d_V of a function: sum over field coordinates of df/dy^a_I theta^a_I."""
    out = Form.zero(space, 1)
    for c in sorted(f.free_coords(), key=lambda c: c.key):
        if c.kind != "y":
            continue
        out = out + f.partial(c) * Form.theta(space, c.index, c.multi)
    return out


def d_V(alpha: Form) -> Form:
    """Vertical differential."""
    space = alpha.space
    out = Form.zero(space, alpha.degree + 1)
    for word, coef in alpha._terms.items():
        out = out + wedge(vertical_differential(coef, space), _word_form(space, word))
    return out


def d_total(alpha: Form) -> Form:
    return d_H(alpha) + d_V(alpha)


def horizontalize(alpha: Form) -> Form:
    """Projection h: keep the contact-free terms."""
    return Form(
        alpha.space,
        alpha.degree,
        {w: c for w, c in alpha._terms.items() if not any(cv.is_contact for cv in w)},
    )


def contact_part(alpha: Form, k: int) -> Form:
    """Terms with exactly ``k`` theta factors."""
    return Form(
        alpha.space,
        alpha.degree,
        {w: c for w, c in alpha._terms.items() if sum(cv.is_contact for cv in w) == k},
    )


# ------------------------------------------------------------ vector fields
class VectorField:
    """Vector field xi^mu d/dx^mu + X^a d/dy^a on a jet space.

    ``xi`` must depend only on base coordinates and parameters.  ``X`` may
    depend on jet coordinates of any order (generalized field); the field is
    ``projectable`` when ``X`` depends at most on (x, y).
    """

    def __init__(self, space: JetSpace, xi: Iterable = None, components: Iterable = None, name: str = ""):
        self.space = space
        self.name = name
        self.xi = tuple(_as_expr(e) for e in (xi if xi is not None else [0] * space.n))
        self.components = tuple(
            _as_expr(e) for e in (components if components is not None else [0] * space.m)
        )
        if len(self.xi) != space.n or len(self.components) != space.m:
            raise DimensionMismatch("vector field components do not match (n, m)")
        for e in self.xi:
            if e.depends_on(lambda c: c.kind not in ("x", "p")):
                raise ValueError(f"horizontal component {e} must depend on base coordinates only")
        self.projectable = all(
            not e.depends_on(lambda c: c.kind in ("v", "h") or (c.kind == "y" and c.order > 0))
            for e in self.components
        )

    @staticmethod
    def zero(space: JetSpace) -> "VectorField":
        return VectorField(space)

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for e in self.xi + self.components)

    @property
    def is_vertical(self) -> bool:
        return all(e.is_zero for e in self.xi)

    def evolutionary(self) -> tuple:
        """Characteristic X^a - xi^mu y^a_mu."""
        sp = self.space
        return tuple(
            self.components[a] - expr_sum(self.xi[mu] * sp.y(a, mu) for mu in range(sp.n))
            for a in range(sp.m)
        )

    def vertical_pairing(self, a: int, multi: tuple) -> Expr:
        """<theta^a_I, j Xi> = D_I of the characteristic."""
        return self.space.D_multi(self.evolutionary()[a], multi)

    def horizontal_part(self) -> "VectorField":
        return VectorField(self.space, self.xi, [0] * self.space.m, self.name + "_H")

    def substitute(self, mapping: Mapping) -> "VectorField":
        return VectorField(
            self.space,
            [e.substitute(mapping) for e in self.xi],
            [e.substitute(mapping) for e in self.components],
            self.name,
        )

    def __repr__(self):
        sp = self.space
        parts = [f"{sp.base_names[mu]}: {sp.fmt(e)}" for mu, e in enumerate(self.xi) if not e.is_zero]
        parts += [f"{sp.field_names[a]}: {sp.fmt(e)}" for a, e in enumerate(self.components) if not e.is_zero]
        return f"VectorField({', '.join(parts) or '0'})"


def prolong(field_: VectorField, k: int) -> dict:
    """Components X^a_I, |I| <= k, of the k-th jet prolongation."""
    sp = field_.space
    if k > sp.max_order:
        raise MaxOrderExceeded(f"prolongation order {k} exceeds cap {sp.max_order}")
    char = field_.evolutionary()
    out = {}
    for a in range(sp.m):
        for multi in sp.multi_indices(k):
            val = sp.D_multi(char[a], multi)
            for mu in range(sp.n):
                if not field_.xi[mu].is_zero:
                    val = val + field_.xi[mu] * Expr.coord(field_coord(a, multi).raised(mu))
            out[(a, multi)] = val
    return out


def _pairing(field_: VectorField, cv: Covector, part: str) -> Expr:
    if cv.kind == "dx":
        return field_.xi[cv.index] if part in ("full", "H") else ZERO
    return field_.vertical_pairing(cv.index, cv.multi) if part in ("full", "V") else ZERO


def contract(field_: VectorField, alpha: Form, k: int | None = None, part: str = "full") -> Form:
    """Interior product with the prolonged field.

    ``part`` selects the horizontal (``"H"``: pairs only with dx), vertical
    (``"V"``: pairs only with theta) or full contraction.  ``k``, when given,
    bounds the prolongation order that may be used.
    """
    if alpha.degree == 0:
        raise DegreeZero("cannot contract a 0-form")
    if part not in ("full", "H", "V"):
        raise ValueError(f"unknown part {part!r}")
    sp = alpha.space
    terms: dict = {}
    for word, coef in alpha._terms.items():
        for j, cv in enumerate(word):
            if k is not None and len(cv.multi) > k:
                raise MaxOrderExceeded(f"{cv.label()} needs prolongation order > {k}")
            pair = _pairing(field_, cv, part)
            if pair.is_zero:
                continue
            rest = word[:j] + word[j + 1 :]
            val = coef * pair
            terms[rest] = terms.get(rest, ZERO) + (val if j % 2 == 0 else -val)
    return Form(sp, alpha.degree - 1, terms)


def to_dy_basis(alpha: Form) -> dict:
    """Rewrite an order-0 form in the (dx, dy) basis of Y.

    Returns ``{word: coefficient}`` where words are tuples of ``("dx", mu)`` /
    ``("dy", a)`` pairs sorted dx-first.  Raises ValueError if the result still
    depends on derivative coordinates (the form is not a form on Y).
    """
    sp = alpha.space
    out: dict = {}
    for word, coef in alpha._terms.items():
        # expand each theta^a = dy^a - y^a_mu dx^mu
        expansions = [((), coef)]
        for cv in word:
            if cv.kind == "dx":
                options = [(("dx", cv.index), ONE)]
            else:
                if cv.multi:
                    raise ValueError("higher-order contact factor has no dy-basis form on Y")
                options = [(("dy", cv.index), ONE)]
                options += [(("dx", mu), -sp.y(cv.index, mu)) for mu in range(sp.n)]
            expansions = [(w + (sym,), c * extra) for (w, c) in expansions for sym, extra in options]
        for w, c in expansions:
            if len(set(w)) != len(w):
                continue
            order = {("dx", mu): (0, mu) for mu in range(sp.n)}
            order.update({("dy", a): (1, a) for a in range(sp.m)})
            items = list(w)
            sign = 1
            for i in range(1, len(items)):
                j = i
                while j > 0 and order[items[j - 1]] > order[items[j]]:
                    items[j - 1], items[j] = items[j], items[j - 1]
                    sign = -sign
                    j -= 1
            key = tuple(items)
            out[key] = out.get(key, ZERO) + (c if sign > 0 else -c)
    out = {w: c for w, c in out.items() if not c.is_zero}
    for c in out.values():
        if c.jet_order() > 0:
            raise ValueError(f"coefficient {sp.fmt(c)} depends on derivative coordinates")
    return out


def total_d_function(f: Expr, space: JetSpace) -> Form:
    """df for an order-0 function f on Y, in the contact basis."""
    return d_H(Form.function(space, f)) + d_V(Form.function(space, f))


__all__ = [
    "Covector",
    "Form",
    "VectorField",
    "wedge",
    "d_H",
    "d_V",
    "d_total",
    "horizontalize",
    "contact_part",
    "prolong",
    "contract",
    "to_dy_basis",
    "vertical_differential",
    "total_d_function",
]
