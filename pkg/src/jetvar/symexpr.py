"""Exact symbolic expressions over jet coordinates.

An :class:`Expr` is a finite sum of monomials with :class:`~fractions.Fraction`
coefficients.  A monomial is a product of powers of atoms, where an atom is a
jet coordinate (:class:`Coord`) or a kernel factor ``sin(u)``, ``cos(u)`` or
``exp(u)`` whose argument ``u`` is itself kernel free.

The representation is kept in a canonical form at all times:

* ``cos(u)`` never appears with exponent above one (``cos(u)**2`` is rewritten
  as ``1 - sin(u)**2``);
* arguments of ``sin``/``cos`` are single monomials with a positive coefficient
  (sums are split by the angle-addition formulas, half-integer multiples of
  ``pi`` are evaluated, the sign is pulled out);
* all ``exp`` factors of a monomial are merged into a single ``exp``.

Two expressions are equal exactly when their canonical term dictionaries are
equal, which is what every zero test in the package relies on.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Mapping

from .errors import (
    KernelDepthExceeded,
    MaxOrderExceeded,
    NonIntegrableKernel,
    NonPolynomialDivision,
)

DEFAULT_MAX_ORDER = 4

_KIND_RANK = {"p": 0, "x": 1, "y": 2, "v": 3, "h": 4}
_FUNC_RANK = {"sin": 0, "cos": 1, "exp": 2}


@dataclass(frozen=True)
class Coord:
    """A coordinate symbol.

    ``kind`` is one of ``"x"`` (base coordinate, ``index`` = direction),
    ``"y"`` (field coordinate y^a_I, ``index`` = a, ``multi`` = I),
    ``"v"`` (formal test field v^a_I used by the Helmholtz check),
    ``"p"`` (named constant parameter) or ``"h"`` (homotopy parameter).
    """

    kind: str
    index: int = 0
    multi: tuple = ()
    name: str = ""
    key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown coordinate kind {self.kind!r}")
        multi = tuple(sorted(self.multi))
        object.__setattr__(self, "multi", multi)
        object.__setattr__(
            self, "key", (_KIND_RANK[self.kind], self.name, self.index, len(multi), multi, ())
        )

    @property
    def order(self) -> int:
        return len(self.multi)

    def raised(self, mu: int) -> "Coord":
        return replace(self, multi=self.multi + (mu,))

    def lowered(self, mu: int) -> "Coord | None":
        if mu not in self.multi:
            return None
        multi = list(self.multi)
        multi.remove(mu)
        return replace(self, multi=tuple(multi))

    def __repr__(self):
        return default_name(self)


def base_coord(mu: int) -> Coord:
    return Coord("x", mu)


def field_coord(a: int, multi: Iterable[int] = ()) -> Coord:
    return Coord("y", a, tuple(multi))


def variation_coord(a: int, multi: Iterable[int] = ()) -> Coord:
    return Coord("v", a, tuple(multi))


def param(name: str) -> Coord:
    return Coord("p", name=name)


HOMOTOPY = Coord("h")
PI = param("pi")


@dataclass(frozen=True)
class Kernel:
    """Elementary function factor ``func(arg)``; ``arg`` is kernel free."""

    func: str
    arg: "Expr"
    key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (10 + _FUNC_RANK[self.func], "", 0, 0, (), self.arg.key))

    def __repr__(self):
        return f"{self.func}({self.arg})"


@lru_cache(maxsize=None)
def _mono_key(mono: tuple) -> tuple:
    return tuple((atom.key, p) for atom, p in mono)


def _sorted_mono(factors: Mapping) -> tuple:
    return tuple(sorted(((a, p) for a, p in factors.items() if p), key=lambda ap: ap[0].key))


ONE_F = Fraction(1)


class Expr:
    """Immutable canonical sum of monomials with exact rational coefficients."""

    __slots__ = ("_terms", "_key", "_hash", "_coords")

    def __init__(self, terms: Mapping | None = None):
        # callers pass canonical monomials; zero coefficients are dropped here
        self._terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}
        self._key = None
        self._hash = None
        self._coords = None

    # ------------------------------------------------------------------ basics
    @staticmethod
    def const(value) -> "Expr":
        value = Fraction(value)
        return Expr({(): value}) if value else ZERO

    @staticmethod
    def coord(c: Coord) -> "Expr":
        return Expr({((c, 1),): ONE_F})

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(((_mono_key(m), c) for m, c in self._terms.items())))
        return self._key

    def terms(self) -> list:
        """Canonically ordered ``(monomial, coefficient)`` pairs."""
        return sorted(self._terms.items(), key=lambda mc: _mono_key(mc[0]))

    def __len__(self):
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a rational constant")
        return self._terms.get((), Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        _accumulate(acc, other._terms)
        return _from_acc(acc)

    __radd__ = __add__

    def __neg__(self):
        return Expr({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._terms or not other._terms:
            return ZERO
        acc: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                c12 = c1 * c2
                for m, c in _mul_mono(m1, m2):
                    acc[m] = acc.get(m, 0) + c12 * c
        return _from_acc(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.is_constant or other.is_zero:
            raise NonPolynomialDivision(f"cannot divide by {other}")
        inv = 1 / other.constant_value()
        return Expr({m: c * inv for m, c in self._terms.items()})

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise NonPolynomialDivision("only non-negative integer powers are supported")
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # ------------------------------------------------------------ structure
    def free_coords(self) -> frozenset:
        """All coordinates occurring anywhere, kernel arguments included."""
        if self._coords is None:
            found = set()
            for mono in self._terms:
                for atom, _ in mono:
                    if isinstance(atom, Coord):
                        found.add(atom)
                    else:
                        found |= atom.arg.free_coords()
            self._coords = frozenset(found)
        return self._coords

    def has_kernels(self) -> bool:
        return any(isinstance(a, Kernel) for m in self._terms for a, _ in m)

    def kernels(self) -> set:
        return {a for m in self._terms for a, _ in m if isinstance(a, Kernel)}

    def jet_order(self) -> int:
        return max((c.order for c in self.free_coords() if c.kind == "y"), default=0)

    def depends_on(self, pred: Callable[[Coord], bool]) -> bool:
        return any(pred(c) for c in self.free_coords())

    # ------------------------------------------------------------ calculus
    def partial(self, c: Coord) -> "Expr":
        """Formal partial derivative; all coordinates are independent."""
        if c not in self.free_coords():
            return ZERO
        acc: dict = {}
        for mono, coef in self._terms.items():
            for i, (atom, p) in enumerate(mono):
                rest = mono[:i] + (((atom, p - 1),) if p > 1 else ()) + mono[i + 1 :]
                if isinstance(atom, Coord):
                    if atom == c:
                        acc[rest] = acc.get(rest, 0) + coef * p
                    continue
                darg = atom.arg.partial(c)
                if darg.is_zero:
                    continue
                if atom.func == "sin":
                    dk = cos(atom.arg)
                elif atom.func == "cos":
                    dk = -sin(atom.arg)
                else:
                    dk = exp(atom.arg)
                term = Expr({rest: coef * p}) * dk * darg
                _accumulate(acc, term._terms)
        return _from_acc(acc)

    def total_derivative(self, mu: int, max_order: int = DEFAULT_MAX_ORDER) -> "Expr":
        """D_mu = d/dx^mu + sum y^a_{I+mu} d/dy^a_I (test fields included)."""
        result = self.partial(base_coord(mu))
        for c in sorted(self.free_coords(), key=lambda c: c.key):
            if c.kind not in ("y", "v"):
                continue
            up = c.raised(mu)
            if up.order > max_order:
                raise MaxOrderExceeded(
                    f"D_{mu} of {default_name(c)} needs jet order {up.order} > cap {max_order}"
                )
            result = result + self.partial(c) * Expr.coord(up)
        return result

    def substitute(self, mapping: Mapping) -> "Expr":
        """Simultaneous substitution of coordinates; unmapped ones are kept."""
        if not mapping:
            return self
        mapping = {k: _coerce_strict(v) for k, v in mapping.items()}
        if not (self.free_coords() & mapping.keys()):
            return self
        cache: dict = {}

        def value(atom):
            if atom not in cache:
                if isinstance(atom, Coord):
                    cache[atom] = mapping[atom] if atom in mapping else Expr.coord(atom)
                else:
                    cache[atom] = _KERNEL_FUNCS[atom.func](atom.arg.substitute(mapping))
            return cache[atom]

        acc: dict = {}
        for mono, coef in self._terms.items():
            prod = Expr.const(coef)
            for atom, p in mono:
                prod = prod * value(atom) ** p
                if prod.is_zero:
                    break
            _accumulate(acc, prod._terms)
        return _from_acc(acc)

    def integrate_homotopy(self) -> "Expr":
        """Exact integral over the homotopy parameter from 0 to 1."""
        acc: dict = {}
        for mono, coef in self._terms.items():
            k = 0
            rest = []
            for atom, p in mono:
                if atom == HOMOTOPY:
                    k = p
                elif isinstance(atom, Kernel) and HOMOTOPY in atom.arg.free_coords():
                    raise NonIntegrableKernel(
                        f"no antiderivative in the expression class for {atom!r}"
                    )
                else:
                    rest.append((atom, p))
            rest = tuple(rest)
            acc[rest] = acc.get(rest, 0) + coef / (k + 1)
        return _from_acc(acc)

    def evaluate(self, values: Mapping) -> float:
        """Floating-point value; ``pi`` defaults to math.pi."""
        total = 0.0
        for mono, coef in self._terms.items():
            term = float(coef)
            for atom, p in mono:
                if isinstance(atom, Coord):
                    if atom in values:
                        v = float(values[atom])
                    elif atom == PI:
                        v = math.pi
                    else:
                        raise KeyError(f"no value for coordinate {atom!r}")
                else:
                    v = _FLOAT_FUNCS[atom.func](atom.arg.evaluate(values))
                term *= v**p
            total += term
        return total

    # ---------------------------------------------------------------- output
    def to_str(self, namer: Callable[[Coord], str] | None = None) -> str:
        namer = namer or default_name
        if not self._terms:
            return "0"
        pieces = []
        for mono, coef in self.terms():
            factors = []
            for atom, p in mono:
                if isinstance(atom, Coord):
                    s = namer(atom)
                else:
                    s = f"{atom.func}({atom.arg.to_str(namer)})"
                factors.append(s if p == 1 else f"{s}^{p}")
            mag = abs(coef)
            if not factors:
                body = _frac_str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _frac_str(mag) + "*" + "*".join(factors)
            pieces.append(("-" if coef < 0 else "+", body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Expr({self.to_str()!r})"


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def default_name(c: Coord) -> str:
    if c.kind == "x":
        return f"x{c.index}"
    if c.kind == "p":
        return c.name
    if c.kind == "h":
        return "_h"
    stem = f"u{c.index}" if c.kind == "y" else f"v{c.index}"
    if not c.multi:
        return stem
    return stem + "_" + "".join(f"x{i}" for i in c.multi)


def _accumulate(acc: dict, terms: Mapping, scale=1) -> None:
    for m, c in terms.items():
        acc[m] = acc.get(m, 0) + c * scale


def _from_acc(acc: dict) -> Expr:
    out = Expr.__new__(Expr)
    out._terms = {m: c for m, c in acc.items() if c}
    out._key = None
    out._hash = None
    out._coords = None
    return out


def _coerce(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Expr.const(v)
    return NotImplemented


def _coerce_strict(v) -> Expr:
    out = _coerce(v)
    if out is NotImplemented:
        if isinstance(v, Coord):
            return Expr.coord(v)
        raise TypeError(f"cannot use {v!r} as an expression")
    return out


ZERO = Expr()
ONE = Expr.const(1)


# ------------------------------------------------------------- canonical rules
@lru_cache(maxsize=1 << 18)
def _mul_mono(m1: tuple, m2: tuple) -> tuple:
    factors = dict(m1)
    for a, p in m2:
        factors[a] = factors.get(a, 0) + p
    return _canon(factors)


def _canon(factors: dict) -> tuple:
    exp_arg = None
    others = {}
    for atom, p in factors.items():
        if isinstance(atom, Kernel) and atom.func == "exp":
            exp_arg = atom.arg * p if exp_arg is None else exp_arg + atom.arg * p
        else:
            others[atom] = p
    if exp_arg is not None and not exp_arg.is_zero:
        others[Kernel("exp", exp_arg)] = 1
    high = [(a, p) for a, p in others.items() if isinstance(a, Kernel) and a.func == "cos" and p >= 2]
    if not high:
        return ((_sorted_mono(others), ONE_F),)
    for a, p in high:
        if p % 2:
            others[a] = 1
        else:
            del others[a]
    partial_products = [(others, ONE_F)]
    for a, p in high:
        q = p // 2
        s = Kernel("sin", a.arg)
        expanded = []
        for fac, c in partial_products:
            for k in range(q + 1):
                f2 = dict(fac)
                if k:
                    f2[s] = f2.get(s, 0) + 2 * k
                expanded.append((f2, c * comb(q, k) * (-1) ** k))
        partial_products = expanded
    acc: dict = {}
    for fac, c in partial_products:
        m = _sorted_mono(fac)
        acc[m] = acc.get(m, 0) + c
    return tuple((m, c) for m, c in acc.items() if c)


def _check_depth(arg: Expr) -> None:
    if arg.has_kernels():
        raise KernelDepthExceeded(f"kernel argument {arg} contains a kernel factor")


def _atom(func: str, arg: Expr) -> Expr:
    return Expr({((Kernel(func, arg), 1),): ONE_F})


_HALF_PI_TABLE = {0: (0, 1), 1: (1, 0), 2: (0, -1), 3: (-1, 0)}


def _trig_single(mono: tuple, coef: Fraction) -> tuple:
    """(sin, cos) of the single-term angle coef*mono."""
    if mono == ((PI, 1),):
        if (2 * coef).denominator == 1:
            s, c = _HALF_PI_TABLE[int(2 * coef) % 4]
            return Expr.const(s), Expr.const(c)
        coef = coef - 2 * math.floor(coef / 2)
        if coef > 1:
            s, c = _trig_single(mono, coef - 1)
            return -s, -c
    sign = 1 if coef > 0 else -1
    angle = Expr({mono: abs(coef)})
    return sign * _atom("sin", angle), _atom("cos", angle)


def _trig_pair(arg) -> tuple:
    arg = _coerce_strict(arg)
    _check_depth(arg)
    s, c = ZERO, ONE
    for mono, coef in arg.terms():
        st, ct = _trig_single(mono, coef)
        s, c = s * ct + c * st, c * ct - s * st
    return s, c


def sin(arg) -> Expr:
    return _trig_pair(arg)[0]


def cos(arg) -> Expr:
    return _trig_pair(arg)[1]


def exp(arg) -> Expr:
    arg = _coerce_strict(arg)
    _check_depth(arg)
    if arg.is_zero:
        return ONE
    return _atom("exp", arg)


_KERNEL_FUNCS = {"sin": sin, "cos": cos, "exp": exp}
_FLOAT_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}


def normalize(e: Expr) -> Expr:
    """Return the canonical form of ``e``.

    Expressions are canonical by construction, so this rebuilds ``e`` from its
    atoms (re-applying every rewrite) and is idempotent.
    """
    acc: dict = {}
    for mono, coef in e.terms():
        prod = Expr.const(coef)
        for atom, p in mono:
            if isinstance(atom, Coord):
                prod = prod * Expr.coord(atom) ** p
            else:
                prod = prod * _KERNEL_FUNCS[atom.func](normalize(atom.arg)) ** p
        _accumulate(acc, prod._terms)
    return _from_acc(acc)


def partial(e: Expr, c: Coord) -> Expr:
    return e.partial(c)


def total_derivative(e: Expr, mu: int, max_order: int = DEFAULT_MAX_ORDER) -> Expr:
    return e.total_derivative(mu, max_order)


def total_derivative_multi(e: Expr, multi: Iterable[int], max_order: int = DEFAULT_MAX_ORDER) -> Expr:
    for mu in multi:
        e = e.total_derivative(mu, max_order)
    return e


def substitute(e: Expr, mapping: Mapping) -> Expr:
    return e.substitute(mapping)


def integrate_homotopy(e: Expr) -> Expr:
    return e.integrate_homotopy()


def expr_sum(items: Iterable[Expr]) -> Expr:
    acc: dict = {}
    for e in items:
        _accumulate(acc, _coerce_strict(e)._terms)
    return _from_acc(acc)


# --------------------------------------------------------------- jet spaces
@dataclass(frozen=True)
class JetSpace:
    """Dimensions, naming and jet-order cap of a fibered chart R^n x R^m.

    ``base_names``/``field_names`` only affect printing and parsing; the
    canonical base names ``x0..x{n-1}`` are always accepted as aliases.
    """

    n: int
    m: int
    max_order: int = DEFAULT_MAX_ORDER
    base_names: tuple = ()
    field_names: tuple = ()
    params: tuple = ()

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if not self.base_names:
            object.__setattr__(self, "base_names", tuple(f"x{i}" for i in range(self.n)))
        if not self.field_names:
            names = ("u",) if self.m == 1 else tuple(f"u{a}" for a in range(self.m))
            object.__setattr__(self, "field_names", names)
        if len(self.base_names) != self.n or len(self.field_names) != self.m:
            raise ValueError("name tuples must match (n, m)")

    def with_order(self, max_order: int) -> "JetSpace":
        return replace(self, max_order=max_order)

    # coordinates
    def x(self, mu: int) -> Expr:
        return Expr.coord(base_coord(mu))

    def y(self, a: int, *multi: int) -> Expr:
        return Expr.coord(field_coord(a, multi))

    def p(self, name: str) -> Expr:
        return Expr.coord(param(name))

    def multi_indices(self, max_len: int, min_len: int = 0) -> list:
        out = []
        for k in range(min_len, max_len + 1):
            out.extend(itertools.combinations_with_replacement(range(self.n), k))
        return out

    def D(self, e: Expr, mu: int) -> Expr:
        return e.total_derivative(mu, self.max_order)

    def D_multi(self, e: Expr, multi: Iterable[int]) -> Expr:
        return total_derivative_multi(e, multi, self.max_order)

    # naming
    def name(self, c: Coord) -> str:
        if c.kind == "x":
            return self.base_names[c.index]
        if c.kind == "y":
            stem = self.field_names[c.index]
        elif c.kind == "v":
            stem = "v_" + self.field_names[c.index]
            return stem + ("" if not c.multi else "_" + "".join(self.base_names[i] for i in c.multi))
        else:
            return default_name(c)
        if not c.multi:
            return stem
        return stem + "_" + "".join(self.base_names[i] for i in c.multi)

    def fmt(self, e: Expr) -> str:
        return e.to_str(self.name)

    def base_lookup(self) -> dict:
        table = {f"x{i}": i for i in range(self.n)}
        table.update({name: i for i, name in enumerate(self.base_names)})
        return table

    def parse_coordinate(self, token: str) -> Coord | None:
        """Coordinate for a bare identifier such as ``u_tt`` or ``x1``."""
        bases = self.base_lookup()
        if token in bases:
            return base_coord(bases[token])
        stem, _, suffix = token.partition("_")
        if stem not in self.field_names:
            return None
        a = self.field_names.index(stem)
        multi = []
        names = sorted(bases, key=len, reverse=True)
        rest = suffix
        while rest:
            for nm in names:
                if rest.startswith(nm):
                    multi.append(bases[nm])
                    rest = rest[len(nm) :]
                    break
            else:
                return None
        if "_" in token and not multi:
            return None
        return field_coord(a, multi)
