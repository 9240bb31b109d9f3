"""Deterministic random corpora of Lagrangians, currents and vector fields."""
from __future__ import annotations

import random
from fractions import Fraction

from jetvar.jetforms import VectorField
from jetvar.symexpr import ONE, ZERO, Expr, JetSpace, base_coord, field_coord
from jetvar.varseq import Current, Lagrangian


def space(n: int, m: int, max_order: int = 8) -> JetSpace:
    return JetSpace(n, m, max_order)


def _coef(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2, 3]))


def random_poly(rng, coords, n_terms=3, max_deg=3) -> Expr:
    out = ZERO
    for _ in range(n_terms):
        term = Expr.const(_coef(rng))
        for _ in range(rng.randint(1, max_deg)):
            term = term * Expr.coord(rng.choice(coords))
        out = out + term
    return out


def jet_coords(sp: JetSpace, order: int, with_base: bool = True) -> list:
    coords = [field_coord(a, multi) for a in range(sp.m) for multi in sp.multi_indices(order)]
    if with_base:
        coords += [base_coord(mu) for mu in range(sp.n)]
    return coords


def random_lagrangian(rng, sp: JetSpace, order: int = 2, n_terms: int = 3) -> Lagrangian:
    """Polynomial Lagrangian containing at least one coordinate of the given order."""
    coords = jet_coords(sp, order)
    top = [c for c in coords if c.kind == "y" and c.order == order]
    L = random_poly(rng, coords, n_terms, 2)
    L = L + Expr.const(_coef(rng)) * Expr.coord(rng.choice(top)) * Expr.coord(rng.choice(coords))
    return Lagrangian(L, sp)


def random_current(rng, sp: JetSpace, order: int = 1) -> Current:
    coords = jet_coords(sp, order)
    return Current(tuple(random_poly(rng, coords, 2, 3) for _ in range(sp.n)), sp)


def random_field(rng, sp: JetSpace, generalized: bool = False) -> VectorField:
    base = [base_coord(mu) for mu in range(sp.n)]
    xi = [Expr.const(rng.choice([0, 1, Fraction(1, 2)])) + rng.choice([0, 1]) * Expr.coord(rng.choice(base)) for _ in range(sp.n)]
    coords = jet_coords(sp, 1 if generalized else 0)
    comps = [random_poly(rng, coords, 2, 2) + rng.choice([0, 1]) for _ in range(sp.m)]
    return VectorField(sp, xi, comps)


def corpus(seed: int, count: int, kinds=((1, 1), (1, 2), (2, 1), (2, 2)), order=2):
    """``count`` (space, lagrangian) pairs cycling through (n, m) kinds."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n, m = kinds[i % len(kinds)]
        sp = space(n, m)
        out.append(random_lagrangian(rng, sp, order if i % 3 else 1))
    return out


__all__ = ["space", "random_poly", "random_lagrangian", "random_current", "random_field", "corpus", "jet_coords", "ONE"]
