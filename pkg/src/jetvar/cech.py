"""Good covers, cochains of local variational objects, coboundary and periods.

A cover is a finite list of charts sharing the base coordinates.  Every
nonempty intersection of charts ``i0 < ... < iq`` may have several connected
components; on each component the objects are written in the coordinates of
the first chart ``i0`` and the cover stores, for every member chart, the
transition expressing that chart's fiber coordinates in the common ones.

Classes of local objects are witnessed by periods: integrals, by tensor
Gauss-Legendre quadrature, of closed forms on Y over the cover's cycles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    ChartMismatch,
    DimensionMismatch,
    FieldNotGlobal,
    InconsistentPair,
    JetVarError,
    NotClosed,
    NotLocallyVariational,
    TransitionMissing,
)
from .jetforms import Form, VectorField, d_H, d_V, to_dy_basis
from .symexpr import PI, ZERO, Coord, Expr, JetSpace, base_coord, expr_sum, field_coord, param
from .varseq import (
    AnsatzSpec,
    Current,
    Lagrangian,
    SourceForm,
    euler_lagrange,
    helmholtz_check,
    solve_dH_exact,
    tonti_lagrangian,
)

TWO_PI = 2 * Expr.coord(PI)
DEFAULT_NODES = 64
DEFAULT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Chart:
    name: str
    angle_fields: frozenset = frozenset()


@dataclass
class Intersection:
    """One connected component of a chart intersection."""

    charts: tuple
    component: str
    transitions: dict  # chart index -> {field Coord (order 0): Expr in common coords}
    faces: tuple  # face component label for each omitted position

    @property
    def key(self) -> tuple:
        return (self.charts, self.component)

    def face(self, k: int) -> tuple:
        charts = self.charts[:k] + self.charts[k + 1 :]
        return (charts, self.faces[k])


@dataclass
class Patch:
    """Parametrized piece of a cycle: ``mapping`` sends coordinates to Exprs in s0, s1."""

    location: tuple
    mapping: dict
    ranges: tuple = ((0.0, 1.0),)


@dataclass
class Cycle:
    name: str
    dim: int
    patches: list
    nodes: int = DEFAULT_NODES

    @property
    def location_degree(self) -> int:
        return len(self.patches[0].location[0]) - 1


S = (param("_s0"), param("_s1"))


def s(i: int) -> Expr:
    return Expr.coord(S[i])


@dataclass
class Cover:
    name: str
    space: JetSpace
    charts: list
    intersections: dict = field(default_factory=dict)
    cycles: dict = field(default_factory=dict)

    def __post_init__(self):
        self._prolonged: dict = {}
        for i in range(len(self.charts)):
            self.intersections.setdefault(((i,), "all"), Intersection((i,), "all", {}, ()))

    # keys and names
    def keys(self, q: int) -> list:
        return sorted(k for k in self.intersections if len(k[0]) == q + 1)

    def chart_key(self, i: int) -> tuple:
        return ((i,), "all")

    def chart_index(self, name: str) -> int:
        for i, c in enumerate(self.charts):
            if c.name == name:
                return i
        raise ChartMismatch(f"cover {self.name} has no chart {name!r}")

    def location_name(self, key) -> str:
        charts, comp = key
        label = "|".join(self.charts[i].name for i in charts)
        return label if comp == "all" else f"{label}[{comp}]"

    def angle_fields(self, key) -> frozenset:
        return frozenset().union(*(self.charts[i].angle_fields for i in key[0]))

    # transitions
    def transition(self, key, chart: int, order: int) -> dict:
        """Prolonged map: jet coordinates of ``chart`` in the common coordinates of ``key``."""
        inter = self.intersections.get(key)
        if inter is None:
            raise TransitionMissing(f"no intersection {key!r} in cover {self.name}")
        if chart not in inter.charts:
            raise TransitionMissing(f"chart {chart} is not part of {self.location_name(key)}")
        base = inter.transitions.get(chart, {})
        if not base:
            return {}
        cache_key = (key, chart, order)
        if cache_key not in self._prolonged:
            sp = self.space
            out = {}
            for a in range(sp.m):
                sigma = base.get(field_coord(a))
                if sigma is None:
                    continue
                for multi in sp.multi_indices(order):
                    out[field_coord(a, multi)] = sp.D_multi(sigma, multi)
            self._prolonged[cache_key] = out
        return self._prolonged[cache_key]

    def pull(self, value, key, chart: int):
        """Express ``value``, written in ``chart``'s coordinates, in those of ``key``."""
        order = _order_of(value)
        mapping = self.transition(key, chart, order)
        if not mapping:
            return value
        if isinstance(value, SourceForm):
            inter = self.intersections[key]
            base = inter.transitions.get(chart, {})
            sp = value.space
            moved = [c.substitute(mapping) for c in value.components]
            comps = []
            for b in range(sp.m):
                comps.append(
                    expr_sum(
                        base.get(field_coord(a), Expr.coord(field_coord(a))).partial(field_coord(b)) * moved[a]
                        for a in range(sp.m)
                    )
                )
            return SourceForm(tuple(comps), sp)
        return value.substitute(mapping)


def _order_of(value) -> int:
    if isinstance(value, Expr):
        return value.jet_order()
    if isinstance(value, Lagrangian):
        return value.expr.jet_order()
    return max((c.jet_order() for c in value.components), default=0)


# ---------------------------------------------------------------- cochains
_KINDS = {Lagrangian: "lagrangian", Current: "current", SourceForm: "source"}


@dataclass
class Cochain:
    degree: int
    values: dict
    kind: str = ""

    def __post_init__(self):
        kinds = {_KINDS.get(type(v), "other") for v in self.values.values()}
        if len(kinds) > 1:
            raise DimensionMismatch(f"mixed value kinds in cochain: {sorted(kinds)}")
        if not self.kind:
            self.kind = kinds.pop() if kinds else "lagrangian"
        for charts, _ in self.values:
            if len(charts) != self.degree + 1 or list(charts) != sorted(set(charts)):
                raise DimensionMismatch(f"bad chart tuple {charts} for a {self.degree}-cochain")

    @staticmethod
    def on_charts(values: Mapping | Iterable, kind: str = "") -> "Cochain":
        """0-cochain from ``{chart index: value}`` or a list in chart order."""
        items = values.items() if isinstance(values, Mapping) else enumerate(values)
        return Cochain(0, {((i,), "all"): v for i, v in items}, kind)

    @property
    def is_zero(self) -> bool:
        return all(v.is_zero for v in self.values.values())

    def map(self, fn) -> "Cochain":
        return Cochain(self.degree, {k: fn(v) for k, v in self.values.items()})


def coboundary(c: Cochain, cover: Cover) -> Cochain:
    """Alternating sum of face values, pulled to each component's common coordinates."""
    out = {}
    for key in cover.keys(c.degree + 1):
        inter = cover.intersections[key]
        if not all(inter.face(k) in c.values for k in range(c.degree + 2)):
            if any(inter.face(k) in c.values for k in range(c.degree + 2)):
                missing = [cover.location_name(inter.face(k)) for k in range(c.degree + 2) if inter.face(k) not in c.values]
                raise TransitionMissing(f"cochain has no value on {', '.join(missing)}")
            continue
        total = None
        for k in range(c.degree + 2):
            fkey = inter.face(k)
            v = cover.pull(c.values[fkey], key, fkey[0][0])
            term = v if k % 2 == 0 else -v
            total = term if total is None else total + term
        out[key] = total
    return Cochain(c.degree + 1, out, c.kind)


# ------------------------------------------------------------------ periods
def differential(value) -> Form:
    """Exterior derivative on Y of an order-0 current (or function, for n = 1)."""
    form = value.to_form() if isinstance(value, Current) else Form.function(value.space, value)
    return d_H(form) + d_V(form)


def _gauss(nodes: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _word_coord(sym) -> Coord:
    kind, idx = sym
    return base_coord(idx) if kind == "dx" else field_coord(idx)


def period(
    omega: Form,
    cycle: Cycle,
    values: Mapping | None = None,
    nodes: int | None = None,
) -> float:
    """Integral of an order-0 form on Y over ``cycle``."""
    if omega.degree != cycle.dim:
        raise ChartMismatch(f"a {omega.degree}-form cannot be integrated over a {cycle.dim}-cycle")
    if omega.is_zero:
        return 0.0
    try:
        words = to_dy_basis(omega)
    except ValueError as exc:
        raise ChartMismatch(str(exc)) from None
    nodes = nodes or cycle.nodes
    params = {param(k) if isinstance(k, str) else k: float(v) for k, v in (values or {}).items()}
    total = 0.0
    for patch in cycle.patches:
        grids = [_gauss(nodes, lo, hi) for lo, hi in patch.ranges]
        jac = {
            c: [e.partial(S[i]) for i in range(cycle.dim)] for c, e in patch.mapping.items()
        }
        for combo in itertools.product(*(range(nodes) for _ in range(cycle.dim))):
            point = {S[i]: grids[i][0][j] for i, j in enumerate(combo)}
            weight = float(np.prod([grids[i][1][j] for i, j in enumerate(combo)]))
            env = dict(params)
            env.update(point)
            coords = {c: e.evaluate(env) for c, e in patch.mapping.items()}
            env.update(coords)
            for word, coef in words.items():
                rows = []
                for sym in word:
                    c = _word_coord(sym)
                    if c not in jac:
                        raise ChartMismatch(f"cycle {cycle.name} does not parametrize {c!r}")
                    rows.append([d.evaluate(env) for d in jac[c]])
                try:
                    val = coef.evaluate(env)
                except KeyError as exc:
                    raise ChartMismatch(f"cycle {cycle.name}: {exc}") from None
                total += weight * val * float(np.linalg.det(np.array(rows)))
    return total


# -------------------------------------------------------- connecting maps
@dataclass
class DeltaResult:
    potentials: Cochain  # local Lagrangians (delta) or local currents (delta')
    coboundary: Cochain  # their coboundary on overlaps
    gamma: Cochain | None  # currents on overlaps (delta only)
    cocycle: Cochain  # top coboundary: constants on triples (delta) or closed currents on pairs (delta')
    periods: dict
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def nonzero(self) -> bool:
        return any(abs(p) > self.tolerance for p in self.periods.values())


def _ansatz(cover: Cover, key, ansatz: AnsatzSpec | None) -> AnsatzSpec:
    return (ansatz or AnsatzSpec()).with_angles(cover.angle_fields(key))


def _cycle_periods(cover: Cover, degree: int, potentials: Cochain, values, nodes, n: int) -> dict:
    out = {}
    for name, cyc in sorted(cover.cycles.items()):
        if cyc.dim != n or cyc.location_degree != degree:
            continue
        if not all(p.location in potentials.values for p in cyc.patches):
            continue
        total = 0.0
        for patch in cyc.patches:
            sub = Cycle(cyc.name, cyc.dim, [patch], cyc.nodes)
            total += period(differential(potentials.values[patch.location]), sub, values, nodes)
        out[name] = total
    return out


def connecting_delta(
    eta: Cochain,
    cover: Cover,
    lagrangians: Cochain | None = None,
    ansatz: AnsatzSpec | None = None,
    values: Mapping | None = None,
    nodes: int | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> DeltaResult:
    """Obstruction to a global Lagrangian for a global, locally variational eta."""
    if not coboundary(eta, cover).is_zero:
        raise InconsistentPair("source forms do not agree on overlaps")
    lags = {}
    for key, e in eta.values.items():
        if not helmholtz_check(e).is_locally_variational:
            raise NotLocallyVariational(f"Helmholtz conditions fail on {cover.location_name(key)}")
        if lagrangians is not None and key in lagrangians.values:
            lag = lagrangians.values[key]
            if euler_lagrange(lag) != e:
                raise InconsistentPair(f"chart Lagrangian on {cover.location_name(key)} does not give eta")
        else:
            lag = tonti_lagrangian(e)
        lags[key] = lag
    lam = Cochain(0, lags, "lagrangian")
    d_lam = coboundary(lam, cover)
    gamma = Cochain(
        1, {k: solve_dH_exact(v, _ansatz(cover, k, ansatz)) for k, v in d_lam.values.items()}, "current"
    )
    d_gamma = coboundary(gamma, cover)
    for key, v in d_gamma.values.items():
        if not v.divergence().is_zero:
            raise JetVarError(f"coboundary of gamma is not d_H-closed on {cover.location_name(key)}")
    periods = _cycle_periods(cover, 1, gamma, values, nodes, cover.space.n)
    return DeltaResult(lam, d_lam, gamma, d_gamma, periods, tolerance)


def connecting_delta_prime(
    mu: Cochain,
    cover: Cover,
    potentials: Cochain | None = None,
    ansatz: AnsatzSpec | None = None,
    values: Mapping | None = None,
    nodes: int | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> DeltaResult:
    """Obstruction to a global potential for a locally d_H-exact Lagrangian cochain."""
    nus = {}
    for key, m in mu.values.items():
        if not euler_lagrange(m).is_zero:
            raise NotClosed(f"Euler-Lagrange form is nonzero on {cover.location_name(key)}")
        if potentials is not None and key in potentials.values:
            nu = potentials.values[key]
            if nu.divergence() != m.expr:
                raise InconsistentPair(f"supplied potential on {cover.location_name(key)} is wrong")
        else:
            nu = solve_dH_exact(m, _ansatz(cover, key, ansatz))
        nus[key] = nu
    nu_c = Cochain(0, nus, "current")
    d_nu = coboundary(nu_c, cover)
    for key, v in d_nu.values.items():
        if not v.divergence().is_zero:
            raise JetVarError(f"coboundary of nu is not d_H-closed on {cover.location_name(key)}")
    n = cover.space.n
    periods = _cycle_periods(cover, 0, nu_c, values, nodes, n)
    return DeltaResult(nu_c, d_nu, None, d_nu, periods, tolerance)


# --------------------------------------------------------- Lie derivatives
def check_global_field(Xi: VectorField, cover: Cover) -> None:
    """Raise FieldNotGlobal unless Xi's chart formulas agree under every transition."""
    sp = Xi.space
    order = max(e.jet_order() for e in Xi.components)
    for key in cover.keys(1):
        inter = cover.intersections[key]
        for k in inter.charts[1:]:
            base = inter.transitions.get(k, {})
            if not base:
                continue
            mapping = cover.transition(key, k, order)
            for a in range(sp.m):
                sigma = base.get(field_coord(a), Expr.coord(field_coord(a)))
                lhs = Xi.components[a].substitute(mapping)
                rhs = expr_sum(sigma.partial(field_coord(b)) * Xi.components[b] for b in range(sp.m))
                rhs = rhs + expr_sum(sigma.partial(base_coord(mu)) * Xi.xi[mu] for mu in range(sp.n))
                if lhs != rhs:
                    raise FieldNotGlobal(
                        f"component {sp.field_names[a]} does not transform on {cover.location_name(key)}"
                    )


def lie_derive_cochain(c: Cochain, Xi: VectorField, cover: Cover) -> Cochain:
    """Apply the degree-appropriate Lie derivative on every chart tuple."""
    from .noether import lie_derive_current, lie_derive_lagrangian, lie_derive_source

    check_global_field(Xi, cover)
    ops = {
        "lagrangian": lambda v: lie_derive_lagrangian(v, Xi),
        "current": lambda v: lie_derive_current(v, Xi),
        "source": lambda v: lie_derive_source(v, None, Xi),
    }
    if c.kind not in ops:
        raise DimensionMismatch(f"no Lie derivative for cochains of kind {c.kind!r}")
    op = ops[c.kind]
    return Cochain(c.degree, {k: op(v) for k, v in c.values.items()}, c.kind)


# ---------------------------------------------------------- built-in covers
def _shift(common: str, other: str, label: str) -> Expr:
    if common == other or label == "hi":
        return ZERO
    return TWO_PI if common == "E" else -TWO_PI


def branch_cover(name: str, space: JetSpace, factors: list) -> Cover:
    """Product cover from factors ``("hemi",)`` (two overlapping halves S, N) and
    ``("angle", a)`` (field ``a`` on branches E = (-pi, pi) and W = (0, 2pi)).

    E and W overlap in two components: ``hi`` where the angle is in (0, pi)
    mod 2 pi (no shift) and ``lo`` where it is in (pi, 2 pi) (shift by 2 pi).
    """
    labels = [("S", "N") if f[0] == "hemi" else ("E", "W") for f in factors]
    combos = list(itertools.product(*labels))
    angles = frozenset(f[1] for f in factors if f[0] == "angle")
    charts = [Chart("_".join(c), angles) for c in combos]
    angle_pos = [i for i, f in enumerate(factors) if f[0] == "angle"]
    cover = Cover(name, space, charts)
    for size in range(2, len(charts) + 1):
        for subset in itertools.combinations(range(len(charts)), size):
            mixed = [len({combos[i][p] for i in subset}) == 2 for p in angle_pos]
            options = [("hi", "lo") if mx else ("*",) for mx in mixed]
            for parts in itertools.product(*options):
                comp = "all" if all(p == "*" for p in parts) else ",".join(parts)
                transitions = {}
                for k in subset[1:]:
                    tmap = {}
                    for p, pos, part in zip(range(len(angle_pos)), angle_pos, parts):
                        shift = _shift(combos[subset[0]][pos], combos[k][pos], part)
                        if not shift.is_zero:
                            a = factors[pos][1]
                            tmap[field_coord(a)] = Expr.coord(field_coord(a)) + shift
                    if tmap:
                        transitions[k] = tmap
                faces = []
                for j in range(size):
                    rest = subset[:j] + subset[j + 1 :]
                    fparts = [
                        part if len({combos[i][pos] for i in rest}) == 2 else "*"
                        for pos, part in zip(angle_pos, parts)
                    ]
                    faces.append("all" if all(p == "*" for p in fparts) else ",".join(fparts))
                cover.intersections[(subset, comp)] = Intersection(subset, comp, transitions, tuple(faces))
    return cover


def _point(space: JetSpace, **fields) -> dict:
    mapping = {base_coord(mu): ZERO for mu in range(space.n)}
    for a in range(space.m):
        mapping[field_coord(a)] = fields.get(f"y{a}", ZERO)
    return mapping


def _circle() -> Expr:
    return -Expr.coord(PI) + TWO_PI * s(0)


def trivial_cover(space: JetSpace) -> Cover:
    return Cover("R-x-Rm", space, [Chart("U")])


def s1_cover(space: JetSpace) -> Cover:
    cover = branch_cover("R-x-S1", space, [("angle", 0)])
    cover.cycles["fiber-circle"] = Cycle(
        "fiber-circle", 1, [Patch(cover.chart_key(0), _point(space, y0=_circle()))]
    )
    return cover


def s2_cover(space: JetSpace) -> Cover:
    if space.m < 2:
        raise DimensionMismatch("the sphere cover needs fields (polar angle, azimuth)")
    cover = branch_cover("R-x-S2-monopole", space, [("hemi",), ("angle", 1)])
    S_E, N_E = cover.chart_index("S_E"), cover.chart_index("N_E")
    half = Expr.coord(PI) / 2
    cover.cycles["equator"] = Cycle(
        "equator", 1, [Patch(((S_E, N_E), "all"), _point(space, y0=half, y1=_circle()))]
    )
    cover.cycles["sphere"] = Cycle(
        "sphere",
        2,
        [
            Patch(cover.chart_key(N_E), _point(space, y0=half * s(0), y1=-Expr.coord(PI) + TWO_PI * s(1)), ((0.0, 1.0), (0.0, 1.0))),
            Patch(cover.chart_key(S_E), _point(space, y0=half + half * s(0), y1=-Expr.coord(PI) + TWO_PI * s(1)), ((0.0, 1.0), (0.0, 1.0))),
        ],
    )
    return cover


def torus_cover(space: JetSpace) -> Cover:
    if space.m < 2:
        raise DimensionMismatch("the torus-fiber cover needs two angle fields")
    cover = branch_cover("R2-x-T2", space, [("angle", 0), ("angle", 1)])
    k = cover.chart_key(0)
    cover.cycles["circle-a"] = Cycle("circle-a", 1, [Patch(k, _point(space, y0=_circle()))])
    cover.cycles["circle-b"] = Cycle("circle-b", 1, [Patch(k, _point(space, y1=_circle()))])
    cover.cycles["fiber-torus"] = Cycle(
        "fiber-torus",
        2,
        [Patch(k, _point(space, y0=_circle(), y1=-Expr.coord(PI) + TWO_PI * s(1)), ((0.0, 1.0), (0.0, 1.0)))],
    )
    return cover


BUILTIN_COVERS = {
    "R-x-Rm": trivial_cover,
    "R-x-S1": s1_cover,
    "R-x-S2-monopole": s2_cover,
    "R2-x-T2": torus_cover,
}


def builtin_cover(name: str, space: JetSpace) -> Cover:
    try:
        return BUILTIN_COVERS[name](space)
    except KeyError:
        raise ChartMismatch(f"unknown cover {name!r}; known: {', '.join(BUILTIN_COVERS)}") from None


__all__ = [
    "Chart",
    "Intersection",
    "Patch",
    "Cycle",
    "Cover",
    "Cochain",
    "DeltaResult",
    "coboundary",
    "differential",
    "period",
    "connecting_delta",
    "connecting_delta_prime",
    "check_global_field",
    "lie_derive_cochain",
    "branch_cover",
    "builtin_cover",
    "trivial_cover",
    "s1_cover",
    "s2_cover",
    "torus_cover",
    "BUILTIN_COVERS",
]
