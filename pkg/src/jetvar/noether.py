"""Symmetries, variational Lie derivatives, Noether currents and conservation checks.

Lie derivatives act on variational classes through their representatives:

* Lagrangian:  ``L_Xi lambda = (Xi_V . E(lambda)) omega + d_H epsilon``
* current:     ``L_Xi nu = Xi_H -| d_H nu + Xi_V -| d_V nu``
* source form: ``L_Xi eta = E(Xi_V . eta)``

where ``Xi_V`` is the evolutionary (characteristic) part of the field and
``epsilon`` the canonical Noether current.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

from .errors import (
    HypothesisFails,
    InconsistentPair,
    JetVarError,
    MissingCertificate,
    NoSolution,
    NotClosed,
    NotSolvableForLeading,
)
from .jetforms import VectorField, contract, d_H, d_V, horizontalize
from .report import Report
from .symexpr import ZERO, Coord, Expr, expr_sum, field_coord
from .varseq import (
    AnsatzSpec,
    Current,
    Lagrangian,
    SourceForm,
    _kernel_candidates,
    _monomials,
    _rational_solve,
    euler_lagrange,
    momenta,
    solve_dH_exact,
)


def _pair(Xi: VectorField, eta: SourceForm) -> Expr:
    """Xi_V^a eta_a."""
    return expr_sum(c * e for c, e in zip(Xi.evolutionary(), eta.components))


# ------------------------------------------------------------- Lie derivatives
def noether_current(lag: Lagrangian, Xi: VectorField) -> Current:
    """Canonical current Xi_V -| p + xi -| lambda (order of lambda <= 2)."""
    sp = lag.space
    p = momenta(lag)
    if Xi.is_zero:
        return Current.zero(sp)
    vertical = contract(Xi, p, part="V")
    horizontal = contract(Xi, lag.to_form(), part="H")
    return Current.from_form(vertical + horizontal)


def lie_derive_lagrangian(lag: Lagrangian, Xi: VectorField) -> Lagrangian:
    """Variational Lie derivative of a Lagrangian class (order <= 2)."""
    sp = lag.space
    eps = noether_current(lag, Xi)
    source = _pair(Xi, euler_lagrange(lag))
    return Lagrangian(source + eps.divergence(), sp)


def lie_derive_current(nu: Current, Xi: VectorField) -> Current:
    """Xi_H -| d_H nu + Xi_V -| d_V nu, a current whose d_H is L_Xi(d_H nu)."""
    sp = nu.space
    if Xi.is_zero:
        return Current.zero(sp)
    form = nu.to_form()
    if form.degree == 0:
        # n = 1: the current is a function and the contractions are pairings
        f = nu.components[0]
        hor = Xi.xi[0] * sp.D(f, 0)
        ver = expr_sum(
            f.partial(c) * Xi.vertical_pairing(c.index, c.multi)
            for c in f.free_coords()
            if c.kind == "y"
        )
        return Current((hor + ver,), sp)
    out = contract(Xi, d_H(form), part="H") + contract(Xi, d_V(form), part="V")
    return Current.from_form(horizontalize(out))


def lie_derive_source(eta: SourceForm, lag_local: Lagrangian | None, Xi: VectorField) -> SourceForm:
    """E(Xi_V . eta); ``lag_local``, when given, must have Euler-Lagrange form eta."""
    if lag_local is not None and euler_lagrange(lag_local) != eta:
        raise InconsistentPair("the local Lagrangian does not produce this source form")
    return euler_lagrange(Lagrangian(_pair(Xi, eta), eta.space))


# -------------------------------------------------------------- symmetries
@dataclass
class SymmetryReport:
    is_lagrangian_symmetry: bool
    is_generalized_symmetry: bool
    certificates: dict = field(default_factory=dict)  # "zeta", "nu" -> Current | None
    residuals: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    is_strict_lagrangian_symmetry: bool = False


def check_generalized_symmetry(
    eta: SourceForm,
    Xi: VectorField,
    lagrangian: Lagrangian | None = None,
    ansatz: AnsatzSpec | None = None,
) -> SymmetryReport:
    """Decide E(Xi_V . eta) = 0 and exhibit nu with Xi_V . eta = d_H nu.

    With a Lagrangian, also decide whether L_Xi lambda is d_H-exact and
    exhibit zeta with L_Xi lambda = d_H zeta.
    """
    sp = eta.space
    residuals = list(lie_derive_source(eta, None, Xi).components)
    generalized = all(r.is_zero for r in residuals)
    rep = SymmetryReport(False, generalized, {"zeta": None, "nu": None}, residuals)
    if generalized:
        try:
            rep.certificates["nu"] = solve_dH_exact(_pair(Xi, eta), ansatz, space=sp)
        except NoSolution as exc:
            rep.notes.append(f"nu: {exc}")
    if lagrangian is not None:
        varied = lie_derive_lagrangian(lagrangian, Xi)
        rep.is_strict_lagrangian_symmetry = varied.is_zero
        try:
            rep.certificates["zeta"] = solve_dH_exact(varied, ansatz)
            rep.is_lagrangian_symmetry = True
        except NotClosed:
            rep.residuals.extend(euler_lagrange(varied).components)
        except NoSolution as exc:
            rep.notes.append(f"zeta: {exc}")
    return rep


def strong_noether_parts(
    lag: Lagrangian, eta: SourceForm, Xi: VectorField, ansatz: AnsatzSpec | None = None
) -> tuple:
    """(nu, epsilon) with Xi_V . eta = d_H nu and epsilon the canonical current."""
    if euler_lagrange(lag) != eta:
        raise InconsistentPair("the Lagrangian does not produce this source form")
    rep = check_generalized_symmetry(eta, Xi, ansatz=ansatz)
    nu = rep.certificates["nu"]
    if not rep.is_generalized_symmetry or nu is None:
        raise MissingCertificate("no potential nu for Xi_V . eta; not a generalized symmetry?")
    return nu, noether_current(lag, Xi)


def strong_noether_current(
    lag: Lagrangian, eta: SourceForm, Xi: VectorField, ansatz: AnsatzSpec | None = None
) -> Current:
    """nu + epsilon; its d_H equals L_Xi lambda."""
    nu, eps = strong_noether_parts(lag, eta, Xi, ansatz)
    return nu + eps


# ------------------------------------------------------------------ on shell
def _rank(c: Coord) -> tuple:
    return (c.order, tuple(-i for i in c.multi), -c.index)


def _leading_rules(eta: SourceForm) -> list:
    rules = []
    for a, ea in enumerate(eta.components):
        if ea.is_zero:
            continue
        coords = [c for c in ea.free_coords() if c.kind == "y"]
        if not coords:
            raise NotSolvableForLeading(f"equation {a} has no field derivatives")
        lead = max(coords, key=_rank)
        k = ea.partial(lead)
        if not k.is_constant:
            raise NotSolvableForLeading(
                f"equation {a} is not linear in {eta.space.name(lead)} with constant coefficient"
            )
        rules.append((lead, Expr.coord(lead) - ea / k.constant_value()))
    for (l1, _), (l2, _) in itertools.combinations(rules, 2):
        if l1.index == l2.index and (_quotient(l1, l2) is not None or _quotient(l2, l1) is not None):
            raise NotSolvableForLeading("leading derivatives are not independent")
    return rules


def _quotient(c: Coord, lead: Coord):
    """Multi-index K with c = D_K lead, or None."""
    if c.kind != "y" or c.index != lead.index:
        return None
    rest = Counter(c.multi)
    rest.subtract(Counter(lead.multi))
    if any(v < 0 for v in rest.values()):
        return None
    return tuple(sorted(rest.elements()))


def on_shell_reduce(e: Expr, eta: SourceForm, max_rounds: int = 64) -> Expr:
    """Normal form of ``e`` modulo eta = 0 and its total-derivative consequences."""
    sp = eta.space
    rules = _leading_rules(eta)
    cache: dict = {}
    for _ in range(max_rounds):
        mapping = {}
        for c in e.free_coords():
            for lead, f in rules:
                K = _quotient(c, lead)
                if K is not None:
                    if c not in cache:
                        cache[c] = sp.D_multi(f, K)
                    mapping[c] = cache[c]
                    break
        if not mapping:
            return e
        e = e.substitute(mapping)
    raise NotSolvableForLeading("on-shell substitution did not reach a fixpoint")


def on_shell_multipliers(e: Expr, eta: SourceForm, ansatz: AnsatzSpec | None = None):
    """Coefficients C^{a,I} with e = sum C^{a,I} D_I eta_a, or None.

    Independent of leading-derivative solvability; the multipliers range
    over a polynomial-times-kernel ansatz.
    """
    sp = eta.space
    ansatz = ansatz or AnsatzSpec()
    if e.is_zero:
        return {}
    order = e.jet_order()
    degree = min(ansatz.max_poly_degree, max(sum(p for a, p in m if isinstance(a, Coord)) for m, _ in e.terms()))
    variables = [field_coord(a, multi) for a in range(sp.m) for multi in sp.multi_indices(order)]
    kernel_src = e + expr_sum(eta.components)
    kernels = _kernel_candidates(kernel_src)
    polys = _monomials(variables, degree, {field_coord(a) for a in ansatz.angle_fields})
    columns, labels = [], []
    for a, ea in enumerate(eta.components):
        if ea.is_zero:
            continue
        for multi in sp.multi_indices(max(0, order - ea.jet_order())):
            dea = sp.D_multi(ea, multi)
            for kp in kernels:
                for poly in polys:
                    b = Expr({kp: 1}) * poly
                    col = b * dea
                    if not col.is_zero:
                        columns.append(col)
                        labels.append((a, multi, b))
    sol = _rational_solve(columns, e)
    if sol is None:
        return None
    out: dict = {}
    for (a, multi, b), c in zip(labels, sol):
        if c:
            out[(a, multi)] = out.get((a, multi), ZERO) + b * c
    return out


def on_shell_zero(e: Expr, eta: SourceForm, fallback: bool = True, ansatz: AnsatzSpec | None = None) -> tuple:
    """(is_zero_on_shell, method, residual)."""
    if e.is_zero:
        return True, "identically", ZERO
    try:
        red = on_shell_reduce(e, eta)
        if red.is_zero or not fallback:
            return red.is_zero, "leading-derivative substitution", red
    except NotSolvableForLeading:
        if not fallback:
            raise
        red = e
    mult = on_shell_multipliers(e, eta, ansatz)
    if mult is not None:
        return True, "multiplier ansatz", ZERO
    return False, "no reduction found", red


# --------------------------------------------------------------- verifiers
def _chart_angles(cover, key) -> frozenset:
    charts = key if isinstance(key, int) else key[0]
    if isinstance(charts, int):
        charts = (charts,)
    return frozenset().union(*(cover.charts[i].angle_fields for i in charts))


def _ansatz_for(cover, key, ansatz: AnsatzSpec | None) -> AnsatzSpec:
    return (ansatz or AnsatzSpec()).with_angles(_chart_angles(cover, key))


def _sources(lagrangians, eta):
    from .cech import Cochain

    if eta is None:
        return Cochain(0, {k: euler_lagrange(v) for k, v in lagrangians.values.items()}, "source")
    return eta


def _strong_currents(lagrangians, eta, Xi, cover, ansatz, report: Report) -> dict:
    """beta_i = nu_i + epsilon_i per chart (omega_i = 0), recording failures."""
    beta = {}
    for key, lag in lagrangians.values.items():
        loc = cover.location_name(key)
        eta_i = eta.values[key]
        if euler_lagrange(lag) != eta_i:
            report.check(loc, "E(lambda) = eta", "mismatch", False)
            continue
        sym = check_generalized_symmetry(eta_i, Xi, ansatz=_ansatz_for(cover, key, ansatz))
        report.check(
            loc,
            "generalized symmetry E(Xi_V . eta) = 0",
            ", ".join(lag.space.fmt(r) for r in sym.residuals),
            sym.is_generalized_symmetry,
        )
        nu = sym.certificates["nu"]
        if nu is None:
            report.check(loc, "potential nu exhibited", "; ".join(sym.notes) or "none", False)
            continue
        eps = noether_current(lag, Xi)
        report.note(loc, "nu", nu)
        report.note(loc, "epsilon", eps)
        beta[key] = nu + eps
    return beta


def verify_lemma2(lagrangians, eta, Xi: VectorField, cover, ansatz: AnsatzSpec | None = None) -> Report:
    """Check L_Xi L_Xi lambda_i = 0 and L_Xi d_H gamma_ij = (coboundary of d_H beta)_ij."""
    from .cech import Cochain, coboundary

    rep = Report("second-variation identity on overlaps")
    eta = _sources(lagrangians, eta)
    varied = {}
    for key, lag in lagrangians.values.items():
        loc = cover.location_name(key)
        once = lie_derive_lagrangian(lag, Xi)
        twice = lie_derive_lagrangian(once, Xi)
        varied[key] = once
        rep.check(loc, "L_Xi L_Xi lambda = 0", twice, twice.is_zero)
    beta = _strong_currents(lagrangians, eta, Xi, cover, ansatz, rep)
    for key, b in beta.items():
        loc = cover.location_name(key)
        res = b.d_H() - varied[key]
        rep.check(loc, "d_H beta = L_Xi lambda", res, res.is_zero)
    d_lambda = coboundary(lagrangians, cover)
    dH_beta = Cochain(0, {k: b.d_H() for k, b in beta.items()}, "lagrangian")
    if len(beta) != len(lagrangians.values):
        rep.check("cover", "beta on every chart", "missing", False)
        return rep
    d_dH_beta = coboundary(dH_beta, cover)
    d_beta = coboundary(Cochain(0, beta, "current"), cover)
    for key, dl in d_lambda.values.items():
        loc = cover.location_name(key)
        try:
            gamma = solve_dH_exact(dl, _ansatz_for(cover, key, ansatz))
        except JetVarError as exc:
            rep.check(loc, "gamma with d_H gamma = coboundary lambda", str(exc), False)
            continue
        rep.note(loc, "gamma", gamma)
        lhs = lie_derive_lagrangian(gamma.d_H(), Xi)
        res = lhs - d_dH_beta.values[key]
        rep.check(loc, "L_Xi d_H gamma - coboundary(d_H beta) = 0", res, res.is_zero)
        zeta = d_beta.values[key]
        rep.note(loc, "zeta = coboundary(beta)", zeta)
        res2 = zeta.d_H() - lie_derive_lagrangian(dl, Xi)
        rep.check(loc, "d_H zeta = L_Xi coboundary(lambda)", res2, res2.is_zero)
    return rep


def verify_lemma3_and_theorem(
    lagrangians,
    eta,
    Xi: VectorField,
    cover,
    ansatz: AnsatzSpec | None = None,
    fallback: bool = True,
) -> Report:
    """Conservation and globality of the varied strong Noether currents."""
    from .cech import Cochain, coboundary

    rep = Report("conservation and globality of varied strong currents")
    eta = _sources(lagrangians, eta)
    for key, lag in lagrangians.values.items():
        twice = lie_derive_lagrangian(lie_derive_lagrangian(lag, Xi), Xi)
        rep.check(cover.location_name(key), "L_Xi L_Xi lambda = 0", twice, twice.is_zero)
    d_lambda = coboundary(lagrangians, cover)
    for key, dl in d_lambda.values.items():
        res = lie_derive_lagrangian(dl, Xi)
        rep.check(cover.location_name(key), "L_Xi coboundary(lambda) = 0", res, res.is_zero)
    beta = _strong_currents(lagrangians, eta, Xi, cover, ansatz, rep)
    varied = {}
    for key, b in beta.items():
        loc = cover.location_name(key)
        J = lie_derive_current(b, Xi)
        varied[key] = J
        rep.note(loc, "L_Xi(nu + epsilon)", J)
        ok, method, residual = on_shell_zero(J.divergence(), eta.values[key], fallback, ansatz)
        rep.check(loc, f"d_H L_Xi(nu + epsilon) = 0 on shell ({method})", residual, ok)
        mu = b.d_H()
        G = noether_current(mu, Xi)
        diff = J - G
        rep.note(loc, "difference from global representative", diff)
        res = diff.divergence()
        rep.check(loc, "d_H(L_Xi(nu + epsilon) - Xi_H -| mu - Xi_V -| p_mu) = 0", res, res.is_zero)
    if len(beta) != len(lagrangians.values):
        rep.check("cover", "varied current on every chart", "missing", False)
        return rep
    d_varied = coboundary(Cochain(0, varied, "current"), cover)
    for key, val in d_varied.values.items():
        rep.check(cover.location_name(key), "coboundary of varied currents = 0", val, val.is_zero)
    return rep


def require_hypotheses(report: Report) -> None:
    """Raise HypothesisFails when any hypothesis entry of ``report`` failed."""
    bad = [e for e in report.failures() if e.assertion.startswith(("L_Xi", "generalized"))]
    if bad:
        raise HypothesisFails("; ".join(f"{e.location}: {e.assertion}" for e in bad))


__all__ = [
    "SymmetryReport",
    "noether_current",
    "lie_derive_lagrangian",
    "lie_derive_current",
    "lie_derive_source",
    "check_generalized_symmetry",
    "strong_noether_parts",
    "strong_noether_current",
    "on_shell_reduce",
    "on_shell_multipliers",
    "on_shell_zero",
    "verify_lemma2",
    "verify_lemma3_and_theorem",
    "require_hypotheses",
]
