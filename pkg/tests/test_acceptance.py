"""Acceptance criteria 1-10, one test each, with tolerances and time limits.

Every test records one line ``criterion N: PASS|FAIL ...``; the lines are
printed in the pytest terminal summary and by ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import functools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from jetvar.cech import Cochain, coboundary, connecting_delta, connecting_delta_prime, lie_derive_cochain, s2_cover, torus_cover
from jetvar.jetforms import Form, VectorField, d_H, d_V, wedge
from jetvar.noether import check_generalized_symmetry, lie_derive_current, lie_derive_lagrangian, noether_current, verify_lemma2, verify_lemma3_and_theorem
from jetvar.problem import load_problem
from jetvar.cli import run_command
from jetvar.symexpr import Expr, JetSpace, cos, exp, expr_sum, sin
from jetvar.varseq import Lagrangian, SourceForm, euler_lagrange, helmholtz_check, solve_dH_exact, tonti_lagrangian

from corpus import corpus, jet_coords, random_current, random_field, random_lagrangian, random_poly, space
from oracles import cartan_lie_lagrangian

RESULTS: dict = {}
PERIOD_TOL = 1e-8


def criterion(number: int, title: str, limit: float):
    """Time the check, record a one-line verdict, fail on error or overrun."""

    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.perf_counter()
            detail, error = "", None
            try:
                detail = fn() or ""
            except AssertionError as exc:
                error = exc
                detail = f"assertion failed: {exc}"
            except Exception as exc:
                error = exc
                detail = f"error {type(exc).__name__}: {exc}"
            elapsed = time.perf_counter() - start
            over = elapsed >= limit
            ok = error is None and not over
            timing = f"{elapsed:.2f}s < {limit:g}s" if not over else f"{elapsed:.2f}s exceeds {limit:g}s"
            line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {title} | {detail} | {timing}"
            RESULTS[number] = line
            print(line)
            if error is not None:
                raise error
            assert not over, line

        run.criterion = number
        return run

    return wrap


def _pair(Xi, eta) -> Expr:
    return expr_sum(c * e for c, e in zip(Xi.evolutionary(), eta.components))


def _kinds():
    return ((1, 1), (1, 2), (2, 1), (2, 2))


# --------------------------------------------------------------- criteria
@criterion(1, "exact sequence: E(d_H nu) = 0 and Helmholtz(E(lambda)) = 0", 60)
def test_criterion_01_exact_sequence():
    lags = corpus(1001, 24, _kinds())
    rng = random.Random(1002)
    for lag in lags:
        res = helmholtz_check(euler_lagrange(lag))
        assert res.is_locally_variational and all(r.is_zero for r in res.residuals), lag
    count = 0
    for i in range(24):
        n, m = _kinds()[i % 4]
        sp = space(n, m)
        nu = random_current(rng, sp, 1 + i % 2)
        assert euler_lagrange(Lagrangian(nu.divergence(), sp)).is_zero, nu
        count += 1
    return f"{len(lags)} Lagrangians, {count} currents, exact zero"


@criterion(2, "inverse problem: E(tonti(eta)) = eta", 60)
def test_criterion_02_inverse_problem():
    lags = corpus(2001, 12, _kinds())
    for lag in lags:
        eta = euler_lagrange(lag)
        assert euler_lagrange(tonti_lagrangian(eta)) == eta, lag
    return f"{len(lags)} source forms, exact equality"


@criterion(3, "first variation: L_Xi lambda = Xi_V . E(lambda) + d_H epsilon", 30)
def test_criterion_03_first_variation():
    lags = corpus(3001, 16, _kinds())
    rng = random.Random(3002)
    for i, lag in enumerate(lags):
        Xi = random_field(rng, lag.space, generalized=i % 4 == 3)
        lhs = cartan_lie_lagrangian(lag, Xi)
        rhs = _pair(Xi, euler_lagrange(lag)) + noether_current(lag, Xi).divergence()
        assert lhs == rhs, (lag, Xi)
        assert lie_derive_lagrangian(lag, Xi).expr == lhs
    return f"{len(lags)} (lambda, Xi) pairs against the Cartan-formula oracle"


@criterion(4, "Lie derivative commutes with d_H; derived winding classes vanish", 30)
def test_criterion_04_lemma1():
    rng = random.Random(4001)
    pairs = 0
    for i in range(16):
        n, m = _kinds()[i % 4]
        sp = space(n, m)
        nu = random_current(rng, sp, 1)
        Xi = random_field(rng, sp, generalized=i % 4 == 1)
        lhs = lie_derive_lagrangian(Lagrangian(nu.divergence(), sp), Xi).expr
        rhs = lie_derive_current(nu, Xi).divergence()
        assert lhs == rhs, (nu, Xi)
        pairs += 1
    prob = load_problem("winding_s1")
    cover = prob.cover()
    mu = prob.lagrangian_cochain(cover)
    ws = prob.space
    t = ws.x(0)
    fields = [VectorField(ws, [0], [1]), VectorField(ws, [1], [0]), VectorField(ws, [t], [0]), VectorField(ws, [t], [1]), VectorField(ws, [0], [t])]
    worst = 0.0
    for Xi in fields:
        varied = lie_derive_cochain(mu, Xi, cover)
        nus = {k: lie_derive_current(solve_dH_exact(v, prob.ansatz().with_angles(cover.angle_fields(k))), Xi) for k, v in mu.values.items()}
        res = connecting_delta_prime(varied, cover, potentials=Cochain(0, nus, "current"))
        assert res.periods, "no cycle to test"
        worst = max(worst, max(abs(p) for p in res.periods.values()))
    assert worst < PERIOD_TOL, worst
    rep = run_command("verify-lemma1", prob)
    assert rep.passed, rep.to_text()
    return f"{pairs} (nu, Xi) pairs exact; {len(fields)} winding fields, max |period| = {worst:.1e}"


@criterion(5, "winding obstruction on R x S1", 10)
def test_criterion_05_winding():
    rep = run_command("cech-class", load_problem("winding_s1"))
    p = float(rep.info["period.fiber-circle"])
    assert abs(p - 2 * math.pi) < PERIOD_TOL, p
    assert rep.info["class"] == "δ′ ≠ 0", rep.info["class"]
    return f"fiber-circle period {p:.12f}, |err| = {abs(p - 2 * math.pi):.1e}, {rep.info['class']}"


@criterion(6, "monopole obstruction on R x S2", 60)
def test_criterion_06_monopole():
    prob = load_problem("monopole_s2")
    cover = prob.cover()
    lam = prob.lagrangian_cochain(cover)
    eta = lam.map(euler_lagrange)
    for key, e in eta.values.items():
        assert helmholtz_check(e).is_locally_variational, cover.location_name(key)
    res = connecting_delta(eta, cover, lam, values=prob.param_values())
    sp = prob.space
    two_g_phi = 2 * sp.p("g") * sp.y(1)
    sn = [k for k in res.gamma.values if {cover.charts[i].name[0] for i in k[0]} == {"S", "N"}]
    assert sn and all(res.gamma.values[k].components[0] == two_g_phi for k in sn)
    p = res.periods["equator"]
    g = float(prob.param_values()["g"])
    assert abs(p - 4 * math.pi * g) < PERIOD_TOL, p
    rep = run_command("cech-class", prob)
    assert rep.info["class"] == "δ ≠ 0"
    return f"4 charts Helmholtz-clean, gamma = 2*g*ph on {len(sn)} overlaps, equator period {p:.12f}, δ ≠ 0"


def _monopole():
    prob = load_problem("monopole_s2")
    cover = prob.cover()
    return prob, cover, prob.lagrangian_cochain(cover)


@criterion(7, "second-variation identity on the monopole", 60)
def test_criterion_07_lemma2():
    prob, cover, lam = _monopole()
    rep = verify_lemma2(lam, None, prob.vector("rotation"), cover, prob.ansatz())
    hyp = [e for e in rep.entries if e.assertion == "L_Xi L_Xi lambda = 0"]
    ident = [e for e in rep.entries if e.assertion.startswith("L_Xi d_H gamma")]
    assert len(hyp) == 4 and all(e.verdict == "PASS" and e.residual == "0" for e in hyp)
    assert len(ident) == 10 and all(e.verdict == "PASS" and e.residual == "0" for e in ident)
    assert rep.passed, rep.to_text()
    return f"{len(hyp)} hypotheses and {len(ident)} overlap identities with residual 0"


@criterion(8, "conservation and globality of varied strong currents on the monopole", 120)
def test_criterion_08_lemma3():
    prob, cover, lam = _monopole()
    rep = verify_lemma3_and_theorem(lam, None, prob.vector("rotation"), cover, prob.ansatz())
    checks = [e for e in rep.entries if e.verdict != "INFO"]
    groups = {
        "hypothesis": [e for e in checks if e.assertion == "L_Xi coboundary(lambda) = 0"],
        "on shell": [e for e in checks if e.assertion.startswith("d_H L_Xi(nu + epsilon) = 0")],
        "global": [e for e in checks if e.assertion == "coboundary of varied currents = 0"],
        "representative": [e for e in checks if e.assertion.startswith("d_H(L_Xi(nu + epsilon) - Xi_H")],
    }
    for name, entries in groups.items():
        assert entries, f"no {name} assertions"
        assert all(e.verdict == "PASS" and e.residual == "0" for e in entries), (name, entries)
    assert rep.passed, rep.to_text()
    return ", ".join(f"{k} {len(v)}" for k, v in groups.items()) + ", all residuals 0"


@criterion(9, "negative controls report nonzero residuals", 30)
def test_criterion_09_negative_controls():
    sp1 = JetSpace(1, 1, 6, ("t",), ("y",))
    res = helmholtz_check(SourceForm((sp1.y(0, 0),), sp1))
    assert not res.is_locally_variational and not all(r.is_zero for r in res.residuals)
    helm = sp1.fmt(res.residuals[0])

    free = Lagrangian(Fraction(1, 2) * sp1.y(0, 0) ** 2, sp1)
    t = sp1.x(0)
    sym = check_generalized_symmetry(euler_lagrange(free), VectorField(sp1, [0], [t**2]))
    assert not sym.is_generalized_symmetry and not all(r.is_zero for r in sym.residuals)
    gen = sp1.fmt(next(r for r in sym.residuals if not r.is_zero))

    prob, cover, lam = _monopole()
    sp = prob.space
    bent = {}
    for key, v in lam.values.items():
        north = cover.charts[key[0][0]].name.startswith("N")
        bent[key] = Lagrangian(v.expr + sp.y(1) * sp.y(1, 0), sp) if north else v
    rep = verify_lemma3_and_theorem(Cochain(0, bent, "lagrangian"), None, prob.vector("rotation"), cover, prob.ansatz())
    glob = [e for e in rep.entries if e.assertion == "coboundary of varied currents = 0" and e.verdict == "FAIL"]
    assert glob and all(e.residual != "0" for e in glob)
    assert not rep.passed
    return f"Helmholtz residual {helm}; symmetry residual {gen}; globality fails on {len(glob)} overlaps with residual {glob[0].residual}"


def _random_expr(rng, sp, order=2):
    coords = jet_coords(sp, order)
    e = random_poly(rng, coords, 3, 3)
    if rng.random() < 0.5:
        k = rng.choice([sin, cos, exp])
        e = e * k(Expr.coord(rng.choice(jet_coords(sp, 1)))) + random_poly(rng, coords, 1, 2)
    return e


def _random_form(rng, sp):
    basis = [Form.dx(sp, mu) for mu in range(sp.n)]
    basis += [Form.theta(sp, a, multi) for a in range(sp.m) for multi in sp.multi_indices(1)]
    degree = rng.randint(0, 2)
    out = Form.zero(sp, degree)
    for _ in range(2):
        piece = Form.function(sp, _random_expr(rng, sp, 1))
        for _ in range(degree):
            piece = wedge(piece, rng.choice(basis))
        out = out + piece
    return out


@criterion(10, "kernel identities on random corpora", 60)
def test_criterion_10_kernel():
    rng = random.Random(10001)
    sp = space(2, 2)
    n_expr = 40
    for _ in range(n_expr):
        a, b = _random_expr(rng, sp), _random_expr(rng, sp)
        assert sp.D(sp.D(a, 0), 1) == sp.D(sp.D(a, 1), 0)
        for mu in (0, 1):
            assert sp.D(a * b, mu) == sp.D(a, mu) * b + a * sp.D(b, mu)
    n_form = 40
    for _ in range(n_form):
        f = _random_form(rng, sp)
        assert d_H(d_H(f)).is_zero
        assert d_V(d_V(f)).is_zero
        assert (d_H(d_V(f)) + d_V(d_H(f))).is_zero
    n_cochain = 0
    for make, n in ((s2_cover, 1), (torus_cover, 2)):
        for _ in range(3):
            cover = make(space(n, 2))
            lam = Cochain(0, {k: random_lagrangian(rng, cover.space, 1) for k in cover.keys(0)})
            assert coboundary(coboundary(lam, cover), cover).is_zero
            cur = Cochain(1, {k: random_current(rng, cover.space) for k in cover.keys(1)})
            assert coboundary(coboundary(cur, cover), cover).is_zero
            n_cochain += 2
    return f"{n_expr} expression pairs, {n_form} forms, {n_cochain} cochains"


ALL = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]


if __name__ == "__main__":
    failed = 0
    for fn in ALL:
        try:
            fn()
        except Exception:  # already reported
            failed += 1
    sys.exit(1 if failed else 0)
