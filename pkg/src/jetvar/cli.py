"""``varseq`` command-line interface.

    varseq <cmd> <problem-file> [--field NAME] [--ansatz-degree N] [--quad-nodes N]
                                [--tolerance X] [--out PATH] [--format text|kv]

Exit status: 0 when every assertion passes, 1 when a verdict fails, 2 on errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .cech import (
    DEFAULT_TOLERANCE,
    Cochain,
    coboundary,
    connecting_delta,
    connecting_delta_prime,
    lie_derive_cochain,
)
from .errors import JetVarError, ProblemSyntaxError
from .jetforms import Form, d_H, d_V
from .noether import (
    check_generalized_symmetry,
    lie_derive_current,
    lie_derive_lagrangian,
    lie_derive_source,
    noether_current,
    strong_noether_parts,
    verify_lemma2,
    verify_lemma3_and_theorem,
)
from .problem import ProblemFile, load_problem
from .report import Report
from .symexpr import expr_sum
from .varseq import (
    Lagrangian,
    euler_lagrange,
    first_variation_defect,
    helmholtz_check,
    solve_dH_exact,
    tonti_lagrangian,
)


class Context:
    """A parsed problem plus command-line overrides."""

    def __init__(self, prob: ProblemFile, args):
        self.prob = prob
        self.space = prob.space
        self.cover = prob.cover()
        self.field_name = getattr(args, "field", None)
        ansatz = prob.ansatz()
        if getattr(args, "ansatz_degree", None) is not None:
            ansatz = replace(ansatz, max_poly_degree=args.ansatz_degree)
        self.ansatz = ansatz
        self.nodes = getattr(args, "quad_nodes", None) or prob.options.get("quad-nodes")
        self.tolerance = getattr(args, "tolerance", None) or prob.options.get("tolerance", DEFAULT_TOLERANCE)
        self.fallback = prob.options.get("fallback", True)

    def loc(self, key) -> str:
        return self.cover.location_name(key)

    def fmt(self, e) -> str:
        return self.space.fmt(e)

    def lagrangians(self) -> Cochain:
        return self.prob.lagrangian_cochain(self.cover)

    def sources(self) -> Cochain:
        """Declared source forms, else Euler-Lagrange forms of the Lagrangians."""
        if self.prob.sources:
            return self.prob.source_cochain(self.cover)
        lam = self.lagrangians()
        return Cochain(0, {k: euler_lagrange(v) for k, v in lam.values.items()}, "source")

    def field(self):
        return self.prob.vector(self.field_name)

    def require(self, what: str, cochain: Cochain) -> Cochain:
        if not cochain.values:
            raise JetVarError(f"command needs at least one {what} in the problem file")
        return cochain

    def header(self, rep: Report) -> Report:
        rep.set("problem", self.prob.name)
        rep.set("cover", self.cover.name)
        return rep


def _components(ctx: Context, comps) -> str:
    return ", ".join(f"{ctx.prob.fields[a]}: {ctx.fmt(c)}" for a, c in enumerate(comps))


# -------------------------------------------------------------- commands
def cmd_el(ctx: Context) -> Report:
    rep = ctx.header(Report("Euler-Lagrange expressions"))
    declared = ctx.prob.source_cochain(ctx.cover) if ctx.prob.sources else None
    for key, lag in ctx.require("lagrangian", ctx.lagrangians()).values.items():
        eta = euler_lagrange(lag)
        for a, c in enumerate(eta.components):
            rep.note(ctx.loc(key), f"E_{ctx.prob.fields[a]}", ctx.fmt(c))
        defect = first_variation_defect(lag) if lag.order <= 2 else None
        if defect is not None:
            rep.check(ctx.loc(key), "d_V lambda - eta + d_H p = 0", defect.to_str(), defect.is_zero)
        if declared is not None and key in declared.values:
            diff = eta - declared.values[key]
            rep.check(ctx.loc(key), "E(lambda) = declared source", diff, diff.is_zero)
    return rep


def cmd_helmholtz(ctx: Context) -> Report:
    rep = ctx.header(Report("Helmholtz conditions"))
    for key, eta in ctx.require("source form or lagrangian", ctx.sources()).values.items():
        res = helmholtz_check(eta)
        rep.check(ctx.loc(key), "self-adjoint linearization", _components(ctx, res.residuals), res.is_locally_variational)
    return rep


def cmd_tonti(ctx: Context) -> Report:
    rep = ctx.header(Report("homotopy Lagrangians"))
    for key, eta in ctx.require("source form or lagrangian", ctx.sources()).values.items():
        res = helmholtz_check(eta)
        if not rep.check(ctx.loc(key), "self-adjoint linearization", _components(ctx, res.residuals), res.is_locally_variational):
            continue
        lag = tonti_lagrangian(eta)
        rep.note(ctx.loc(key), "lambda", lag)
        diff = euler_lagrange(lag) - eta
        rep.check(ctx.loc(key), "E(lambda) = eta", diff, diff.is_zero)
    return rep


def cmd_noether(ctx: Context) -> Report:
    rep = ctx.header(Report("canonical Noether currents"))
    Xi = ctx.field()
    rep.set("field", Xi.name)
    for key, lag in ctx.require("lagrangian", ctx.lagrangians()).values.items():
        loc = ctx.loc(key)
        eps = noether_current(lag, Xi)
        varied = lie_derive_lagrangian(lag, Xi)
        rep.note(loc, "epsilon", eps)
        rep.note(loc, "L_Xi lambda", varied)
        pair = expr_sum(c * e for c, e in zip(Xi.evolutionary(), euler_lagrange(lag).components))
        res = varied.expr - pair - eps.divergence()
        rep.check(loc, "L_Xi lambda - Xi_V . E - d_H epsilon = 0", ctx.fmt(res), res.is_zero)
        rep.note(loc, "Lagrangian symmetry (L_Xi lambda = 0)", varied.is_zero)
    return rep


def cmd_strong_noether(ctx: Context) -> Report:
    rep = ctx.header(Report("strong Noether currents"))
    Xi = ctx.field()
    rep.set("field", Xi.name)
    etas = ctx.sources()
    for key, lag in ctx.require("lagrangian", ctx.lagrangians()).values.items():
        loc = ctx.loc(key)
        ansatz = ctx.ansatz.with_angles(ctx.cover.angle_fields(key))
        sym = check_generalized_symmetry(etas.values[key], Xi, ansatz=ansatz)
        if not rep.check(loc, "generalized symmetry E(Xi_V . eta) = 0", _components(ctx, sym.residuals), sym.is_generalized_symmetry):
            continue
        nu, eps = strong_noether_parts(lag, etas.values[key], Xi, ansatz)
        rep.note(loc, "nu", nu)
        rep.note(loc, "epsilon", eps)
        rep.note(loc, "nu + epsilon", nu + eps)
        res = (nu + eps).divergence() - lie_derive_lagrangian(lag, Xi).expr
        rep.check(loc, "d_H(nu + epsilon) = L_Xi lambda", ctx.fmt(res), res.is_zero)
    return rep


def cmd_lie(ctx: Context) -> Report:
    rep = ctx.header(Report("variational Lie derivatives"))
    Xi = ctx.field()
    rep.set("field", Xi.name)
    lam = ctx.lagrangians()
    for key, lag in lam.values.items():
        loc = ctx.loc(key)
        varied = lie_derive_lagrangian(lag, Xi)
        rep.note(loc, "L_Xi lambda", varied)
        eta = euler_lagrange(lag)
        src = lie_derive_source(eta, lag, Xi)
        rep.note(loc, "L_Xi eta", _components(ctx, src.components))
        diff = src - euler_lagrange(varied)
        rep.check(loc, "L_Xi E(lambda) = E(L_Xi lambda)", _components(ctx, diff.components), diff.is_zero)
    for key, eta in (ctx.prob.source_cochain(ctx.cover).values.items() if ctx.prob.sources else ()):
        src = lie_derive_source(eta, None, Xi)
        rep.note(ctx.loc(key), "L_Xi eta", _components(ctx, src.components))
    return rep


def _delta_report(ctx: Context, rep: Report) -> Report:
    lam = ctx.lagrangians()
    etas = ctx.sources()
    values = ctx.prob.param_values()
    locally_trivial = lam.values and all(e.is_zero for e in etas.values.values())
    if locally_trivial:
        res = connecting_delta_prime(lam, ctx.cover, ansatz=ctx.ansatz, values=values, nodes=ctx.nodes, tolerance=ctx.tolerance)
        symbol = "δ′"
        for key, nu in res.potentials.values.items():
            rep.note(ctx.loc(key), "nu", nu)
        for key, v in res.cocycle.values.items():
            rep.note(ctx.loc(key), "coboundary(nu)", v)
    else:
        for key, eta in etas.values.items():
            h = helmholtz_check(eta)
            rep.check(ctx.loc(key), "self-adjoint linearization", _components(ctx, h.residuals), h.is_locally_variational)
        res = connecting_delta(
            etas, ctx.cover, lagrangians=lam if lam.values else None, ansatz=ctx.ansatz,
            values=values, nodes=ctx.nodes, tolerance=ctx.tolerance,
        )
        symbol = "δ"
        for key, lag in res.potentials.values.items():
            rep.note(ctx.loc(key), "lambda", lag)
        for key, g in res.gamma.values.items():
            rep.note(ctx.loc(key), "gamma", g)
        for key, v in res.cocycle.values.items():
            rep.note(ctx.loc(key), "coboundary(gamma)", v)
    for name, p in res.periods.items():
        rep.set(f"period.{name}", f"{p:.12f}")
    if not res.periods:
        rep.set("class", f"{symbol} undetermined (no cycles of matching dimension)")
    else:
        rep.set("class", f"{symbol} ≠ 0" if res.nonzero else f"{symbol} = 0")
    return rep


def cmd_cech_class(ctx: Context) -> Report:
    return _delta_report(ctx, ctx.header(Report("cohomology class of the local data")))


def cmd_verify_lemma1(ctx: Context) -> Report:
    rep = ctx.header(Report("Lie derivatives of local data have trivial classes"))
    Xi = ctx.field()
    rep.set("field", Xi.name)
    lam = ctx.require("lagrangian", ctx.lagrangians())
    etas = ctx.sources()
    values = ctx.prob.param_values()
    for key, lag in lam.values.items():
        loc = ctx.loc(key)
        varied = lie_derive_lagrangian(lag, Xi)
        diff = lie_derive_source(etas.values[key], lag, Xi) - euler_lagrange(varied)
        rep.check(loc, "L_Xi E(lambda) = E(L_Xi lambda)", _components(ctx, diff.components), diff.is_zero)
    varied_lam = lie_derive_cochain(lam, Xi, ctx.cover)
    lhs = coboundary(varied_lam, ctx.cover)
    rhs = lie_derive_cochain(coboundary(lam, ctx.cover), Xi, ctx.cover)
    for key in lhs.values:
        d = lhs.values[key] - rhs.values[key]
        rep.check(ctx.loc(key), "coboundary(L_Xi lambda) = L_Xi coboundary(lambda)", d, d.is_zero)
    if all(e.is_zero for e in etas.values.values()):
        # locally trivial data: potentials, commutation and delta' of the varied cochain
        nus = {}
        for key, lag in lam.values.items():
            nu = solve_dH_exact(lag, ctx.ansatz.with_angles(ctx.cover.angle_fields(key)))
            J = lie_derive_current(nu, Xi)
            nus[key] = J
            res = J.divergence() - lie_derive_lagrangian(Lagrangian(nu.divergence(), ctx.space), Xi).expr
            rep.check(ctx.loc(key), "d_H L_Xi nu = L_Xi d_H nu", ctx.fmt(res), res.is_zero)
        base = connecting_delta_prime(lam, ctx.cover, ansatz=ctx.ansatz, values=values, nodes=ctx.nodes)
        for name, p in base.periods.items():
            rep.set(f"period.{name}", f"{p:.12f}")
        out = connecting_delta_prime(
            varied_lam, ctx.cover, potentials=Cochain(0, nus, "current"), ansatz=ctx.ansatz,
            values=values, nodes=ctx.nodes,
        )
        for name, p in out.periods.items():
            rep.check(name, "δ′ period of L_Xi-derived cochain = 0", f"{p:.3e}", abs(p) <= ctx.tolerance)
    else:
        varied_eta = lie_derive_cochain(etas, Xi, ctx.cover)
        out = connecting_delta(varied_eta, ctx.cover, lagrangians=varied_lam, ansatz=ctx.ansatz, values=values, nodes=ctx.nodes)
        for name, p in out.periods.items():
            rep.check(name, "δ period of L_Xi-derived cochain = 0", f"{p:.3e}", abs(p) <= ctx.tolerance)
    return rep


def cmd_verify_lemma2(ctx: Context) -> Report:
    rep = ctx.header(Report("second-variation identity"))
    Xi = ctx.field()
    rep.set("field", Xi.name)
    rep.extend(verify_lemma2(ctx.require("lagrangian", ctx.lagrangians()), ctx.sources(), Xi, ctx.cover, ctx.ansatz))
    return rep


def cmd_verify_lemma3(ctx: Context) -> Report:
    rep = ctx.header(Report("conservation and globality of varied strong currents"))
    Xi = ctx.field()
    rep.set("field", Xi.name)
    rep.extend(
        verify_lemma3_and_theorem(
            ctx.require("lagrangian", ctx.lagrangians()), ctx.sources(), Xi, ctx.cover, ctx.ansatz, ctx.fallback
        )
    )
    return rep


def cmd_selftest(ctx: Context) -> Report:
    """Complex identities on the problem's own data."""
    rep = ctx.header(Report("self test"))
    for key, lag in ctx.lagrangians().values.items():
        loc = ctx.loc(key)
        form = lag.to_form()
        for name, val in (
            ("d_H d_H = 0", d_H(d_H(Form.function(ctx.space, lag.expr)))),
            ("d_V d_V = 0", d_V(d_V(form))),
            ("d_H d_V + d_V d_H = 0", d_H(d_V(form)) + d_V(d_H(form))),
        ):
            rep.check(loc, name, val.to_str(), val.is_zero)
        eta = euler_lagrange(lag)
        h = helmholtz_check(eta)
        rep.check(loc, "Helmholtz(E(lambda)) = 0", _components(ctx, h.residuals), h.is_locally_variational)
        if lag.order <= 2:
            defect = first_variation_defect(lag)
            rep.check(loc, "first variation identity", defect.to_str(), defect.is_zero)
    lam = ctx.lagrangians()
    dd = coboundary(coboundary(lam, ctx.cover), ctx.cover)
    rep.check("cover", "coboundary twice = 0", len([v for v in dd.values.values() if not v.is_zero]), dd.is_zero)
    return rep


COMMANDS = {
    "el": cmd_el,
    "helmholtz": cmd_helmholtz,
    "tonti": cmd_tonti,
    "noether": cmd_noether,
    "strong-noether": cmd_strong_noether,
    "lie": cmd_lie,
    "cech-class": cmd_cech_class,
    "verify-lemma1": cmd_verify_lemma1,
    "verify-lemma2": cmd_verify_lemma2,
    "verify-lemma3": cmd_verify_lemma3,
    "selftest": cmd_selftest,
}


def run_command(cmd: str, prob: ProblemFile, args=None) -> Report:
    if cmd not in COMMANDS:
        raise JetVarError(f"unknown command {cmd!r}")
    ctx = Context(prob, args or argparse.Namespace())
    rep = COMMANDS[cmd](ctx)
    rep.set("command", cmd)
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="varseq", description="variational sequence computations on jet spaces")
    ap.add_argument("cmd", choices=sorted(COMMANDS))
    ap.add_argument("problem", help="problem file, or the name of a shipped problem")
    ap.add_argument("--field", help="vector field name (default: first declared)")
    ap.add_argument("--ansatz-degree", type=int)
    ap.add_argument("--quad-nodes", type=int)
    ap.add_argument("--tolerance", type=float)
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("text", "kv"), default="text")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        prob = load_problem(args.problem)
        rep = run_command(args.cmd, prob, args)
    except ProblemSyntaxError as exc:
        print(f"{args.problem}:{exc}", file=sys.stderr)
        return 2
    except (JetVarError, OSError, ValueError) as exc:
        print(f"varseq {args.cmd}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = rep.to_kv() if args.format == "kv" else rep.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
