"""
Charged particle around a magnetic monopole
===========================================

The equations of motion are global on the sphere, but the Lagrangian
has to be written with different gauge potentials on the northern and
southern charts.  The charts' Lagrangians differ by 2 g ph_t, a total
derivative of the multivalued 2 g ph, and the period of the obstruction
over the equator is 4 pi g.
"""
import math

from jetvar.cech import coboundary, connecting_delta
from jetvar.noether import verify_lemma3_and_theorem
from jetvar.problem import load_problem
from jetvar.varseq import euler_lagrange

prob = load_problem("monopole_s2")
cover = prob.cover()
sp = prob.space
lam = prob.lagrangian_cochain(cover)

# equations of motion agree on every chart
eta = lam.map(euler_lagrange)
first = eta.values[cover.chart_key(0)]
for a, comp in enumerate(first.components):
    print(f"E_{prob.fields[a]} =", sp.fmt(comp))
print("equations agree on overlaps:", coboundary(eta, cover).is_zero)

# the Lagrangians do not
for key, diff in coboundary(lam, cover).values.items():
    if not diff.is_zero:
        print(cover.location_name(key), "lambda_j - lambda_i =", sp.fmt(diff.expr))
        break

for g in (1.0, 0.5, 2.0):
    res = connecting_delta(eta, cover, lam, values={"g": g})
    print(f"g = {g}: equator period {res.periods['equator']:.12f}, 4 pi g = {4 * math.pi * g:.12f}")

# rotation about the axis: conserved charge, globally defined after variation
rep = verify_lemma3_and_theorem(lam, None, prob.vector("rotation"), cover, prob.ansatz())
for e in rep.entries:
    if e.location == "N_E" and e.verdict == "INFO":
        print(e.assertion, "=", e.residual)
print("all checks pass:", rep.passed)
