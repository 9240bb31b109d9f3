"""
The 1+1 dimensional wave equation
=================================

Two base coordinates, one field.  Translations in t and x give the
energy and momentum currents; their divergences vanish on shell.
"""
from jetvar.cli import run_command
from jetvar.noether import noether_current, on_shell_zero
from jetvar.problem import load_problem
from jetvar.varseq import euler_lagrange

prob = load_problem("wave_2d")
sp = prob.space
lag = prob.lagrangian_cochain().values[((0,), "all")]
eta = euler_lagrange(lag)
print("E_u =", sp.fmt(eta.components[0]))

for name in ("time", "space"):
    eps = noether_current(lag, prob.vector(name))
    print(name, "current:", [sp.fmt(c) for c in eps.components])
    ok, method, residual = on_shell_zero(eps.divergence(), eta, True, prob.ansatz())
    print("   divergence vanishes on shell:", ok, f"({method})")

# the same through the command interface
print(run_command("noether", prob).to_text())
