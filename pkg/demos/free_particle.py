"""
Free particle: Euler-Lagrange, Noether currents and a non-symmetry
==================================================================

Run with ``python demos/free_particle.py``.
"""
from fractions import Fraction

from jetvar import JetSpace, Lagrangian, VectorField, euler_lagrange, noether_current
from jetvar.noether import check_generalized_symmetry, lie_derive_lagrangian, strong_noether_current

# one base coordinate t, one field u
sp = JetSpace(1, 1, 6, ("t",), ("u",))
u, u_t, t = sp.y(0), sp.y(0, 0), sp.x(0)
lag = Lagrangian(Fraction(1, 2) * u_t**2, sp)

# the equation of motion
eta = euler_lagrange(lag)
print("E_u =", sp.fmt(eta.components[0]))

# shift, time translation and scaling
fields = {
    "shift": VectorField(sp, [0], [1]),
    "time": VectorField(sp, [1], [0]),
    "scale": VectorField(sp, [0], [u]),
}
for name, Xi in fields.items():
    eps = noether_current(lag, Xi)
    varied = lie_derive_lagrangian(lag, Xi)
    print(f"{name:6s} epsilon = {sp.fmt(eps.components[0]):12s} L_Xi lambda = {sp.fmt(varied.expr)}")

# scaling is not a symmetry of the Lagrangian, nor of the equations
rep = check_generalized_symmetry(eta, fields["scale"])
print("scale is a generalized symmetry:", rep.is_generalized_symmetry)

# Galilean boost t d/du changes lambda by a total derivative
boost = VectorField(sp, [0], [t])
print("boost: L_Xi lambda =", sp.fmt(lie_derive_lagrangian(lag, boost).expr))
J = strong_noether_current(lag, eta, boost)
print("boost strong current =", sp.fmt(J.components[0]))

# t^2 d/du is not a symmetry at all: the residual stays nonzero
rep = check_generalized_symmetry(eta, VectorField(sp, [0], [t**2]))
print("t^2 d/du residuals:", [sp.fmt(r) for r in rep.residuals])
