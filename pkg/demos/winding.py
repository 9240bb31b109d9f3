"""
Winding on the circle: a Lagrangian that is locally a total derivative
======================================================================

On R x S1 the Lagrangian th_t has no equations of motion, and in every
chart it is d/dt of the angle.  The angle is not a global function, so
the potentials differ by 2 pi on one overlap component and the period
over the fiber circle is 2 pi.
"""
import math

import numpy as np

from jetvar.cech import coboundary, connecting_delta_prime, lie_derive_cochain
from jetvar.problem import load_problem

prob = load_problem("winding_s1")
cover = prob.cover()
mu = prob.lagrangian_cochain(cover)
sp = prob.space

res = connecting_delta_prime(mu, cover)
for key, nu in res.potentials.values.items():
    print(cover.location_name(key), "nu =", sp.fmt(nu.components[0]))
for key, jump in res.cocycle.values.items():
    print(cover.location_name(key), "nu_j - nu_i =", sp.fmt(jump.components[0]))
print("fiber-circle period:", res.periods["fiber-circle"], "2 pi =", 2 * math.pi)

# quadrature is exact for this integrand at any node count
nodes = np.array([4, 8, 16, 64])
errors = [abs(connecting_delta_prime(mu, cover, nodes=int(k)).periods["fiber-circle"] - 2 * math.pi) for k in nodes]
print("period error by node count:", dict(zip(nodes.tolist(), errors)))

# rotating the circle kills the Lagrangian, and with it the class
rot = prob.vector("rotation")
varied = lie_derive_cochain(mu, rot, cover)
print("L_rot mu is zero:", varied.is_zero)
print("coboundary of the varied cochain is zero:", coboundary(varied, cover).is_zero)
