"""
Bang-bang steering of a single spin
===================================

A spin-1/2 in a fixed field, driven by one bounded control, can reach any
SU(2) target using only the two extreme control values.  This script builds
such a schedule, simulates it and looks at how the number of switches
depends on the control bound.
"""

import numpy as np
from scipy.stats import unitary_group

from spinsteer.linalg import SX, SZ
from spinsteer.simulate import simulate, verify
from spinsteer.su2 import Su2Problem, lowenthal_order, psi_of_M, steer_theorem3

# drift along z, control along x
A = -1j * 1.0 * SZ
B = -1j * SX
rng = np.random.default_rng(0)
target = unitary_group.rvs(2, random_state=rng)
target /= np.sqrt(np.linalg.det(target))

problem = Su2Problem(A, B, M=0.3)
print("control authority k =", problem.k)

sched = steer_theorem3(problem, target)
print("segments (duration, control):")
for seg in sched.segments:
    print(f"  {seg.dt:8.4f}  {seg.ux:+.2f}")

res = simulate(problem, sched, target)
print("simulated residual:", res.residual_to_target)

rep = verify(sched.meta["sequence"])
print("factor count", rep.inner_factor_count, "bound", rep.lowenthal_order)

# switches needed in the worst case, as the bound varies
for M in (0.05, 0.3, 1.0, 3.0, 20.0):
    psi = psi_of_M(problem, M)
    print(f"M={M:6.2f}  |psi|={psi:.4f}  order={lowenthal_order(psi)}")
