"""
Rotations from two fixed axes
=============================

Any rotation of 3-space can be written as an alternating product of
rotations about two fixed, non-parallel axes.  We factor a random rotation
and check the product.
"""

import numpy as np
from scipy.stats import special_ortho_group

from spinsteer.linalg import frob
from spinsteer.so3 import canonicalize_so3, factorize_so3

rng = np.random.default_rng(1)


def skew(v):
    return np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])


# two axes 30 degrees apart: many factors are needed
Z1 = skew([0, 0, 1.0])
Z2 = skew([np.sin(np.pi / 6), 0, np.cos(np.pi / 6)])
pair = canonicalize_so3(Z1, Z2)
print("rho =", pair.rho, " psi =", pair.psi)

X = special_ortho_group.rvs(3, random_state=rng)
seq = pair.to_original(factorize_so3(pair, pair.to_canonical(X)))
print("m =", seq.meta["m"], " factors:", len(seq.steps))
for s in seq.steps:
    print(f"  {s.gen}  {s.t:.4f}")
print("residual:", frob(seq.product() - X))
