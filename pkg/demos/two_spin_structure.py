"""
Structure of the two-spin system
================================

Which propagators can two coupled spins reach?  The answer depends on the
gyromagnetic ratios and the coupling: compute Lie algebra dimensions, the
Cartan split of the homonuclear case and a reachable-set membership test.
"""

import math

import numpy as np

from spinsteer.linalg import expm
from spinsteer.twospin import (build_system, cartan_split, classify_controllability,
                               kak_element, large_time_threshold, member_large_time)

for label, sys_ in [("heteronuclear Ising", build_system(1.0, 0.4, J=1.0, uz_bar=0.2)),
                    ("homonuclear Ising", build_system(1.0, J=1.0, uz_bar=0.2)),
                    ("homonuclear isotropic", build_system(1.0, J=1.0, abc=(1, 1, 1)))]:
    cls, dim = classify_controllability(sys_)
    print(f"{label:24s} dim={dim:2d}  {cls.value}")

sys_ = build_system(1.0, J=1.0)
split = cartan_split(sys_)
print("K dim", split.K.dim, " P dim", split.P.dim, " residuals", split.residuals)

# spectra of the three traceless coupling parts
for name, a in (("A1", sys_.A1), ("A2", sys_.A2), ("A3", sys_.A3)):
    print(name, np.round(np.sort(np.linalg.eigvals(a).imag), 6))

# above the threshold time, reachable = block form after removing exp(DT/3)
T = large_time_threshold(sys_) + 1.0
L = expm(-1j * np.array([[0, 1], [1, 0]]) / 2, 0.7)
X = kak_element(sys_, np.kron(L, L), np.eye(4), (T / 2, T / 3, T / 6), T)
print("kak element reachable:", member_large_time(sys_, X, T))
print("swap gate reachable:", member_large_time(sys_, np.eye(4)[[0, 2, 1, 3]], T))
print("threshold 36 pi/J =", 36 * math.pi)
