"""Bang-bang steering of one and two spin-1/2 systems.

Submodules: ``linalg`` (matrix exponentials, Lie closure), ``su2`` (one-spin
factorization and schedules), ``so3`` (rotation factorization), ``twospin``
(two-spin model and reachable sets), ``synth`` (two-spin pulse synthesis),
``simulate`` (propagation and verification), ``io`` and ``cli``.
"""
from .policy import NumericPolicy, get_policy, set_policy, use_policy
from .schedule import FactorSequence, Modulation, PiTime, PulseSchedule, PulseSegment, Step
from .simulate import SimResult, simulate, verify
from .su2 import (Su2Problem, canonical_frame, factorize_theorem2, lowenthal_order,
                  psi_of_M, steer_theorem1, steer_theorem3)
from .so3 import canonicalize_so3, factorize_so3
from .twospin import SpinSystem, build_system, classify_controllability, member_large_time
from .synth import ScaledFrame, TwoSpinTarget, murnaghan_decompose, synth_full

__version__ = "0.1.0"
