"""Bang-bang steering of one spin: generalized Euler factorization of SU(2).

The system is ``dX/dt = (A + B u) X`` with ``A, B`` in su(2) and ``|u| <= M``.
Every target is reached with a piecewise constant control taking only the
values ``+M`` and ``-M``; switching times come from a factorization of the
target into alternating one-parameter subgroups of ``Z1 = A + M B`` and
``Z2 = A - M B``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (SX, SY, SZ, I2, dagger, expm, frob, inner_product,
                     is_skew_hermitian, logm_su2)
from .policy import get_policy
from .schedule import FactorSequence, PulseSchedule, PulseSegment, prune_steps

FOUR_PI = 4 * math.pi


class ProportionalGeneratorsError(ValueError):
    """Raised when two generators that must be independent are proportional."""


# ---------------------------------------------------------------- problem data

@dataclass(frozen=True, eq=False)
class Su2Problem:
    A: np.ndarray
    B: np.ndarray
    M: float

    def __post_init__(self):
        a = np.asarray(self.A, dtype=complex)
        b = np.asarray(self.B, dtype=complex)
        if a.shape != (2, 2) or b.shape != (2, 2):
            raise ValueError("A and B must be 2x2")
        for name, x in (("A", a), ("B", b)):
            if not is_skew_hermitian(x, 1e-10 * max(1.0, frob(x))):
                raise ValueError(f"{name} is not skew-Hermitian")
            if abs(np.trace(x)) > 1e-10 * max(1.0, frob(x)):
                raise ValueError(f"{name} is not traceless")
        if not self.M > 0:
            raise ValueError("control bound M must be positive")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "M", float(self.M))

    @property
    def Z1(self) -> np.ndarray:
        return self.A + self.M * self.B

    @property
    def Z2(self) -> np.ndarray:
        return self.A - self.M * self.B

    @property
    def k(self) -> float:
        return control_authority(self.A, self.B)

    @property
    def independent(self) -> bool:
        nb = frob(self.B)
        if nb == 0 or frob(self.A) == 0:
            return False
        proj = inner_product(self.B, self.A) / inner_product(self.A, self.A)
        return frob(self.B - proj * self.A) > get_policy().rank_tol * nb

    # simulator interface
    @property
    def drift(self) -> np.ndarray:
        return self.A

    @property
    def controls(self) -> tuple:
        return (self.B,)

    def with_bound(self, M: float) -> "Su2Problem":
        return Su2Problem(self.A, self.B, M)

    def to_dict(self) -> dict:
        from .io import matrix_to_dict
        return {"A": matrix_to_dict(self.A), "B": matrix_to_dict(self.B), "M": self.M}


def control_authority(A, B) -> float:
    """``k = sqrt(<A,A> / <B,B>)``."""
    bb = inner_product(B, B)
    if bb == 0:
        raise ValueError("control direction B is zero")
    return math.sqrt(inner_product(A, A) / bb)


def psi_angle(Z1, Z2) -> float:
    """Cosine of the angle between two generators under the trace inner product."""
    n1 = inner_product(Z1, Z1)
    n2 = inner_product(Z2, Z2)
    if n1 == 0 or n2 == 0:
        raise ValueError("psi_angle needs nonzero generators")
    psi = float(np.real(inner_product(Z1, Z2))) / math.sqrt(n1 * n2)
    if abs(psi) >= 1 - get_policy().psi_one_tol:
        raise ProportionalGeneratorsError(
            f"|psi| = {abs(psi):.15f}: generators are proportional")
    return psi


def psi_of_M(problem: Su2Problem | tuple, M: float) -> float:
    """``|psi|`` of ``A + M B`` and ``A - M B`` in closed form, as a function of M."""
    A, B = (problem.A, problem.B) if isinstance(problem, Su2Problem) else problem
    if not M > 0:
        raise ValueError("M must be positive")
    bb = inner_product(B, B)
    k2 = inner_product(A, A) / bb
    c = inner_product(A, B) / bb
    den = (k2 + M * M) ** 2 - 4 * M * M * c * c
    if den <= 0:
        raise ProportionalGeneratorsError("A and B are proportional; psi(M) undefined")
    # (k - M)(k + M) with k computed exactly as in control_authority, so psi(k) == 0
    k = math.sqrt(k2)
    return abs((k - M) * (k + M)) / math.sqrt(den)


def lowenthal_order(psi: float) -> int:
    """Order of generation of SU(2) by two subgroups at angle cosine ``psi``."""
    a = abs(psi)
    if a >= 1:
        raise ValueError("|psi| must be < 1")
    if a <= 1e-12:
        return 3
    f = 2
    while not (math.cos(math.pi / f) < a <= math.cos(math.pi / (f + 1))):
        f += 1
    return f + 2


def lowenthal_f(psi: float) -> int | None:
    """The integer ``f`` of the Lowenthal bracket (``None`` when psi = 0)."""
    if abs(psi) <= 1e-12:
        return None
    return lowenthal_order(psi) - 2


# ---------------------------------------------------------------- frames

@dataclass(frozen=True, eq=False)
class CanonicalFrame:
    """Unitary ``W`` with ``W Z1 W* = -2i lambda1 S_z`` and ``W Z2 W* = -i(c S_z + r S_y)``."""

    W: np.ndarray
    lambda1: float
    lambda2: float
    psi: float
    c: float
    r: float
    Z1: np.ndarray
    Z2: np.ndarray

    def to_frame(self, x) -> np.ndarray:
        return self.W @ x @ dagger(self.W)

    def from_frame(self, x) -> np.ndarray:
        return dagger(self.W) @ x @ self.W

    def invariant_errors(self) -> dict:
        wz1 = self.to_frame(self.Z1)
        wz2 = self.to_frame(self.Z2)
        return {
            "z1_diag": frob(wz1 + 2j * self.lambda1 * SZ),
            "z2_no_x": abs(2 * np.trace(1j * wz2 @ SX)),
            "z2_form": frob(wz2 + 1j * (self.c * SZ + self.r * SY)),
            "unitary": frob(self.W @ dagger(self.W) - I2),
        }


def eigenphase(z) -> float:
    """Magnitude of the imaginary eigenvalues of a traceless su(2) element."""
    return math.sqrt(max(0.0, inner_product(z, z) / 2))


def canonical_frame(Z1, Z2) -> CanonicalFrame:
    Z1 = np.asarray(Z1, dtype=complex)
    Z2 = np.asarray(Z2, dtype=complex)
    psi = psi_angle(Z1, Z2)
    w, v = np.linalg.eigh(0.5 * (1j * Z1 + dagger(1j * Z1)))
    lam1 = float(w[1])
    if lam1 <= 0:
        raise ValueError("Z1 must be nonzero")
    T1 = dagger(v[:, ::-1])
    g = T1 @ (1j * Z2) @ dagger(T1)
    a = float(np.real(2 * np.trace(g @ SY)))
    b = float(np.real(2 * np.trace(g @ SX)))
    c = float(np.real(2 * np.trace(g @ SZ)))
    r = math.hypot(a, b)
    if r <= get_policy().rank_tol * max(1.0, frob(Z2)):
        raise ProportionalGeneratorsError("Z2 is parallel to Z1")
    T2 = np.diag([1.0, (a + 1j * b) / r])
    W = T2 @ T1
    W = W / np.sqrt(np.linalg.det(W))
    return CanonicalFrame(W, lam1, eigenphase(Z2), psi, c, r, Z1, Z2)


# ---------------------------------------------------------------- Euler angles

@dataclass(frozen=True)
class EulerTriple:
    """``exp(-i S_z alpha) exp(-i S_y beta) exp(-i S_z gamma)``."""

    alpha: float
    beta: float
    gamma: float

    def matrix(self) -> np.ndarray:
        return euler_matrix(self.alpha, self.beta, self.gamma)


def euler_matrix(alpha, beta, gamma) -> np.ndarray:
    return expm(-1j * SZ, alpha) @ expm(-1j * SY, beta) @ expm(-1j * SZ, gamma)


def _wrap(angle: float, period: float) -> float:
    a = angle % period
    if period - a < 1e-13:
        a = 0.0
    return a


def euler_extract(X) -> EulerTriple:
    """Euler angles of an SU(2) matrix.

    alpha, gamma in [0, 4 pi), beta in [0, pi].  When beta is 0 or pi the
    split between alpha and gamma is free; gamma is set to 0.
    """
    X = np.asarray(X, dtype=complex)
    x11, x21 = X[0, 0], X[1, 0]
    c, s = abs(x11), abs(x21)
    if s < 1e-13:
        return EulerTriple(_wrap(-2 * np.angle(x11), FOUR_PI), 0.0, 0.0)
    if c < 1e-13:
        return EulerTriple(_wrap(2 * np.angle(x21), FOUR_PI), math.pi, 0.0)
    beta = 2 * math.atan2(s, c)
    tot = -2 * np.angle(x11)
    diff = 2 * np.angle(x21)
    return EulerTriple(_wrap((tot + diff) / 2, FOUR_PI), beta,
                       _wrap((tot - diff) / 2, FOUR_PI))


# ---------------------------------------------------------------- factorization

def minimal_m(beta: float, psi: float) -> int:
    """Smallest positive m with cos^2(beta / 2m) >= psi^2."""
    m = 1
    # |psi| below 1e-12 counts as orthogonal, as in lowenthal_order
    p2 = 0.0 if abs(psi) <= 1e-12 else psi * psi
    while math.cos(beta / (2 * m)) ** 2 < p2:
        m += 1
    return m


def block_times(frame: CanonicalFrame, beta: float, m: int):
    """Durations (t1, t2, t3) and angle phi of the repeated three-factor block."""
    psi = frame.psi
    ratio = (math.cos(beta / (2 * m)) ** 2 - psi * psi) / (1 - psi * psi)
    ratio = min(1.0, max(0.0, ratio))
    l2t2 = math.acos(math.sqrt(ratio))
    t2 = l2t2 / frame.lambda2
    if abs(l2t2 - math.pi / 2) < 1e-12:
        phi = -math.copysign(math.pi / 2, psi) if psi != 0 else 0.0
    else:
        phi = math.atan2(-psi * math.sin(l2t2), math.cos(l2t2))
    if abs(phi) < 1e-15:
        phi = 0.0
    t1 = (phi if phi >= 0 else 2 * math.pi + phi) / (2 * frame.lambda1)
    return t1, t2, t1, phi


def factorize_theorem2(frame: CanonicalFrame, X_f) -> FactorSequence:
    """Factor ``X_f`` as ``e^{Z1 a}(e^{Z1 t1} e^{Z2 t2} e^{Z1 t3})^m e^{Z1 g}``.

    The smallest admissible ``m`` is used.  Steps are listed leftmost first;
    zero-duration factors are moved to ``pruned``.
    """
    X_f = np.asarray(X_f, dtype=complex)
    if X_f.shape != frame.W.shape:
        raise ValueError(f"target shape {X_f.shape} does not match frame {frame.W.shape}")
    euler = euler_extract(frame.to_frame(X_f))
    m = minimal_m(euler.beta, frame.psi)
    t1, t2, t3, phi = block_times(frame, euler.beta, m)
    lam1 = frame.lambda1
    raw = [("Z1", euler.alpha / (2 * lam1))]
    raw += [("Z1", t1), ("Z2", t2), ("Z1", t3)] * m
    raw.append(("Z1", euler.gamma / (2 * lam1)))
    kept, dropped = prune_steps(raw)
    seq = FactorSequence(kept, {"Z1": frame.Z1, "Z2": frame.Z2}, target=X_f, pruned=dropped,
                         meta={"m": m, "t1": t1, "t2": t2, "t3": t3, "phi": phi,
                               "euler": euler, "inner_factor_count": 2 * m + 1,
                               "frame": frame})
    seq.meta["residual"] = seq.residual
    return seq


# ---------------------------------------------------------------- schedules

def _schedule_from_sequence(seq: FactorSequence, values: dict) -> PulseSchedule:
    # the rightmost factor acts first
    segs = [PulseSegment(float(s.t), values[s.gen]) for s in reversed(seq.steps)]
    return PulseSchedule(segs)


def steer_theorem1(problem: Su2Problem, X_f) -> PulseSchedule:
    """Three-segment schedule with u in {+k, -k} (k the control authority)."""
    if frob(problem.A) == 0 or frob(problem.B) == 0:
        raise ValueError("Theorem-1 steering needs nonzero A and B")
    if not problem.independent:
        raise ProportionalGeneratorsError("A and B are proportional")
    k = problem.k
    if k > problem.M * (1 + 1e-12):
        raise ValueError(f"control authority k={k} exceeds the bound M={problem.M}")
    frame = canonical_frame(problem.A + k * problem.B, problem.A - k * problem.B)
    lam = 2 * frame.lambda1
    r = frame.r
    e = euler_extract(frame.to_frame(np.asarray(X_f, dtype=complex)))
    raw = [(e.gamma / lam, k), (e.beta / r, -k), (e.alpha / lam, k)]
    segs = [PulseSegment(dt, u) for dt, u in raw if dt > 0]
    return PulseSchedule(segs, meta={"frame": frame, "euler": e, "k": k})


def steer_proportional(problem: Su2Problem, X_f) -> PulseSchedule:
    """Single-segment steering when A is a multiple of B.

    Works only when ``X_f`` lies on the one-parameter subgroup of B.
    """
    A, B = problem.A, problem.B
    X_f = np.asarray(X_f, dtype=complex)
    if frob(B) == 0:
        raise ValueError("control direction B is zero")
    bb = inner_product(B, B)
    a = inner_product(A, B) / bb
    L, degenerate = logm_su2(X_f, return_flag=True)
    lam_b = eigenphase(B)
    period = 2 * math.pi / lam_b
    if degenerate:
        ell = math.pi / lam_b
    else:
        ell = inner_product(L, B) / bb
        if frob(L - ell * B) > 1e-9 * max(1.0, frob(L)):
            raise ValueError("target is not on the one-parameter subgroup of B; "
                             "with proportional A and B it is unreachable")
    u = problem.M if a >= 0 else -problem.M
    rate = a + u
    ell = ell % period
    if ell < 1e-14 or period - ell < 1e-14:
        return PulseSchedule([])
    if rate < 0:
        ell -= period
    return PulseSchedule([PulseSegment(ell / rate, u)])


def steer_theorem3(problem: Su2Problem, X_f) -> PulseSchedule:
    """Bang-bang schedule (values +M / -M) reaching ``X_f``.

    Proportional A, B are routed to :func:`steer_proportional`.
    """
    if not problem.independent:
        return steer_proportional(problem, X_f)
    frame = canonical_frame(problem.Z1, problem.Z2)
    seq = factorize_theorem2(frame, X_f)
    sched = _schedule_from_sequence(seq, {"Z1": problem.M, "Z2": -problem.M})
    sched.meta.update(sequence=seq, frame=frame)
    return sched


def conjugators(frame: CanonicalFrame):
    """The two SU(2) elements that flip ``Z1`` (pi rotations about the frame y axis)."""
    plus = frame.from_frame(expm(1j * SY, math.pi))
    minus = frame.from_frame(expm(-1j * SY, math.pi))
    return plus, minus


def padding_parts(problem: Su2Problem):
    frame = canonical_frame(problem.Z1, problem.Z2)
    plus, minus = conjugators(frame)
    return steer_theorem3(problem, plus), steer_theorem3(problem, minus)


def min_padding_time(problem: Su2Problem) -> float:
    s_plus, s_minus = padding_parts(problem)
    return s_plus.total_time + s_minus.total_time


def pad_to_time(problem: Su2Problem, schedule: PulseSchedule, T_target: float) -> PulseSchedule:
    """Extend ``schedule`` so that it ends at the same endpoint at exactly ``T_target``.

    Appends: evolve with u=M for t, steer to one conjugator, evolve with u=M
    for t, steer to the other.  The two free evolutions cancel.
    """
    s_plus, s_minus = padding_parts(problem)
    base = schedule.total_time
    fixed = math.fsum([base, s_plus.total_time, s_minus.total_time])
    slack = T_target - fixed
    if slack < -1e-12 * max(1.0, T_target):
        raise ValueError(f"T_target={T_target} is below the minimum {fixed}")
    slack = max(slack, 0.0)
    tbar = slack / 2
    segs = list(schedule.segments)
    if tbar > 0:
        segs.append(PulseSegment(tbar, problem.M))
    segs += s_plus.segments
    if tbar > 0:
        # second half absorbs rounding so the total is T_target to the last bit
        rest = T_target - math.fsum([s.dt for s in segs] + [s.dt for s in s_minus.segments])
        segs.append(PulseSegment(rest, problem.M))
    segs += s_minus.segments
    return PulseSchedule(segs, meta={"tbar": tbar, "padding_min": fixed - base})
