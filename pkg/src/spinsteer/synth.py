"""Pulse synthesis for two homonuclear spins with Ising coupling.

Work happens in a rescaled, rotated frame.  In diagonalizing coordinates
(``twospin.T_DIAG``) with time ``tau = (J/6) t`` and controls
``v_x = gamma (6/J) u_x``, ``v_y = -gamma (6/J) u_y``, the dynamics is

    dX/dtau = (A_s + vz B_z + v_x B_x + v_y B_y) X,

with ``B_x, B_y, B_z`` the so(3) basis ``S12, S13, S23`` embedded in the
lower 3x3 block.  The rotating frame ``S = exp(-(D/3 + vz B_z) tau) X``
satisfies ``dS/dtau = (A1 + k B) S`` with constant ``k`` when the lab
controls are the modulated recipes of :func:`rotating_frame_controls`.
Everything is synthesized for ``S`` with constant pulses and finally mapped
back to modulated lab-frame segments.

Conventions fixed by direct matrix checks (see the tests):

* effective ``k B_x``: ``v_x = k cos(vz tau)``, ``v_y = -k sin(vz tau)``;
  effective ``k B_y``: ``v_x = k sin(vz tau)``, ``v_y = k cos(vz tau)``.
* ``exp(-A1 s) exp(B_x th) exp(A1 s) = U12(th, 3 s + pi)``, likewise for
  ``U13`` with ``B_y``.  ``A1`` commutes with ``B_z`` so ``U23`` is built as
  ``R U13(th, sigma + pi) R^-1`` with ``R = exp(B_x pi/2)``.
* ``exp(B_z t) = R^-1 exp(B_y t) R``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import dagger, expm, frob, so_basis
from .schedule import FactorSequence, Modulation, PiTime, PulseSchedule, PulseSegment, Step, sum_times
from .su2 import Su2Problem, canonical_frame, minimal_m, steer_theorem3
from .twospin import TO_DIAG, TO_LAB, SpinSystem, block_form_error

TWO_PI = 2 * math.pi

# 3x3 blocks (indices 2..4 of the 4x4 diagonalized coordinates)
BX3 = so_basis(1, 2)
BY3 = so_basis(1, 3)
BZ3 = so_basis(2, 3)
A1_3 = 1j * np.diag([2.0, -1.0, -1.0])
F_X = -1j * np.diag([0.5, 0.5, -1.0])
A1T_X = -1j * np.diag([-1.5, 1.5, 0.0])
_AXES = {"x": BX3, "y": BY3}


def embed(block) -> np.ndarray:
    """``diag(1, block)`` for a 3x3 group element."""
    out = np.eye(4, dtype=complex)
    out[1:, 1:] = block
    return out


def embed_alg(block) -> np.ndarray:
    """``diag(0, block)`` for a 3x3 algebra element."""
    out = np.zeros((4, 4), dtype=complex)
    out[1:, 1:] = block
    return out


# ---------------------------------------------------------------- frames

@dataclass(frozen=True, eq=False)
class ScaledFrame:
    """Rescaled diagonal frame of a homonuclear Ising system."""

    J: float
    gamma: float
    uz_bar: float = 0.0
    M: float = 1.0

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("synthesis in the scaled frame needs J > 0")
        if self.gamma == 0:
            raise ValueError("gamma must be nonzero")

    @classmethod
    def from_system(cls, sys: SpinSystem) -> "ScaledFrame":
        if not (sys.homonuclear and sys.is_ising):
            raise ValueError("the scaled frame is defined for homonuclear Ising systems")
        return cls(sys.J, sys.gamma1, sys.uz_bar, sys.M)

    @property
    def time_scale(self) -> float:
        return self.J / 6

    @property
    def vz(self) -> float:
        return self.gamma * 6 / self.J * self.uz_bar

    @property
    def M_scaled(self) -> float:
        return abs(self.gamma) * 6 / self.J * self.M

    # 4x4 matrices
    Bx = property(lambda self: embed_alg(BX3))
    By = property(lambda self: embed_alg(BY3))
    Bz = property(lambda self: embed_alg(BZ3))
    D = property(lambda self: -1.5j * np.diag([-3.0, 1, 1, 1]))
    A = property(lambda self: -1.5j * np.diag([-1.0, -1, 1, 1]))
    A1 = property(lambda self: 1j * np.diag([0.0, 2, -1, -1]))

    # simulator interface: scaled-frame lab dynamics
    @property
    def drift(self) -> np.ndarray:
        return self.A + self.vz * self.Bz

    @property
    def controls(self) -> tuple:
        return (self.Bx, self.By)

    def to_lab_time(self, tau):
        return 6 * float(tau) / self.J

    def to_scaled_time(self, t):
        return self.J * float(t) / 6

    def to_scaled_controls(self, ux, uy):
        g = self.gamma * 6 / self.J
        return g * ux, -g * uy

    def to_lab_controls(self, vx, vy):
        g = self.gamma * 6 / self.J
        return vx / g, -vy / g

    def to_s_frame(self, X, tau) -> np.ndarray:
        return expm(-(self.D / 3 + self.vz * self.Bz), float(tau)) @ X

    def from_s_frame(self, S, tau) -> np.ndarray:
        return expm(self.D / 3 + self.vz * self.Bz, float(tau)) @ S

    def roundtrip_errors(self, sys: SpinSystem) -> dict:
        """Scaled matrices mapped back to lab coordinates vs. the system's own."""
        s = self.time_scale
        g = self.gamma
        return {"A": frob(s * TO_LAB(self.A) - sys.A),
                "D": frob(s * TO_LAB(self.D) - sys.D),
                "Bx": frob(g * TO_LAB(self.Bx) - sys.Bx),
                "By": frob(-g * TO_LAB(self.By) - sys.By),
                "Bz": frob(g * TO_LAB(self.Bz) - sys.Bz),
                "A1": frob(s * TO_LAB(self.A1) - sys.A1)}

    def periodicity_errors(self) -> dict:
        return {"D": frob(expm(self.D, 4 * math.pi / 3) - np.eye(4)),
                "A1": frob(expm(self.A1, TWO_PI) - np.eye(4)),
                "F": frob(expm(F_X, 2 * TWO_PI) - np.eye(3))}


@dataclass(frozen=True, eq=False)
class TwoSpinTarget:
    """Target ``exp(D T_f / 3) S_f`` in scaled diagonal coordinates."""

    T_f: PiTime
    S_f: np.ndarray

    def __post_init__(self):
        S = np.asarray(self.S_f, dtype=complex)
        if S.shape == (3, 3):
            S = embed(S)
        if block_form_error(S) > 1e-10:
            raise ValueError("S_f must be diag(1, G) with G in SU(3)")
        T = PiTime.of(self.T_f)
        if float(T) < 0:
            raise ValueError("T_f must be non-negative")
        object.__setattr__(self, "S_f", S)
        object.__setattr__(self, "T_f", T)

    def matrix(self) -> np.ndarray:
        D = -1.5j * np.diag([-3.0, 1, 1, 1])
        return expm(D, float(self.T_f) / 3) @ self.S_f


# ---------------------------------------------------------------- rotating frame

@dataclass(frozen=True)
class RotatingSegment:
    """A modulated scaled-frame segment whose S-frame generator is ``A1 + kbar B``."""

    segment: PulseSegment
    axis: str | None
    kbar: float

    def s_generator(self) -> np.ndarray:
        g = A1_3.copy()
        if self.axis is not None:
            g = g + self.kbar * _AXES[self.axis]
        return embed_alg(g)


def modulation_for(axis: str, kbar: float, vz: float) -> Modulation:
    """Scaled-frame modulation giving an effective constant ``kbar B_axis``."""
    if axis == "x":
        return Modulation(kbar, vz, 0.0, -1)
    if axis == "y":
        return Modulation(kbar, vz, -math.pi / 2, -1)
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


def rotating_frame_controls(kbar: float, uz_bar: float, which: str, t0: float, dt: float,
                            M: float | None = None) -> RotatingSegment:
    """Scaled-frame segment on ``[t0, t0 + dt]`` realizing ``A1 + kbar B_which``.

    Modulation phases refer to absolute time, so ``t0`` only documents
    where the segment sits; the recipe itself does not depend on it.
    """
    if M is not None and abs(kbar) > M * (1 + 1e-12):
        raise ValueError(f"|kbar|={abs(kbar)} exceeds the bound {M}")
    which = {"Bx": "x", "By": "y"}.get(which, which)
    if kbar == 0:
        return RotatingSegment(PulseSegment(dt), None, 0.0)
    return RotatingSegment(PulseSegment(dt, mod=modulation_for(which, kbar, uz_bar)),
                           which, kbar)


# ---------------------------------------------------------------- S-frame schedules

@dataclass(frozen=True)
class SPulse:
    """Constant S-frame pulse: generator ``A1 + kbar B_axis`` (``axis`` None is free)."""

    dt: PiTime
    axis: str | None = None
    kbar: float = 0.0

    def generator(self) -> np.ndarray:
        g = A1_3.copy()
        if self.axis is not None and self.kbar != 0:
            g = g + self.kbar * _AXES[self.axis]
        return g

    @property
    def tag(self) -> str:
        return "A1" if self.axis is None or self.kbar == 0 else f"{self.axis}:{self.kbar!r}"


@dataclass
class SSchedule:
    """Chronological S-frame pulses with exact-in-pi durations."""

    pulses: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def total_time(self) -> PiTime:
        return sum_times(p.dt for p in self.pulses)

    def __add__(self, other: "SSchedule") -> "SSchedule":
        return SSchedule(self.pulses + other.pulses)

    def __len__(self) -> int:
        return len(self.pulses)

    def product(self) -> np.ndarray:
        """3x3 S-frame propagator (later pulses multiply on the left)."""
        out = np.eye(3, dtype=complex)
        for p in self.pulses:
            if float(p.dt) != 0:
                out = expm(p.generator(), float(p.dt)) @ out
        return out

    def as_factor_sequence(self, target=None) -> FactorSequence:
        gens = {p.tag: p.generator() for p in self.pulses}
        steps = [Step(p.tag, float(p.dt)) for p in reversed(self.pulses) if float(p.dt) != 0]
        if not gens:
            gens = {"A1": A1_3}
        return FactorSequence(steps, gens, target=target, meta=dict(self.meta))


def _free(dt) -> SPulse:
    return SPulse(PiTime.of(dt))


# ---------------------------------------------------------------- primitives

def su2_subproblem(kbar: float) -> Su2Problem:
    """The 2x2 problem left after removing ``F`` from ``A1``."""
    A = A1T_X[:2, :2]
    B = BX3[:2, :2].astype(complex)
    return Su2Problem(A, B, kbar)


def kbar_for(M_scaled: float) -> float:
    """Control amplitude used by the primitives: ``min(M_scaled, k)`` with k = 3/2."""
    k = su2_subproblem(1.0).k
    return min(M_scaled, k)


def _rot2(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def steer_time(kbar: float, theta: float) -> float:
    return steer_theorem3(su2_subproblem(kbar), _rot2(theta)).total_time


def uniform_time_bound(kbar: float) -> float:
    """Upper bound on the steering time to ``exp(B_x theta)`` over all theta."""
    prob = su2_subproblem(kbar)
    fr = canonical_frame(prob.Z1, prob.Z2)
    m_max = minimal_m(math.pi, fr.psi)
    return 4 * math.pi / fr.lambda1 + m_max * (2 * math.pi / fr.lambda1 + math.pi / (2 * fr.lambda2))


def min_nbar(kbar: float) -> int:
    need = (uniform_time_bound(kbar) + steer_time(kbar, math.pi / 2)
            + steer_time(kbar, 3 * math.pi / 2))
    return max(1, math.ceil(need / (4 * math.pi) - 1e-12))


def _steer_pulses(kbar: float, theta: float, axis: str) -> list:
    sched = steer_theorem3(su2_subproblem(kbar), _rot2(theta))
    return [SPulse(PiTime.of(seg.dt), axis, seg.ux) for seg in sched.segments]


def _exp_axis(axis: str, theta: float, nbar: int, kbar: float) -> SSchedule:
    theta = theta % TWO_PI
    if TWO_PI - theta < 1e-14:
        theta = 0.0
    main = _steer_pulses(kbar, theta, axis)
    half = _steer_pulses(kbar, math.pi / 2, axis)
    three = _steer_pulses(kbar, 3 * math.pi / 2, axis)
    used = sum_times(p.dt for p in main + half + three)
    budget = PiTime.pi(4 * nbar)
    slack = budget - used
    if float(slack) < -1e-12:
        raise ValueError(f"nbar={nbar} too small: steering needs {float(used)} > {float(budget)}")
    tau1 = slack.scale(Fraction(1, 2))
    tau2 = slack - tau1
    pulses = main + half + [_free(tau1)] + three + [_free(tau2)]
    return SSchedule(pulses, meta={"axis": axis, "theta": theta, "nbar": nbar,
                                   "kbar": kbar, "tau": float(tau1)})


def synth_exp_bx(theta: float, nbar: int, kbar: float) -> SSchedule:
    """``exp(B_x theta)`` in S-frame time exactly ``4 nbar pi``."""
    return _exp_axis("x", theta, nbar, kbar)


def synth_exp_by(theta: float, nbar: int, kbar: float) -> SSchedule:
    """``exp(B_y theta)`` in S-frame time exactly ``4 nbar pi``."""
    return _exp_axis("y", theta, nbar, kbar)


def synth_exp_bz(theta: float, nbar: int, kbar: float) -> SSchedule:
    """``exp(B_z theta) = R^-1 exp(B_y theta) R`` in time ``12 nbar pi``."""
    return (synth_exp_bx(math.pi / 2, nbar, kbar) + synth_exp_by(theta, nbar, kbar)
            + synth_exp_bx(3 * math.pi / 2, nbar, kbar))


# ---------------------------------------------------------------- Murnaghan

def planar(k: int, l: int, theta: float, sigma: float) -> np.ndarray:
    """``U_kl(theta, sigma)`` (0-based plane indices)."""
    u = np.eye(3, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    u[k, k] = u[l, l] = c
    u[k, l] = -s * np.exp(-1j * sigma)
    u[l, k] = s * np.exp(1j * sigma)
    return u


def u12(theta, sigma):
    return planar(0, 1, theta, sigma)


def u13(theta, sigma):
    return planar(0, 2, theta, sigma)


def u23(theta, sigma):
    return planar(1, 2, theta, sigma)


def phase_diag(alphas) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(alphas, dtype=float)))


def _wrap_pi(a: float) -> float:
    a = math.remainder(a, TWO_PI)
    return math.pi if a == -math.pi else a


@dataclass(frozen=True)
class MurnaghanParams:
    thetas: tuple
    sigmas: tuple
    alphas: tuple

    def matrix(self) -> np.ndarray:
        (t1, t2, t3), (s1, s2, s3) = self.thetas, self.sigmas
        return phase_diag(self.alphas) @ u12(t1, s1) @ u13(t2, s2) @ u23(t3, s3)


def _zero_first(x: complex, y: complex):
    """(theta, sigma) with ``(x, y) L^-1`` having a zero first entry."""
    ax, ay = abs(x), abs(y)
    if ax < 1e-15:
        return 0.0, 0.0
    theta = math.atan2(ax, ay)
    sigma = 0.0 if ay < 1e-15 else np.angle(y)
    return theta, _wrap_pi(float(np.angle(x) - sigma))


def murnaghan_decompose(U) -> MurnaghanParams:
    """``U = D(alpha) U12(t1, s1) U13(t2, s2) U23(t3, s3)``, thetas in [0, pi/2]."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (3, 3) or frob(U @ dagger(U) - np.eye(3)) > 1e-9:
        raise ValueError("expected a 3x3 unitary")
    if abs(np.linalg.det(U) - 1) > 1e-9:
        raise ValueError("expected determinant 1")
    t3, s3 = _zero_first(U[2, 1], U[2, 2])
    W = U @ dagger(u23(t3, s3))
    t2, s2 = _zero_first(W[2, 0], W[2, 2])
    V = W @ dagger(u13(t2, s2))
    # zero V[0,1] of V U12^-1: V00 s e^{-i sigma} = -V01 c
    a, b = V[0, 0], V[0, 1]
    if abs(b) < 1e-15:
        t1, s1 = 0.0, 0.0
    else:
        t1 = math.atan2(abs(b), abs(a))
        ref = 0.0 if abs(a) < 1e-15 else float(np.angle(a))
        s1 = _wrap_pi(ref - float(np.angle(b)) + math.pi)
    Dm = V @ dagger(u12(t1, s1))
    a1, a2 = float(np.angle(Dm[0, 0])), float(np.angle(Dm[1, 1]))
    return MurnaghanParams((t1, t2, t3), (s1, s2, s3), (a1, a2, -a1 - a2))


# ---------------------------------------------------------------- planar factors

def conj_offset(sigma: float) -> float:
    """Free-evolution time ``s`` with ``exp(-A1 s) exp(B th) exp(A1 s) = U(th, sigma)``."""
    return ((sigma - math.pi) % TWO_PI) / 3


def _conjugated(axis: str, theta: float, sigma: float, nbar: int, kbar: float) -> SSchedule:
    s = conj_offset(sigma)
    core = _exp_axis(axis, theta, nbar, kbar)
    return SSchedule([_free(s)] + core.pulses + [_free(PiTime.pi(2) - PiTime.of(s))],
                     meta={"theta": theta, "sigma": sigma, "s": s})


def synth_u12(theta: float, sigma: float, nbar: int, kbar: float) -> SSchedule:
    """``U12(theta, sigma)`` in time ``2 pi + 4 nbar pi``."""
    return _conjugated("x", theta, sigma, nbar, kbar)


def synth_u13(theta: float, sigma: float, nbar: int, kbar: float) -> SSchedule:
    """``U13(theta, sigma)`` in time ``2 pi + 4 nbar pi``."""
    return _conjugated("y", theta, sigma, nbar, kbar)


def synth_u23(theta: float, sigma: float, nbar: int, kbar: float) -> SSchedule:
    """``U23(theta, sigma) = R U13(theta, sigma + pi) R^-1`` in time ``2 pi + 12 nbar pi``."""
    return (synth_exp_bx(3 * math.pi / 2, nbar, kbar)
            + synth_u13(theta, sigma + math.pi, nbar, kbar)
            + synth_exp_bx(math.pi / 2, nbar, kbar))


def diag_times(alphas) -> tuple:
    a1, a2, a3 = (float(a) for a in alphas)
    if abs(a1 + a2 + a3) > 1e-9:
        raise ValueError(f"alphas must sum to zero, got {a1 + a2 + a3}")
    return ((2 * a2 + a1) / 3) % TWO_PI, ((2 * a1 + a2) / 3) % TWO_PI


def synth_diag(alphas, nbar: int, kbar: float) -> SSchedule:
    """``D(alpha) = R exp(A1 t1) R^-1 exp(A1 t2)``, at most ``4 pi + 8 nbar pi``."""
    t1, t2 = diag_times(alphas)
    pulses = ([_free(t2)] + synth_exp_bx(3 * math.pi / 2, nbar, kbar).pulses
              + [_free(t1)] + synth_exp_bx(math.pi / 2, nbar, kbar).pulses)
    return SSchedule(pulses, meta={"t1": t1, "t2": t2})


# ---------------------------------------------------------------- identity gadgets

def two_tau_gadget(tau: float) -> np.ndarray:
    """``exp(At tau) R^-1 exp(At tau) R`` with ``At`` the reduced x-drift."""
    R = expm(BX3, math.pi / 2)
    return expm(A1T_X, tau) @ dagger(R) @ expm(A1T_X, tau) @ R


def three_tau_gadget(tau: float) -> np.ndarray:
    Rx = expm(BX3, math.pi / 2)
    Ry = expm(BY3, math.pi / 2)
    E = expm(A1_3, tau)
    return Ry @ E @ dagger(Ry) @ Rx @ E @ dagger(Rx) @ E


def identity_padding(tbar, nbar: int, kbar: float) -> SSchedule:
    """Identity in time ``tbar + 16 nbar pi``: three free spans of ``tbar/3``."""
    tbar = PiTime.of(tbar)
    if float(tbar) < -1e-12:
        raise ValueError("padding time must be non-negative")
    tau = tbar.scale(Fraction(1, 3))
    tau3 = tbar - tau - tau
    pulses = ([_free(tau)] + synth_exp_bx(3 * math.pi / 2, nbar, kbar).pulses
              + [_free(tau)] + synth_exp_bx(math.pi / 2, nbar, kbar).pulses
              + synth_exp_by(3 * math.pi / 2, nbar, kbar).pulses
              + [_free(tau3)] + synth_exp_by(math.pi / 2, nbar, kbar).pulses)
    return SSchedule(pulses, meta={"tau": float(tau)})


# ---------------------------------------------------------------- full synthesis

def max_synthesis_time(nbar: int) -> PiTime:
    """Worst-case duration of the four Murnaghan factors: ``12 pi + 28 nbar pi``."""
    return PiTime.pi(12 + 28 * nbar)


def min_n(T_f: PiTime, nbar: int) -> int:
    need = max_synthesis_time(nbar) + PiTime.pi(16 * nbar) - T_f
    return max(0, math.ceil(float(need) / (4 * math.pi) - 1e-12))


def s_schedule_to_lab(sched: SSchedule, frame: ScaledFrame, physical: bool = True) -> PulseSchedule:
    """Map S-frame pulses to modulated lab segments.

    ``physical`` selects the original time and control units; otherwise the
    schedule is for the scaled frame (``frame`` itself as the simulated system).
    """
    segs = []
    g = frame.gamma * 6 / frame.J
    for p in sched.pulses:
        dt = float(p.dt)
        if p.axis is None or p.kbar == 0:
            segs.append(PulseSegment(frame.to_lab_time(dt) if physical else dt))
            continue
        mod = modulation_for(p.axis, p.kbar, frame.vz)
        if physical:
            # u_x = v_x / g, u_y = -v_y / g, phase arguments are unchanged
            mod = Modulation(mod.kbar / g, frame.gamma * frame.uz_bar, mod.phase, -mod.sign_uy)
            dt = frame.to_lab_time(dt)
        segs.append(PulseSegment(dt, mod=mod))
    return PulseSchedule(segs)


@dataclass
class SynthResult:
    schedule: PulseSchedule          # physical lab frame
    s_schedule: SSchedule
    frame: ScaledFrame
    target: TwoSpinTarget
    params: MurnaghanParams
    nbar: int
    n: int
    kbar: float
    total_scaled: PiTime
    U_f: np.ndarray

    @property
    def total_physical(self) -> float:
        return self.frame.to_lab_time(float(self.total_scaled))

    def lab_target(self) -> np.ndarray:
        return TO_LAB(self.target.matrix())

    def s_endpoint(self) -> np.ndarray:
        return self.s_schedule.product()


def synth_full(sys: SpinSystem, target: TwoSpinTarget, nbar: int | None = None,
               n: int | None = None) -> SynthResult:
    """Lab-frame schedule reaching ``exp(D T_f/3) S_f`` at scaled time ``T_f + 4 n pi``."""
    frame = ScaledFrame.from_system(sys)
    kbar = kbar_for(frame.M_scaled)
    nb_min = min_nbar(kbar)
    nbar = nb_min if nbar is None else int(nbar)
    if nbar < nb_min:
        raise ValueError(f"nbar={nbar} is below the feasible minimum {nb_min}")
    n_min = min_n(target.T_f, nbar)
    n = n_min if n is None else int(n)
    if n < n_min:
        raise ValueError(f"n={n} is below the feasible minimum {n_min}")
    T_total = target.T_f + PiTime.pi(4 * n)
    # the S-frame goal exp(-B_z vz T) S_f, 3x3 block
    U_f = (expm(frame.Bz, -frame.vz * float(T_total)) @ target.S_f)[1:, 1:]
    params = murnaghan_decompose(U_f)
    (t1, t2, t3), (s1, s2, s3) = params.thetas, params.sigmas
    body = (synth_u23(t3, s3, nbar, kbar) + synth_u13(t2, s2, nbar, kbar)
            + synth_u12(t1, s1, nbar, kbar) + synth_diag(params.alphas, nbar, kbar))
    T_hat = body.total_time
    tbar = T_total - T_hat - PiTime.pi(16 * nbar)
    if float(tbar) < -1e-12:
        raise RuntimeError(f"time budget exceeded by {-float(tbar)}")
    full = body + identity_padding(tbar, nbar, kbar)
    full.meta.update(T_hat=T_hat, tbar=tbar)
    sched = s_schedule_to_lab(full, frame, physical=True)
    sched.meta.update(nbar=nbar, n=n, kbar=kbar)
    return SynthResult(sched, full, frame, target, params, nbar, n, kbar,
                       full.total_time, U_f)
