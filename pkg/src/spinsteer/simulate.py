"""Forward simulation of pulse schedules and verification of factor sequences.

Constant segments are propagated exactly with one matrix exponential.
Modulated segments use a sixth-order Magnus integrator on Gauss-Legendre
nodes; every step is the exponential of a skew-Hermitian matrix, so the
propagator stays unitary, and the step count is doubled until halving the
step changes the segment propagator by less than the policy tolerance.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import dagger, expm, frob
from .policy import get_policy
from .schedule import FactorSequence, PulseSchedule, PulseSegment

_SQ15 = math.sqrt(15.0)
_GAUSS3 = np.array([0.5 - _SQ15 / 10, 0.5, 0.5 + _SQ15 / 10])


@dataclass
class SimResult:
    endpoint: np.ndarray
    residual_to_target: float | None
    unitarity_drift: float
    per_segment_log: list = field(default_factory=list)
    bound_violations: list = field(default_factory=list)
    total_time: float = 0.0

    def to_dict(self) -> dict:
        from .io import matrix_to_dict
        return {"endpoint": matrix_to_dict(self.endpoint),
                "residual_to_target": self.residual_to_target,
                "unitarity_drift": self.unitarity_drift,
                "total_time": self.total_time,
                "bound_violations": self.bound_violations,
                "per_segment_log": [[t, lab, [c.real, c.imag]]
                                    for t, lab, c in self.per_segment_log]}


def _bcomm(a, b):
    return a @ b - b @ a


def _batched_expm_skew(omega: np.ndarray) -> np.ndarray:
    h = 0.5 * (1j * omega + np.conj(np.swapaxes(1j * omega, -1, -2)))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    while len(mats) > 1:
        if len(mats) % 2:
            last = mats[-1:]
            mats = mats[:-1]
        else:
            last = None
        mats = mats[1::2] @ mats[0::2]
        if last is not None:
            mats = np.concatenate([mats, last])
    return mats[0]


def _generator_stack(drift, controls, mod, times):
    ux, uy = mod.controls(times)
    out = np.broadcast_to(drift, times.shape + drift.shape).astype(complex)
    out = out + ux[..., None, None] * controls[0]
    if len(controls) > 1:
        out = out + uy[..., None, None] * controls[1]
    elif np.any(np.abs(uy) > 0):
        raise ValueError("modulated y-control on a single-control system")
    return out


def magnus6_propagator(drift, controls, mod, t_start: float, dt: float, n: int,
                       chunk: int = 20000) -> np.ndarray:
    """Propagator of one modulated segment using ``n`` Magnus steps."""
    h = dt / n
    result = np.eye(drift.shape[0], dtype=complex)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        starts = t_start + h * np.arange(lo, hi)
        nodes = starts[:, None] + h * _GAUSS3[None, :]
        g = _generator_stack(drift, controls, mod, nodes)
        a1, a2, a3 = g[:, 0], g[:, 1], g[:, 2]
        al1 = h * a2
        al2 = (_SQ15 * h / 3) * (a3 - a1)
        al3 = (10 * h / 3) * (a3 - 2 * a2 + a1)
        c1 = _bcomm(al1, al2)
        c2 = -(1 / 60) * _bcomm(al1, 2 * al3 + c1)
        omega = al1 + al3 / 12 + (1 / 240) * _bcomm(-20 * al1 - al3 + c1, al2 + c2)
        result = _ordered_product(_batched_expm_skew(omega)) @ result
    return result


def _initial_steps(drift, controls, mod, dt) -> int:
    scale = frob(drift) + abs(mod.kbar) * sum(frob(c) for c in controls) + abs(mod.omega)
    return max(2, int(math.ceil(dt * scale / 0.5)))


def modulated_propagator(drift, controls, mod, t_start: float, dt: float,
                         tol: float | None = None, max_steps: int = 1 << 22):
    """Propagator with step doubling; returns (matrix, steps used, last change)."""
    tol = get_policy().sim_step_tol if tol is None else tol
    n = _initial_steps(drift, controls, mod, dt)
    coarse = magnus6_propagator(drift, controls, mod, t_start, dt, n)
    while True:
        fine = magnus6_propagator(drift, controls, mod, t_start, dt, 2 * n)
        change = frob(fine - coarse)
        if change < tol or 2 * n >= max_steps:
            return fine, 2 * n, change
        n *= 2
        coarse = fine


def segment_propagator(system, seg: PulseSegment, t_start: float, tol: float | None = None):
    drift = np.asarray(system.drift, dtype=complex)
    controls = [np.asarray(c, dtype=complex) for c in system.controls]
    if seg.dt == 0:
        return np.eye(drift.shape[0], dtype=complex)
    if seg.mod is None or seg.mod.kbar == 0:
        gen = drift.copy()
        ux, uy = (seg.ux, seg.uy) if seg.mod is None else (0.0, 0.0)
        gen = gen + ux * controls[0]
        if uy:
            if len(controls) < 2:
                raise ValueError("segment has uy but the system has one control")
            gen = gen + uy * controls[1]
        return expm(gen, seg.dt)
    return modulated_propagator(drift, controls, seg.mod, t_start, seg.dt, tol)[0]


def simulate(system, schedule: PulseSchedule, target=None, *, t0: float = 0.0,
             X0=None, tol: float | None = None, log: bool = True) -> SimResult:
    """Propagate ``dX/dt = (drift + sum_i u_i(t) B_i) X`` through ``schedule``.

    ``system`` needs ``drift`` and ``controls`` attributes (an ``Su2Problem``
    or a ``SpinSystem``); an ``M`` attribute enables bound checking.
    Modulation phases use absolute time starting at ``t0``.
    """
    dim = np.asarray(system.drift).shape[0]
    X = np.eye(dim, dtype=complex) if X0 is None else np.asarray(X0, dtype=complex)
    bound = getattr(system, "M", None)
    t = t0
    entries, violations = [], []
    for i, seg in enumerate(schedule.segments):
        if seg.dt < 0:
            raise ValueError(f"segment {i} has negative duration {seg.dt}")
        if bound is not None and seg.amplitude() > bound * (1 + 1e-12):
            violations.append({"segment": i, "time": t, "amplitude": seg.amplitude(),
                               "bound": bound})
        X = segment_propagator(system, seg, t, tol) @ X
        t += seg.dt
        if log:
            label = "mod" if seg.mod is not None else f"const({seg.ux:.6g},{seg.uy:.6g})"
            entries.append((t, label, complex(np.trace(X))))
    if violations:
        warnings.warn(f"{len(violations)} segment(s) exceed the control bound; "
                      f"first at segment {violations[0]['segment']}", stacklevel=2)
    resid = None if target is None else frob(X - np.asarray(target))
    drift_u = frob(X @ dagger(X) - np.eye(dim))
    return SimResult(X, resid, drift_u, entries, violations, t - t0)


@dataclass
class VerifyReport:
    residual: float
    factor_count: int
    inner_factor_count: int | None
    lowenthal_order: int | None
    within_bound: bool | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify(sequence: FactorSequence, target=None) -> VerifyReport:
    """Multiply out a factor sequence and compare with the target."""
    from .su2 import lowenthal_order
    target = sequence.target if target is None else np.asarray(target)
    if sequence.steps:
        prod = sequence.product()
    else:
        prod = np.eye(np.asarray(target).shape[0], dtype=complex)
    resid = frob(prod - target)
    count = sequence.alternating_count()
    inner = sequence.meta.get("inner_factor_count")
    frame = sequence.meta.get("frame")
    s = lowenthal_order(frame.psi) if frame is not None else None
    within = None if (s is None or inner is None) else inner <= s + 1
    return VerifyReport(resid, count, inner, s, within)
