"""Alternating one-parameter factorization of SO(3).

Two independent generators are first rotated and rescaled to ``S12`` and
``rho S12 + S23``; a rotation is then Euler-decomposed and its middle factor
``exp(S23 beta)`` is split into ``m`` copies of a three-factor block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import expm, frob, so_basis
from .policy import get_policy
from .schedule import FactorSequence, prune_steps
from .su2 import ProportionalGeneratorsError, psi_angle

TWO_PI = 2 * math.pi
S12 = so_basis(1, 2)
S13 = so_basis(1, 3)
S23 = so_basis(2, 3)


@dataclass(frozen=True, eq=False)
class So3Pair:
    """Generators in canonical form.

    ``T_canon @ Z1 @ T_canon.T == scale1 * S12`` and
    ``T_canon @ Z2 @ T_canon.T == scale2 * (rho * S12 + S23)``.
    """

    Z1: np.ndarray
    Z2: np.ndarray
    rho: float
    T_canon: np.ndarray
    scale1: float
    scale2: float

    @property
    def psi(self) -> float:
        return self.rho / math.sqrt(1 + self.rho ** 2)

    @property
    def canonical_generators(self) -> dict:
        return {"Z1": S12, "Z2": self.rho * S12 + S23}

    def to_canonical(self, x) -> np.ndarray:
        return self.T_canon @ x @ self.T_canon.T

    def from_canonical(self, x) -> np.ndarray:
        return self.T_canon.T @ x @ self.T_canon

    def to_original(self, seq: FactorSequence) -> FactorSequence:
        """Same factors, durations rescaled for the original generators."""
        scale = {"Z1": self.scale1, "Z2": self.scale2}
        from .schedule import Step
        steps = [Step(s.gen, s.t / scale[s.gen]) for s in seq.steps]
        target = None if seq.target is None else self.from_canonical(seq.target)
        return FactorSequence(steps, {"Z1": self.Z1, "Z2": self.Z2}, target=target,
                              pruned=list(seq.pruned), meta=dict(seq.meta))


def _axis(z) -> np.ndarray:
    # z @ v = 0 for v = (z32, z13, z21)
    return np.array([z[2, 1], z[0, 2], z[1, 0]])


def canonicalize_so3(Z1, Z2) -> So3Pair:
    Z1 = np.asarray(Z1, dtype=float)
    Z2 = np.asarray(Z2, dtype=float)
    for name, z in (("Z1", Z1), ("Z2", Z2)):
        if z.shape != (3, 3) or frob(z + z.T) > 1e-10 * max(1.0, frob(z)):
            raise ValueError(f"{name} must be a real 3x3 skew-symmetric matrix")
        if frob(z) == 0:
            raise ValueError(f"{name} is zero")
    v3 = _axis(Z1)
    v3 = v3 / np.linalg.norm(v3)
    seed = np.eye(3)[int(np.argmin(np.abs(v3)))]
    v1 = seed - (seed @ v3) * v3
    v1 /= np.linalg.norm(v1)
    v2 = np.cross(v3, v1)
    T1 = np.array([v1, v2, v3])
    lam1 = (T1 @ Z1 @ T1.T)[0, 1]
    if lam1 < 0:
        T1 = np.array([v1, -v2, -v3])
        lam1 = -lam1
    z2 = T1 @ Z2 @ T1.T
    a, b, c = z2[0, 1], z2[0, 2], z2[1, 2]
    if math.hypot(b, c) <= get_policy().rank_tol * frob(Z2):
        raise ProportionalGeneratorsError("Z2 is parallel to Z1")
    theta = math.atan2(-b, c)
    T = None
    for th in (theta, theta + math.pi):
        T2 = expm(S12, th)
        cand = T2 @ T1
        w = cand @ Z2 @ cand.T
        if w[1, 2] > 0:
            T, d, a = cand, w[1, 2], w[0, 1]
            break
    return So3Pair(Z1, Z2, a / d, T, float(lam1), float(d))


def exp_z2_entries(rho: float, t2: float) -> np.ndarray:
    """Closed form of ``exp((rho S12 + S23) t2)``."""
    eta = math.sqrt(1 + rho * rho)
    s = math.sin(eta * t2)
    c = math.cos(eta * t2)
    e2 = eta * eta
    return np.array([
        [(1 + rho * rho * c) / e2, rho * s / eta, (rho - rho * c) / e2],
        [-s * rho / eta, c, s / eta],
        [(rho - c * rho) / e2, -s / eta, (c + rho * rho) / e2],
    ])


@dataclass(frozen=True)
class So3Euler:
    """``exp(S12 alpha) exp(S23 beta) exp(S12 gamma)``."""

    alpha: float
    beta: float
    gamma: float

    def matrix(self) -> np.ndarray:
        return expm(S12, self.alpha) @ expm(S23, self.beta) @ expm(S12, self.gamma)


def _wrap2pi(x: float) -> float:
    a = x % TWO_PI
    return 0.0 if TWO_PI - a < 1e-13 else a


def so3_euler_extract(X) -> So3Euler:
    """Euler angles with alpha, gamma in [0, 2 pi) and beta in [0, pi]."""
    X = np.asarray(X, dtype=float)
    sb = math.hypot(X[0, 2], X[1, 2])
    beta = math.atan2(sb, X[2, 2])
    if sb < 1e-13:
        if X[2, 2] > 0:
            return So3Euler(_wrap2pi(math.atan2(X[0, 1], X[0, 0])), 0.0, 0.0)
        return So3Euler(_wrap2pi(math.atan2(-X[0, 1], X[0, 0])), math.pi, 0.0)
    alpha = math.atan2(X[0, 2], X[1, 2])
    gamma = math.atan2(X[2, 0], -X[2, 1])
    return So3Euler(_wrap2pi(alpha), beta, _wrap2pi(gamma))


def so3_admissible(psi: float, angle: float) -> bool:
    """Whether ``exp(S23 angle)`` fits one three-factor block."""
    return 2 * psi * psi - 1 <= math.cos(angle)


def minimal_m_so3(beta: float, psi: float) -> int:
    m = 1
    while not so3_admissible(psi, beta / m):
        m += 1
    return m


def factor_small_rotation(pair: So3Pair, beta_over_m: float) -> FactorSequence:
    """Three factors ``exp(Z1 t1) exp(Z2 t2) exp(Z1 t3) = exp(S23 beta_over_m)``.

    Generators are the canonical ones; durations are in canonical units.
    """
    rho = pair.rho
    if not so3_admissible(pair.psi, beta_over_m):
        raise ValueError(f"rotation angle {beta_over_m} too large for psi={pair.psi}")
    gens = pair.canonical_generators
    target = expm(S23, beta_over_m)
    eta = math.sqrt(1 + rho * rho)
    c = eta * eta * math.cos(beta_over_m) - rho * rho
    t2 = math.acos(min(1.0, max(-1.0, c))) / eta
    a = exp_z2_entries(rho, t2)
    # zero the (1,3) entry with a non-negative (2,3) entry
    t1 = math.atan2(-a[0, 2], a[1, 2])
    p = expm(S12, t1) @ a
    if p[1, 2] < 0:
        t1 += math.pi
        p = expm(S12, t1) @ a
    # zero the (1,2) entry with a positive (1,1) entry
    t3 = math.atan2(-p[0, 1], p[0, 0])
    raw = [("Z1", _wrap2pi(t1)), ("Z2", t2), ("Z1", _wrap2pi(t3))]
    kept, dropped = prune_steps(raw)
    return FactorSequence(kept, gens, target=target, pruned=dropped,
                          meta={"t1": _wrap2pi(t1), "t2": t2, "t3": _wrap2pi(t3)})


def factorize_so3(pair: So3Pair, X_f) -> FactorSequence:
    """Alternating factorization of a rotation given in the canonical frame.

    Durations are canonical; :meth:`So3Pair.to_original` converts them for
    the original generators (target mapped back with ``T_canon``).
    """
    X_f = np.asarray(X_f, dtype=float)
    e = so3_euler_extract(X_f)
    m = minimal_m_so3(e.beta, pair.psi)
    block = factor_small_rotation(pair, e.beta / m)
    bt = block.meta
    inner = [("Z1", bt["t1"]), ("Z2", bt["t2"]), ("Z1", bt["t3"])]
    raw = [("Z1", e.alpha)] + inner * m + [("Z1", e.gamma)]
    merged: list = []
    for gen, t in raw:
        if merged and merged[-1][0] == gen:
            merged[-1] = (gen, merged[-1][1] + t)
        else:
            merged.append((gen, t))
    merged = [(g, _wrap2pi(t) if g == "Z1" else t) for g, t in merged]
    kept, dropped = prune_steps(merged)
    seq = FactorSequence(kept, pair.canonical_generators, target=X_f, pruned=dropped,
                         meta={"m": m, "euler": e, "block": bt})
    seq.meta["residual"] = seq.residual
    return seq
