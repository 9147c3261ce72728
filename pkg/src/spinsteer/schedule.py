"""Factor sequences, pulse schedules and exact-in-pi durations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import expm, frob


@dataclass(frozen=True)
class PiTime:
    """A duration ``pi_coeff * pi + rem`` with an exact rational pi part.

    Periodicities of 4*pi, 2*pi and 4*pi/3 cancel exactly in the rational part
    so the float remainder only carries genuinely irrational bookkeeping.
    """

    pi_coeff: Fraction = Fraction(0)
    rem: float = 0.0

    @classmethod
    def of(cls, value) -> "PiTime":
        if isinstance(value, PiTime):
            return value
        return cls(Fraction(0), float(value))

    @classmethod
    def pi(cls, coeff) -> "PiTime":
        return cls(Fraction(coeff), 0.0)

    def __float__(self) -> float:
        return math.fsum([float(self.pi_coeff) * math.pi, self.rem])

    def __add__(self, other) -> "PiTime":
        o = PiTime.of(other)
        return PiTime(self.pi_coeff + o.pi_coeff, math.fsum([self.rem, o.rem]))

    __radd__ = __add__

    def __sub__(self, other) -> "PiTime":
        o = PiTime.of(other)
        return PiTime(self.pi_coeff - o.pi_coeff, math.fsum([self.rem, -o.rem]))

    def __rsub__(self, other) -> "PiTime":
        return PiTime.of(other) - self

    def __neg__(self) -> "PiTime":
        return PiTime(-self.pi_coeff, -self.rem)

    def scale(self, factor: Fraction | int) -> "PiTime":
        f = Fraction(factor)
        return PiTime(self.pi_coeff * f, self.rem * float(f))

    def __lt__(self, other) -> bool:
        return float(self - PiTime.of(other)) < 0

    def __le__(self, other) -> bool:
        return float(self - PiTime.of(other)) <= 0

    def __repr__(self) -> str:
        return f"PiTime({self.pi_coeff}*pi + {self.rem!r})"


def sum_times(times) -> PiTime:
    coeff = Fraction(0)
    rems = []
    for t in times:
        t = PiTime.of(t)
        coeff += t.pi_coeff
        rems.append(t.rem)
    return PiTime(coeff, math.fsum(rems))


# ---------------------------------------------------------------- factor sequences

@dataclass(frozen=True)
class Step:
    gen: str
    t: float


@dataclass
class FactorSequence:
    """Ordered product ``expm(G[s0], t0) @ expm(G[s1], t1) @ ...``.

    ``steps[0]`` is the LEFTMOST factor, i.e. the one applied last in time.
    ``generators`` maps each tag to its matrix.  ``pruned`` keeps the
    zero-duration factors that were dropped, for factor-count audits.
    """

    steps: list
    generators: dict
    target: np.ndarray | None = None
    pruned: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def product(self) -> np.ndarray:
        dim = next(iter(self.generators.values())).shape[0]
        out = np.eye(dim, dtype=complex)
        for s in self.steps:
            out = out @ expm(self.generators[s.gen], float(s.t))
        return out

    @property
    def residual(self) -> float:
        if self.target is None:
            raise ValueError("sequence has no target")
        return frob(self.product() - self.target)

    @property
    def total_time(self) -> float:
        return math.fsum(float(s.t) for s in self.steps)

    def alternating_count(self) -> int:
        """Number of factors after merging neighbours with the same generator."""
        n, prev = 0, None
        for s in self.steps:
            if s.gen != prev:
                n += 1
                prev = s.gen
        return n

    def to_dict(self) -> dict:
        return {"steps": [{"gen": s.gen, "t": float(s.t)} for s in self.steps]}


def prune_steps(raw, tol: float = 0.0):
    """Split raw (gen, t) pairs into kept steps and the zero-duration audit log."""
    kept, dropped = [], []
    for gen, t in raw:
        (kept if float(t) > tol else dropped).append(Step(gen, t))
    return kept, dropped


# ---------------------------------------------------------------- pulse schedules

@dataclass(frozen=True)
class Modulation:
    """``ux = kbar cos(omega t + phase)``, ``uy = sign_uy kbar sin(omega t + phase)``.

    ``t`` is absolute time measured from the start of the schedule.
    """

    kbar: float
    omega: float
    phase: float = 0.0
    sign_uy: int = 1

    def controls(self, t):
        arg = self.omega * np.asarray(t) + self.phase
        return self.kbar * np.cos(arg), self.sign_uy * self.kbar * np.sin(arg)


@dataclass(frozen=True)
class PulseSegment:
    dt: float
    ux: float = 0.0
    uy: float = 0.0
    mod: Modulation | None = None

    def controls_at(self, t):
        if self.mod is not None:
            return self.mod.controls(t)
        return self.ux, self.uy

    def amplitude(self) -> float:
        if self.mod is not None:
            return abs(self.mod.kbar)
        return max(abs(self.ux), abs(self.uy))

    def to_dict(self) -> dict:
        d = {"dt": float(self.dt), "ux": float(self.ux), "uy": float(self.uy)}
        if self.mod is not None:
            d["mod"] = {"kbar": self.mod.kbar, "omega": self.mod.omega,
                        "phase": self.mod.phase, "sign_uy": self.mod.sign_uy}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PulseSegment":
        mod = None
        if d.get("mod") is not None:
            m = d["mod"]
            mod = Modulation(float(m["kbar"]), float(m["omega"]),
                             float(m.get("phase", 0.0)), int(m.get("sign_uy", 1)))
        return cls(float(d["dt"]), float(d.get("ux", 0.0)), float(d.get("uy", 0.0)), mod)


@dataclass
class PulseSchedule:
    """Chronologically ordered control segments."""

    segments: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def total_time(self) -> float:
        return math.fsum(s.dt for s in self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        return PulseSchedule(list(self.segments) + list(other.segments))

    def max_amplitude(self) -> float:
        return max((s.amplitude() for s in self.segments), default=0.0)

    def to_dict(self) -> dict:
        return {"segments": [s.to_dict() for s in self.segments]}

    @classmethod
    def from_dict(cls, d: dict) -> "PulseSchedule":
        return cls([PulseSegment.from_dict(s) for s in d["segments"]])
