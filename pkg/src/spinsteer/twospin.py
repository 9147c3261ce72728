"""Two coupled spin-1/2 particles: model matrices, Lie-algebra structure and
reachable-set tools for the homonuclear Ising case.

Units: ``J`` and the gyromagnetic ratios are angular frequencies (hbar = 1);
durations are seconds in the lab frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import (SX, SY, SZ, I2, LieBasis, commutator, dagger, expm, frob,
                     kron, lie_closure, span_basis)
from .policy import get_policy

SPIN = (SX, SY, SZ)

# Unitary diagonalizing the isotropic coupling; X -> T X T*.
T_DIAG = np.array([
    [0, 1j, -1j, 0],
    [0, 1, 1, 0],
    [-1j, 0, 0, -1j],
    [-1, 0, 0, 1],
], dtype=complex) / math.sqrt(2)


def _two(a, b):
    return kron(a, b)


def coupling(k: int, j: int) -> np.ndarray:
    """``I_1k I_2j`` (k, j in 0..2 for x, y, z)."""
    return _two(SPIN[k], SPIN[j])


def isotropic_coupling(J: float) -> np.ndarray:
    return -1j * J * sum(coupling(k, k) for k in range(3))


def _verify_t_diag() -> None:
    d = T_DIAG @ isotropic_coupling(1.0) @ dagger(T_DIAG)
    want = -1j / 4 * np.diag([-3.0, 1, 1, 1])
    if frob(d - want) > 1e-11 or frob(T_DIAG @ dagger(T_DIAG) - np.eye(4)) > 1e-11:
        raise RuntimeError("hard-coded coordinate change does not diagonalize D")


_verify_t_diag()


@dataclass(frozen=True, eq=False)
class SpinSystem:
    gamma1: float
    gamma2: float
    J: float
    uz_bar: float = 0.0
    M: float = 1.0
    abc: tuple | None = None  # (a, b, c); Ising (0, 0, J) when None

    def __post_init__(self):
        if self.J == 0:
            raise ValueError("coupling J must be nonzero")
        if not self.M > 0:
            raise ValueError("control bound M must be positive")
        abc = (0.0, 0.0, float(self.J)) if self.abc is None else tuple(map(float, self.abc))
        if len(abc) != 3:
            raise ValueError("abc must have three coefficients")
        object.__setattr__(self, "abc", abc)

    # ------------------------------------------------------------ matrices
    @property
    def A(self) -> np.ndarray:
        a, b, c = self.abc
        return -1j * (a * coupling(0, 0) + b * coupling(1, 1) + c * coupling(2, 2))

    def B(self, axis: int) -> np.ndarray:
        s = SPIN[axis]
        return -1j * (self.gamma1 * _two(s, I2) + self.gamma2 * _two(I2, s))

    @property
    def Bx(self) -> np.ndarray:
        return self.B(0)

    @property
    def By(self) -> np.ndarray:
        return self.B(1)

    @property
    def Bz(self) -> np.ndarray:
        return self.B(2)

    @property
    def D(self) -> np.ndarray:
        return isotropic_coupling(self.J)

    @property
    def A1(self) -> np.ndarray:
        return -1j * self.J / 3 * (2 * coupling(2, 2) - coupling(0, 0) - coupling(1, 1))

    @property
    def A2(self) -> np.ndarray:
        return -1j * self.J / 3 * (2 * coupling(1, 1) - coupling(0, 0) - coupling(2, 2))

    @property
    def A3(self) -> np.ndarray:
        return -1j * self.J / 3 * (2 * coupling(0, 0) - coupling(2, 2) - coupling(1, 1))

    @property
    def homonuclear(self) -> bool:
        return self.gamma1 == self.gamma2

    @property
    def is_ising(self) -> bool:
        a, b, c = self.abc
        return a == 0 and b == 0 and c == self.J

    # simulator interface
    @property
    def drift(self) -> np.ndarray:
        return self.A + self.uz_bar * self.Bz

    @property
    def controls(self) -> tuple:
        return (self.Bx, self.By)

    def to_dict(self) -> dict:
        return {"gamma1": self.gamma1, "gamma2": self.gamma2, "J": self.J,
                "uz": self.uz_bar, "M": self.M, "abc": list(self.abc)}

    @classmethod
    def from_dict(cls, d: dict) -> "SpinSystem":
        return cls(float(d["gamma1"]), float(d["gamma2"]), float(d["J"]),
                   float(d.get("uz", 0.0)), float(d.get("M", 1.0)),
                   tuple(d["abc"]) if d.get("abc") is not None else None)


def build_system(gamma1, gamma2=None, J=1.0, uz_bar=0.0, M=1.0, abc=None) -> SpinSystem:
    """Homonuclear when ``gamma2`` is omitted."""
    return SpinSystem(gamma1, gamma1 if gamma2 is None else gamma2, J, uz_bar, M, abc)


@dataclass(frozen=True, eq=False)
class CoordinateChange:
    T: np.ndarray = T_DIAG
    direction: str = "to_diag"

    def __call__(self, x) -> np.ndarray:
        if self.direction == "to_diag":
            return self.T @ x @ dagger(self.T)
        if self.direction == "to_lab":
            return dagger(self.T) @ x @ self.T
        raise ValueError(f"unknown direction {self.direction!r}")

    def inverse(self) -> "CoordinateChange":
        return CoordinateChange(self.T, "to_lab" if self.direction == "to_diag" else "to_diag")


TO_DIAG = CoordinateChange(T_DIAG, "to_diag")
TO_LAB = CoordinateChange(T_DIAG, "to_lab")


# ---------------------------------------------------------------- controllability

class Controllability(str, Enum):
    SU4_FULL = "SU4_full"
    U3_HOMONUCLEAR = "U3_homonuclear"
    U2_ISOTROPIC = "U2_isotropic"
    OTHER = "Other"


_CLASSES = {15: Controllability.SU4_FULL, 9: Controllability.U3_HOMONUCLEAR,
            4: Controllability.U2_ISOTROPIC}


def dynamical_algebra(sys: SpinSystem) -> LieBasis:
    return lie_closure([sys.drift, sys.Bx, sys.By])


def classify_controllability(sys: SpinSystem):
    """(class, dimension) of the Lie algebra generated by the drift and B_x, B_y."""
    dim = dynamical_algebra(sys).dim
    return _CLASSES.get(dim, Controllability.OTHER), dim


@dataclass(frozen=True)
class CartanSplit:
    K: LieBasis
    P: LieBasis
    residuals: dict


def cartan_inclusion_residuals(K: LieBasis, P: LieBasis) -> dict:
    """Largest out-of-subspace residual of [K,K], [K,P] and [P,P] brackets."""
    def worst(xs, ys, target):
        return max((target.residual(commutator(x, y)) for x in xs for y in ys), default=0.0)
    return {"KK_in_K": worst(K, K, K), "KP_in_P": worst(K, P, P), "PP_in_K": worst(P, P, K)}


def cartan_split(sys: SpinSystem) -> CartanSplit:
    """K = algebra of the collective rotations, P = its orbit through A1."""
    if not (sys.homonuclear and sys.is_ising):
        raise ValueError("cartan_split applies to homonuclear Ising systems")
    K = lie_closure([sys.Bx, sys.By, sys.Bz])
    tol = get_policy().rank_tol
    p_elems = [sys.A1]
    basis = span_basis(p_elems, tol)
    frontier = list(basis.elements)
    while frontier:
        grown = []
        for x in frontier:
            for k in K:
                c = commutator(k, x)
                if frob(c) > 1e-14 and not basis.contains(c, tol):
                    basis = span_basis(list(basis.elements) + [c], tol)
                    grown.append(basis.elements[-1])
        frontier = grown
    res = cartan_inclusion_residuals(K, basis)
    if max(res.values()) > 1e-10:
        raise RuntimeError(f"Cartan inclusions violated: {res}")
    return CartanSplit(K, basis, res)


# ---------------------------------------------------------------- reachable sets

def split_local(K, tol: float = 1e-10) -> np.ndarray:
    """Return ``L`` in SU(2) with ``K = L (x) L``; raise if no such L exists."""
    K = np.asarray(K, dtype=complex)
    blocks = [[K[2 * i:2 * i + 2, 2 * j:2 * j + 2] for j in range(2)] for i in range(2)]
    i, j = max(((i, j) for i in range(2) for j in range(2)),
               key=lambda ij: frob(blocks[ij[0]][ij[1]]))
    blk = blocks[i][j]
    nb = frob(blk)
    if nb < 1e-12:
        raise ValueError("matrix is not of the form L (x) L")
    L = blk * (math.sqrt(2) / nb)
    det = np.linalg.det(L)
    if abs(abs(det) - 1) > 1e-8:
        raise ValueError("matrix is not of the form L (x) L")
    L = L / np.sqrt(det)
    for cand in (L, -L):
        if frob(np.kron(cand, cand) - K) < tol:
            return cand
    raise ValueError("matrix is not of the form L (x) L")


def kak_element(sys: SpinSystem, K1, K2, alphas, T: float) -> np.ndarray:
    """``e^{DT/3} K1 e^{a1 A1 + a2 A2 + a3 A3} K2`` with a_i >= 0 summing to T."""
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) != 3 or min(alphas) < 0:
        raise ValueError("alphas must be three non-negative numbers")
    if abs(sum(alphas) - T) > 1e-10 * max(1.0, abs(T)):
        raise ValueError(f"alphas sum to {sum(alphas)}, expected T={T}")
    split_local(K1)
    split_local(K2)
    a1, a2, a3 = alphas
    gen = a1 * sys.A1 + a2 * sys.A2 + a3 * sys.A3
    return expm(sys.D, T / 3) @ np.asarray(K1) @ expm(gen) @ np.asarray(K2)


def large_time_threshold(sys: SpinSystem) -> float:
    return 36 * math.pi / abs(sys.J)


def block_form_error(S) -> float:
    """Distance of a 4x4 matrix from ``diag(1, G)`` with G in SU(3)."""
    S = np.asarray(S, dtype=complex)
    G = S[1:, 1:]
    off = math.sqrt(frob(S[0, 1:]) ** 2 + frob(S[1:, 0]) ** 2)
    return max(abs(S[0, 0] - 1), off, frob(G @ dagger(G) - np.eye(3)),
               abs(np.linalg.det(G) - 1))


def member_large_time(sys: SpinSystem, X_f, T: float, tol: float = 1e-8) -> bool:
    """Membership of a lab-frame ``X_f`` in the reachable set at time ``T >= 36 pi/|J|``."""
    if not (sys.homonuclear and sys.is_ising):
        raise ValueError("the large-time test applies to homonuclear Ising systems")
    if T < large_time_threshold(sys) * (1 - 1e-12):
        raise ValueError(f"T={T} is below 36 pi/|J|={large_time_threshold(sys)}; "
                         "use kak_element to generate the reachable set instead")
    S = TO_DIAG(expm(sys.D, -T / 3) @ np.asarray(X_f, dtype=complex))
    return block_form_error(S) < tol
