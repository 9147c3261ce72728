"""Small dense complex linear algebra on 2x2, 3x3 and 4x4 matrices.

Matrices are plain ``numpy.ndarray`` objects.  The exponential of a normal
matrix is computed by unitary diagonalization, which keeps outputs unitary to
rounding even for the long durations used by the two-spin synthesis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .policy import get_policy

# spin-1/2 operators (Pauli matrices divided by two)
SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
I2 = np.eye(2, dtype=complex)


def so_basis(j: int, k: int, n: int = 3) -> np.ndarray:
    """Real skew-symmetric ``S_jk`` (1-based, j < k): +1 at (j,k), -1 at (k,j)."""
    if not 1 <= j < k <= n:
        raise ValueError(f"need 1 <= j < k <= n, got j={j}, k={k}, n={n}")
    out = np.zeros((n, n))
    out[j - 1, k - 1] = 1.0
    out[k - 1, j - 1] = -1.0
    return out


def dagger(x: np.ndarray) -> np.ndarray:
    return np.conj(x).T


def _square(x, name="matrix") -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"{name} must be square, got shape {x.shape}")
    return x


def frob(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


# ---------------------------------------------------------------- predicates

def is_unitary(x, tol: float | None = None) -> bool:
    x = _square(x)
    tol = get_policy().identity_tol if tol is None else tol
    return frob(x @ dagger(x) - np.eye(len(x))) < tol


def is_special(x, tol: float | None = None) -> bool:
    tol = get_policy().identity_tol if tol is None else tol
    return abs(np.linalg.det(_square(x)) - 1) < tol


def is_skew_hermitian(x, tol: float | None = None) -> bool:
    tol = get_policy().identity_tol if tol is None else tol
    x = _square(x)
    return frob(x + dagger(x)) < tol


def is_real_orthogonal(x, tol: float | None = None) -> bool:
    tol = get_policy().identity_tol if tol is None else tol
    x = _square(x)
    return bool(np.all(np.abs(np.imag(x)) < tol)) and is_unitary(x, tol)


# ---------------------------------------------------------------- basic ops

def inner_product(a, b):
    """Trace inner product ``Tr(a b*)``.

    Real (returned as ``float``) when both arguments are skew-Hermitian or
    both Hermitian; complex otherwise.
    """
    a = _square(a, "a")
    b = _square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    val = np.trace(a @ dagger(b))
    if abs(val.imag) <= 1e-14 * max(1.0, abs(val.real)):
        return float(val.real)
    return complex(val)


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def kron(a, b) -> np.ndarray:
    """4x4 Kronecker product; first factor is the slow index.

    With this convention the basis order is |++>, |+->, |-+>, |-->.
    """
    a = _square(a, "a")
    b = _square(b, "b")
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("kron is defined here for 2x2 factors only")
    return np.kron(a, b)


def expm(a, t: float = 1.0) -> np.ndarray:
    """``exp(a t)`` for a normal matrix ``a``.

    Skew-Hermitian inputs go through ``eigh`` of the Hermitian ``i a``; other
    normal matrices through a complex Schur form (diagonal for normal input).
    Real skew-symmetric input yields a real result.
    """
    a = _square(np.asarray(a))
    if t == 0:
        return np.eye(len(a), dtype=a.dtype if np.isrealobj(a) else complex)
    scale = max(1.0, frob(a))
    if frob(a + dagger(a)) <= 1e-13 * scale:
        h = 0.5 * (1j * a + dagger(1j * a))
        w, v = np.linalg.eigh(h)
        out = (v * np.exp(-1j * w * t)) @ dagger(v)
    else:
        if frob(a @ dagger(a) - dagger(a) @ a) > 1e-12 * scale ** 2:
            raise ValueError("expm: input is not normal")
        tri, z = scipy.linalg.schur(a.astype(complex), output="complex")
        out = (z * np.exp(np.diag(tri) * t)) @ dagger(z)
    if np.isrealobj(a):
        return out.real.copy()
    return out


def expm_series(a, t: float = 1.0, terms: int = 80) -> np.ndarray:
    """Plain Taylor series with scaling and squaring; an independent oracle."""
    a = np.asarray(a, dtype=complex) * t
    nrm = max(frob(a), 1e-300)
    s = max(0, int(np.ceil(np.log2(nrm))) + 1)
    a = a / 2 ** s
    out = np.eye(len(a), dtype=complex)
    term = np.eye(len(a), dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def logm_su2(x, *, return_flag: bool = False):
    """Principal logarithm of an SU(2) matrix.

    Returns a traceless skew-Hermitian ``L`` with ``expm(L) == x`` and
    eigenvalues ``+-i phi``, ``phi`` in [0, pi].  At ``x = -I`` the
    logarithm is not unique; the +z axis representative ``-2 pi i S_z`` is
    returned and, with ``return_flag=True``, the flag is ``True``.
    """
    x = _square(np.asarray(x, dtype=complex))
    if x.shape != (2, 2):
        raise ValueError("logm_su2 expects a 2x2 matrix")
    cos_phi = float(np.real(np.trace(x))) / 2
    k = 0.5 * (x - dagger(x))
    k = k - np.trace(k) / 2 * I2
    sin_phi = frob(k) / np.sqrt(2)
    phi = float(np.arctan2(sin_phi, cos_phi))
    degenerate = False
    if sin_phi < 1e-15:
        if cos_phi > 0:
            out = np.zeros((2, 2), dtype=complex)
        else:
            out = -2j * np.pi * SZ
            degenerate = True
    else:
        out = k * (phi / sin_phi)
    return (out, degenerate) if return_flag else out


# ---------------------------------------------------------------- Lie algebras

@dataclass(frozen=True)
class LieBasis:
    """Orthonormal (trace inner product) basis of a real matrix Lie algebra."""

    elements: tuple = field(default_factory=tuple)

    @property
    def dim(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def coefficients(self, x) -> np.ndarray:
        return np.array([np.real(np.trace(x @ dagger(e))) for e in self.elements])

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for e in self.elements:
            out = out + np.real(np.trace(x @ dagger(e))) * e
        return out

    def residual(self, x) -> float:
        """Frobenius norm of the component of ``x`` outside the span."""
        return frob(np.asarray(x) - self.project(x))

    def contains(self, x, tol: float | None = None) -> bool:
        tol = get_policy().rank_tol if tol is None else tol
        return self.residual(x) <= tol * max(1.0, frob(x))

    def orthonormality_error(self) -> float:
        if not self.elements:
            return 0.0
        gram = np.array([[np.real(np.trace(a @ dagger(b))) for b in self.elements]
                         for a in self.elements])
        return float(np.abs(gram - np.eye(len(self.elements))).max())


def _try_extend(basis: list, x, rel_tol: float) -> bool:
    """Gram-Schmidt step (two passes); append the normalized residual if new."""
    x = np.asarray(x, dtype=complex)
    pre = frob(x)
    if pre < 1e-14:
        return False
    r = x
    for _ in range(2):
        for e in basis:
            r = r - np.real(np.trace(r @ dagger(e))) * e
    res = frob(r)
    if res > rel_tol * pre:
        basis.append(r / res)
        return True
    return False


def span_basis(mats, rel_tol: float | None = None) -> LieBasis:
    """Orthonormal basis of the real linear span (no bracketing)."""
    rel_tol = get_policy().rank_tol if rel_tol is None else rel_tol
    basis: list = []
    for m in mats:
        _try_extend(basis, m, rel_tol)
    return LieBasis(tuple(basis))


def lie_closure(generators, rel_tol: float | None = None) -> LieBasis:
    """Basis of the real Lie algebra generated by skew-Hermitian matrices.

    Brackets are taken until the dimension stops growing.  A candidate
    direction is accepted iff its residual after projection exceeds
    ``rel_tol`` times its norm before projection.
    """
    generators = [np.asarray(g, dtype=complex) for g in generators]
    if not generators:
        raise ValueError("lie_closure needs at least one generator")
    dims = {g.shape for g in generators}
    if len(dims) != 1:
        raise ValueError(f"generators have mixed shapes {dims}")
    n = generators[0].shape[0]
    for g in generators:
        if frob(g + dagger(g)) > 1e-10 * max(1.0, frob(g)):
            raise ValueError("lie_closure expects skew-Hermitian generators")
    rel_tol = get_policy().rank_tol if rel_tol is None else rel_tol

    basis: list = []
    for g in generators:
        _try_extend(basis, g, rel_tol)
    frontier = list(range(len(basis)))
    max_dim = 2 * n * n
    while frontier and len(basis) < max_dim:
        new = []
        snapshot = len(basis)
        for i in frontier:
            for j in range(snapshot):
                if i == j:
                    continue
                if _try_extend(basis, commutator(basis[i], basis[j]), rel_tol):
                    new.append(len(basis) - 1)
        frontier = new
    return LieBasis(tuple(basis))
