"""Numeric tolerances shared by every module.

A single :class:`NumericPolicy` is active at a time (per context, so threads
and async tasks can override it independently).  Functions read it through
:func:`get_policy` when a tolerance argument is left as ``None``.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class NumericPolicy:
    rank_tol: float = 1e-9        # rank / membership / independence decisions
    identity_tol: float = 1e-11   # algebraic identities (unitarity, commutators)
    reconstruct_tol: float = 1e-9  # factorization round trips
    sim_step_tol: float = 1e-10   # step-halving criterion for modulated segments
    psi_one_tol: float = 1e-12    # |psi| this close to 1 means proportional generators


_DEFAULT = NumericPolicy()
_current: contextvars.ContextVar[NumericPolicy] = contextvars.ContextVar(
    "spinsteer_policy", default=_DEFAULT
)


def get_policy() -> NumericPolicy:
    return _current.get()


def set_policy(policy: NumericPolicy) -> None:
    _current.set(policy)


@contextlib.contextmanager
def use_policy(**overrides):
    """Temporarily override fields of the active policy.

    >>> with use_policy(rank_tol=1e-6):
    ...     get_policy().rank_tol
    1e-06
    """
    token = _current.set(replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
