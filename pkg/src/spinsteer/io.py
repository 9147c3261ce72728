"""JSON interchange for matrices, factor sequences and schedules.

Matrices are ``{"dim": n, "re": [[...]], "im": [[...]]}`` (row-major).  Floats
are written with Python's shortest round-trip repr, so reading a file back
reproduces every entry bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .schedule import FactorSequence, PulseSchedule, Step


def matrix_to_dict(x) -> dict:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    return {"dim": int(x.shape[0]),
            "re": [[float(v) for v in row] for row in x.real],
            "im": [[float(v) for v in row] for row in x.imag]}


def matrix_from_dict(d: dict) -> np.ndarray:
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    n = int(d.get("dim", re.shape[0]))
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"matrix entries do not match dim={n}")
    return re + 1j * im


def sequence_from_dict(d: dict, generators: dict, target=None) -> FactorSequence:
    steps = [Step(s["gen"], float(s["t"])) for s in d["steps"]]
    return FactorSequence(steps, generators, target=target)


def dumps(obj, **kw) -> str:
    return json.dumps(obj, **kw)


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1))


def read_json(path):
    return json.loads(Path(path).read_text())


def read_matrix(path) -> np.ndarray:
    return matrix_from_dict(read_json(path))


def write_matrix(path, x) -> None:
    write_json(path, matrix_to_dict(x))


def read_schedule(path) -> PulseSchedule:
    return PulseSchedule.from_dict(read_json(path))
