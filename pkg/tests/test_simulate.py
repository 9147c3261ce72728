import math
import warnings

import numpy as np
import pytest

from conftest import haar_su, random_su2_algebra
from spinsteer.linalg import expm, frob
from spinsteer.schedule import FactorSequence, Modulation, PulseSchedule, PulseSegment, Step
from spinsteer.simulate import magnus6_propagator, modulated_propagator, simulate, verify
from spinsteer.su2 import Su2Problem, canonical_frame, factorize_theorem2, steer_theorem3
from spinsteer.synth import ScaledFrame


def _problem(rng, M=0.8):
    return Su2Problem(random_su2_algebra(rng), random_su2_algebra(rng), M)


def test_empty_schedule(rng):
    res = simulate(_problem(rng), PulseSchedule(), np.eye(2))
    assert res.residual_to_target == 0 and res.total_time == 0


def test_single_drift_segment(rng):
    p = _problem(rng)
    res = simulate(p, PulseSchedule([PulseSegment(1.7)]))
    assert frob(res.endpoint - expm(p.A, 1.7)) < 1e-14


def test_theorem3_schedule_cross_check(rng):
    p = _problem(rng)
    x = haar_su(2, rng)
    assert simulate(p, steer_theorem3(p, x), x).residual_to_target < 1e-8


def test_bound_violation_warns(rng):
    p = _problem(rng, 0.5)
    with pytest.warns(UserWarning, match="exceed"):
        res = simulate(p, PulseSchedule([PulseSegment(1.0, 0.9)]))
    assert res.bound_violations[0]["segment"] == 0


def test_negative_duration_rejected(rng):
    with pytest.raises(ValueError):
        simulate(_problem(rng), PulseSchedule([PulseSegment(-1.0)]))


def test_y_control_on_one_control_system(rng):
    with pytest.raises(ValueError):
        simulate(_problem(rng), PulseSchedule([PulseSegment(1.0, 0.0, 0.3)]))


def test_magnus_sixth_order():
    fr = ScaledFrame(6.0, 1.0, 1.3)
    mod = Modulation(0.5, fr.vz, 0.2, -1)
    ref = magnus6_propagator(fr.drift, fr.controls, mod, 0.0, 2.0, 2048)
    errs = [frob(magnus6_propagator(fr.drift, fr.controls, mod, 0.0, 2.0, n) - ref)
            for n in (8, 16)]
    assert 40 < errs[0] / errs[1] < 100  # ~2^6


def test_step_halving_converged():
    fr = ScaledFrame(6.0, 1.0, 1.3)
    mod = Modulation(0.5, fr.vz, 0.0, -1)
    U, n, change = modulated_propagator(fr.drift, fr.controls, mod, 0.3, 3.0)
    assert change < 1e-10
    finer = magnus6_propagator(fr.drift, fr.controls, mod, 0.3, 3.0, 2 * n)
    assert frob(finer - U) < 1e-10


def test_unitarity_over_many_segments(rng):
    p = _problem(rng)
    segs = [PulseSegment(0.01, p.M if i % 2 else -p.M) for i in range(20000)]
    assert simulate(p, PulseSchedule(segs), log=False).unitarity_drift < 1e-9


def test_verify_theorem2(rng):
    p = _problem(rng, 0.3)
    x = haar_su(2, rng)
    seq = factorize_theorem2(canonical_frame(p.Z1, p.Z2), x)
    rep = verify(seq)
    assert rep.residual < 1e-9 and rep.within_bound
    assert frob(simulate(p, steer_theorem3(p, x)).endpoint - seq.product()) < 1e-10


def test_verify_empty_and_perturbed(rng):
    gens = {"a": random_su2_algebra(rng), "b": random_su2_algebra(rng)}
    assert verify(FactorSequence([], gens), np.eye(2)).residual == 0
    seq = FactorSequence([Step("a", 0.4), Step("b", 1.1)], gens)
    target = seq.product()
    r1 = verify(FactorSequence([Step("a", 0.4 + 1e-3), Step("b", 1.1)], gens), target).residual
    r2 = verify(FactorSequence([Step("a", 0.4 + 2e-3), Step("b", 1.1)], gens), target).residual
    assert r2 / r1 == pytest.approx(2.0, rel=1e-2)
