"""Command line front end.

Every subcommand prints one JSON document on stdout.  Exit status is 0 on
success, 2 when a verification residual exceeds its tolerance and 1 on bad
input.  ``--tol`` replaces every verification threshold and the policy's
reconstruction tolerance.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

import numpy as np

from . import io, so3, su2, synth, twospin
from .policy import use_policy
from .schedule import PiTime
from .simulate import simulate

EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2


class CliError(Exception):
    pass


def _log(args, *lines):
    if args.verbose:
        for line in lines:
            print(line, file=sys.stderr)


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


_PI_TIME = re.compile(r"([0-9]*\.?[0-9]*)pi(?:/([0-9]+))?([+-][0-9.eE+-]+)?")


def parse_time(text: str) -> PiTime:
    """``1.5``, ``pi``, ``3pi``, ``3pi/2`` or ``2pi+0.25``."""
    s = text.replace(" ", "").lower()
    m = _PI_TIME.fullmatch(s)
    if m is None:
        return PiTime.of(float(s))
    num, den, rest = m.groups()
    coeff = Fraction(num) if num else Fraction(1)
    if den:
        coeff /= int(den)
    return PiTime(coeff, float(rest) if rest else 0.0)


def load_system(path):
    d = io.read_json(path)
    if "gamma1" in d:
        return twospin.SpinSystem.from_dict(d)
    if "A" in d and "B" in d:
        return su2.Su2Problem(io.matrix_from_dict(d["A"]), io.matrix_from_dict(d["B"]),
                              float(d.get("M", 1.0)))
    raise CliError(f"{path}: not a two-spin system or a one-spin problem")


def _problem(args) -> su2.Su2Problem:
    return su2.Su2Problem(io.read_matrix(args.A), io.read_matrix(args.B), args.M)


def _status(resid: float, tol: float) -> int:
    return EXIT_OK if resid <= tol else EXIT_VERIFY


# ---------------------------------------------------------------- subcommands

def cmd_decompose_su2(args):
    prob = _problem(args)
    X = io.read_matrix(args.target)
    sched = su2.steer_theorem3(prob, X)
    out = {"schedule": sched.to_dict()}
    if "sequence" in sched.meta:
        seq = sched.meta["sequence"]
        out["sequence"] = seq.to_dict()
        out["m"] = seq.meta["m"]
        out["inner_factor_count"] = seq.meta["inner_factor_count"]
        out["lowenthal_order"] = su2.lowenthal_order(seq.meta["frame"].psi)
        resid = seq.residual
    else:
        resid = simulate(prob, sched, X, log=False).residual_to_target
    out["residual"] = resid
    _log(args, f"residual {resid:.3e}, {len(sched)} segments, T={sched.total_time:.6g}")
    return out, _status(resid, _tol(args, 1e-9))


def cmd_decompose_so3(args):
    Z1, Z2 = io.read_matrix(args.Z1).real, io.read_matrix(args.Z2).real
    X = io.read_matrix(args.target).real
    pair = so3.canonicalize_so3(Z1, Z2)
    seq = pair.to_original(so3.factorize_so3(pair, pair.to_canonical(X)))
    resid = seq.residual
    out = {"sequence": seq.to_dict(), "m": seq.meta["m"], "rho": pair.rho, "residual": resid}
    _log(args, f"residual {resid:.3e}, {len(seq.steps)} factors")
    return out, _status(resid, _tol(args, 1e-9))


def cmd_synth_one(args):
    prob = _problem(args)
    X = io.read_matrix(args.target)
    sched = su2.steer_theorem3(prob, X)
    if args.T is not None:
        sched = su2.pad_to_time(prob, sched, float(parse_time(args.T)))
    res = simulate(prob, sched, X, log=False)
    out = {"schedule": sched.to_dict(), "total_time": sched.total_time,
           "residual": res.residual_to_target}
    return out, _status(res.residual_to_target, _tol(args, 1e-8))


def cmd_synth_two(args):
    system = load_system(args.system)
    if not isinstance(system, twospin.SpinSystem):
        raise CliError("synth two-spin needs a two-spin system file")
    Sf = io.read_matrix(args.Sf)
    target = synth.TwoSpinTarget(parse_time(args.Tf), Sf)
    r = synth.synth_full(system, target, nbar=args.nbar, n=args.n)
    out = {"schedule": r.schedule.to_dict(), "nbar": r.nbar, "n": r.n, "kbar": r.kbar,
           "scaled_total_time": {"pi_coeff": str(r.total_scaled.pi_coeff),
                                 "rem": r.total_scaled.rem},
           "total_time": r.total_physical,
           "murnaghan": {"thetas": list(r.params.thetas), "sigmas": list(r.params.sigmas),
                         "alphas": list(r.params.alphas)}}
    status = EXIT_OK
    if not args.no_verify:
        res = simulate(system, r.schedule, r.lab_target(), log=False)
        out["residual"] = res.residual_to_target
        status = _status(res.residual_to_target, _tol(args, 1e-6))
        _log(args, f"simulated residual {res.residual_to_target:.3e}")
    return out, status


def cmd_simulate(args):
    system = load_system(args.system)
    sched = io.read_schedule(args.schedule)
    target = io.read_matrix(args.target) if args.target else None
    res = simulate(system, sched, target)
    out = res.to_dict()
    if target is None:
        return out, EXIT_OK
    return out, _status(res.residual_to_target, _tol(args, 1e-8))


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:n`` (linear) or ``lo:hi:n:log``."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise CliError(f"bad grid {spec!r}; expected lo:hi:n[:log]")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if len(parts) == 4:
        if parts[3] != "log" or lo <= 0:
            raise CliError("log grids need the suffix ':log' and lo > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def cmd_analyze_psi(args):
    A, B = io.read_matrix(args.A), io.read_matrix(args.B)
    rows = []
    for M in parse_grid(args.grid):
        if M <= 0:
            continue
        psi = su2.psi_of_M((A, B), float(M))
        rows.append({"M": float(M), "psi": psi, "s": su2.lowenthal_order(psi)})
    _log(args, f"{'M':>12} {'|psi|':>12} {'s':>4}",
         *(f"{r['M']:12.6g} {r['psi']:12.6g} {r['s']:4d}" for r in rows))
    return {"k": su2.control_authority(A, B), "rows": rows}, EXIT_OK


def cmd_classify(args):
    system = load_system(args.system)
    if not isinstance(system, twospin.SpinSystem):
        raise CliError("classify needs a two-spin system file")
    cls, dim = twospin.classify_controllability(system)
    return {"class": cls.value, "dim": dim}, EXIT_OK


def cmd_reach(args):
    system = load_system(args.system)
    X = io.read_matrix(args.target)
    T = float(parse_time(args.T))
    member = twospin.member_large_time(system, X, T, tol=_tol(args, 1e-8))
    return {"member": bool(member), "T": T}, EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinsteer", description=__doc__.splitlines()[0])
    p.add_argument("--tol", type=float, default=None, help="verification tolerance")
    p.add_argument("--verbose", action="store_true", help="tables on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    dec = sub.add_parser("decompose").add_subparsers(dest="kind", required=True)
    d2 = dec.add_parser("su2")
    for name in ("--A", "--B", "--target"):
        d2.add_argument(name, required=True)
    d2.add_argument("--M", type=float, required=True)
    d2.set_defaults(func=cmd_decompose_su2)
    d3 = dec.add_parser("so3")
    for name in ("--Z1", "--Z2", "--target"):
        d3.add_argument(name, required=True)
    d3.set_defaults(func=cmd_decompose_so3)

    syn = sub.add_parser("synth").add_subparsers(dest="kind", required=True)
    s1 = syn.add_parser("one-spin")
    for name in ("--A", "--B", "--target"):
        s1.add_argument(name, required=True)
    s1.add_argument("--M", type=float, required=True)
    s1.add_argument("--T", default=None, help="pad the schedule to this total time")
    s1.set_defaults(func=cmd_synth_one)
    s2 = syn.add_parser("two-spin")
    s2.add_argument("--system", required=True)
    s2.add_argument("--Sf", required=True)
    s2.add_argument("--Tf", required=True, help="scaled time, e.g. 1.0, pi or 3pi/2")
    s2.add_argument("--nbar", type=int, default=None)
    s2.add_argument("--n", type=int, default=None)
    s2.add_argument("--no-verify", action="store_true")
    s2.set_defaults(func=cmd_synth_two)

    sim = sub.add_parser("simulate")
    sim.add_argument("--system", required=True)
    sim.add_argument("--schedule", required=True)
    sim.add_argument("--target", default=None)
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze").add_subparsers(dest="kind", required=True)
    ap = ana.add_parser("psi")
    ap.add_argument("--A", required=True)
    ap.add_argument("--B", required=True)
    ap.add_argument("--grid", required=True, help="lo:hi:n or lo:hi:n:log")
    ap.set_defaults(func=cmd_analyze_psi)

    cl = sub.add_parser("classify")
    cl.add_argument("--system", required=True)
    cl.set_defaults(func=cmd_classify)

    rc = sub.add_parser("reach")
    rc.add_argument("--system", required=True)
    rc.add_argument("--T", required=True)
    rc.add_argument("--target", required=True)
    rc.set_defaults(func=cmd_reach)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {} if args.tol is None else {"reconstruct_tol": args.tol}
    try:
        with use_policy(**overrides):
            out, status = args.func(args)
    except (CliError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}))
        return EXIT_ERROR
    print(json.dumps(out, default=_json_default))
    return status


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
