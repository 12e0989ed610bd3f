"""Command line front end: JSON in, JSON out.

Subcommands: data, integrate, zeta-check, selftest, bench.  All big
integers cross the interface as decimal strings (residues can exceed any
portable JSON number range).  Exit codes: 0 ok, 2 invalid curve, 3 invalid
point, 4 singular system without --auto-bump-precision.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction

from .colemandata import coleman_data, coleman_data_naive, make_evalset
from .colemanint import (
    INFINITY,
    CurvePoint,
    InvalidPoint,
    SingularSystem,
    coleman_data_for_points,
    integrate_with_data,
    lift_point,
)
from .curve import Curve, InvalidCurve
from .recprod import RecProdConfig
from .verify import point_count, zeta_consistency

EXIT_OK = 0
EXIT_CURVE = 2
EXIT_POINT = 3
EXIT_SINGULAR = 4


def _load_curve(path: str, bump: int = 0) -> Curve:
    with open(path) as fh:
        blob = json.load(fh)
    try:
        p = int(blob["p"])
        N = int(blob["N"]) + bump
        Q = [Fraction(str(c)) for c in blob["Q"]]
    except (KeyError, ValueError) as e:
        raise InvalidCurve(f"malformed curve file: {e}") from e
    if N < 1:
        raise InvalidCurve("N must be >= 1")
    if str(blob["Q"][-1]).strip() not in ("1", "1/1"):
        raise InvalidCurve("leading coefficient must be exactly 1")
    curve = Curve.from_rationals(p, N, Q)
    curve.require_precision_bound()
    return curve


def _load_points(path: str, curve: Curve) -> list:
    with open(path) as fh:
        blob = json.load(fh)
    pts = []
    for entry in blob:
        if entry.get("infinity"):
            pts.append(INFINITY)
            continue
        pts.append(lift_point(curve, str(entry["x"]), str(entry["y"])))
    return pts


def _matrix_strings(M) -> list:
    return [[str(v) for v in row] for row in M]


def _result_json(curve: Curve, data, integrals=None, timings=None) -> dict:
    out = {
        "p": str(curve.ctx.p),
        "N": curve.ctx.N,
        "genus": curve.g,
        "frobenius": _matrix_strings(data.M),
        "evaluations": _matrix_strings(data.E),
        "det_m_minus_i_valuation": data.det_valuation,
    }
    if integrals is not None:
        out["integrals"] = integrals
    if timings is not None:
        out["timings_ms"] = timings
    return out


def _emit(obj: dict, out_path: str | None):
    text = json.dumps(obj, indent=1)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cfg(args) -> RecProdConfig:
    cfg = RecProdConfig()
    if getattr(args, "block_size_log2", None):
        cfg.block_size = 1 << args.block_size_log2
    return cfg


def cmd_data(args) -> int:
    curve = _load_curve(args.curve)
    points = _load_points(args.points, curve) if args.points else []
    for P in points:
        if P.at_infinity or P.y % curve.ctx.p == 0:
            raise InvalidPoint("data subcommand needs non-Weierstrass affine points")
    evalset = make_evalset(curve, [(P.x, P.y) for P in points])
    t0 = time.monotonic()
    if args.naive:
        data, _ = coleman_data_naive(curve, evalset, collect_primitives=False)
    else:
        data = coleman_data(curve, evalset, cfg=_cfg(args), threads=args.threads)
    ms = (time.monotonic() - t0) * 1000.0
    _emit(_result_json(curve, data, timings={"coleman_data": ms}), args.out)
    return EXIT_OK


def _teich_points(curve: Curve, points: list) -> list:
    from .colemanint import teichmuller

    teichs, seen = [], set()
    for P in points:
        if P.at_infinity or P.y % curve.ctx.p == 0:
            continue
        T = teichmuller(curve, P)
        key = (T.x % curve.ctx.p, T.y % curve.ctx.p)
        if key not in seen:
            seen.add(key)
            teichs.append((T.x, T.y))
    return teichs


def _load_cached_data(path: str, curve: Curve, points: list):
    """Rebuild ColemanData from a previous `data`/`integrate` output file.

    The evaluation columns must correspond to the Teichmueller points of the
    given endpoints' disks, in first-seen order (which is how this tool
    emits them)."""
    from .colemandata import ColemanData, make_evalset

    with open(path) as fh:
        blob = json.load(fh)
    if int(blob["p"]) != curve.ctx.p or int(blob["N"]) != curve.ctx.N:
        raise InvalidCurve("cached data file does not match the curve file")
    M = [[int(v) for v in row] for row in blob["frobenius"]]
    E = [[int(v) for v in row] for row in blob["evaluations"]]
    teichs = _teich_points(curve, points)
    if len(teichs) != (len(E[0]) if E else 0):
        raise InvalidPoint("cached data has a different number of evaluation columns")
    return ColemanData(curve, make_evalset(curve, teichs), M, E,
                       int(blob["det_m_minus_i_valuation"]))


def cmd_integrate(args) -> int:
    bump = 0
    while True:
        curve = _load_curve(args.curve, bump=bump)
        points = _load_points(args.points, curve)
        if len(points) % 2:
            raise InvalidPoint("integrate expects an even number of points (pairs)")
        t0 = time.monotonic()
        try:
            if args.data:
                data = _load_cached_data(args.data, curve, points)
            else:
                data = coleman_data_for_points(curve, points, cfg=_cfg(args), threads=args.threads)
            integrals = []
            for i in range(0, len(points), 2):
                res = integrate_with_data(data, points[i], points[i + 1])
                integrals.append({
                    "values": [
                        {"mantissa": str(v.mantissa), "shift": v.shift, "abs_prec": v.abs_prec}
                        for v in res.values
                    ],
                    "abs_prec": res.abs_prec,
                })
        except SingularSystem:
            if args.auto_bump_precision and bump < 4:
                bump += 1
                continue
            print("singular system: det(M - I) = 0 mod p^N", file=sys.stderr)
            return EXIT_SINGULAR
        ms = (time.monotonic() - t0) * 1000.0
        _emit(_result_json(curve, data, integrals=integrals,
                           timings={"integrate": ms}), args.out)
        return EXIT_OK


def cmd_zeta_check(args) -> int:
    curve = _load_curve(args.curve)
    t0 = time.monotonic()
    if args.naive:
        data, _ = coleman_data_naive(curve, [], collect_primitives=False)
    else:
        data = coleman_data(curve, [], cfg=_cfg(args), threads=args.threads)
    check = zeta_consistency(data)
    ms = (time.monotonic() - t0) * 1000.0
    out = _result_json(curve, data, timings={"zeta_check": ms})
    out["zeta"] = {
        "consistent": check.ok,
        "full_lift": check.full_lift,
        "numerator": [str(c) for c in check.numerator.coeffs] if check.numerator else None,
        "comparisons": [
            {"k": k, "brute_force": str(b), "derived": str(d), "mode": mode}
            for (k, b, d, mode) in check.comparisons
        ],
    }
    _emit(out, args.out)
    return EXIT_OK if check.ok else 1


def cmd_selftest(args) -> int:
    rng = random.Random(7)
    failures = 0
    trials = args.trials
    for trial in range(trials):
        g = rng.choice([1, 2])
        N = rng.choice([1, 2])
        p = rng.choice([p for p in (11, 13, 17, 19, 23) if p > (2 * N - 1) * (2 * g + 1)])
        curve = None
        while curve is None:
            coeffs = [rng.randrange(p) for _ in range(2 * g + 1)] + [1]
            try:
                curve = Curve.from_rationals(p, N, coeffs)
            except InvalidCurve:
                curve = None
        pts = []
        for x in range(p):
            q = curve.q_at(x)
            if q % p == 0:
                continue
            r = curve.ctx.sqrt_mod_p(q)
            if r is not None:
                pts.append((x, curve.ctx.sqrt_unit(q, r)))
            if len(pts) >= 2:
                break
        fast = coleman_data(curve, make_evalset(curve, pts))
        naive, _ = coleman_data_naive(curve, make_evalset(curve, pts), collect_primitives=False)
        ok = fast.M == naive.M and fast.E == naive.E and zeta_consistency(fast, kmax=1).ok
        status = "ok" if ok else "FAIL"
        print(f"selftest {trial + 1}/{trials}: p={p} g={g} N={N} L={len(pts)} ... {status}")
        failures += 0 if ok else 1
    return EXIT_OK if failures == 0 else 1


def cmd_bench(args) -> int:
    curve = _load_curve(args.curve)
    reps = args.reps
    timings = {}
    for label, naive in (("fast", False), ("naive", True)):
        if naive and not args.naive:
            continue
        best = None
        for _ in range(reps):
            t0 = time.monotonic()
            if naive:
                coleman_data_naive(curve, [], collect_primitives=False)
            else:
                coleman_data(curve, [], cfg=_cfg(args), threads=args.threads)
            dt = (time.monotonic() - t0) * 1000.0
            best = dt if best is None else min(best, dt)
        timings[label] = best
    _emit({"p": str(curve.ctx.p), "N": curve.ctx.N, "genus": curve.g,
           "timings_ms": timings}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypellcoleman",
                                 description="Coleman data and integrals on odd degree hyperelliptic curves")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, points_default=None):
        sp.add_argument("--curve", required=True, help="curve JSON file")
        sp.add_argument("--out", default=None, help="output JSON file (default stdout)")
        sp.add_argument("--naive", action="store_true", help="force the sequential oracle path")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--block-size-log2", type=int, default=None,
                        help="override the giant-step block size")

    sp = sub.add_parser("data", help="matrix of Frobenius and evaluations")
    common(sp)
    sp.add_argument("--points", default=None, help="points JSON file")
    sp.set_defaults(fn=cmd_data)

    sp = sub.add_parser("integrate", help="Coleman integrals for point pairs")
    common(sp)
    sp.add_argument("--points", required=True, help="points JSON file (even count, taken as pairs)")
    sp.add_argument("--auto-bump-precision", action="store_true",
                    help="retry with N+1 when det(M-I) = 0 mod p^N")
    sp.add_argument("--data", default=None,
                    help="reuse Coleman data from a previous integrate output file")
    sp.set_defaults(fn=cmd_integrate)

    sp = sub.add_parser("zeta-check", help="consistency of det(1-TM) with brute-force counts")
    common(sp)
    sp.set_defaults(fn=cmd_zeta_check)

    sp = sub.add_parser("selftest", help="randomized fast-vs-naive consistency check")
    sp.add_argument("--trials", type=int, default=5)
    sp.set_defaults(fn=cmd_selftest)

    sp = sub.add_parser("bench", help="time the Coleman data computation")
    common(sp)
    sp.add_argument("--reps", type=int, default=1)
    sp.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InvalidCurve as e:
        print(f"invalid curve: {e}", file=sys.stderr)
        return EXIT_CURVE
    except InvalidPoint as e:
        print(f"invalid point: {e}", file=sys.stderr)
        return EXIT_POINT
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CURVE


if __name__ == "__main__":
    sys.exit(main())
