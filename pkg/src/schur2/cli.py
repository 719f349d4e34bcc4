"""Command line front end.

Subcommands expose the measure engine, critical values, power-matching
shifts, relative-efficiency computations, the verification suite, and the
data behind the figures. Output is JSON (default) or CSV, to stdout or a
file; floats are printed with 12 significant digits. Exit codes: 0 success,
1 usage error, 2 a computation flagged a failed check or unmet target.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import are_analysis, solvers, verify
from .gauss_measure import GaussianShiftQuery, measure
from .sets import (check_b, contains_rows, cube, format_set, hat_b, parse_set,
                   pq_ball)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit(payload, args):
    if getattr(args, "format", "json") == "csv" and isinstance(payload, str):
        text = payload
    elif getattr(args, "format", "json") == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow(_round_floats(r))
        text = buf.getvalue()
    else:
        text = json.dumps(_round_floats(payload), indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _parse_p(s):
    s = s.strip().lower()
    if s in ("inf", "+inf", "infinity"):
        return math.inf
    if s in ("-inf", "-infinity"):
        return -math.inf
    return float(s)


def _parse_vec(s):
    return np.array([float(x) for x in s.split(",")])


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int,
                    default=int(os.environ.get("SCHUR2_WORKERS", "1")))
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--output", default=None)


def cmd_measure(args):
    S = parse_set(args.set, args.k)
    shift = _parse_vec(args.shift)
    if shift.size != S.k:
        raise SystemExit(f"shift has {shift.size} coordinates, set needs {S.k}")
    est = measure(GaussianShiftQuery(
        set=S, shift=shift, sigma=args.sigma, seed=args.seed,
        workers=args.workers, target_rel_error=args.target,
        method=args.method))
    _emit(est.to_json(), args)
    return 0 if est.target_met else 2


def cmd_critical(args):
    c = solvers.critical_value(args.k, args.p, args.alpha,
                               seed=args.seed, workers=args.workers)
    _emit({"k": args.k, "p": args.p, "alpha": args.alpha,
           "critical_value": c}, args)
    return 0


def _design(args):
    u = solvers.normalize_direction(_parse_vec(args.u))
    return solvers.TestDesign(args.k, args.p, args.alpha, args.beta, tuple(u))


def cmd_shift(args):
    sol = solvers.shift_solution(_design(args), seed=args.seed,
                                 workers=args.workers)
    _emit({"exists": sol.exists, "t": sol.t, "norm": sol.norm,
           "achieved_power": sol.achieved_power,
           "solver_error": sol.solver_error}, args)
    return 0


def cmd_are(args):
    res = are_analysis.are(_design(args), seed=args.seed,
                           workers=args.workers)
    _emit(res.to_dict(), args)
    return 0


def cmd_sweep(args):
    rows = are_analysis.are_direction_sweep(
        args.p, args.alpha, args.beta, n_angles=args.angles,
        seed=args.seed, workers=args.workers)
    if args.format == "csv":
        _emit(are_analysis.sweep_to_csv(rows), args)
    else:
        _emit([dict(angle=t, **r.to_dict()) for t, r in rows], args)
    return 0


def cmd_verify(args):
    if args.check == "counterexample":
        rep = verify.run_counterexample(
            verify.CounterexampleConfig(args.k, args.eps),
            seed=args.seed, budget=args.budget)
    elif args.check == "rotation":
        S = parse_set(args.set, 2)
        grid = np.linspace(0.0, math.pi / 4.0, args.points)
        rep = verify.check_rotation_monotonicity(
            S, args.radius, grid, seed=args.seed, workers=args.workers)
    elif args.check == "schur2":
        S = parse_set(args.set, args.k)
        rng = np.random.default_rng(args.seed)
        pairs = []
        for _ in range(args.points):
            v = np.abs(rng.standard_normal(args.k)) * args.radius
            w = np.sort(v * v)[::-1].copy()
            w[0] += w[1] * 0.5  # transfer toward the top coordinate
            w[1] *= 0.5
            pairs.append((np.sqrt(np.sort(v * v)[::-1]), np.sqrt(w)))
        rep = verify.check_schur2_monotonicity(S, pairs, seed=args.seed,
                                               workers=args.workers)
    else:
        rep = verify_power_report(args)
    _emit(rep, args)
    return 0 if rep.get("passed", True) else 2


def verify_power_report(args):
    c = solvers.critical_value(args.k, args.p, args.alpha, seed=args.seed)
    d = verify.EmpiricalDesign(n=args.n, k=args.k, p=args.p, c=c,
                               population=args.population,
                               replications=args.reps, seed=args.seed)
    rate, se = verify.empirical_power(d)
    ok = abs(rate - args.alpha) <= 4.0 * se
    return {"k": args.k, "p": args.p, "alpha": args.alpha, "n": args.n,
            "population": args.population, "critical_value": c,
            "rejection_rate": rate, "stderr": se, "passed": bool(ok)}


FIG1_PANELS = [
    pq_ball(2, 0.0, -1.0, 1.0), pq_ball(2, 2.0, -0.4, 1.0),
    pq_ball(2, 5.0, -1.0, 1.0), pq_ball(2, 0.7, 0.7, 1.0),
    pq_ball(2, 1.0, 0.0, 1.0), pq_ball(2, 2.0, 2.0, 1.0),
    pq_ball(2, 5.0, 1.0, 1.0),
    hat_b(2, 4.5, 1.0, 2.0 ** (-1.0 / 4.5) + 0.01),
    check_b(2, 1.5, 1.0, 0.5 - 0.05),
]


def _boundary_cloud(S, half_width=2.5, n=384):
    xs = np.linspace(-half_width, half_width, n)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    mem = contains_rows(S, pts).reshape(n, n)
    edge = np.zeros_like(mem)
    edge[:-1, :] |= mem[:-1, :] != mem[1:, :]
    edge[:, :-1] |= mem[:, :-1] != mem[:, 1:]
    i, j = np.nonzero(edge)
    return np.stack([xs[i], xs[j]], axis=1)


def cmd_figures(args):
    seed, workers = args.seed, args.workers
    if args.which == 1:
        rows = []
        for idx, S in enumerate(FIG1_PANELS):
            for x, y in _boundary_cloud(S):
                rows.append({"panel": idx, "set": format_set(S),
                             "x": float(x), "y": float(y)})
        payload = rows
    elif args.which == 2:
        S = pq_ball(2, 2.0, -0.4, 1.0)
        payload = []
        for radius in (1.0, 11.0):
            for t in (math.pi / 5.0, math.pi / 20.0):
                shift = radius * np.array([math.cos(t), math.sin(t)])
                est = measure(GaussianShiftQuery(
                    set=S, shift=shift, seed=seed, workers=workers,
                    target_rel_error=1e-4 if radius < 2 else 1e-2))
                payload.append({"radius": radius, "angle": t,
                                "value": est.value,
                                "abs_error": est.abs_error})
    elif args.which == 3:
        ps = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0]
        payload = []
        for p in ps:
            r_diag, r_coord = are_analysis.are_extremes(
                2, p, args.alpha, args.beta, seed=seed, workers=workers)
            psi = 2.0 * p / (2.0 * abs(p) + 3.0)  # compressed p axis
            payload.append({"p": p, "psi_p": psi,
                            "are_diagonal": r_diag.are,
                            "are_coordinate": r_coord.are})
    elif args.which == 4:
        payload = []
        for p in (2.1, 1.9):
            rows = are_analysis.are_direction_sweep(
                p, args.alpha, args.beta, n_angles=args.angles,
                seed=seed, workers=workers)
            for t, r in rows:
                payload.append({"p": p, "angle": t, "are": r.are,
                                "beats_lrt": bool(r.are > 1.0)})
    else:
        raise SystemExit("unknown figure")
    _emit(payload, args)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="schur2",
        description="Gaussian measures of shifted sets, p-mean test "
                    "calibration, and relative-efficiency analysis.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    m = sub.add_parser("measure", help="Gaussian measure of a shifted set")
    m.add_argument("--set", required=True,
                   help='set text, e.g. "pqball:p=2,q=-0.4,eps=1"')
    m.add_argument("--k", type=int, required=True)
    m.add_argument("--shift", required=True, help="comma-separated shift")
    m.add_argument("--sigma", type=float, default=1.0)
    m.add_argument("--target", type=float, default=None,
                   help="target relative error")
    m.add_argument("--method", default=None,
                   choices=["PRODUCT_1D", "SLICE_QUAD", "POLAR2D",
                            "MC_PLAIN", "MC_IMPORTANCE", "MC"])
    _add_common(m)
    m.set_defaults(fn=cmd_measure)

    c = sub.add_parser("critical", help="critical value c_(p, alpha)")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--p", type=_parse_p, required=True)
    c.add_argument("--alpha", type=float, required=True)
    _add_common(c)
    c.set_defaults(fn=cmd_critical)

    for name, fn, hlp in [("shift", cmd_shift, "power-matching shift"),
                          ("are", cmd_are, "relative efficiency vs the 2-mean test")]:
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--p", type=_parse_p, required=True)
        s.add_argument("--alpha", type=float, required=True)
        s.add_argument("--beta", type=float, required=True)
        s.add_argument("--u", required=True, help="direction, comma-separated")
        _add_common(s)
        s.set_defaults(fn=fn)

    sw = sub.add_parser("sweep", help="ARE over direction angles at k=2")
    sw.add_argument("--p", type=_parse_p, required=True)
    sw.add_argument("--alpha", type=float, required=True)
    sw.add_argument("--beta", type=float, required=True)
    sw.add_argument("--angles", type=int, default=11)
    _add_common(sw)
    sw.set_defaults(fn=cmd_sweep)

    v = sub.add_parser("verify", help="verification suite")
    v.add_argument("check", choices=["counterexample", "rotation", "schur2",
                                     "power"])
    v.add_argument("--k", type=int, default=2)
    v.add_argument("--eps", type=float, default=0.15)
    v.add_argument("--budget", type=int, default=400_000)
    v.add_argument("--set", default="cube:a=1")
    v.add_argument("--radius", type=float, default=2.0)
    v.add_argument("--points", type=int, default=9)
    v.add_argument("--p", type=_parse_p, default=2.0)
    v.add_argument("--alpha", type=float, default=0.05)
    v.add_argument("--n", type=int, default=400)
    v.add_argument("--reps", type=int, default=10_000)
    v.add_argument("--population", choices=["gaussian", "uniform"],
                   default="gaussian")
    _add_common(v)
    v.set_defaults(fn=cmd_verify)

    f = sub.add_parser("figures", help="emit the data behind the figures")
    f.add_argument("--which", type=int, required=True, choices=[1, 2, 3, 4])
    f.add_argument("--alpha", type=float, default=0.05)
    f.add_argument("--beta", type=float, default=0.95)
    f.add_argument("--angles", type=int, default=11)
    _add_common(f)
    f.set_defaults(fn=cmd_figures)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValueError, SystemExit) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
