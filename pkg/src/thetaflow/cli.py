"""Command-line front end.

Subcommands map one-to-one onto the library operations; every run is
reproducible from (argv, seed) and reports are emitted as JSON or CSV with
fixed formatting (UTF-8, LF, %.17g floats), so identical invocations are
byte-identical regardless of worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np

from . import cutoffs as co
from . import jacobi_group as jg
from . import stats
from . import theta as th
from . import weyl
from .errors import AccuracyNotMet, DivergenceSuspected, ThetaflowError

DEFAULT_SEED = 20260810

_CUTOFFS = {
    "gaussian": co.Gaussian(),
    "indicator": co.IndicatorUnit(),
    "triangle": co.Triangle(),
    "triangle-minus": co.TriangleMinus(),
}


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        if out.returncode == 0:
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return "unknown"


def _fmt(v: float) -> str:
    return "%.17g" % v


def emit_report(report: dict, path: str | None, fmt: str = "json",
                arrays: dict | None = None, plot_script: bool = False) -> str:
    """Serialize a report record; returns the rendered text.

    JSON carries the scalar record; CSV renders the array block (first row
    header).  A gnuplot script referencing the CSV is written alongside when
    requested."""
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        if not arrays:
            raise ThetaflowError("csv output needs an array block")
        cols = list(arrays.keys())
        lines = [",".join(cols)]
        n = len(next(iter(arrays.values())))
        for i in range(n):
            lines.append(",".join(_fmt(float(arrays[c][i])) for c in cols))
        text = "\n".join(lines) + "\n"
    else:
        raise ThetaflowError(f"unknown format '{fmt}'")
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            from .errors import IoError

            raise IoError(str(exc)) from exc
        if plot_script and arrays:
            cols = list(arrays.keys())
            script = "\n".join([
                "set datafile separator ','",
                "set key autotitle columnhead",
                "set logscale xy" if "R" in cols else "# linear axes",
                f"plot '{os.path.basename(path)}' using 1:2 with linespoints",
                "pause -1",
            ]) + "\n"
            with open(path + ".gp", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(script)
    return text


def _report_record(name: str, inputs: dict, estimate, target=None, tolerance=None,
                   passed=None, seed=None, std_error=None, certified_tail=None) -> dict:
    rec = {
        "name": name,
        "inputs": inputs,
        "estimate": estimate,
        "target": target,
        "tolerance": tolerance,
        "pass": passed,
        "seed": seed,
        "git_describe": _git_describe(),
    }
    if std_error is not None:
        rec["std_error"] = std_error
    if certified_tail is not None:
        rec["certified_tail"] = certified_tail
    return rec


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetaflow",
                                description="quadratic Weyl sums and theta-process statistics")
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("THETA_WORKERS", "1")))
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sum", help="direct Weyl sum")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--c1", type=float, default=0.0)
    s.add_argument("--c0", type=float, default=0.0)

    s = sub.add_parser("renorm", help="renormalized evaluation + benchmark vs direct")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--skip-direct", action="store_true")

    s = sub.add_parser("afe-check", help="one-step functional-equation residual grid")
    s.add_argument("--N", type=int, nargs="+", default=[1000, 10000])
    s.add_argument("--alpha", type=float, nargs="+", default=[0.0, 0.25, 0.5])

    s = sub.add_parser("curlicue", help="path CSV: columns t,re,im")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--c1", type=float, default=0.0)
    s.add_argument("--c0", type=float, default=0.0)
    s.add_argument("--points", type=int, default=2048)

    s = sub.add_parser("theta", help="theta-function point evaluation")
    s.add_argument("--cutoff", choices=sorted(_CUTOFFS) + ["chi"], default="gaussian")
    s.add_argument("--x", type=float, default=0.0)
    s.add_argument("--y", type=float, default=1.0)
    s.add_argument("--phi", type=float, default=0.0)
    s.add_argument("--xi1", type=float, default=0.0)
    s.add_argument("--xi2", type=float, default=0.0)
    s.add_argument("--zeta", type=float, default=0.0)
    s.add_argument("--tol", type=float, default=1e-8)

    for name in ("tail", "variance", "re-tail", "invariance"):
        s = sub.add_parser(name)
        s.add_argument("--M", type=int, default=100_000)
        s.add_argument("--N", type=int, default=4096)
        s.add_argument("--a", type=float, default=0.0)
        s.add_argument("--b", type=float, default=2.0)
        s.add_argument("--alpha", type=float, default=0.0)
        s.add_argument("--c1", type=float, default=math.sqrt(2.0))
        s.add_argument("--c0", type=float, default=0.0)
        if name == "tail":
            s.add_argument("--r-min", type=float, default=1.5)
            s.add_argument("--r-max", type=float, default=3.5)
            s.add_argument("--r-points", type=int, default=16)
            s.add_argument("--t", type=float, default=1.0)
            s.add_argument("--min-tail-count", type=int, default=200)
        if name == "re-tail":
            s.add_argument("--r-min", type=float, default=1.2)
            s.add_argument("--r-max", type=float, default=2.5)
            s.add_argument("--r-points", type=int, default=14)
        if name == "variance":
            s.add_argument("--t", type=float, default=1.0)

    s = sub.add_parser("haar-moments")
    s.add_argument("--M", type=int, default=1_000_000)
    s.add_argument("--cutoff", choices=["gaussian", "triangle"], default="gaussian")
    s.add_argument("--order", type=int, choices=[2, 4], default=2)

    s = sub.add_parser("mu-tail", help="invariant-measure tail of the sharp-cutoff theta")
    s.add_argument("--M", type=int, default=40_000)
    s.add_argument("--r-min", type=float, default=1.5)
    s.add_argument("--r-max", type=float, default=3.0)
    s.add_argument("--r-points", type=int, default=13)
    s.add_argument("--tol", type=float, default=1.5e-2)

    s = sub.add_parser("qcount")
    s.add_argument("--N", type=int, required=True)

    s = sub.add_parser("dchi")
    s.add_argument("--tol", type=float, default=0.06)

    s = sub.add_parser("modulus")
    s.add_argument("--M", type=int, default=64)
    s.add_argument("--N", type=int, default=4096)
    s.add_argument("--eps", type=float, default=0.05)

    for s_action in sub.choices.values():
        s_action.add_argument("--seed", type=int, default=DEFAULT_SEED)
        s_action.add_argument("--output", type=str, default=None)
        s_action.add_argument("--format", choices=["json", "csv"], default="json")
        s_action.add_argument("--plot-script", action="store_true")
    return p


def _spec_from_args(args) -> stats.SampleSpec:
    params = weyl.WeylParams(x=0.0, alpha=args.alpha, c1=args.c1, c0=args.c0)
    return stats.SampleSpec(M=args.M, N=args.N, lam=stats.Uniform(args.a, args.b),
                            params=params, seed=args.seed)


def _cmd_sum(args, workers):
    params = weyl.WeylParams(args.x, args.alpha, args.c1, args.c0)
    val = weyl.weyl_sum_poly(args.N, params)
    print(f"{val.real:.12g}{val.imag:+.12g}i")
    rec = _report_record("sum", {"N": args.N, "x": args.x, "alpha": args.alpha},
                         [val.real, val.imag], seed=args.seed)
    return rec, None


def _cmd_renorm(args, workers):
    t0 = time.perf_counter()
    res = weyl.weyl_sum_renormalized(args.N, args.x, args.alpha)
    t_renorm = time.perf_counter() - t0
    rec = {"value": [res.value.real, res.value.imag], "error_estimate": res.error_estimate,
           "iterations": res.iterations, "fallback": res.fallback, "seconds": t_renorm}
    if not args.skip_direct:
        t0 = time.perf_counter()
        direct = weyl.weyl_sum_direct(args.N, args.x, args.alpha)
        t_direct = time.perf_counter() - t0
        rec.update({"direct": [direct.real, direct.imag], "direct_seconds": t_direct,
                    "abs_diff": abs(res.value - direct),
                    "speedup": t_direct / max(t_renorm, 1e-9)})
    print(f"renorm {res.value:.6f} iters={res.iterations} est={res.error_estimate:.3g}"
          + (f" |diff|={rec['abs_diff']:.3g} speedup={rec['speedup']:.0f}x" if "abs_diff" in rec else ""))
    return _report_record("renorm", {"N": args.N, "x": args.x, "alpha": args.alpha},
                          rec, seed=args.seed), None


def _cmd_afe_check(args, workers):
    worst = 0.0
    for N in args.N:
        for alpha in args.alpha:
            for x in np.arange(0.05, 1.951, 0.05):
                Np, xr, ar, F = weyl.afe_step(N, float(x), float(alpha))
                resid = abs(weyl.weyl_sum_direct(N, float(x), float(alpha))
                            - F * weyl.weyl_sum_direct(Np, xr, ar)) * math.sqrt(x)
                worst = max(worst, resid)
    passed = worst <= 10.0
    print(f"AFE residual grid: worst sqrt(x)*|resid| = {worst:.4f} -> {'PASS' if passed else 'FAIL'}")
    return _report_record("afe-check", {"N": args.N, "alpha": args.alpha}, worst,
                          target=0.0, tolerance=10.0, passed=passed, seed=args.seed), None


def _cmd_curlicue(args, workers):
    params = weyl.WeylParams(args.x, args.alpha, args.c1, args.c0)
    t_grid = np.linspace(0.0, 1.0, args.points + 1)
    path = weyl.curlicue(args.N, params, t_grid)
    vals = path.values
    arrays = {"t": t_grid, "re": vals.real, "im": vals.imag}
    rec = _report_record("curlicue", {"N": args.N, "x": args.x}, [float(abs(vals[-1]))],
                         seed=args.seed)
    print(f"curlicue N={args.N}: |X(1)| = {abs(vals[-1]):.6f}")
    return rec, arrays


def _cmd_theta(args, workers):
    g = jg.GroupElement(complex(args.x, args.y), args.phi, args.xi1, args.xi2, args.zeta)
    if args.cutoff == "chi":
        res = th.theta_chi(g, tol=args.tol)
    else:
        res = th.theta_f(g, _CUTOFFS[args.cutoff], tol=args.tol)
    print(f"theta[{args.cutoff}] = {res.value:.12g}  terms={res.terms_used} "
          f"certified_tail={res.certified_tail:.3g} warn={res.diophantine_warning}")
    rec = _report_record("theta", {"cutoff": args.cutoff, "x": args.x, "y": args.y,
                                   "phi": args.phi},
                         [res.value.real, res.value.imag], seed=args.seed,
                         certified_tail=res.certified_tail)
    return rec, None


def _cmd_variance(args, workers):
    spec = _spec_from_args(args)
    rep = stats.mc_variance(spec, args.t, workers)
    passed = abs(rep.estimate - rep.target) <= max(0.05 * max(args.t, 0.4), 3 * rep.std_error)
    print(f"Var(X_N({args.t})) = {rep.estimate:.4f} +- {rep.std_error:.4f} "
          f"(target {rep.target}) -> {'PASS' if passed else 'FAIL'}")
    return _report_record("variance", {"M": args.M, "N": args.N, "t": args.t},
                          rep.estimate, target=rep.target, tolerance=0.05,
                          passed=passed, seed=args.seed, std_error=rep.std_error), None


def _cmd_tail(args, workers):
    spec = _spec_from_args(args)
    grid = np.linspace(args.r_min, args.r_max, args.r_points)
    rep = stats.mc_tail(spec, args.t, grid, workers, args.min_tail_count)
    print(f"tail: slope {rep.fit_slope:.3f} const {rep.fit_constant:.4f} "
          f"(target {rep.target_constant:.4f} x2) -> {'PASS' if rep.passed else 'FAIL'}")
    rec = _report_record("tail", {"M": args.M, "N": args.N}, rep.fit_constant,
                         target=rep.target_constant, tolerance=2.0, passed=rep.passed,
                         seed=args.seed)
    model = rep.target_constant * grid**rep.fit_slope
    arrays = {"R": grid, "survival": np.asarray(rep.survival), "model": model}
    return rec, arrays


def _cmd_re_tail(args, workers):
    spec = _spec_from_args(args)
    grid = np.linspace(args.r_min, args.r_max, args.r_points)
    rep = stats.mc_re_tail(spec, grid, workers)
    print(f"re-tail: slope {rep.fit_slope:.3f} const {rep.fit_constant:.5f} "
          f"(target {rep.target_constant:.5f} x2) -> {'PASS' if rep.passed else 'FAIL'}")
    rec = _report_record("re-tail", {"M": args.M, "N": args.N}, rep.fit_constant,
                         target=rep.target_constant, tolerance=2.0, passed=rep.passed,
                         seed=args.seed)
    arrays = {"R": grid, "survival": np.asarray(rep.survival),
              "left_survival": np.asarray(rep.left_survival)}
    return rec, arrays


def _cmd_haar_moments(args, workers):
    f = co.Gaussian() if args.cutoff == "gaussian" else co.Triangle()
    rep = stats.haar_moment_check(args.M, f, args.order, args.seed, workers)
    tol = 0.01 if args.order == 2 else 0.10
    passed = abs(rep.estimate - rep.target) <= tol
    print(f"haar moment {args.order}: {rep.estimate:.5f} +- {rep.std_error:.5f} "
          f"(target {rep.target:.5f}) -> {'PASS' if passed else 'FAIL'}")
    return _report_record("haar-moments", {"M": args.M, "order": args.order},
                          rep.estimate, target=rep.target, tolerance=tol, passed=passed,
                          seed=args.seed, std_error=rep.std_error), None


def _cmd_mu_tail(args, workers):
    grid = np.linspace(args.r_min, args.r_max, args.r_points)
    rep, frac_div = stats.theta_measure_tail(args.M, grid, args.seed, workers, args.tol)
    print(f"mu-tail: const {rep.fit_constant:.4f} (target {rep.target_constant:.4f} x2), "
          f"divergence-flagged {frac_div:.2%} -> {'PASS' if rep.passed else 'FAIL'}")
    rec = _report_record("mu-tail", {"M": args.M}, rep.fit_constant,
                         target=rep.target_constant, tolerance=2.0, passed=rep.passed,
                         seed=args.seed)
    arrays = {"R": grid, "survival": np.asarray(rep.survival),
              "model": rep.target_constant * grid**-6.0}
    return rec, arrays


def _cmd_qcount(args, workers):
    q = stats.q_count(args.N)
    print(q)
    return _report_record("qcount", {"N": args.N}, q, seed=args.seed), None


def _cmd_dchi(args, workers):
    est = stats.d_integral(co.IndicatorUnit(), tol=args.tol)
    rho0_double = 2.0 * (est / 2.0)
    passed = abs(est - 3.0) <= args.tol
    print(f"D(chi) = {est:.5f} (target 3 +- {args.tol}; rho0 = {est/2:.5f}) "
          f"-> {'PASS' if passed else 'FAIL'}")
    return _report_record("dchi", {"tol": args.tol}, est, target=3.0,
                          tolerance=args.tol, passed=passed, seed=args.seed), None


def _cmd_invariance(args, workers):
    spec = _spec_from_args(args)
    ks = stats.invariance_suite(spec, workers=workers)
    thresholds = {"scaling": 0.02, "rotation": 0.02, "stationarity": 0.03, "inversion": 0.03}
    passed = all(ks[k] <= thresholds.get(k, 0.03) for k in ks)
    for k, v in ks.items():
        print(f"invariance {k}: KS = {v:.4f} (<= {thresholds.get(k, 0.03)})")
    return _report_record("invariance", {"M": args.M, "N": args.N}, ks,
                          tolerance=thresholds, passed=passed, seed=args.seed), None


def _cmd_modulus(args, workers):
    rng = np.random.default_rng(np.random.PCG64(args.seed))
    paths = []
    for _ in range(args.M):
        x = rng.uniform(0.0, 2.0)
        paths.append(weyl.curlicue(args.N, weyl.WeylParams(x, 0.0, math.sqrt(2.0), 0.0)))
    stat = stats.modulus_statistic(paths, h_grid=[1.0 / 256, 1.0 / 64, 1.0 / 16], eps=args.eps)
    print(f"modulus-of-continuity statistic: {stat:.4f} (diagnostic)")
    return _report_record("modulus", {"M": args.M, "N": args.N, "eps": args.eps},
                          stat, seed=args.seed), None


_COMMANDS = {
    "sum": _cmd_sum,
    "renorm": _cmd_renorm,
    "afe-check": _cmd_afe_check,
    "curlicue": _cmd_curlicue,
    "theta": _cmd_theta,
    "tail": _cmd_tail,
    "variance": _cmd_variance,
    "re-tail": _cmd_re_tail,
    "haar-moments": _cmd_haar_moments,
    "mu-tail": _cmd_mu_tail,
    "qcount": _cmd_qcount,
    "dchi": _cmd_dchi,
    "invariance": _cmd_invariance,
    "modulus": _cmd_modulus,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        rec, arrays = _COMMANDS[args.command](args, max(args.workers, 1))
    except (AccuracyNotMet, DivergenceSuspected) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ThetaflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        if args.format == "csv" and arrays is not None:
            emit_report(rec, args.output, "csv", arrays, args.plot_script)
        else:
            emit_report(rec, args.output, "json", arrays, args.plot_script)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
