"""Compare the compiled and numpy kernels on the II_1 workloads used by the pipeline.

    python benchmarks/bench_kernels.py [--points 262144] [--repeat 3] [--json out.json]
"""

import argparse
import json
import time

import numpy as np

from ornstein import kernels
from ornstein.frequencies import select_sequence
from ornstein.norms import _axis_trig, _reduce64, dyadic_points
from ornstein.riesz import structural_part


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_dyadic(n, points, repeat):
    f = structural_part(select_sequence(n), 1)
    c1 = _reduce64(a[0] for a in f.freqs)
    c2 = _reduce64(a[1] for a in f.freqs)
    w = np.array([float(x) for x in f.weights])
    u1, u2 = next(dyadic_points(0, points, batch=points))
    outs = {}
    rows = []
    for name in ("cython", "python"):
        try:
            kernels.get_backend(name)
        except ImportError:
            continue
        out = np.empty(points)
        t = best_of(lambda: kernels.product_form_dyadic(c1, c2, w, True, u1, u2, out, backend=name), repeat)
        outs[name] = out.copy()
        rows.append({"kernel": "dyadic", "n": n, "points": points, "backend": name, "seconds": t,
                     "mpts_per_s": points / t / 1e6})
    if len(outs) == 2:
        diff = float(np.max(np.abs(outs["cython"] - outs["python"])))
        for r in rows:
            r["max_abs_diff"] = diff
    return rows


def bench_grid(n, side, repeat):
    f = structural_part(select_sequence(n), 2)
    ca, sa = _axis_trig([a[0] for a in f.freqs], side)
    cb, sb = _axis_trig([a[1] for a in f.freqs], side)
    w = np.array([float(x) for x in f.weights])
    outs = {}
    rows = []
    for name in ("cython", "python"):
        try:
            kernels.get_backend(name)
        except ImportError:
            continue
        out = np.empty((side, side))
        t = best_of(lambda: kernels.product_form_grid(ca, sa, cb, sb, w, False, out, backend=name), repeat)
        outs[name] = out.copy()
        rows.append({"kernel": "grid", "n": n, "points": side * side, "backend": name, "seconds": t,
                     "mpts_per_s": side * side / t / 1e6})
    if len(outs) == 2:
        diff = float(np.max(np.abs(outs["cython"] - outs["python"])))
        for r in rows:
            r["max_abs_diff"] = diff
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--points", type=int, default=1 << 18)
    ap.add_argument("--side", type=int, default=513)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", default="4,16,64")
    ap.add_argument("--json")
    args = ap.parse_args()

    rows = []
    for n in (int(s) for s in args.sizes.split(",")):
        rows += bench_dyadic(n, args.points, args.repeat)
        rows += bench_grid(n, args.side, args.repeat)

    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<7} {'n':>3} {'points':>8} {'backend':<7} {'seconds':>9} {'Mpts/s':>8} {'max diff':>9}")
    for r in rows:
        print(f"{r['kernel']:<7} {r['n']:>3} {r['points']:>8} {r['backend']:<7} {r['seconds']:>9.4f} "
              f"{r['mpts_per_s']:>8.2f} {r.get('max_abs_diff', float('nan')):>9.1e}")
    for kind in ("dyadic", "grid"):
        by = {(r["n"], r["backend"]): r["seconds"] for r in rows if r["kernel"] == kind}
        for n in sorted({k[0] for k in by}):
            if (n, "cython") in by and (n, "python") in by:
                print(f"speedup {kind} n={n}: {by[(n, 'python')] / by[(n, 'cython')]:.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
