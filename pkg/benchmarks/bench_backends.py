"""Compare the compiled window engine against the pure-Python fallback.

Runs the raw sliding-window evaluation and a full detection pass on the same
signals with both backends, reports wall times and the speedup, and checks
that the outputs are bit-identical. Usage:

    python benchmarks/bench_backends.py [--samples N] [--window W] [--seed S]
"""

import argparse
import time

import numpy as np

from algcpd import DEFAULT_BACKEND, HAVE_COMPILED
from algcpd._backend import eval_windows_raw
from algcpd.builder import ModelSpec, build_detector
from algcpd.kernels import discretize
from algcpd.runtime import DetectConfig, detect_samples


def timed(fn, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def make_signal(n, seed):
    rng = np.random.default_rng(seed)
    t = np.arange(n) * 0.01
    y = np.where(t >= 0.4 * n * 0.01, 1.0, 0.0)
    return y + 0.1 * rng.standard_normal(n)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--window", type=int, default=128)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if not HAVE_COMPILED:
        print("compiled core not available; nothing to compare (default backend: python)")
        return 0

    dd = discretize(
        build_detector(ModelSpec.monomial(0, 0)), window=args.window, dt=0.01
    )
    y = make_signal(args.samples, args.seed)
    cfg = DetectConfig(scale=args.window**-0.5, kappa=4.0)

    print(f"samples={args.samples}  window={args.window}  default backend={DEFAULT_BACKEND}")
    print(f"{'stage':<22}{'compiled':>12}{'python':>12}{'speedup':>10}  identical")

    tc, (vc, sc, rc) = timed(lambda: eval_windows_raw(dd.weights, y, backend="compiled"))
    # the python loop is ~3 orders slower; one repeat is plenty
    tp, (vp, sp, rp) = timed(lambda: eval_windows_raw(dd.weights, y, backend="python"), repeats=1)
    same_raw = (
        np.array_equal(vc, vp) and np.array_equal(sc, sp) and np.array_equal(rc, rp)
    )
    print(f"{'window evaluation':<22}{tc:>11.3f}s{tp:>11.3f}s{tp / tc:>9.1f}x  {same_raw}")

    tc2, (_, dets_c) = timed(lambda: detect_samples(dd, y, cfg, backend="compiled"))
    tp2, (_, dets_p) = timed(lambda: detect_samples(dd, y, cfg, backend="python"), repeats=1)
    key = lambda ds: [(d.time, d.score, d.kind, d.position) for d in ds]
    same_det = key(dets_c) == key(dets_p)
    print(f"{'end-to-end detect':<22}{tc2:>11.3f}s{tp2:>11.3f}s{tp2 / tc2:>9.1f}x  {same_det}")
    print(f"detections: {len(dets_c)}")

    if not (same_raw and same_det):
        print("MISMATCH: backends disagree")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
