"""Time every hot kernel in its numba and numpy forms.

    python3 benchmarks/bench_kernels.py [--size 512] [--repeat 5] [--json]

Each kernel runs on the same synthetic input in both forms; the numba form
is called once first so compilation is not timed.  Outputs are compared
for equality before any timing is reported.
"""
import argparse
import json
import time

import numpy as np

from yarnvision import _accel, kernels, synthgen


def _inputs(size):
    rng = np.random.default_rng(0)
    gray = rng.integers(0, 256, (size, size)).astype(np.uint8)
    mask, _ = synthgen.render_fiber_field(30.0, size=(size, size), spacing=9)
    thick = np.zeros((size, size), bool)
    for k in range(-1, 2):  # 3-pixel-wide filaments for thinning
        thick |= np.roll(mask, k, axis=0)
    blobs = rng.random((size, size)) < 0.45
    return {
        "window_median": (np.pad(gray, 1, mode="edge"), 3),
        "window_median_mad": (np.pad(gray, 2, mode="edge"), 5),
        "box_sum": (np.pad(gray.astype(np.float64), 2, mode="edge"), 5),
        "label": (blobs, 8),
        "zhang_suen": (thick,),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and np.allclose(a, b)
    return a == b


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run(size=512, repeat=5):
    rows = []
    for name, args in _inputs(size).items():
        fast, ref = kernels.VARIANTS[name]
        out_fast = fast(*args)  # compile (numba) / warm caches
        out_ref = ref(*args)
        if not _same(out_fast, out_ref):
            raise SystemExit(f"{name}: numba and numpy outputs differ")
        t_numba = _time(fast, args, repeat)
        t_numpy = _time(ref, args, repeat)
        rows.append({"kernel": name, "numba_ms": 1e3 * t_numba, "numpy_ms": 1e3 * t_numpy,
                     "speedup": t_numpy / t_numba if t_numba > 0 else float("inf")})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if not _accel.HAS_NUMBA:
        raise SystemExit("numba is not installed")
    rows = run(args.size, args.repeat)
    if args.json:
        print(json.dumps({"size": args.size, "rows": rows}, indent=2))
        return
    print(f"{args.size}x{args.size} input, best of {args.repeat}")
    print(f"{'kernel':<20}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for r in rows:
        print(f"{r['kernel']:<20}{r['numba_ms']:>12.2f}{r['numpy_ms']:>12.2f}{r['speedup']:>9.1f}x")


if __name__ == "__main__":
    main()
