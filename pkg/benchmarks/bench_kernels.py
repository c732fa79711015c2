"""Compare the compiled and pure-Python batch kernels.

    python benchmarks/bench_kernels.py --records 20000 --repeat 5
"""

import argparse
import time

import numpy as np

from affcorr import SimConfig, generate_scene, kernels


def make_batch(n, seed):
    cfg = SimConfig(seed=seed, points=1)
    R, t, nn, d, p1 = [], [], [], [], []
    for i in range(n):
        sc = generate_scene(cfg, i)
        R.append(sc.pose.R.ravel())
        t.append(sc.pose.t)
        nn.append(sc.plane.normal)
        d.append(sc.plane.distance)
        p1.append(sc.points[0].p1.as_array())
    return np.array(R), np.array(t), np.array(nn), np.array(d), np.array(p1)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--records", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    batch = make_batch(args.records, args.seed)
    backends = ["python"]
    try:
        from affcorr import _ckernels  # noqa: F401

        backends.insert(0, "cython")
    except ImportError:
        print("compiled extension not built; timing the fallback only")

    results = {}
    for name in backends:
        secs = best_of(lambda: kernels.check_batch(*batch, backend=name), args.repeat)
        results[name] = secs
        print(f"{name:>7}: {secs * 1e3:9.2f} ms  ({args.records / secs:12,.0f} records/s)")
    if len(results) == 2:
        a = kernels.check_batch(*batch, backend="cython")
        b = kernels.check_batch(*batch, backend="python")
        same = all(np.array_equal(a[k], b[k]) for k in a)
        print(f"speedup: {results['python'] / results['cython']:.1f}x, outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
