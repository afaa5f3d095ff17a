"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--docs 200] [--tokens 256] [--seeds 20] [--dim 100]

Also checks that both backends return identical results on every input.
"""
import argparse
import time

import numpy as np

from diffmask import _pykernels

try:
    from diffmask import _ckernels
except ImportError:
    _ckernels = None


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(name, backends, make_args, docs):
    results = {}
    for label, mod in backends:
        fn = getattr(mod, name)

        def run_all():
            return [fn(*a) for a in make_args]

        results[label] = timed(run_all)
    outs = [r[1] for r in results.values()]
    for other in outs[1:]:
        for a, b in zip(outs[0], other):
            if isinstance(a, tuple):
                assert all(np.array_equal(x, y) for x, y in zip(a, b))
            else:
                assert a == b
    base = results["python"][0]
    for label, (t, _) in results.items():
        print(f"{name:<14} {label:<7} {t * 1e3:9.1f} ms  {docs / t:10.0f} docs/s  x{base / t:6.1f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=200)
    ap.add_argument("--tokens", type=int, default=256)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled kernels unavailable; timing the pure-Python backend only")

    seeds = rng.standard_normal((args.seeds, args.dim))
    nn_args = [(rng.standard_normal((args.tokens, args.dim)), seeds) for _ in range(args.docs)]
    bench("nearest_seed", backends, nn_args, args.docs)

    draw_args = []
    for _ in range(args.docs):
        g = args.tokens
        w = rng.random(g)
        draw_args.append((w, np.ones(g, dtype=np.int64), int(np.ceil(0.25 * g)), rng.random(g)))
    bench("weighted_draw", backends, draw_args, args.docs)


if __name__ == "__main__":
    main()
