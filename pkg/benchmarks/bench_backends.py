"""Benchmark the numba and numpy backends on the hot kernels.

Run:  python benchmarks/bench_backends.py

Workloads mirror what dominates falsification runs: stack-program
evaluation over large sample batches and adaptive Gauss-Kronrod
integration of product and moment integrands. The numba timings exclude
the one-off JIT compile (a warmup call precedes timing).
"""

import time

import numpy as np

from hhaudit import _programs as prg
from hhaudit.backends import numpy_impl
from hhaudit.functions import Interval, make_function
from hhaudit.kernels import make_kernel

try:
    from hhaudit.backends import numba_impl
except ImportError:
    numba_impl = None

REPEAT = 5


def _best(fn, *args, repeat=REPEAT):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _bench_eval(impl, code, pool, xs):
    return _best(impl.eval_program_many, code, pool, xs)


def _bench_integral(impl, code, pool, a, b, tol, transform):
    def run(code, pool):
        total = 0.0
        for _ in range(200):
            v, e, n, s, bad = impl.gk_adaptive(code, pool, a, b, tol, transform, 60, 2048)
            total += v
        return total
    return _best(run, code, pool)


def main():
    iv = Interval(0.25, 2.0)
    fg = prg.product(make_function("prod:poly:0.5,1.0,2.0,pow:2", iv).program,
                     make_function("exp:1.0", iv).program)
    moment_kernel = make_kernel("pow:0.25").program
    xs = np.random.default_rng(0).uniform(0.25, 2.0, 1_000_000)

    impls = [("numpy", numpy_impl)]
    if numba_impl is not None:
        numba_impl.eval_program_many(fg.code, fg.pool, xs[:10])  # warm JIT
        numba_impl.gk_adaptive(fg.code, fg.pool, iv.a, iv.b, 1e-10, prg.TR_NONE, 60, 2048)
        numba_impl.gk_adaptive(moment_kernel.code, moment_kernel.pool, 0.0, 1.0,
                               1e-11, prg.TR_CROSS, 60, 2048)
        impls.append(("numba", numba_impl))

    print(f"{'workload':44s} " + " ".join(f"{name:>12s}" for name, _ in impls)
          + "      speedup")
    rows = [
        ("program eval, 1e6 points", _bench_eval, (fg.code, fg.pool, xs)),
        ("product integral x200, tol 1e-10", _bench_integral,
         (fg.code, fg.pool, iv.a, iv.b, 1e-10, prg.TR_NONE)),
        ("singular moment x200, tol 1e-11", _bench_integral,
         (moment_kernel.code, moment_kernel.pool, 0.0, 1.0, 1e-11, prg.TR_CROSS)),
    ]
    for label, bench, args in rows:
        times = []
        values = []
        for _, impl in impls:
            t, v = bench(impl, *args)
            times.append(t)
            values.append(v if np.isscalar(v) else float(np.sum(v)))
        rel = abs(values[0] - values[-1]) / (1.0 + abs(values[0]))
        speedup = times[0] / times[-1] if len(times) > 1 else 1.0
        print(f"{label:44s} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times)
              + f"  {speedup:9.1f}x   (value gap {rel:.2e})")


if __name__ == "__main__":
    main()
