"""Compare the numba and numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--no-end-to-end]

Per-kernel timings call both implementations directly in one process. The
end-to-end section runs a fixed Lévy workload in two subprocesses, once with
MDA_WORKBENCH_DISABLE_JIT=1 and once without, so the env-flag dispatch itself
is exercised.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from mdaworkbench import _kernels as K

WORKLOAD = """
import time, numpy as np
from mdaworkbench import _kernels
from mdaworkbench.components import Exponential, Normal, Uniform
from mdaworkbench.dist import Distribution1D
from mdaworkbench.levy import levy_distance
rng = np.random.default_rng(0)
pairs = []
for _ in range(40):
    f = Distribution1D([(0.5, Normal(rng.normal(), 1.0)), (0.5, Uniform(0.0, 1.0 + rng.random()))])
    g = Distribution1D([(0.3, Exponential(1.0 + rng.random())), (0.7, Normal(rng.normal(), 0.5))])
    pairs.append((f, g))
levy_distance(*pairs[0])
t = time.perf_counter()
for f, g in pairs:
    levy_distance(f, g)
print(_kernels.BACKEND, time.perf_counter() - t)
"""


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def kernel_cases(rng):
    x = np.sort(rng.random(200_000))
    g = np.clip(x + rng.normal(0, 1e-3, x.size), 0, 1)
    fv = np.sort(rng.random(2_000))
    gv = np.sort(np.clip(fv + 0.02, 0, 1))
    log_sf = np.log(rng.random(200_000))
    pf = rng.random(10_000) / 32
    return [
        ("sandwich_ok", lambda impl: impl(x, g, x, 0.01, 1e-15)),
        ("levy_grid_oracle", lambda impl: impl(fv, gv, 1000)),
        ("iterated_free_power", lambda impl: impl(pf, 32)),
        ("powered_cdf", lambda impl: impl(log_sf, 1e6)),
    ]


def run_kernels(repeat):
    if not K.HAVE_NUMBA:
        print("numba unavailable or disabled; only the numpy path can be timed")
    rng = np.random.default_rng(1)
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, call in kernel_cases(rng):
        t_np = best_of(lambda: call(getattr(K, name + "_numpy")), repeat)
        if K.HAVE_NUMBA:
            out_np = call(getattr(K, name + "_numpy"))
            out_nb = call(getattr(K, name + "_numba"))
            assert np.allclose(out_np, out_nb, rtol=1e-12, atol=0), name
            t_nb = best_of(lambda: call(getattr(K, name + "_numba")), repeat)
            print(f"{name:<22}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{name:<22}{t_np * 1e3:>12.3f}{'-':>12}{'-':>10}")


def run_end_to_end():
    print("\nend-to-end: 40 levy_distance calls")
    for flag in ("1", "0"):
        env = dict(os.environ, MDA_WORKBENCH_DISABLE_JIT=flag)
        out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:<8}{float(out[1]):8.3f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-end-to-end", action="store_true")
    args = ap.parse_args()
    run_kernels(args.repeat)
    if not args.no_end_to_end:
        run_end_to_end()


if __name__ == "__main__":
    main()
