"""Compare the compiled kernels with the numpy fallback.

Two measurements:

* the raw pair update on the weight-sector propagator of an ``n``-site ring;
* end-to-end exact fitness, run in subprocesses so each backend is selected
  at import exactly as a user would get it.

Usage::

    python3 benchmarks/bench_kernels.py [--n 12] [--repeat 5]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time
from math import comb

import numpy as np

from puqca import _kernels_py
from puqca import statevector as sv
from puqca.verify import full_rule, load_tables

try:
    from puqca import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def time_step(mod, n: int, repeat: int) -> float:
    """Best-of-``repeat`` seconds for one brick-wall step on the ``k = n/2`` sector."""
    k = n // 2
    plan = sv._sector_plan(n, k)
    rule = full_rule(next(r for r in load_tables()["full_per_size"]["rows"] if r["n"] == 8)["rule"])
    w0, w1 = rule.matrices()
    best = float("inf")
    for _ in range(repeat):
        m = np.eye(comb(n, k), dtype=np.complex128)
        start = time.perf_counter()
        for w, pairs in ((w0, plan.pairs[: n // 2]), (w1, plan.pairs[n // 2:])):
            for r01, r10, r11 in pairs:
                mod.apply_pairs(m, r01, r10, w[1, 1], w[1, 2], w[2, 1], w[2, 2])
                mod.scale_rows(m, r11, w[3, 3])
        best = min(best, time.perf_counter() - start)
    return best


FITNESS_SNIPPET = """
import time
from puqca import dct, kernels
from puqca.verify import full_rule, load_tables
rule = full_rule(load_tables()['full_multi']['rule'])
start = time.perf_counter()
rep = dct.fitness(rule, dct.ClassifierSpec({n}, {n} // 2, 1), workers=1)
print(kernels.BACKEND, time.perf_counter() - start, rep.fitness)
"""


def time_fitness(n: int, pure: bool) -> tuple[str, float, float]:
    env = dict(os.environ)
    env.pop("PUQCA_PURE_PYTHON", None)
    if pure:
        env["PUQCA_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", FITNESS_SNIPPET.format(n=n)], env=env,
                         check=True, capture_output=True, text=True).stdout.split()
    return out[0], float(out[1]), float(out[2])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"one step on the C({args.n},{args.n // 2}) sector propagator")
    t_py = time_step(_kernels_py, args.n, args.repeat)
    print(f"  python  {t_py * 1e3:9.2f} ms")
    if _kernels_c is None:
        print("  cython  not built")
    else:
        t_c = time_step(_kernels_c, args.n, args.repeat)
        print(f"  cython  {t_c * 1e3:9.2f} ms   speed-up {t_py / t_c:.1f}x")

    print(f"exact fitness, n = {args.n}, t = {args.n // 2} (single thread)")
    results = {}
    for pure in (True, False):
        backend, secs, fit = time_fitness(args.n, pure)
        results[backend] = (secs, fit)
        print(f"  {backend:7s} {secs:9.3f} s   F = {fit:.6f}")
    if len(results) == 2:
        (s_py, f_py), (s_c, f_c) = results["python"], results["cython"]
        print(f"  speed-up {s_py / s_c:.1f}x, fitness difference {abs(f_py - f_c):.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
