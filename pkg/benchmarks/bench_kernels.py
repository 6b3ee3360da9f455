"""Time the compiled and pure-Python shortest-delay kernels, and a full
block-size sweep with each.

    python benchmarks/bench_kernels.py [--n 1001] [--repeat 20]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from consim import _kernels
from consim.netmodel import generate_network

SWEEP = """
import time
from consim import BACKEND, hbft, poa, SimulationConfig, simulate
t = time.perf_counter()
for seed in range(3):
    for preset in (hbft, poa):
        for b in range(40, 4001, 40):
            simulate(SimulationConfig(preset(101, 0.1, block_size_tx=b), seed=seed))
print(BACKEND, time.perf_counter() - t)
"""


def kernel_times(n, p, repeat):
    g = generate_network(n, p, 0.1, 1e6, seed=0)
    indptr, indices, weights = g.csr
    rows = []
    for name, fn in (("cython", _kernels.compiled_dijkstra), ("python", _kernels.python_dijkstra)):
        if fn is None:
            rows.append((name, float("nan")))
            continue
        sources = np.arange(repeat) % n
        t = timeit.timeit(lambda: [fn(indptr, indices, weights, int(s)) for s in sources], number=1)
        rows.append((name, t / repeat))
    return g.edge_count, rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    for n, p in ((101, 0.06), (1001, 0.06)):
        edges, rows = kernel_times(n, p, args.repeat)
        print(f"single-source shortest delays, N={n}, {edges} edges")
        for name, t in rows:
            print(f"  {name:>6}: {t * 1e3:9.3f} ms per source")
        if rows[0][1] == rows[0][1]:
            print(f"  speed-up: {rows[1][1] / rows[0][1]:.1f}x")
    print("block-size sweep (3 seeds x 2 presets x 100 sizes, N=101, SR=200)")
    for flag in ("", "1"):
        env = dict(os.environ, CONSIM_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", SWEEP], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"  {backend:>6}: {float(secs):.2f} s")


if __name__ == "__main__":
    main()
