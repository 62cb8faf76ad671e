"""Compare the compiled and pure-numpy kernel backends.

Each backend runs in its own subprocess (the choice is frozen at import
time), assembling a sector Hamiltonian and running the iterative solver
on it several times.  JIT compilation happens during an untimed warm-up
pass, so the numbers below reflect steady-state throughput.

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --two-j 3 --length 8 --repeats 5
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import xxzgap
from xxzgap import SpinParams, assemble_sector, lowest_k
from xxzgap._backend import BACKEND

two_j, length, two_m, delta_inv, repeats = json.loads(sys.argv[1])
params = SpinParams(two_j, length, delta_inv)

# warm-up: trigger JIT compilation and page in the basis tables
matrix = assemble_sector(params, two_m)
lowest_k(matrix, k=4, method="lanczos")

assemble_times, solve_times = [], []
for _ in range(repeats):
    t0 = time.perf_counter()
    matrix = assemble_sector(params, two_m)
    matrix.matvec(matrix.diag)  # forces the CSR build
    t1 = time.perf_counter()
    lowest_k(matrix, k=4, method="lanczos")
    t2 = time.perf_counter()
    assemble_times.append(t1 - t0)
    solve_times.append(t2 - t1)

print(json.dumps({
    "backend": BACKEND,
    "dim": matrix.dim,
    "nnz": int(matrix.nnz),
    "assemble_best": min(assemble_times),
    "solve_best": min(solve_times),
}))
"""


def run_backend(backend: str, payload: str) -> dict:
    env = dict(os.environ, XXZ_GAP_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, payload],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--two-j", type=int, default=2)
    ap.add_argument("--length", type=int, default=10)
    ap.add_argument("--two-m", type=int, default=0)
    ap.add_argument("--delta-inv", type=float, default=0.5)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    payload = json.dumps(
        [args.two_j, args.length, args.two_m, args.delta_inv, args.repeats]
    )
    results = [run_backend(name, payload) for name in ("numba", "numpy")]

    dim, nnz = results[0]["dim"], results[0]["nnz"]
    print(f"sector: two_j={args.two_j} L={args.length} two_m={args.two_m} "
          f"delta_inv={args.delta_inv}  (dim={dim}, nnz={nnz})")
    print(f"{'backend':<8} {'assemble':>12} {'solve':>12}")
    for r in results:
        print(f"{r['backend']:<8} {r['assemble_best']:>11.4f}s {r['solve_best']:>11.4f}s")
    numba_total = results[0]["assemble_best"] + results[0]["solve_best"]
    numpy_total = results[1]["assemble_best"] + results[1]["solve_best"]
    print(f"speedup (numpy/numba): {numpy_total / numba_total:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
