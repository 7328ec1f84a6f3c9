"""Benchmark the compiled gate kernels against the NumPy fallback.

Run as ``python -m mbqclab.bench``.  Wall-clock times cover repeated
single- and two-qubit gate applications plus a full engine workload
(branch enumeration on the cluster fixture), once per available backend.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import kernels
from .kernels import fallback


def _gate_workload(apply_1q, apply_2q, n: int, reps: int, rng: np.random.Generator) -> float:
    state = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    state /= np.linalg.norm(state)
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    swap = np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]]
    start = time.perf_counter()
    for rep in range(reps):
        q = rep % n
        apply_1q(state, h, n, q, 0)
        apply_1q(state, h, n, q, 1 << (n - 1 - ((q + 1) % n)))
        apply_2q(state, swap, n, q, (q + 1) % n, 0)
    return time.perf_counter() - start


def _engine_workload(repeats: int) -> float:
    from .fixtures import cluster_fixture
    from .engine import run_all_branches

    resource, strategy, family = cluster_fixture()
    start = time.perf_counter()
    for _ in range(repeats):
        for y in family.witnesses():
            run_all_branches(resource, strategy, y)
    return time.perf_counter() - start


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=11)
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--engine-repeats", type=int, default=5)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    backends = [("numpy", fallback.apply_1q, fallback.apply_2q)]
    if kernels.backend_name == "cython":
        backends.append(("cython", kernels.apply_1q_inplace, kernels.apply_2q_inplace))
    else:
        print("compiled kernels not built; benchmarking the fallback only")

    print(f"gate workload: {args.reps} x (2 single-qubit + 1 two-qubit) on {args.qubits} qubits")
    times = {}
    for name, a1, a2 in backends:
        times[name] = _gate_workload(a1, a2, args.qubits, args.reps, rng)
        print(f"  {name:>7}: {times[name] * 1e3:8.1f} ms")
    if len(times) == 2:
        print(f"  speedup: {times['numpy'] / times['cython']:.2f}x")

    print(f"engine workload: cluster fixture, all witnesses x {args.engine_repeats}")
    print(f"  active backend ({kernels.backend_name}): {_engine_workload(args.engine_repeats) * 1e3:8.1f} ms")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
