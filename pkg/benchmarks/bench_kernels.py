"""Time the compiled dual-ascent kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--curves 400] [--nodes 2000] [--sweeps 20]
"""
import argparse
import time

import numpy as np
from scipy import sparse

from srlab.modulus import kernels


def random_family(n_curves, n_nodes, length, rng):
    rows = np.repeat(np.arange(n_curves), length)
    cols = np.concatenate([rng.choice(n_nodes, length, replace=False) for _ in range(n_curves)])
    vals = rng.uniform(0.1, 1.0, n_curves * length)
    W = sparse.csr_matrix((vals, (rows, cols)), shape=(n_curves, n_nodes))
    W.sort_indices()
    return W, rng.uniform(0.5, 2.0, n_nodes)


def run(backend, W, mu, q, sweeps):
    lam = np.zeros(W.shape[0])
    s = np.zeros(W.shape[1])
    t = time.perf_counter()
    kernels.ascent_sweeps(W, mu, q, lam, s, sweeps, backend)
    return time.perf_counter() - t, lam


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--curves", type=int, default=400)
    ap.add_argument("--nodes", type=int, default=2000)
    ap.add_argument("--length", type=int, default=30)
    ap.add_argument("--sweeps", type=int, default=20)
    ap.add_argument("--q", type=float, default=4.0)
    args = ap.parse_args()
    W, mu = random_family(args.curves, args.nodes, args.length, np.random.default_rng(0))
    print(f"family: {args.curves} curves x {args.length} nodes, {args.sweeps} sweeps, q={args.q}")
    times = {}
    results = {}
    for backend in ("python", "cython"):
        try:
            times[backend], results[backend] = run(backend, W, mu, args.q, args.sweeps)
        except ImportError:
            print(f"{backend:>7}: not available (extension not built)")
            continue
        print(f"{backend:>7}: {times[backend]:.4f} s")
    if len(times) == 2:
        diff = np.abs(results["python"] - results["cython"]).max()
        print(f"speed-up {times['python'] / times['cython']:.1f}x, max multiplier difference {diff:.2e}")


if __name__ == "__main__":
    main()
