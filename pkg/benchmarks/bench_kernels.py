"""Compare the numba and numpy kernels on benchmark instances.

    python3 benchmarks/bench_kernels.py [--k-max 6] [--repeat 3]

Both backends are called directly, so the POTTSCLUST_DISABLE_NUMBA flag does
not matter here. Reports the best-of-``repeat`` wall time of a single sweep,
a full anneal and the eigenvalue solve, and checks the backends agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pottsclust import _kernels
from pottsclust.annealer import AnnealConfig, build_interactions, critical_temperature, initial_state
from pottsclust.benchmark import generate_instance
from pottsclust.rng import CounterStream, derive_key


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_k(k, repeat):
    inst = generate_instance(k, 0)
    cfg = AnnealConfig(q=k)
    j = np.ascontiguousarray(build_interactions(inst.evidence).j)
    t0 = critical_temperature(j, cfg.alpha, cfg.gamma, k)
    key = derive_key(cfg.seed, 0)
    v0 = initial_state(inst.n, cfg, t0, CounterStream(key)).v
    ukey = np.uint64(key)
    m = j + cfg.alpha - cfg.gamma * np.eye(inst.n)
    rows = []

    def sweep(fn):
        return lambda: fn(j, v0.copy(), t0, cfg.epsilon, cfg.alpha, cfg.gamma, ukey, 0)

    def full(fn):
        def run():
            v = v0.copy()
            fn(j, v, t0, cfg.tau, cfg.epsilon, cfg.alpha, cfg.gamma, cfg.sweep_tol,
               cfg.saturation_tol, cfg.max_sweeps_per_temp, cfg.max_temps, ukey, 0)
            return v
        return run

    pairs = [("sweep", sweep(_kernels.sweep_numpy), sweep(_kernels.sweep_numba)),
             ("anneal", full(_kernels.anneal_numpy), full(_kernels.anneal_numba)),
             ("jacobi", lambda: _kernels.jacobi_eigenvalues_numpy(m),
              lambda: _kernels.jacobi_eigenvalues_numba(m))]
    for name, f_np, f_nb in pairs:
        f_nb()  # compile outside the timer
        t_np, out_np = best_time(f_np, repeat)
        t_nb, out_nb = best_time(f_nb, repeat)
        if name == "anneal":
            agree = np.array_equal(out_np.argmax(axis=1), out_nb.argmax(axis=1))
        elif name == "jacobi":
            agree = np.allclose(out_np, out_nb, atol=1e-9)
        else:
            agree = abs(out_np[0] - out_nb[0]) < 1e-12
        rows.append((k, inst.n, name, t_np, t_nb, agree))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-min", type=int, default=3)
    ap.add_argument("--k-max", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels._HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    print(f"{'K':>3} {'N':>5} {'kernel':<7} {'numpy s':>11} {'numba s':>11} {'speedup':>8} agree")
    for k in range(args.k_min, args.k_max + 1):
        for k_, n, name, t_np, t_nb, agree in bench_k(k, args.repeat):
            print(f"{k_:>3} {n:>5} {name:<7} {t_np:>11.4g} {t_nb:>11.4g} {t_np / t_nb:>8.1f} {agree}")


if __name__ == "__main__":
    main()
