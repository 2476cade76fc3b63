"""Compare the compiled and NumPy stepping kernels on batches of point sources.

    python benchmarks/bench_green.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from lcqft.kernels import _fallback

try:
    from lcqft.kernels import _stepping
except ImportError:
    _stepping = None

SHAPES = [(8, 25), (20, 50), (40, 100), (100, 200)]


def problem(n_t, n_x, batch, seed=0):
    rng = np.random.default_rng(seed)
    coupling = rng.choice([0.5, 1.0], size=(n_t, n_x))
    mass = rng.choice([0.0, 0.5, 1.0], size=(n_t, n_x))
    mask = np.ones((n_t, n_x), dtype=np.uint8)
    src = rng.normal(size=(batch, n_t, n_x))
    return coupling, mass, mask, src


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--batch", type=int, default=16)
    args = ap.parse_args()
    print(f"{'n_t x n_x':>10} {'python ms':>10} {'compiled ms':>12} {'speedup':>8} {'max diff':>10}")
    for n_t, n_x in SHAPES:
        c, m, k, s = problem(n_t, n_x, args.batch)
        t_py = min(timeit.repeat(lambda: _fallback.step_retarded(c, m, k, s),
                                 number=1, repeat=args.repeat))
        if _stepping is None:
            print(f"{n_t:>4} x {n_x:<4} {t_py * 1e3:>10.2f} {'n/a':>12}")
            continue
        t_c = min(timeit.repeat(lambda: _stepping.step_retarded(c, m, k, s),
                                number=1, repeat=args.repeat))
        diff = np.abs(_fallback.step_retarded(c, m, k, s) - _stepping.step_retarded(c, m, k, s))
        print(f"{n_t:>4} x {n_x:<4} {t_py * 1e3:>10.2f} {t_c * 1e3:>12.2f} "
              f"{t_py / t_c:>8.1f} {diff.max():>10.1e}")


if __name__ == "__main__":
    main()
