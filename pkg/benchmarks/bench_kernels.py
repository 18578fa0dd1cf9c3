"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5] [--steps 120]

Both variants are called directly, so CHUSPACE_NO_JIT only matters for the
loop variant (it then runs as plain Python).
"""
import argparse
import time

import numpy as np

from chuspace import BINARY, _accel
from chuspace.universal import _column_lookup, catalog, fraisse_build


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def morphism_cases(rng):
    cases = []
    for na_s, nx_s, na_t, nx_t in [(2, 3, 3, 4), (3, 4, 4, 6), (4, 4, 5, 8), (3, 6, 6, 5)]:
        src = rng.integers(0, 2, size=(na_s, nx_s)).astype(np.int8)
        # every target column restricts to a source column, so the inclusion is a morphism
        tgt = rng.integers(0, 2, size=(na_t, nx_t)).astype(np.int8)
        tgt[:na_s] = src[:, rng.integers(0, nx_s, size=nx_t)]
        cases.append((f"morphisms {na_s}x{nx_s} -> {na_t}x{nx_t}", src, tgt))
    return cases


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=120, help="builder steps for the extension benchmark")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"backend in use: {_accel.BACKEND}")
    # compile once outside the timings
    _accel.morphism_arrays_loops(np.zeros((1, 1), np.int8), np.zeros((1, 1), np.int8))

    rows = []
    for name, src, tgt in morphism_cases(rng):
        t_loop, (f1, g1, _) = best_of(lambda: _accel.morphism_arrays_loops(src, tgt), args.repeat)
        t_np, (f2, g2, _) = best_of(lambda: _accel.morphism_arrays_numpy(src, tgt), args.repeat)
        assert np.array_equal(f1, f2) and np.array_equal(g1, g2)
        rows.append((name, len(f1), t_loop, t_np))

    state = fraisse_build(BINARY, 2, 3, args.steps)
    U = state.stages[-1]
    cat = catalog(BINARY, 2, 3)
    for gi in (len(cat) // 2, len(cat) - 2, len(cat) - 1):
        G = cat[gi]
        assign = np.full(len(G.objects), -1, dtype=np.int64)
        lookup = _column_lookup(G)
        call = (U.matrix, assign, lookup, len(G.alphabet), len(G.attributes))
        _accel.extension_loops(*call)
        t_loop, a = best_of(lambda: _accel.extension_loops(*call), args.repeat)
        t_np, b = best_of(lambda: _accel.extension_numpy(*call), args.repeat)
        assert (a is None) == (b is None)
        rows.append((f"extension G#{gi} {G.shape[0]}x{G.shape[1]} into {U.shape[0]}x{U.shape[1]}",
                     int(a is not None), t_loop, t_np))

    print(f"{'case':42} {'count':>7} {'loops ms':>10} {'numpy ms':>10} {'ratio':>7}")
    for name, n, t_loop, t_np in rows:
        print(f"{name:42} {n:>7} {t_loop * 1e3:>10.3f} {t_np * 1e3:>10.3f} {t_np / max(t_loop, 1e-9):>7.1f}")


if __name__ == "__main__":
    main()
