import itertools

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from chuspace import _accel


def mats(max_rows=3, max_cols=3, nsym=2):
    return st.tuples(st.integers(0, max_rows), st.integers(0, max_cols)).flatmap(
        lambda shape: st.lists(st.integers(0, nsym - 1), min_size=shape[0] * shape[1],
                               max_size=shape[0] * shape[1]).map(
            lambda cells: np.array(cells, dtype=np.int8).reshape(shape)))


def brute_morphisms(src, tgt, inj, surj):
    na_s, nx_s = src.shape
    na_t, nx_t = tgt.shape
    out = []
    for f in itertools.product(range(na_t), repeat=na_s):
        if inj and len(set(f)) != na_s:
            continue
        for g in itertools.product(range(nx_s), repeat=nx_t):
            if surj and len(set(g)) != nx_s:
                continue
            if all(tgt[f[a], y] == src[a, g[y]] for a in range(na_s) for y in range(nx_t)):
                out.append((f, g))
    return out


@given(mats(), mats(), st.booleans(), st.booleans())
def test_kernels_agree_with_brute_force(src, tgt, inj, surj):
    expected = brute_morphisms(src, tgt, inj, surj)
    for kernel in (_accel.morphism_arrays_loops, _accel.morphism_arrays_numpy):
        F, G, overflow = kernel(src, tgt, inj, surj)
        assert not overflow
        got = [(tuple(f), tuple(g)) for f, g in zip(F.tolist(), G.tolist())]
        assert got == expected


def test_overflow_flag():
    src = np.zeros((2, 1), dtype=np.int8)
    tgt = np.zeros((3, 3), dtype=np.int8)
    for kernel in (_accel.morphism_arrays_loops, _accel.morphism_arrays_numpy):
        _, _, overflow = kernel(src, tgt, limit=4)
        assert overflow


def _lookup(g):
    n = g.shape[0]
    lookup = np.full(2 ** n, -1, dtype=np.int64)
    codes = (2 ** np.arange(n)) @ g.astype(np.int64) if n else np.zeros(g.shape[1], dtype=np.int64)
    lookup[codes] = np.arange(g.shape[1])
    return lookup


@given(mats(4, 5), st.integers(1, 2), st.integers(1, 3), st.data())
def test_extension_kernels_agree(u, n_g, m_g, data):
    cols = data.draw(st.lists(st.tuples(*[st.integers(0, 1)] * n_g), min_size=m_g, max_size=m_g, unique=True))
    g = np.array(cols, dtype=np.int8).T.reshape(n_g, len(cols))
    assign = np.full(n_g, -1, dtype=np.int64)
    if u.shape[0] and data.draw(st.booleans()):
        assign[0] = data.draw(st.integers(0, u.shape[0] - 1))
    lookup = _lookup(g)
    a = _accel.extension_loops(u, assign, lookup, 2, g.shape[1])
    b = _accel.extension_numpy(u, assign, lookup, 2, g.shape[1])
    assert (a is None) == (b is None)
    if a is not None:
        assert a[0].tolist() == b[0].tolist() and a[1].tolist() == b[1].tolist()
        rows = a[0]
        assert len(set(rows.tolist())) == n_g
        assert sorted(set(a[1].tolist())) == list(range(g.shape[1]))
        for x in range(u.shape[1]):
            assert u[rows, x].tolist() == g[:, a[1][x]].tolist()


def test_backend_flag_is_consistent():
    assert _accel.BACKEND in ("numba", "numpy")
    assert (_accel.BACKEND == "numba") == _accel.HAVE_NUMBA


def test_numpy_fallback_selected_by_env(tmp_path):
    import os
    import subprocess
    import sys

    env = dict(os.environ, CHUSPACE_NO_JIT="1")
    out = subprocess.run([sys.executable, "-c", "import chuspace; print(chuspace.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
