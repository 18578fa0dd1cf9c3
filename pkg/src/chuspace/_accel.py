"""Hot kernels: morphism enumeration and the one-point extension search.

Each kernel exists twice: an explicit-loop version compiled with numba's
``njit`` and a vectorised numpy version.  ``CHUSPACE_NO_JIT=1`` in the
environment (or a missing numba install) selects the numpy path; the loop
versions are still importable for testing but then run uncompiled.
"""
from __future__ import annotations

import itertools
import os

import numpy as np

_DISABLED = os.environ.get("CHUSPACE_NO_JIT", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# morphism enumeration


@njit
def _scan_morphisms(src, tgt, inj_fwd, surj_bwd, fill, out_f, out_g, limit):
    na_s, nx_s = src.shape
    na_t, nx_t = tgt.shape
    if na_s > 0 and na_t == 0:
        return 0
    if inj_fwd and na_s > na_t:
        return 0
    f = np.zeros(na_s, dtype=np.int64)
    cand = np.empty((nx_t, max(nx_s, 1)), dtype=np.int64)
    cnt = np.empty(nx_t, dtype=np.int64)
    choice = np.zeros(nx_t, dtype=np.int64)
    covered = np.zeros(max(nx_s, 1), dtype=np.int64)
    used = np.zeros(max(na_t, 1), dtype=np.int64)
    n = 0
    while True:
        ok = True
        if inj_fwd:
            used[:] = 0
            for a in range(na_s):
                if used[f[a]]:
                    ok = False
                    break
                used[f[a]] = 1
        if ok:
            for y in range(nx_t):
                c = 0
                for x in range(nx_s):
                    match = True
                    for a in range(na_s):
                        if tgt[f[a], y] != src[a, x]:
                            match = False
                            break
                    if match:
                        cand[y, c] = x
                        c += 1
                cnt[y] = c
                if c == 0:
                    ok = False
                    break
        if ok and surj_bwd:
            covered[:] = 0
            for y in range(nx_t):
                for k in range(cnt[y]):
                    covered[cand[y, k]] = 1
            for x in range(nx_s):
                if covered[x] == 0:
                    ok = False
                    break
        if ok:
            choice[:] = 0
            while True:
                emit = True
                if surj_bwd:
                    covered[:] = 0
                    for y in range(nx_t):
                        covered[cand[y, choice[y]]] = 1
                    for x in range(nx_s):
                        if covered[x] == 0:
                            emit = False
                            break
                if emit:
                    if fill:
                        for a in range(na_s):
                            out_f[n, a] = f[a]
                        for y in range(nx_t):
                            out_g[n, y] = cand[y, choice[y]]
                    n += 1
                    if n > limit:
                        return n
                # odometer over backward choices, last attribute fastest
                y = nx_t - 1
                while y >= 0:
                    choice[y] += 1
                    if choice[y] < cnt[y]:
                        break
                    choice[y] = 0
                    y -= 1
                if y < 0:
                    break
        # odometer over forward maps, last object fastest
        a = na_s - 1
        while a >= 0:
            f[a] += 1
            if f[a] < na_t:
                break
            f[a] = 0
            a -= 1
        if a < 0:
            break
    return n


def morphism_arrays_loops(src, tgt, inj_fwd=False, surj_bwd=False, limit=10**7):
    """Loop kernel.  Returns ``(F, G, overflow)``; rows are morphisms in lex order."""
    src = np.ascontiguousarray(src, dtype=np.int8)
    tgt = np.ascontiguousarray(tgt, dtype=np.int8)
    dummy_f = np.empty((0, src.shape[0]), dtype=np.int64)
    dummy_g = np.empty((0, tgt.shape[1]), dtype=np.int64)
    n = _scan_morphisms(src, tgt, inj_fwd, surj_bwd, False, dummy_f, dummy_g, limit)
    if n > limit:
        return dummy_f, dummy_g, True
    out_f = np.empty((n, src.shape[0]), dtype=np.int64)
    out_g = np.empty((n, tgt.shape[1]), dtype=np.int64)
    _scan_morphisms(src, tgt, inj_fwd, surj_bwd, True, out_f, out_g, limit)
    return out_f, out_g, False


def morphism_arrays_numpy(src, tgt, inj_fwd=False, surj_bwd=False, limit=10**7):
    """Vectorised twin of :func:`morphism_arrays_loops` with identical output order."""
    src = np.asarray(src, dtype=np.int8)
    tgt = np.asarray(tgt, dtype=np.int8)
    na_s, nx_s = src.shape
    na_t, nx_t = tgt.shape
    empty = (np.empty((0, na_s), dtype=np.int64), np.empty((0, nx_t), dtype=np.int64), False)
    if na_s > 0 and na_t == 0:
        return empty
    if inj_fwd and na_s > na_t:
        return empty
    fwd = np.array(list(itertools.product(range(na_t), repeat=na_s)), dtype=np.int64)
    fwd = fwd.reshape(na_t ** na_s, na_s)
    if inj_fwd and na_s > 1:
        srt = np.sort(fwd, axis=1)
        fwd = fwd[(np.diff(srt, axis=1) != 0).all(axis=1)]
    # match[k, y, x]: column y of the target, read along forward map k, equals source column x
    gathered = tgt[fwd]  # (nf, na_s, nx_t)
    match = (gathered[:, :, :, None] == src[None, :, None, :]).all(axis=1)
    fs, gs = [], []
    for k in range(fwd.shape[0]):
        if nx_t and not match[k].any(axis=1).all():
            continue
        if surj_bwd and nx_s and not match[k].any(axis=0).all():
            continue
        options = [np.flatnonzero(match[k, y]) for y in range(nx_t)]
        for g in itertools.product(*options):
            if surj_bwd and len(set(g)) != nx_s:
                continue
            fs.append(fwd[k])
            gs.append(g)
            if len(fs) > limit:
                return empty[0], empty[1], True
    if not fs:
        return empty
    return (np.array(fs, dtype=np.int64).reshape(len(fs), na_s),
            np.array(gs, dtype=np.int64).reshape(len(gs), nx_t), False)


def morphism_arrays(src, tgt, inj_fwd=False, surj_bwd=False, limit=10**7):
    if HAVE_NUMBA:
        return morphism_arrays_loops(src, tgt, inj_fwd, surj_bwd, limit)
    return morphism_arrays_numpy(src, tgt, inj_fwd, surj_bwd, limit)


# ---------------------------------------------------------------------------
# one-point extension search
#
# Given a large space U, a small extensional space G and a partial injective
# row assignment (the rows already fixed by an embedding of a common subspace),
# find the first completion h such that the columns of U read along h are
# exactly the columns of G.  ``lookup[code]`` is the G column whose symbol
# vector encodes to ``code`` (base ``nsym``, position p weighted nsym**p), or -1.


@njit
def _extension_loops(u, assign, lookup, nsym, n_gcols):
    na_u, nx_u = u.shape
    k = assign.shape[0]
    free = np.empty(k, dtype=np.int64)
    nfree = 0
    used = np.zeros(max(na_u, 1), dtype=np.int64)
    for p in range(k):
        if assign[p] < 0:
            free[nfree] = p
            nfree += 1
        else:
            used[assign[p]] = 1
    cur = assign.copy()
    back = np.empty(nx_u, dtype=np.int64)
    covered = np.zeros(max(n_gcols, 1), dtype=np.int64)
    pos = np.zeros(max(nfree, 1), dtype=np.int64)
    if nfree > 0 and na_u == 0:
        return False, cur, back
    while True:
        ok = True
        for i in range(nfree):
            if used[pos[i]]:
                ok = False
                break
            for j in range(i):
                if pos[j] == pos[i]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for i in range(nfree):
                cur[free[i]] = pos[i]
            covered[:] = 0
            for x in range(nx_u):
                code = 0
                w = 1
                for p in range(k):
                    code += u[cur[p], x] * w
                    w *= nsym
                col = lookup[code]
                if col < 0:
                    ok = False
                    break
                back[x] = col
                covered[col] = 1
            if ok:
                for c in range(n_gcols):
                    if covered[c] == 0:
                        ok = False
                        break
            if ok:
                return True, cur, back
        i = nfree - 1
        while i >= 0:
            pos[i] += 1
            if pos[i] < na_u:
                break
            pos[i] = 0
            i -= 1
        if i < 0:
            break
    return False, cur, back


def extension_loops(u, assign, lookup, nsym, n_gcols):
    """Loop kernel; returns ``(row_assignment, backward)`` or ``None``."""
    found, cur, back = _extension_loops(
        np.ascontiguousarray(u, dtype=np.int8),
        np.asarray(assign, dtype=np.int64),
        np.asarray(lookup, dtype=np.int64),
        nsym,
        n_gcols,
    )
    return (cur, back) if found else None


def extension_numpy(u, assign, lookup, nsym, n_gcols):
    u = np.asarray(u, dtype=np.int8)
    assign = np.asarray(assign, dtype=np.int64)
    lookup = np.asarray(lookup, dtype=np.int64)
    k = assign.shape[0]
    free = [p for p in range(k) if assign[p] < 0]
    taken = set(int(a) for a in assign if a >= 0)
    weights = nsym ** np.arange(k, dtype=np.int64)
    for pos in itertools.product(range(u.shape[0]), repeat=len(free)):
        if len(set(pos)) != len(pos) or taken.intersection(pos):
            continue
        cur = assign.copy()
        cur[free] = pos
        codes = weights @ u[cur].astype(np.int64) if k else np.zeros(u.shape[1], dtype=np.int64)
        back = lookup[codes]
        if (back < 0).any():
            continue
        if np.unique(back).size != n_gcols:
            continue
        return cur, back
    return None


def extension(u, assign, lookup, nsym, n_gcols):
    if HAVE_NUMBA:
        return extension_loops(u, assign, lookup, nsym, n_gcols)
    return extension_numpy(u, assign, lookup, nsym, n_gcols)
