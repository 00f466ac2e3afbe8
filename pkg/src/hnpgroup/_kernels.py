"""Hot elimination loops, compiled with numba when available.

Set HNPGROUP_BACKEND=numpy to force the pure-numpy versions. Both backends
make the same pivot choices, so they return identical results.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# |entries| above this abort the int64 path; products then still fit in int64.
INT64_BOUND = 1 << 31


def backend():
    name = os.environ.get("HNPGROUP_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown HNPGROUP_BACKEND {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


# ---------------------------------------------------------------------------
# exact Smith form


def _find_min_abs(a, t):
    """Nonzero entry of smallest absolute value in a[t:, t:], first in row-major order."""
    sub = a[t:, t:]
    mags = np.abs(sub)
    nz = mags != 0
    if not nz.any():
        return -1, -1
    masked = np.where(nz, mags, mags.max() + 1)
    flat = int(np.argmin(masked))
    i, j = divmod(flat, sub.shape[1])
    return t + i, t + j


def _too_big(x, bound):
    return bound is not None and x.size and int(np.abs(x).max()) > bound


def snf_numpy(a, track_u, track_v, bound):
    """Smith form by unimodular row/column operations.

    Works for int64 (with `bound` guarding overflow) and object arrays.
    Returns (diag_matrix, u, v, ok). ok is False when the bound was hit.
    """
    a = a.copy()
    m, n = a.shape
    u = np.eye(m, dtype=a.dtype) if track_u else np.zeros((0, 0), dtype=a.dtype)
    v = np.eye(n, dtype=a.dtype) if track_v else np.zeros((0, 0), dtype=a.dtype)
    t = 0
    while t < min(m, n):
        i, j = _find_min_abs(a, t)
        if i < 0:
            break
        if i != t:
            a[[t, i]] = a[[i, t]]
            if track_u:
                u[[t, i]] = u[[i, t]]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
            if track_v:
                v[:, [t, j]] = v[:, [j, t]]
        while True:
            p = a[t, t]
            col = a[t + 1:, t]
            rows = np.nonzero(col)[0] + t + 1
            if rows.size:
                q = a[rows, t] // p
                a[rows, t:] -= q[:, None] * a[t, t:][None, :]
                if track_u:
                    u[rows] -= q[:, None] * u[t][None, :]
                if _too_big(a[rows, t:], bound) or (track_u and _too_big(u[rows], bound)):
                    return a, u, v, False
            row = a[t, t + 1:]
            cols = np.nonzero(row)[0] + t + 1
            if cols.size:
                q = a[t, cols] // p
                a[t:, cols] -= a[t:, t][:, None] * q[None, :]
                if track_v:
                    v[:, cols] -= v[:, t][:, None] * q[None, :]
                if _too_big(a[t:, cols], bound) or (track_v and _too_big(v[:, cols], bound)):
                    return a, u, v, False
            rest_c = np.nonzero(a[t + 1:, t])[0]
            rest_r = np.nonzero(a[t, t + 1:])[0]
            if rest_c.size == 0 and rest_r.size == 0:
                sub = a[t + 1:, t + 1:]
                bad = np.nonzero(sub % p)
                if bad[0].size == 0:
                    break
                i = int(bad[0][0]) + t + 1
                a[t] += a[i]
                if track_u:
                    u[t] += u[i]
                continue
            # a nonzero remainder is smaller than the pivot: make it the pivot
            best, bi, bj = abs(p), t, t
            for r in rest_c:
                val = abs(a[t + 1 + r, t])
                if val < best:
                    best, bi, bj = val, t + 1 + int(r), t
            for c in rest_r:
                val = abs(a[t, t + 1 + c])
                if val < best:
                    best, bi, bj = val, t, t + 1 + int(c)
            if bi != t:
                a[[t, bi]] = a[[bi, t]]
                if track_u:
                    u[[t, bi]] = u[[bi, t]]
            if bj != t:
                a[:, [t, bj]] = a[:, [bj, t]]
                if track_v:
                    v[:, [t, bj]] = v[:, [bj, t]]
        if a[t, t] < 0:
            a[t] = -a[t]
            if track_u:
                u[t] = -u[t]
        t += 1
    return a, u, v, True


@njit(cache=True)
def _swap_rows(x, i, j):
    for c in range(x.shape[1]):
        tmp = x[i, c]
        x[i, c] = x[j, c]
        x[j, c] = tmp


@njit(cache=True)
def _swap_cols(x, i, j):
    for r in range(x.shape[0]):
        tmp = x[r, i]
        x[r, i] = x[r, j]
        x[r, j] = tmp


@njit(cache=True)
def _snf_numba(a, track_u, track_v, bound):
    m, n = a.shape
    if track_u:
        u = np.eye(m, dtype=np.int64)
    else:
        u = np.zeros((0, 0), dtype=np.int64)
    if track_v:
        v = np.eye(n, dtype=np.int64)
    else:
        v = np.zeros((0, 0), dtype=np.int64)
    t = 0
    lim = min(m, n)
    while t < lim:
        best = 0
        bi = -1
        bj = -1
        for i in range(t, m):
            for j in range(t, n):
                x = abs(a[i, j])
                if x != 0 and (best == 0 or x < best):
                    best = x
                    bi = i
                    bj = j
        if bi < 0:
            break
        if bi != t:
            _swap_rows(a, t, bi)
            if track_u:
                _swap_rows(u, t, bi)
        if bj != t:
            _swap_cols(a, t, bj)
            if track_v:
                _swap_cols(v, t, bj)
        while True:
            p = a[t, t]
            for i in range(t + 1, m):
                if a[i, t] != 0:
                    q = a[i, t] // p
                    for c in range(t, n):
                        a[i, c] -= q * a[t, c]
                        if abs(a[i, c]) > bound:
                            return a, u, v, False
                    if track_u:
                        for c in range(m):
                            u[i, c] -= q * u[t, c]
                            if abs(u[i, c]) > bound:
                                return a, u, v, False
            for j in range(t + 1, n):
                if a[t, j] != 0:
                    q = a[t, j] // p
                    for r in range(t, m):
                        a[r, j] -= q * a[r, t]
                        if abs(a[r, j]) > bound:
                            return a, u, v, False
                    if track_v:
                        for r in range(n):
                            v[r, j] -= q * v[r, t]
                            if abs(v[r, j]) > bound:
                                return a, u, v, False
            clean = True
            for i in range(t + 1, m):
                if a[i, t] != 0:
                    clean = False
            for j in range(t + 1, n):
                if a[t, j] != 0:
                    clean = False
            if not clean:
                # same order as the numpy path: column remainders first, then row
                best = abs(p)
                bi = t
                bj = t
                for i in range(t + 1, m):
                    x = abs(a[i, t])
                    if x != 0 and x < best:
                        best = x
                        bi = i
                        bj = t
                for j in range(t + 1, n):
                    x = abs(a[t, j])
                    if x != 0 and x < best:
                        best = x
                        bi = t
                        bj = j
                if bi != t:
                    _swap_rows(a, t, bi)
                    if track_u:
                        _swap_rows(u, t, bi)
                if bj != t:
                    _swap_cols(a, t, bj)
                    if track_v:
                        _swap_cols(v, t, bj)
                continue
            found = -1
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i, j] % p != 0:
                        found = i
                        break
                if found >= 0:
                    break
            if found < 0:
                break
            for c in range(n):
                a[t, c] += a[found, c]
            if track_u:
                for c in range(m):
                    u[t, c] += u[found, c]
        if a[t, t] < 0:
            for c in range(n):
                a[t, c] = -a[t, c]
            if track_u:
                for c in range(m):
                    u[t, c] = -u[t, c]
        t += 1
    return a, u, v, True


def snf_int64(a, track_u, track_v):
    a = np.ascontiguousarray(a, dtype=np.int64)
    if backend() == "numba":
        return _snf_numba(a.copy(), track_u, track_v, INT64_BOUND)
    return snf_numpy(a, track_u, track_v, INT64_BOUND)


# ---------------------------------------------------------------------------
# elimination over Z/p^k


def _valuation(x, p, k):
    v = 0
    while v < k and x % p == 0:
        x //= p
        v += 1
    return v


def local_numpy(a, w, p, k):
    """Diagonalize a over Z/p^k, applying the inverse column operations to the rows of w.

    Returns (vals, w): vals[j] is the valuation of the j-th diagonal entry
    (k for a zero entry or a column with no pivot).
    """
    q = p ** k
    a = a.copy() % q
    w = w.copy() % q
    m, n = a.shape
    vals = np.full(n, k, dtype=np.int64)
    powers = [p ** i for i in range(k + 1)]
    for t in range(min(m, n)):
        sub = a[t:, t:]
        if not sub.any():
            break
        bi = bj = -1
        pv = k
        for lev in range(k):
            hit = np.nonzero((sub % powers[lev + 1]).ravel())[0]
            if hit.size:
                bi, bj = divmod(int(hit[0]), sub.shape[1])
                pv = lev
                break
        bi += t
        bj += t
        if bi != t:
            a[[t, bi]] = a[[bi, t]]
        if bj != t:
            a[:, [t, bj]] = a[:, [bj, t]]
            w[[t, bj]] = w[[bj, t]]
        unit = int(a[t, t]) // powers[pv]
        uinv = pow(unit, -1, q)
        rows = np.nonzero(a[t + 1:, t])[0] + t + 1
        if rows.size:
            f = ((a[rows, t] // powers[pv]) * uinv) % q
            a[rows, t:] = (a[rows, t:] - f[:, None] * a[t, t:][None, :]) % q
        cols = np.nonzero(a[t, t + 1:])[0] + t + 1
        if cols.size:
            mu = ((a[t, cols] // powers[pv]) * uinv) % q
            a[t, cols] = 0
            if w.shape[1]:
                w[t] = (w[t] + ((mu[:, None] * w[cols]) % q).sum(axis=0)) % q
        vals[t] = pv
    return vals, w


@njit(cache=True)
def _modinv(a, q):
    r0, r1 = q, a % q
    s0, s1 = 0, 1
    while r1 != 0:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    return s0 % q


@njit(cache=True)
def _local_numba(a, w, p, k):
    q = 1
    for _ in range(k):
        q *= p
    m, n = a.shape
    c = w.shape[1]
    for i in range(m):
        for j in range(n):
            a[i, j] %= q
    for i in range(w.shape[0]):
        for j in range(c):
            w[i, j] %= q
    vals = np.full(n, k, dtype=np.int64)
    for t in range(min(m, n)):
        pv = k
        bi = -1
        bj = -1
        for i in range(t, m):
            for j in range(t, n):
                x = a[i, j]
                if x != 0:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < pv:
                        pv = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
            if pv == 0:
                break
        if bi < 0:
            break
        if bi != t:
            _swap_rows(a, t, bi)
        if bj != t:
            _swap_cols(a, t, bj)
            _swap_rows(w, t, bj)
        pp = 1
        for _ in range(pv):
            pp *= p
        unit = a[t, t] // pp
        uinv = _modinv(unit, q)
        for i in range(t + 1, m):
            if a[i, t] != 0:
                f = ((a[i, t] // pp) * uinv) % q
                for j in range(t, n):
                    a[i, j] = (a[i, j] - f * a[t, j]) % q
        for j in range(t + 1, n):
            if a[t, j] != 0:
                mu = ((a[t, j] // pp) * uinv) % q
                a[t, j] = 0
                for cc in range(c):
                    w[t, cc] = (w[t, cc] + mu * w[j, cc]) % q
        vals[t] = pv
    return vals, w


def local_eliminate(a, w, p, k):
    a = np.ascontiguousarray(a, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.int64)
    if w.shape[0] != a.shape[1]:
        raise ValueError("w must have one row per column of a")
    if (p ** k) >= INT64_BOUND:
        raise OverflowError("modulus too large for the int64 kernels")
    if backend() == "numba":
        return _local_numba(a.copy(), w.copy(), p, k)
    return local_numpy(a, w, p, k)
