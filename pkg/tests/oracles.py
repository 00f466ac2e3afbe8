"""Brute-force cohomology over the full normalized bar complex.

Every cochain value is an unknown and every cocycle equation is imposed, so
these share nothing with the parameterized engines except exact Smith forms.
"""

import numpy as np

from hnpgroup.zlinalg import AbInvariants, kernel_lattice, quotient_invariants


def _setup(m):
    t = m.group.element_table()
    return t.size, t.table, m.all_matrices(), m.rank


def delta1(m):
    n, tab, mats, r = _setup(m)
    k = n - 1
    out = np.zeros((k * k * r, k * r), dtype=np.int64)
    for g in range(1, n):
        for h in range(1, n):
            row = ((g - 1) * k + (h - 1)) * r
            out[row:row + r, (h - 1) * r:h * r] += mats[g]
            gh = tab[g, h]
            if gh:
                out[row:row + r, (gh - 1) * r:gh * r] -= np.eye(r, dtype=np.int64)
            out[row:row + r, (g - 1) * r:g * r] += np.eye(r, dtype=np.int64)
    return out


def delta2(m):
    n, tab, mats, r = _setup(m)
    k = n - 1
    eye = np.eye(r, dtype=np.int64)

    def col(x, y):
        return ((x - 1) * k + (y - 1)) * r

    out = np.zeros((k ** 3 * r, k * k * r), dtype=np.int64)
    for a in range(1, n):
        for b in range(1, n):
            for c in range(1, n):
                row = (((a - 1) * k + (b - 1)) * k + (c - 1)) * r
                out[row:row + r, col(b, c):col(b, c) + r] += mats[a]
                ab, bc = tab[a, b], tab[b, c]
                if ab:
                    out[row:row + r, col(ab, c):col(ab, c) + r] -= eye
                if bc:
                    out[row:row + r, col(a, bc):col(a, bc) + r] += eye
                out[row:row + r, col(a, b):col(a, b) + r] -= eye
    return out


def h1_bar(m):
    n, _, mats, r = _setup(m)
    if n == 1 or r == 0:
        return AbInvariants()
    z = kernel_lattice(delta1(m))
    b = np.vstack([mats[g] - np.eye(r, dtype=np.int64) for g in range(1, n)])
    return quotient_invariants(z, b)


def h2_bar(m):
    n = m.group.order()
    if n == 1 or m.rank == 0:
        return AbInvariants()
    z = kernel_lattice(delta2(m))
    return quotient_invariants(z, delta1(m))


def h2_bar_mod(m, e):
    """H^2(G, M/eM) for a trivial rank-1 lattice m."""
    n = m.group.order()
    if n == 1 or e == 1:
        return AbInvariants()
    d2 = delta2(m)
    rows, cols = d2.shape
    big = np.hstack([d2, -e * np.eye(rows, dtype=np.int64)])
    z = kernel_lattice(big)[:cols]
    sub = np.hstack([delta1(m), e * np.eye(cols, dtype=np.int64)])
    return quotient_invariants(z, sub)
