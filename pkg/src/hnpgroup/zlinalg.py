"""Exact integer linear algebra: Smith forms, kernels and quotient invariants."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd, prod

import numpy as np

from . import _kernels


class EntryGrowthError(ArithmeticError):
    """Raised when intermediate entries exceed the configured bit bound."""


class MembershipError(ValueError):
    """A sub-generator is not in the span of the ambient basis."""

    def __init__(self, column):
        super().__init__(f"column {column} of the sub-generators is not in the ambient lattice")
        self.column = column


class SubtractionError(ValueError):
    def __init__(self, prime, exponent):
        super().__init__(f"summand has an unmatched component of order {prime}^{exponent}")
        self.prime = prime
        self.exponent = exponent


# bit bound for the arbitrary precision path
MAX_BITS = 4096
# above this many columns only the invariants are computed, by sparse elimination
SPARSE_COLUMNS = 10_000


def factorize(n: int) -> dict[int, int]:
    n = abs(int(n))
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d integer array (int64 when possible, else object)."""
    if isinstance(a, np.ndarray) and a.ndim == 2 and a.dtype in (np.int64, object):
        return a
    arr = np.asarray(a)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else np.zeros((0, 0), dtype=np.int64)
    if arr.dtype == object:
        return arr
    if arr.dtype.kind not in "iub":
        raise TypeError("integer matrix expected")
    return arr.astype(np.int64)


def _to_object(a):
    return a.astype(object)


def _shrink(a):
    """Return an int64 copy if every entry fits, else the object array."""
    if a.dtype == np.int64:
        return a
    if a.size == 0 or max(abs(int(x)) for x in a.flat) < 2**62:
        return a.astype(np.int64)
    return a


def matmul(a, b):
    """Exact matrix product; switches to Python integers if int64 could overflow."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.dtype == np.int64 and b.dtype == np.int64 and a.size and b.size:
        bound = int(np.abs(a).max()) * int(np.abs(b).max()) * max(1, a.shape[1])
        if bound < 2**62:
            return a @ b
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    return _shrink(_to_object(a).dot(_to_object(b)))


@dataclass(frozen=True)
class AbInvariants:
    """A finitely generated abelian group: invariant factors plus free rank."""

    factors: tuple = ()
    free_rank: int = 0

    def __post_init__(self):
        fs = tuple(int(x) for x in self.factors)
        for x in fs:
            if x < 2:
                raise ValueError("invariant factors must be at least 2")
        for x, y in zip(fs, fs[1:]):
            if y % x:
                raise ValueError("invariant factors must form a divisibility chain")
        object.__setattr__(self, "factors", fs)
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    @classmethod
    def from_orders(cls, orders, free_rank=0) -> "AbInvariants":
        """Canonical form of a direct sum of cyclic groups Z/n (n=0 means Z)."""
        orders = [abs(int(x)) for x in orders]
        free = free_rank + sum(1 for x in orders if x == 0)
        finite = [x for x in orders if x > 1]
        if not finite:
            return cls((), free)
        snf = smith_normal_form(np.diag(np.array(finite, dtype=np.int64)), transforms=False)
        return cls(tuple(d for d in snf.d if d > 1), free)

    @classmethod
    def from_primary(cls, parts: dict, free_rank=0) -> "AbInvariants":
        """Build from {p: [exponents]}."""
        orders = [p**e for p, es in parts.items() for e in es if e > 0]
        return cls.from_orders(orders, free_rank)

    @property
    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return prod(self.factors)

    @property
    def is_trivial(self):
        return not self.factors and not self.free_rank

    @property
    def exponent(self):
        return self.factors[-1] if self.factors else 1

    def primary_parts(self) -> dict:
        """{p: sorted list of exponents} over the finite part."""
        parts: dict = {}
        for x in self.factors:
            for p, e in factorize(x).items():
                parts.setdefault(p, []).append(e)
        return {p: sorted(es) for p, es in sorted(parts.items())}

    def __add__(self, other: "AbInvariants") -> "AbInvariants":
        return AbInvariants.from_orders(self.factors + other.factors, self.free_rank + other.free_rank)

    def as_list(self):
        return list(self.factors) + [0] * self.free_rank

    def __str__(self):
        if self.is_trivial:
            return "0"
        body = ",".join(str(x) for x in self.factors)
        if self.free_rank:
            body = (body + "," if body else "") + ("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return f"[{body}]"


TRIVIAL = AbInvariants()


@dataclass(frozen=True)
class SmithForm:
    """u @ a @ v == diag(d) padded with zeros."""

    d: tuple
    u: np.ndarray
    v: np.ndarray
    rank: int
    shape: tuple = (0, 0)

    def cokernel(self) -> AbInvariants:
        """Z^rows modulo the column span of the source matrix."""
        return AbInvariants.from_orders([x for x in self.d if x > 1], self.shape[0] - self.rank)


def smith_normal_form(a, transforms: bool = True, max_bits: int | None = None) -> SmithForm:
    """Smith normal form with unimodular u, v (when transforms is set).

    Pivots are chosen as the smallest nonzero magnitude, ties broken by lowest
    row then lowest column. The int64 kernel is tried first; if entries grow
    too large the computation restarts with Python integers, and
    EntryGrowthError is raised once entries exceed max_bits.
    """
    a = as_matrix(a)
    m, n = a.shape
    max_bits = MAX_BITS if max_bits is None else max_bits
    ok = False
    if a.dtype == np.int64 and (a.size == 0 or int(np.abs(a).max()) <= _kernels.INT64_BOUND):
        diag, u, v, ok = _kernels.snf_int64(a, transforms, transforms)
    if not ok:
        obj = _to_object(a)
        diag, u, v, ok = _kernels.snf_numpy(obj, transforms, transforms, 1 << max_bits)
        if not ok:
            raise EntryGrowthError(f"entries exceeded {max_bits} bits")
        u, v = _shrink(u), _shrink(v)
    k = min(m, n)
    d = tuple(int(diag[i, i]) for i in range(k))
    rank = sum(1 for x in d if x != 0)
    if not transforms:
        u = np.zeros((0, 0), dtype=np.int64)
        v = np.zeros((0, 0), dtype=np.int64)
    return SmithForm(d=d, u=u, v=v, rank=rank, shape=(m, n))


def elementary_divisors(a) -> tuple:
    """Nonzero diagonal of the Smith form. Large sparse inputs go through
    unit-pivot elimination first."""
    a = as_matrix(a)
    if a.shape[1] >= SPARSE_COLUMNS or a.shape[0] >= SPARSE_COLUMNS:
        return sparse_elementary_divisors(a)
    snf = smith_normal_form(a, transforms=False)
    return tuple(x for x in snf.d if x)


def cokernel(a) -> AbInvariants:
    """Z^rows / column span of a."""
    a = as_matrix(a)
    ds = elementary_divisors(a)
    return AbInvariants.from_orders([x for x in ds if x != 1], a.shape[0] - len(ds))


def torsion_of_cokernel(a) -> AbInvariants:
    c = cokernel(a)
    return AbInvariants(c.factors, 0)


def sparse_elementary_divisors(a) -> tuple:
    """Eliminate +-1 pivots with a Markowitz-style fill-in rule, then finish densely.

    Each unit pivot contributes a divisor 1 and removes one row and column.
    """
    a = as_matrix(a)
    rows: list[dict] = []
    for i in range(a.shape[0]):
        nz = np.nonzero(a[i])[0]
        if nz.size:
            rows.append({int(j): int(a[i, j]) for j in nz})
    cols: dict[int, set] = {}
    for i, r in enumerate(rows):
        for j in r:
            cols.setdefault(j, set()).add(i)
    alive = set(range(len(rows)))
    units = 0
    while True:
        best = None
        for i in sorted(alive):
            r = rows[i]
            for j, x in r.items():
                if x in (1, -1):
                    cost = (len(r) - 1) * (len(cols[j]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pi, pj = best
        prow = rows[pi]
        sign = prow[pj]
        for i in sorted(cols[pj] - {pi}):
            r = rows[i]
            f = r[pj] * sign
            for j, x in prow.items():
                y = r.get(j, 0) - f * x
                if y:
                    if j not in r:
                        cols[j].add(i)
                    r[j] = y
                elif j in r:
                    del r[j]
                    cols[j].discard(i)
        for j in prow:
            cols[j].discard(pi)
        alive.discard(pi)
        units += 1
        for i in [i for i in alive if not rows[i]]:
            alive.discard(i)
    rest_rows = sorted(alive)
    rest_cols = sorted({j for i in rest_rows for j in rows[i]})
    if not rest_rows:
        return (1,) * units
    index = {j: k for k, j in enumerate(rest_cols)}
    dense = np.zeros((len(rest_rows), len(rest_cols)), dtype=object)
    for k, i in enumerate(rest_rows):
        for j, x in rows[i].items():
            dense[k, index[j]] = x
    snf = smith_normal_form(_shrink(dense), transforms=False)
    return (1,) * units + tuple(x for x in snf.d if x)


def kernel_lattice(a) -> np.ndarray:
    """Columns form a Z-basis of {x : a x = 0}."""
    a = as_matrix(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    snf = smith_normal_form(a)
    return snf.v[:, snf.rank:]


def image_basis(gens) -> np.ndarray:
    """A Z-basis (as columns) of the lattice spanned by the columns of gens."""
    g = as_matrix(gens)
    if g.shape[1] == 0:
        return g
    snf = smith_normal_form(g)
    return matmul(g, snf.v)[:, :snf.rank]


def solve_in_lattice(basis, vectors) -> np.ndarray:
    """Coordinates c with basis @ c == vectors; MembershipError names a bad column."""
    b = as_matrix(basis)
    x = as_matrix(vectors)
    snf = smith_normal_form(b)
    y = matmul(snf.u, x)
    r = snf.rank
    coords = np.zeros((b.shape[1], x.shape[1]), dtype=object)
    for col in range(x.shape[1]):
        for i in range(r):
            val = int(y[i, col])
            if val % snf.d[i]:
                raise MembershipError(col)
            coords[i, col] = val // snf.d[i]
        for i in range(r, y.shape[0]):
            if int(y[i, col]) != 0:
                raise MembershipError(col)
    return _shrink(matmul(snf.v, _shrink(coords)))


def quotient_invariants(ambient_basis, sub_generators) -> AbInvariants:
    """Invariants of span(ambient_basis) / span(sub_generators)."""
    amb = image_basis(ambient_basis)
    sub = as_matrix(sub_generators)
    if sub.shape[1] == 0:
        return AbInvariants((), amb.shape[1])
    coords = solve_in_lattice(amb, sub)
    return cokernel(coords)


def primary_subtract(total: AbInvariants, summand: AbInvariants) -> AbInvariants:
    """rest with total = summand + rest, matched prime by prime."""
    if summand.free_rank > total.free_rank:
        raise SubtractionError(0, 0)
    tp = total.primary_parts()
    rest: dict = {}
    for p, es in summand.primary_parts().items():
        pool = list(tp.get(p, []))
        for e in es:
            if e not in pool:
                raise SubtractionError(p, e)
            pool.remove(e)
        tp[p] = pool
    for p, es in tp.items():
        rest[p] = es
    return AbInvariants.from_primary(rest, total.free_rank - summand.free_rank)


def lcm(*xs):
    return reduce(lambda a, b: a * b // gcd(a, b) if a and b else 0, xs, 1)
