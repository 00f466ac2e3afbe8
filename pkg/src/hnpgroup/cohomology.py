"""Low-degree cohomology of finite permutation groups.

Cochains are normalized (f(1, x) = f(x, 1) = 0). A normalized 2-cocycle is
determined by its values f(x, s) on pairs with x != 1 and s a generator: the
remaining values follow from the cocycle identity along the breadth-first
spanning tree of the Cayley graph,

    f(g, h's) = f(g, h') + f(gh', s) - g.f(h', s).

These parameters satisfy no linear constraints beyond those coming from the
non-tree edges, and the cocycle lattice is the saturation of the coboundary
image, so H^2 is the torsion of a single cokernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .families import NoClosedForm, expected_multiplier
from .lattice import GLattice, restrict
from .permgroup import (
    ELEMENT_CAP,
    CapExceeded,
    PermGroup,
    Permutation,
    abelian_invariants,
    cyclic_subgroup_classes,
    is_cyclic,
    sylow_subgroup,
)
from .zlinalg import (
    TRIVIAL,
    AbInvariants,
    as_matrix,
    factorize,
    image_basis,
    kernel_lattice,
    matmul,
    primary_subtract,
    quotient_invariants,
    smith_normal_form,
    torsion_of_cokernel,
)

H2_CAP = 20_000


class BudgetExceeded(RuntimeError):
    pass


def _check_budget(n_elems, rank, cap):
    cap = H2_CAP if cap is None else cap
    if n_elems * n_elems * max(rank, 1) > cap:
        raise BudgetExceeded(f"|G|^2 * rank = {n_elems * n_elems * max(rank, 1)} exceeds {cap}")


def _table(g: PermGroup):
    if g.order() > ELEMENT_CAP:
        raise BudgetExceeded(f"group of order {g.order()} is too large to enumerate")
    return g.element_table()


# ---------------------------------------------------------------------------
# degree 1


def h1(m: GLattice) -> AbInvariants:
    """H^1(G, M) from the crossed homomorphisms' values on generators."""
    if not m.action or m.rank == 0:
        return TRIVIAL
    eye = np.eye(m.rank, dtype=np.int64)
    stacked = np.vstack([a - eye for a in m.action])
    return torsion_of_cokernel(stacked)


# ---------------------------------------------------------------------------
# degree 2


def coboundary_matrix(m: GLattice) -> np.ndarray:
    """Map from normalized 1-cochains to the 2-cocycle parameters.

    Columns: c = e_{y,i} (y != 1). Rows: blocks (x, s) with x != 1.
    (dc)(x, s) = x.c(s) - c(xs) + c(x).
    """
    t = _table(m.group)
    n, ns, r = t.size, len(m.group.generators), m.rank
    mats = m.all_matrices()
    rg = t.right_gen
    out = np.zeros(((n - 1) * ns * r, (n - 1) * r), dtype=np.int64)
    eye = np.eye(r, dtype=np.int64)
    for x in range(1, n):
        for s in range(ns):
            rows = slice(((x - 1) * ns + s) * r, ((x - 1) * ns + s + 1) * r)
            y = rg[0, s]
            out[rows, (y - 1) * r:y * r] += mats[x]
            xs = rg[x, s]
            if xs:
                out[rows, (xs - 1) * r:xs * r] -= eye
            out[rows, (x - 1) * r:x * r] += eye
    return out


@dataclass
class CocycleSpace:
    """Torsion generators of H^2(G, M) as explicit cocycles.

    reps[:, i] holds the parameters f(x, s) of a cocycle whose class has
    order orders[i]; these classes generate H^2 = sum of Z/orders[i].
    """

    lattice: GLattice
    orders: tuple
    reps: np.ndarray
    coord_rows: np.ndarray | None = None
    zero_rows: np.ndarray | None = None

    @property
    def invariants(self) -> AbInvariants:
        return AbInvariants.from_orders(list(self.orders))

    @property
    def group(self) -> PermGroup:
        return self.lattice.group

    @property
    def degree(self) -> int:
        return 2

    @property
    def basis(self) -> list:
        return [self.reps[:, i] for i in range(len(self.orders))]

    @property
    def coboundary_generators(self) -> np.ndarray:
        """Columns are the parameter vectors of the coboundaries of unit cochains."""
        return coboundary_matrix(self.lattice)

    def param_vector(self, f) -> np.ndarray:
        """Parameters f(x, s) read off a full (|G|, |G|, rank) cocycle array."""
        t = self.group.element_table()
        rg = t.right_gen
        ns = rg.shape[1]
        parts = [f[x, rg[0, s]] for x in range(1, t.size) for s in range(ns)]
        if not parts:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(parts)

    def extend(self, params) -> np.ndarray:
        """Full normalized cocycle f[g, h] (shape |G| x |G| x rank) from its parameters."""
        t = self.group.element_table()
        n, r = t.size, self.lattice.rank
        ns = len(self.group.generators)
        params = np.asarray(params).astype(np.int64)
        pm = np.zeros((n, max(ns, 1), r), dtype=np.int64)
        if n > 1:
            pm[1:, :ns] = params.reshape(n - 1, ns, r)
        mats = self.lattice.all_matrices()
        tab = t.table
        f = np.zeros((n, n, r), dtype=np.int64)
        for h in range(1, n):
            hp, s = int(t.parent[h]), int(t.pgen[h])
            f[:, h] = f[:, hp] + pm[tab[:, hp], s] - mats @ pm[hp, s]
        return f

    def coordinates(self, params) -> np.ndarray:
        """Class of a cocycle in terms of the generators (entry i taken mod orders[i])."""
        if self.coord_rows is None:
            raise ValueError("this space was built without coordinate data")
        v = np.asarray(params).astype(object).reshape(-1, 1)
        if self.zero_rows.shape[0] and any(int(x) for x in matmul(self.zero_rows, v).ravel()):
            raise ValueError("parameters do not describe a cocycle")
        if not self.orders:
            return np.zeros(0, dtype=np.int64)
        raw = matmul(self.coord_rows, v).ravel()
        return np.array([int(x) % d for x, d in zip(raw, self.orders)], dtype=np.int64)


def cocycle_violations(m: GLattice, f) -> int:
    """Number of triples (a, b, c) where a.f(b,c) - f(ab,c) + f(a,bc) - f(a,b) != 0."""
    t = m.group.element_table()
    tab = t.table
    mats = m.all_matrices()
    bad = 0
    for a in range(t.size):
        lhs = (mats[a] @ f.reshape(-1, m.rank).T).T.reshape(f.shape)
        lhs = lhs - f[tab[a]] + f[a][tab] - f[a][:, None, :]
        bad += int(np.count_nonzero(np.any(lhs != 0, axis=2)))
    return bad


def cocycle_space(m: GLattice, coordinates: bool = False, budget: int | None = None) -> CocycleSpace:
    """Explicit generators of H^2(G, M), optionally with the data to read off classes."""
    t = _table(m.group)
    _check_budget(t.size, m.rank, budget)
    bp = coboundary_matrix(m)
    if bp.shape[0] == 0:
        return CocycleSpace(m, (), np.zeros((0, 0), dtype=np.int64),
                            np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64))
    snf = smith_normal_form(bp, transforms=True)
    img = matmul(bp, snf.v)
    picks = [i for i in range(snf.rank) if snf.d[i] > 1]
    reps = np.zeros((bp.shape[0], len(picks)), dtype=object)
    for c, i in enumerate(picks):
        col = img[:, i]
        d = snf.d[i]
        if any(int(x) % d for x in col):
            raise AssertionError("coboundary column not divisible by its elementary divisor")
        reps[:, c] = [int(x) // d for x in col]
    orders = tuple(snf.d[i] for i in picks)
    coord_rows = zero_rows = None
    if coordinates:
        coord_rows = snf.u[picks]
        zero_rows = snf.u[snf.rank:]
    return CocycleSpace(m, orders, _as_int(reps), coord_rows, zero_rows)


def _as_int(a):
    try:
        return a.astype(np.int64)
    except OverflowError:
        return a


def h2(m: GLattice, budget: int | None = None) -> AbInvariants:
    """H^2(G, M) for a G-lattice M."""
    t = _table(m.group)
    _check_budget(t.size, m.rank, budget)
    bp = coboundary_matrix(m)
    if bp.shape[0] == 0:
        return TRIVIAL
    return torsion_of_cokernel(bp)


# ---------------------------------------------------------------------------
# trivial coefficients modulo e


def _param_expansion(t, ns):
    """F[g, h] = coefficient vector of f(g, h) in the parameters (trivial action)."""
    n = t.size
    npar = (n - 1) * ns
    tab = t.table
    f = np.zeros((n, n, npar), dtype=np.int64)
    rows = np.arange(n)
    for h in range(1, n):
        hp, s = int(t.parent[h]), int(t.pgen[h])
        f[:, h] = f[:, hp]
        gh = tab[:, hp]
        live = gh != 0
        f[rows[live], h, (gh[live] - 1) * ns + s] += 1
        if hp:
            f[:, h, (hp - 1) * ns + s] -= 1
    return f


def _trivial_relations(t, ns):
    """Cocycle equations on the parameters: one row per (a != 1, non-tree edge (b, s))."""
    n = t.size
    npar = (n - 1) * ns
    rg = t.right_gen
    tab = t.table
    f = _param_expansion(t, ns)
    blocks = []
    a = np.arange(1, n)
    for b in range(n):
        for s in range(ns):
            bs = int(rg[b, s])
            if bs and t.parent[bs] == b and t.pgen[bs] == s:
                continue
            rows = f[a, bs] - f[a, b]
            if b:
                rows[:, (b - 1) * ns + s] += 1
            ab = tab[a, b]
            live = ab != 0
            rows[np.nonzero(live)[0], (ab[live] - 1) * ns + s] -= 1
            blocks.append(rows)
    if not blocks:
        return np.zeros((0, npar), dtype=np.int64)
    return np.vstack(blocks)


def _trivial_coboundaries(t, ns):
    n = t.size
    rg = t.right_gen
    out = np.zeros(((n - 1) * ns, n - 1), dtype=np.int64)
    for x in range(1, n):
        for s in range(ns):
            row = (x - 1) * ns + s
            out[row, rg[0, s] - 1] += 1
            if rg[x, s]:
                out[row, rg[x, s] - 1] -= 1
            out[row, x - 1] += 1
    return out


def h2_trivial_mod(g: PermGroup, e: int, budget: int | None = None) -> AbInvariants:
    """H^2(G, Z/e) with trivial action, computed one prime power at a time over Z/p^k."""
    if e < 1:
        raise ValueError("modulus must be positive")
    t = _table(g)
    _check_budget(t.size, 1, budget)
    ns = len(g.generators)
    if t.size == 1 or e == 1:
        return TRIVIAL
    rel = _trivial_relations(t, ns)
    cob = _trivial_coboundaries(t, ns)
    parts = {}
    for p, k in factorize(e).items():
        q = p ** k
        vals, w = _kernels.local_eliminate(rel % q, cob % q, p, k)
        keep = [j for j in range(len(vals)) if vals[j] > 0]
        if not keep:
            continue
        sub = np.zeros((len(keep), w.shape[1]), dtype=np.int64)
        for row, j in enumerate(keep):
            shift = p ** (k - int(vals[j]))
            if np.any(w[j] % shift):
                raise AssertionError("coboundary outside the cocycle module")
            sub[row] = (w[j] // shift) % (p ** int(vals[j]))
        diag = np.diag([p ** int(vals[j]) for j in keep]).astype(np.int64)
        rmat = np.hstack([sub, diag])
        v2, _ = _kernels.local_eliminate(rmat, np.zeros((rmat.shape[1], 0), dtype=np.int64), p, k + 1)
        exps = sorted(int(v) for v in v2[:len(keep)] if 0 < v <= k)
        if exps:
            parts[p] = exps
    return AbInvariants.from_primary(parts)


# ---------------------------------------------------------------------------
# Schur multiplier


def multiplier_uct(g: PermGroup, budget: int | None = None) -> AbInvariants:
    """M(G) from H^2(G, Z/|G|) = M(G) + Hom(G^ab, Z/|G|)."""
    if g.order() == 1:
        return TRIVIAL
    total = h2_trivial_mod(g, g.order(), budget)
    return primary_subtract(total, abelian_invariants(g))


def multiplier_family(g: PermGroup) -> AbInvariants:
    if g.family is None:
        raise NoClosedForm("group has no family description")
    return expected_multiplier(g.family)


def multiplier_sylow(g: PermGroup, budget: int | None = None) -> AbInvariants:
    """Trivial when every Sylow subgroup has trivial multiplier; undecided otherwise."""
    for p in factorize(g.order()):
        sub = sylow_subgroup(g, p)
        if not multiplier_uct(sub, budget).is_trivial:
            raise BudgetExceeded(f"Sylow {p}-subgroup has a nontrivial multiplier")
    return TRIVIAL


ENGINES = {
    "family": lambda g, budget: multiplier_family(g),
    "uct": multiplier_uct,
    "sylow": multiplier_sylow,
}


def schur_multiplier(g: PermGroup, engines=("family", "uct", "sylow"), budget: int | None = None,
                     report: dict | None = None) -> AbInvariants:
    """First engine that succeeds wins. `report` collects the outcome of each attempt."""
    failures = []
    for name in engines:
        try:
            out = ENGINES[name](g, budget)
        except (BudgetExceeded, CapExceeded, NoClosedForm) as exc:
            failures.append(f"{name}: {exc}")
            if report is not None:
                report[name] = str(exc)
            continue
        if report is not None:
            report[name] = str(out)
        return out
    raise BudgetExceeded("no engine could compute the multiplier (" + "; ".join(failures) + ")")


# ---------------------------------------------------------------------------
# restriction to cyclic subgroups


@dataclass
class RestrictionMap:
    """matrix[:, i] = class of res(rep i) in H^2(C, M) on the generators of orders `moduli`."""

    subgroup: PermGroup
    matrix: np.ndarray
    moduli: tuple


def _cyclic_generator(g: PermGroup, c) -> Permutation:
    if isinstance(c, Permutation):
        return c
    if not is_cyclic(c):
        raise ValueError("restriction is only implemented for cyclic subgroups")
    n = c.order()
    for x in c.elements():
        if x.order() == n:
            return x
    raise AssertionError("cyclic group without a generator")


def restriction_map(space: CocycleSpace, c) -> RestrictionMap:
    g = space.group
    gen = _cyclic_generator(g, c)
    if not g.contains(gen):
        raise ValueError(f"{gen} is not in the group")
    sub = PermGroup([gen], degree=g.degree)
    t = g.element_table()
    k = sub.order()
    cspace = cocycle_space(restrict(space.lattice, sub), coordinates=True, budget=10 ** 9)
    tc = len(cspace.orders)
    mat = np.zeros((tc, len(space.orders)), dtype=np.int64)
    if tc and space.orders:
        ci = t.index_of(gen)
        pw = t.powers(ci)
        if len(pw) != k:
            raise AssertionError("power sequence disagrees with the subgroup order")
        for i in range(len(space.orders)):
            f = space.extend(space.reps[:, i])
            params = np.concatenate([f[pw[j], ci] for j in range(1, k)])
            mat[:, i] = cspace.coordinates(params)
    for i, d in enumerate(space.orders):
        for j, dc in enumerate(cspace.orders):
            if (d * int(mat[j, i])) % dc:
                raise AssertionError("restriction does not respect class orders")
    return RestrictionMap(sub, mat, cspace.orders)


def _kernel_from_maps(t: int, blocks, moduli):
    if t == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if not moduli:
        return np.eye(t, dtype=np.int64)
    phi = np.vstack(blocks)
    rel = np.hstack([phi, -np.diag(np.array(moduli, dtype=np.int64))])
    ker = kernel_lattice(rel)
    return image_basis(as_matrix(ker)[:t, :])


def restriction_kernel(space: CocycleSpace, c) -> np.ndarray:
    """Columns generate the preimage in Z^t of ker(H^2(G,M) -> H^2(C,M)).

    The lattice always contains orders[i] * e_i.
    """
    rmap = restriction_map(space, c)
    return _kernel_from_maps(len(space.orders), [rmap.matrix], rmap.moduli)


def same_lattice(a, b) -> bool:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return a.shape[1] == b.shape[1] == 0 or (not a.any() and not b.any())
    from .zlinalg import MembershipError, solve_in_lattice

    try:
        solve_in_lattice(a, b)
        solve_in_lattice(b, a)
    except MembershipError:
        return False
    return True


def sha2_omega(m: GLattice, budget: int | None = None, check_conjugates: bool = False) -> AbInvariants:
    """Classes in H^2(G, M) restricting to zero on every cyclic subgroup."""
    space = cocycle_space(m, budget=budget)
    t = len(space.orders)
    if t == 0:
        return TRIVIAL
    g = m.group
    tab = g.element_table()
    blocks, moduli = [], []
    for rep, _size in cyclic_subgroup_classes(g):
        gen = tab.perm(rep)
        rmap = restriction_map(space, gen)
        if check_conjugates:
            other = tab.perm(int(tab.table[tab.table[1 % tab.size, rep], tab.inverse[1 % tab.size]]))
            mine = _kernel_from_maps(t, [rmap.matrix], rmap.moduli)
            theirs = restriction_kernel(space, other)
            if not same_lattice(mine, theirs):
                raise AssertionError("conjugate cyclic subgroups have different restriction kernels")
        if rmap.moduli:
            blocks.append(rmap.matrix)
            moduli.extend(rmap.moduli)
    lat = _kernel_from_maps(t, blocks, moduli)
    sub = np.diag(np.array(space.orders, dtype=np.int64))
    from .zlinalg import solve_in_lattice

    solve_in_lattice(lat, sub)
    return quotient_invariants(lat, sub)


__all__ = [
    "BudgetExceeded", "CocycleSpace", "RestrictionMap", "coboundary_matrix", "cocycle_space",
    "cocycle_violations", "h1", "h2", "h2_trivial_mod", "multiplier_uct", "restriction_kernel",
    "restriction_map", "schur_multiplier", "sha2_omega",
]
