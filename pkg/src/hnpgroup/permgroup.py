"""Permutation groups: Schreier-Sims chains, subgroups, coset actions.

Products compose right to left: (p * q)(i) = p(q(i)).
"""

from __future__ import annotations

import re
from collections import deque
from functools import cached_property
from math import gcd

import numpy as np

from .zlinalg import AbInvariants, factorize

ELEMENT_CAP = 5000
INDEX_CAP = 10_000


class CapExceeded(RuntimeError):
    """A configured size cap would be exceeded."""


class NotASubgroup(ValueError):
    pass


class Permutation:
    __slots__ = ("array", "_key")

    def __init__(self, images):
        arr = np.array(images, dtype=np.int64).reshape(-1)
        n = arr.size
        seen = np.zeros(n, dtype=bool)
        if n and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("images out of range")
        seen[arr] = True
        if not seen.all():
            raise ValueError("not a bijection")
        arr.flags.writeable = False
        self.array = arr
        self._key = None

    @classmethod
    def _raw(cls, arr):
        p = cls.__new__(cls)
        arr.flags.writeable = False
        p.array = arr
        p._key = None
        return p

    @classmethod
    def identity(cls, n):
        return cls._raw(np.arange(n, dtype=np.int64))

    @classmethod
    def from_cycles(cls, text, degree=None):
        """Parse 1-based cycle notation such as "(1,2,3)(4,5)"; "()" is the identity."""
        cycles = parse_cycles(text)
        top = max((max(c) for c in cycles if c), default=0)
        n = top + 1 if degree is None else degree
        if top >= n:
            raise ValueError(f"point {top + 1} exceeds degree {n}")
        arr = np.arange(n, dtype=np.int64)
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                arr[a] = b
        return cls(arr)

    @classmethod
    def from_cycle_list(cls, cycles, degree):
        arr = np.arange(degree, dtype=np.int64)
        for c in cycles:
            c = list(c)
            for a, b in zip(c, c[1:] + c[:1]):
                arr[a] = b
        return cls(arr)

    @property
    def degree(self):
        return self.array.size

    @property
    def key(self):
        if self._key is None:
            self._key = self.array.tobytes()
        return self._key

    def __call__(self, i):
        return int(self.array[i])

    def __mul__(self, other):
        return Permutation._raw(self.array[other.array])

    def __invert__(self):
        inv = np.empty_like(self.array)
        inv[self.array] = np.arange(self.array.size, dtype=np.int64)
        return Permutation._raw(inv)

    def __pow__(self, k):
        if k < 0:
            return (~self) ** (-k)
        out = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def is_identity(self):
        return bool((self.array == np.arange(self.array.size)).all())

    def cycles(self):
        seen = set()
        out = []
        for i in range(self.degree):
            if i in seen:
                continue
            c = [i]
            seen.add(i)
            j = int(self.array[i])
            while j != i:
                c.append(j)
                seen.add(j)
                j = int(self.array[j])
            if len(c) > 1:
                out.append(tuple(c))
        return out

    def order(self):
        o = 1
        for c in self.cycles():
            o = o * len(c) // gcd(o, len(c))
        return o

    def first_moved(self):
        moved = np.nonzero(self.array != np.arange(self.degree))[0]
        return int(moved[0]) if moved.size else -1

    def extended(self, n):
        if n < self.degree:
            raise ValueError("cannot shrink a permutation")
        arr = np.arange(n, dtype=np.int64)
        arr[: self.degree] = self.array
        return Permutation._raw(arr)

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ",".join(str(x + 1) for x in c) + ")" for c in cyc)

    __repr__ = __str__


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text):
    """Cycles of a 1-based cycle string, returned 0-based."""
    s = "".join(text.split())
    if not s:
        raise ValueError("empty permutation text")
    pos = 0
    cycles = []
    used = set()
    for m in _CYCLE.finditer(s):
        if m.start() != pos:
            raise ValueError(f"unexpected text at position {pos}: {s[pos:m.start()]!r}")
        pos = m.end()
        body = m.group(1)
        if not body:
            continue
        try:
            pts = [int(x) - 1 for x in body.split(",")]
        except ValueError:
            raise ValueError(f"bad cycle {m.group(0)!r}") from None
        if min(pts) < 0:
            raise ValueError("points are 1-based")
        if len(set(pts)) != len(pts) or used & set(pts):
            raise ValueError(f"repeated point in {text!r}")
        used |= set(pts)
        cycles.append(pts)
    if pos != len(s):
        raise ValueError(f"unexpected text at position {pos}: {s[pos:]!r}")
    return cycles


class StabChain:
    """Base, strong generators per level and transversals."""

    def __init__(self, base, levels, transversals):
        self.base = base
        self.levels = levels
        self.transversals = transversals

    def order(self):
        o = 1
        for t in self.transversals:
            o *= len(t)
        return o

    def strip(self, g, start=0):
        for lev in range(start, len(self.base)):
            beta = int(g.array[self.base[lev]])
            u = self.transversals[lev].get(beta)
            if u is None:
                return g, lev
            g = (~u) * g
        return g, len(self.base)

    def contains(self, g):
        h, lev = self.strip(g)
        return lev == len(self.base) and h.is_identity()

    def level_generators(self, lev):
        if lev >= len(self.levels):
            return []
        return self.levels[lev]


def _orbit_transversal(point, gens, n):
    trans = {point: Permutation.identity(n)}
    queue = deque([point])
    while queue:
        d = queue.popleft()
        u = trans[d]
        for s in gens:
            e = int(s.array[d])
            if e not in trans:
                trans[e] = s * u
                queue.append(e)
    return trans


def schreier_sims(gens, degree, base_prefix=()):
    """Deterministic Schreier-Sims; the base begins with base_prefix."""
    base = [int(b) for b in base_prefix]
    strong = [g for g in gens if not g.is_identity()]
    for g in strong:
        if all(int(g.array[b]) == b for b in base):
            base.append(g.first_moved())
    k = len(base)
    levels = [[t for t in strong if all(int(t.array[b]) == b for b in base[:i])] for i in range(k)]
    trans = [_orbit_transversal(base[i], levels[i], degree) for i in range(k)]
    chain = StabChain(base, levels, trans)
    i = k - 1
    while i >= 0:
        lifted = False
        for delta, u in list(trans[i].items()):
            for s in levels[i]:
                sd = int(s.array[delta])
                su = s * u
                w = trans[i][sd]
                if w == su:
                    continue
                y = (~w) * su
                h, j = chain.strip(y, i + 1)
                if j < len(base) or not h.is_identity():
                    if j == len(base):
                        base.append(h.first_moved())
                        levels.append([])
                        trans.append({})
                    for lev in range(i + 1, j + 1):
                        levels[lev].append(h)
                        trans[lev] = _orbit_transversal(base[lev], levels[lev], degree)
                    i = j
                    lifted = True
                    break
            if lifted:
                break
        if not lifted:
            i -= 1
    return chain


class ElementTable:
    """All elements in breadth-first order from the identity over the generators."""

    def __init__(self, group: "PermGroup", cap: int):
        order = group.order()
        if order > cap:
            raise CapExceeded(f"group of order {order} exceeds the element cap {cap}")
        n = group.degree
        gens = list(group.generators)
        self.gens = gens
        elems = [np.arange(n, dtype=np.int64)]
        index = {elems[0].tobytes(): 0}
        parent = [-1]
        pgen = [-1]
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for si, s in enumerate(gens):
                y = elems[x][s.array]
                key = y.tobytes()
                if key not in index:
                    index[key] = len(elems)
                    elems.append(y)
                    parent.append(x)
                    pgen.append(si)
                    queue.append(len(elems) - 1)
        if len(elems) != order:
            raise AssertionError("element enumeration disagrees with the chain order")
        self.elems = np.array(elems, dtype=np.int64).reshape(len(elems), n)
        self.n = n
        self.size = len(elems)
        self.parent = np.array(parent, dtype=np.int64)
        self.pgen = np.array(pgen, dtype=np.int64)
        self._index = index
        base = group.chain.base
        self._base = np.array(base, dtype=np.int64)
        self._radix = max(n, 1)
        self._use_codes = len(base) * np.log2(self._radix + 1) < 62
        if self._use_codes:
            codes = self._codes(self.elems[:, self._base])
            self._order = np.argsort(codes)
            self._sorted = codes[self._order]

    def _codes(self, imgs):
        c = np.zeros(imgs.shape[:-1], dtype=np.int64)
        for k in range(imgs.shape[-1]):
            c = c * self._radix + imgs[..., k]
        return c

    def index_of(self, perm) -> int:
        return self._index[perm.array.tobytes()]

    def lookup(self, images):
        """Indices of an (..., n) stack of element images."""
        if self._use_codes:
            codes = self._codes(images[..., self._base])
            pos = np.searchsorted(self._sorted, codes)
            return self._order[pos]
        flat = images.reshape(-1, self.n)
        out = np.array([self._index[r.tobytes()] for r in flat], dtype=np.int64)
        return out.reshape(images.shape[:-1])

    def perm(self, i) -> Permutation:
        return Permutation._raw(self.elems[i].copy())

    @cached_property
    def right_gen(self):
        """right_gen[x, s] = index of x * gens[s]."""
        cols = [self.lookup(self.elems[:, s.array]) for s in self.gens]
        return np.stack(cols, axis=1) if cols else np.zeros((self.size, 0), dtype=np.int64)

    @cached_property
    def table(self):
        """table[i, j] = index of elems[i] * elems[j]."""
        e = self.elems
        if self._use_codes:
            eb = e[:, self._base]
            out = np.empty((self.size, self.size), dtype=np.int64)
            for i in range(self.size):
                codes = self._codes(e[i][eb])
                out[i] = self._order[np.searchsorted(self._sorted, codes)]
            return out
        return np.stack([self.lookup(e[i][e]) for i in range(self.size)])

    @cached_property
    def inverse(self):
        inv = np.argsort(self.elems, axis=1)
        return self.lookup(inv)

    @cached_property
    def orders(self):
        out = np.ones(self.size, dtype=np.int64)
        for i in range(self.size):
            out[i] = self.perm(i).order()
        return out

    def powers(self, i):
        """Indices of 1, x, x^2, ... for x = elems[i]."""
        seq = [0]
        cur = i
        while cur != 0:
            seq.append(int(cur))
            cur = self.table[cur, i]
        return seq

    def word(self, i):
        """Generator indices w with elems[i] = gens[w[0]] * gens[w[1]] * ..."""
        w = []
        while i != 0:
            w.append(int(self.pgen[i]))
            i = int(self.parent[i])
        return w[::-1]


class PermGroup:
    """Group generated by permutations of {0..degree-1}.

    `family` optionally records the family construction (see families), and
    `names` maps generator names to permutations for parsing subgroup words.
    """

    def __init__(self, generators, degree=None, label=None, family=None, names=None):
        gens = []
        seen = set()
        for g in generators:
            if not isinstance(g, Permutation):
                g = Permutation(g)
            if degree is None:
                degree = g.degree
            if g.degree != degree:
                raise ValueError("generators of different degrees")
            if g.is_identity() or g.key in seen:
                continue
            seen.add(g.key)
            gens.append(g)
        if degree is None:
            raise ValueError("degree is required for a group without generators")
        self.degree = degree
        self.generators = tuple(gens)
        self.label = label
        self.family = family
        self.names = dict(names or {})
        # set when the group is a coset action built from a family group
        self.subgroup = None
        self.source = None
        self._chains = {}
        self._table = None

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators) or "()"
        return f"PermGroup(<{gens}>, degree={self.degree})"

    def chain_with_base(self, prefix=()):
        prefix = tuple(int(b) for b in prefix)
        ch = self._chains.get(prefix)
        if ch is None:
            ch = schreier_sims(self.generators, self.degree, prefix)
            self._chains[prefix] = ch
        return ch

    @property
    def chain(self):
        return self.chain_with_base(())

    def order(self):
        return self.chain.order()

    def contains(self, g):
        if g.degree != self.degree:
            return False
        return self.chain.contains(g)

    def identity(self):
        return Permutation.identity(self.degree)

    def element_table(self, cap=None):
        cap = ELEMENT_CAP if cap is None else cap
        if self._table is None:
            self._table = ElementTable(self, cap)
        return self._table

    def elements(self, cap=None):
        t = self.element_table(cap)
        return [t.perm(i) for i in range(t.size)]

    def orbit(self, point):
        return sorted(_orbit_transversal(point, self.generators, self.degree))

    def is_trivial(self):
        return not self.generators

    def is_abelian(self):
        gs = self.generators
        return all(a * b == b * a for i, a in enumerate(gs) for b in gs[i + 1:])

    def subgroup(self, gens):
        return PermGroup(gens, degree=self.degree)

    def random_element(self, rng):
        g = self.identity()
        ch = self.chain
        for lev in range(len(ch.base)):
            reps = list(ch.transversals[lev].values())
            g = g * reps[int(rng.integers(len(reps)))]
        return g


# ---------------------------------------------------------------------------
# basic queries


def group_order(g: PermGroup) -> int:
    return g.order()


def element_list(g: PermGroup, cap=None):
    return g.elements(cap)


def is_transitive(g: PermGroup) -> bool:
    if g.degree <= 1:
        return True
    return len(g.orbit(0)) == g.degree


def is_subgroup(h: PermGroup, g: PermGroup) -> bool:
    return h.degree == g.degree and all(g.contains(x) for x in h.generators)


def _check_subgroup(h, g):
    if not is_subgroup(h, g):
        raise NotASubgroup("h is not a subgroup of g")


def is_normal(g: PermGroup, h: PermGroup) -> bool:
    return all(h.contains(s * x * ~s) for s in g.generators for x in h.generators)


def stabilizer(g: PermGroup, point: int) -> PermGroup:
    return pointwise_stabilizer(g, [point])


def pointwise_stabilizer(g: PermGroup, points) -> PermGroup:
    points = list(points)
    ch = g.chain_with_base(points)
    return PermGroup(ch.level_generators(len(points)), degree=g.degree)


def normal_closure(g: PermGroup, gens) -> PermGroup:
    n = PermGroup(gens, degree=g.degree)
    while True:
        new = None
        for x in n.generators:
            for s in g.generators:
                c = s * x * ~s
                if not n.contains(c):
                    new = c
                    break
            if new is not None:
                break
        if new is None:
            return n
        n = PermGroup(n.generators + (new,), degree=g.degree)


def commutator(a, b):
    """[a, b] = a^-1 b^-1 a b."""
    return ~a * ~b * a * b


def derived_subgroup(g: PermGroup) -> PermGroup:
    gs = g.generators
    comms = [commutator(a, b) for i, a in enumerate(gs) for b in gs[i + 1:]]
    return normal_closure(g, comms)


# ---------------------------------------------------------------------------
# cosets


def _canonical_rep(x, hchain, base):
    """Element of the left coset x*H with lexicographically least images of base."""
    for lev, b in enumerate(base):
        if lev >= len(hchain.transversals):
            break
        trans = hchain.transversals[lev]
        best = None
        for d, u in trans.items():
            img = int(x.array[d])
            if best is None or img < best[0]:
                best = (img, u)
        x = x * best[1]
    return x


class CosetSpace:
    """Left cosets of h in g, numbered with h itself as coset 0."""

    def __init__(self, g: PermGroup, h: PermGroup, cap=None):
        cap = INDEX_CAP if cap is None else cap
        _check_subgroup(h, g)
        index = g.order() // h.order()
        if index > cap:
            raise CapExceeded(f"index {index} exceeds the cap {cap}")
        base = g.chain.base
        self._base = np.array(base, dtype=np.int64)
        self._hchain = h.chain_with_base(base)
        self._base_list = base
        ident = g.identity()
        first = self.canonical(ident)
        self.reps = [first]
        self._pos = {self._key(first): 0}
        images = [[] for _ in g.generators]
        i = 0
        while i < len(self.reps):
            c = self.reps[i]
            for si, s in enumerate(g.generators):
                d = self.canonical(s * c)
                k = self._key(d)
                j = self._pos.get(k)
                if j is None:
                    j = len(self.reps)
                    self._pos[k] = j
                    self.reps.append(d)
                images[si].append(j)
            i += 1
        if len(self.reps) != index:
            raise AssertionError("coset enumeration disagrees with the index")
        self.index = index
        self.images = images

    def _key(self, x):
        return x.array[self._base].tobytes()

    def canonical(self, x):
        return _canonical_rep(x, self._hchain, self._base_list)

    def position(self, x):
        """Number of the coset x*h."""
        return self._pos[self._key(self.canonical(x))]

    def act(self, x):
        """Permutation induced by x on the cosets."""
        return Permutation([self.position(x * c) for c in self.reps])


def coset_action(g: PermGroup, h: PermGroup, cap=None) -> PermGroup:
    """Action of g on the left cosets of h; point 0 is h."""
    cs = CosetSpace(g, h, cap)
    gens = [Permutation(im) for im in cs.images]
    return PermGroup(gens, degree=cs.index)


def coset_homomorphism(g: PermGroup, h: PermGroup, cap=None):
    """(image group, generator images) of the coset action."""
    cs = CosetSpace(g, h, cap)
    gens = [Permutation(im) for im in cs.images]
    return PermGroup(gens, degree=cs.index), gens


def kernel_of_action(g: PermGroup, images) -> PermGroup:
    """Kernel of the homomorphism sending g.generators[i] to images[i]."""
    if not g.generators:
        return g
    m = images[0].degree
    n = g.degree
    combined = []
    for s, t in zip(g.generators, images):
        arr = np.concatenate([s.array, t.array + n])
        combined.append(Permutation(arr))
    big = PermGroup(combined, degree=n + m)
    img_order = PermGroup(images, degree=m).order()
    if img_order == g.order():
        return PermGroup([], degree=n)
    k = pointwise_stabilizer(big, range(n, n + m))
    return PermGroup([Permutation._raw(x.array[:n].copy()) for x in k.generators], degree=n)


def core(g: PermGroup, h: PermGroup, cap=None) -> PermGroup:
    """Largest normal subgroup of g inside h (kernel of the coset action)."""
    _, images = coset_homomorphism(g, h, cap)
    k = kernel_of_action(g, images)
    if not is_subgroup(k, h) or not is_normal(g, k):
        raise AssertionError("core is not a normal subgroup of h")
    return k


def quotient(g: PermGroup, n: PermGroup, cap=None) -> PermGroup:
    """g/n as the image of the coset action (n must be normal)."""
    return coset_action(g, n, cap)


# ---------------------------------------------------------------------------
# abelian structure


def abelian_type_from_counts(order: int, counts) -> AbInvariants:
    """Abelian group of the given order from counts(p, k) = #{x : x^(p^k) = 1}."""
    parts = {}
    for p, a in factorize(order).items():
        logs = [0]
        k = 1
        while logs[-1] < a:
            c = counts(p, k)
            e = round(np.log(c) / np.log(p))
            if p**e != c:
                raise AssertionError("element counts are not prime powers")
            logs.append(e)
            k += 1
        # number of cyclic factors of order >= p^k is logs[k] - logs[k-1]
        ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
        exps = []
        for k in range(len(ge)):
            nxt = ge[k + 1] if k + 1 < len(ge) else 0
            exps += [k + 1] * (ge[k] - nxt)
        parts[p] = exps
    return AbInvariants.from_primary(parts)


def abelian_group_invariants(a: PermGroup) -> AbInvariants:
    """Invariants of an abelian permutation group from its element orders."""
    t = a.element_table(max(ELEMENT_CAP, INDEX_CAP))
    orders = t.orders
    return abelian_type_from_counts(t.size, lambda p, k: int(np.sum((p**k) % orders == 0)))


def abelian_invariants(g: PermGroup) -> AbInvariants:
    """Invariant factors of g/[g,g]."""
    d = derived_subgroup(g)
    q = coset_action(g, d)
    return abelian_group_invariants(q)


def is_cyclic(g: PermGroup) -> bool:
    n = g.order()
    if n == 1:
        return True
    if not g.is_abelian():
        return False
    return len(abelian_group_invariants(g).factors) <= 1


def element_subgroup(g: PermGroup, table: ElementTable, idx) -> PermGroup:
    return PermGroup([table.perm(i) for i in idx], degree=g.degree)


def _is_power_of(k, p):
    while k % p == 0:
        k //= p
    return k == 1


def sylow_subgroup(g: PermGroup, p: int, cap=None) -> PermGroup:
    """A Sylow p-subgroup by climbing normalizers inside the element table."""
    order = g.order()
    target = p ** factorize(order).get(p, 0)
    if target == 1:
        return PermGroup([], degree=g.degree)
    t = g.element_table(cap)
    tab = t.table
    inv = t.inverse
    # start from the cyclic group of a p-element of largest order
    pelems = [i for i in range(t.size) if t.orders[i] > 1 and target % t.orders[i] == 0]
    start = max(pelems, key=lambda i: (t.orders[i], -i))
    members = np.zeros(t.size, dtype=bool)
    members[t.powers(start)] = True
    gens = [start]
    while members.sum() < target:
        idx = np.nonzero(members)[0]
        # x normalizes P iff x P x^-1 lies in P
        xs = np.arange(t.size)
        normal = np.ones(t.size, dtype=bool)
        for gi in gens:
            normal &= members[tab[tab[xs, gi], inv[xs]]]
        grown = False
        for y in np.nonzero(normal & ~members)[0]:
            k = 1
            cur = int(y)
            while not members[cur]:
                cur = int(tab[cur, y])
                k += 1
            if _is_power_of(k, p):
                new = np.zeros(t.size, dtype=bool)
                powers = t.powers(int(y))
                for e in idx:
                    new[tab[e, powers]] = True
                members = new
                gens.append(int(y))
                grown = True
                break
        if not grown:
            raise AssertionError("normalizer climb stalled")
    sub = element_subgroup(g, t, gens)
    if sub.order() != target:
        raise AssertionError("Sylow subgroup has the wrong order")
    return sub


def cyclic_subgroup_classes(g: PermGroup, cap=None):
    """One generator per conjugacy class of nontrivial cyclic subgroups.

    Returns a list of (generator index in the element table, class size)."""
    t = g.element_table(cap)
    tab = t.table
    inv = t.inverse
    subgroup_of = {}
    for i in range(1, t.size):
        key = frozenset(t.powers(i))
        subgroup_of.setdefault(key, i)
    seen = set()
    out = []
    for key, rep in sorted(subgroup_of.items(), key=lambda kv: kv[1]):
        if key in seen:
            continue
        cls = set()
        for x in range(t.size):
            y = int(tab[tab[x, rep], inv[x]])
            cls.add(frozenset(t.powers(y)))
        seen |= cls
        out.append((rep, len(cls)))
    return out


def intersection_order(a: PermGroup, b: PermGroup, cap=None) -> int:
    """|a ∩ b| by testing the smaller group's elements."""
    small, big = (a, b) if a.order() <= b.order() else (b, a)
    return sum(1 for x in small.elements(cap) if big.contains(x))
