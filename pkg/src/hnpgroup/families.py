"""Parametric group families, their permutation representations and
closed-form Schur multipliers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd

import numpy as np

from .permgroup import (
    Permutation,
    PermGroup,
    coset_action,
    parse_cycles,
    stabilizer,
)
from .zlinalg import TRIVIAL, AbInvariants, factorize


class InvalidParameters(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class NoClosedForm(LookupError):
    pass


class RelationFailure(AssertionError):
    """A built group does not satisfy its defining relations (a bug)."""


FAMILY_KINDS = ("C", "D", "QD", "Mod", "Q", "G0", "Beyl", "Z", "XS", "F", "perm")


@dataclass(frozen=True)
class GroupSpec:
    """A family with integer parameters, or raw generators for kind "perm".

    `stabilizer` holds the text after "|H=" when a coset action is requested.
    """

    kind: str
    params: tuple = ()
    generators: tuple = ()
    stabilizer: str | None = None

    def __str__(self):
        if self.kind == "perm":
            body = "perm:" + ";".join(self.generators)
        else:
            body = f"{self.kind}:" + ",".join(str(x) for x in self.params)
        if self.stabilizer is not None:
            body += f"|H={self.stabilizer}"
        return body

    def without_stabilizer(self):
        return GroupSpec(self.kind, self.params, self.generators, None)


@dataclass(frozen=True)
class MetacyclicParams:
    m: int
    s: int
    r: int
    t: int

    def problems(self):
        m, s, r, t = self.m, self.s, self.r, self.t
        out = []
        if min(m, s, t) < 1:
            out.append("m, s, t must be positive")
            return out
        if pow(r, s, m) != 1 % m:
            out.append(f"r^s = {r}^{s} is not 1 mod {m}")
        if (t * (r - 1)) % m:
            out.append(f"m = {m} does not divide t(r-1) = {t * (r - 1)}")
        if m % t:
            out.append(f"t = {t} does not divide m = {m}")
        return out

    def validate(self):
        p = self.problems()
        if p:
            raise InvalidParameters(p)
        return self

    def multiplier_order(self) -> int:
        """gcd(m, r-1) * gcd(1 + r + ... + r^(s-1), t) / m."""
        m, s, r, t = self.m, self.s, self.r, self.t
        geo = sum(pow(r, i) for i in range(s))
        num = gcd(m, r - 1) * gcd(geo, t)
        if num % m:
            raise AssertionError("closed form is not an integer")
        return num // m


def metacyclic_product(params: MetacyclicParams, x, y):
    """Product of pairs (i, j) in G0(m, s, r, t)."""
    m, s, r, t = params.m, params.s, params.r, params.t
    i1, j1 = x
    i2, j2 = y
    return ((i1 + pow(r, j1, m) * i2 + t * ((j1 + j2) // s)) % m, (j1 + j2) % s)


def _left_regular(params: MetacyclicParams, g):
    """Permutation of the pairs (i, j), indexed i + m*j, by left multiplication."""
    m, s = params.m, params.s
    i = np.tile(np.arange(m), s)
    j = np.repeat(np.arange(s), m)
    gi, gj = g
    r = params.r % m if m > 1 else 0
    rj = pow(r, gj, m) if m > 1 else 0
    ni = (gi + rj * i + params.t * ((gj + j) // s)) % m
    nj = (gj + j) % s
    return Permutation(ni + m * nj)


def metacyclic_regular(params: MetacyclicParams, label=None, family=None, names=None) -> PermGroup:
    """Regular permutation representation of G0(m, s, r, t) on the pairs."""
    params.validate()
    m, s = params.m, params.s
    a = _left_regular(params, (1 % m, 0))
    # for s = 1 the element b equals a^t
    b = _left_regular(params, ((params.t % m) if s == 1 else 0, 1 % s))
    n = m * s
    ident = Permutation.identity(n)
    if a ** m != ident or b ** s != a ** params.t or b * a * ~b != a ** (params.r % m if m > 1 else 0):
        raise RelationFailure(f"defining relations fail for {params}")
    g = PermGroup([a, b], degree=n, label=label, family=family, names=dict(names or {"a": a, "b": b}))
    if g.order() != n:
        raise RelationFailure(f"order {g.order()} differs from m*s = {n}")
    return g


def dihedral_natural(n: int, label=None, family=None) -> PermGroup:
    """D_n of order 2n acting on the vertices of an n-gon."""
    if n < 3:
        raise InvalidParameters([f"dihedral degree must be at least 3, got {n}"])
    pts = np.arange(n)
    rot = Permutation((pts + 1) % n)
    ref = Permutation((-pts) % n)
    if rot ** n != Permutation.identity(n) or ref * ref != Permutation.identity(n) or ref * rot * ~ref != ~rot:
        raise RelationFailure("dihedral relations fail")
    names = {"r": rot, "rotation": rot, "sigma": rot, "s": ref, "reflection": ref, "tau": ref}
    return PermGroup([rot, ref], degree=n, label=label, family=family, names=names)


def is_prime(p: int) -> bool:
    return p >= 2 and factorize(p) == {p: 1}


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    qs = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("no primitive root")


def frobenius_natural(p: int, l: int, label=None, family=None) -> PermGroup:
    """C_p ⋊ C_l acting on Z/p by x -> x+1 and x -> g x with g of order l."""
    problems = []
    if not is_prime(p):
        problems.append(f"{p} is not prime")
    elif l < 1 or (p - 1) % l:
        problems.append(f"l = {l} must divide p - 1 = {p - 1}")
    if problems:
        raise InvalidParameters(problems)
    g = pow(primitive_root(p), (p - 1) // l, p)
    x = np.arange(p)
    a = Permutation((x + 1) % p)
    b = Permutation((g * x) % p)
    if a ** p != Permutation.identity(p) or b ** l != Permutation.identity(p) or b * a * ~b != a ** g:
        raise RelationFailure("Frobenius relations fail")
    grp = PermGroup([a, b], degree=p, label=label, family=family, names={"a": a, "b": b})
    if grp.order() != p * l:
        raise RelationFailure("Frobenius group has the wrong order")
    return grp


def cyclic_regular(n: int, label=None, family=None) -> PermGroup:
    if n < 1:
        raise InvalidParameters([f"cyclic order must be positive, got {n}"])
    a = Permutation((np.arange(n) + 1) % n)
    return PermGroup([a], degree=n, label=label, family=family, names={"a": a})


# ---------------------------------------------------------------------------
# the Beyl list of metacyclic p-groups with trivial multiplier


def _prime_power(n):
    f = factorize(n)
    if len(f) != 1:
        return None
    (p, e), = f.items()
    return p, e


def beyl_t(M, r, lam):
    """Exponent t with b^N = a^t in G(M, N, r, lam)."""
    if lam == 0:
        return M
    t = (M * lam // gcd(M, r - 1)) % M
    return t or M


def beyl_params(M, N, r, lam) -> MetacyclicParams:
    problems = []
    if M < 1 or N < 1:
        problems.append("M and N must be positive")
    elif pow(r % M, N, M) != 1 % M:
        problems.append(f"r^N = {r}^{N} is not 1 mod {M}")
    if problems:
        raise InvalidParameters(problems)
    return MetacyclicParams(M, N, r % M if M > 1 else 1, beyl_t(M, r, lam))


def beyl_case_of(M, N, r, lam) -> str:
    """Case label I..VII of G(M, N, r, lam), or "not in list"."""
    beyl_params(M, N, r, lam).validate()
    pm, pn = _prime_power(M), _prime_power(N)
    if pm is None or pn is None or pm[0] != pn[0]:
        return "not in list"
    p, m = pm
    _, n = pn
    rr = r % M

    def eq(x):
        return rr == x % M

    hits = []
    if p % 2 == 1:
        if lam == 0 and m > n >= 1 and eq(p ** (m - n) + 1):
            hits.append("I")
        if lam == 1 and n >= 3 and 2 * n - 2 > m > 2:
            if any(eq(p**k + 1) for k in range(max(1, m - n + 1), m) if 2 * k < m):
                hits.append("II")
    else:
        if lam == 0 and m - 2 >= n >= 1 and eq(2 ** (m - n) + 1):
            hits.append("III")
        if lam == 0 and m - 2 >= n >= 1 and eq(2 ** (m - n) - 1):
            hits.append("IV")
        if lam == 1 and n >= 4 and 2 * n - 2 > m > 4:
            if any(eq(2**k + 1) for k in range(max(2, m - n + 1), m) if 2 * k < m):
                hits.append("V")
        if lam == 1 and n == 1 and m >= 2 and eq(-1):
            hits.append("VI")
        if lam == 1 and n >= 2 and m >= 3:
            if any(eq(2**k - 1) for k in range(max(2, m - n + 1), m)):
                hits.append("VII")
    return hits[0] if len(hits) == 1 else "not in list"


def beyl_instances(max_order):
    """All parameter sets (M, N, r, lam) of the seven cases with M*N <= max_order."""
    out = []
    for p in (q for q in range(2, max_order + 1) if is_prime(q)):
        for m in range(1, 64):
            if p**m > max_order:
                break
            for n in range(1, 64):
                M, N = p**m, p**n
                if M * N > max_order:
                    break
                cands = set()
                for k in range(0, m + 1):
                    for rr in (p**k + 1, p**k - 1, -1):
                        cands.add(rr % M)
                for rr in sorted(cands):
                    for lam in (0, 1):
                        if pow(rr, N, M) != 1 % M:
                            continue
                        case = beyl_case_of(M, N, rr, lam)
                        if case != "not in list":
                            out.append(((M, N, rr, lam), case))
    return sorted(out)


# ---------------------------------------------------------------------------
# specs


def metacyclic_of(spec: GroupSpec) -> MetacyclicParams | None:
    """Pair-construction parameters for presentation families."""
    k, p = spec.kind, spec.params
    if k == "G0":
        return MetacyclicParams(*p)
    if k == "QD":
        (m,) = p
        return MetacyclicParams(8 * m, 2, 4 * m - 1, 8 * m)
    if k == "Mod":
        (m,) = p
        return MetacyclicParams(8 * m, 2, 4 * m + 1, 8 * m)
    if k == "Q":
        (m,) = p
        return MetacyclicParams(2 * m, 2, 2 * m - 1, m)
    if k == "Z":
        m, n, r = p
        return MetacyclicParams(m, n, r % m if m > 1 else 1, m)
    if k == "Beyl":
        return beyl_params(*p)
    if k == "XS":
        (q,) = p
        return MetacyclicParams(q * q, q, (q * q - q + 1) % (q * q), q * q)
    return None


_ARITY = {"C": 1, "D": 1, "QD": 1, "Mod": 1, "Q": 1, "G0": 4, "Beyl": 4, "Z": 3, "XS": 1, "F": 2}


def validate_spec(spec: GroupSpec):
    k, p = spec.kind, spec.params
    if k not in FAMILY_KINDS:
        raise InvalidParameters([f"unknown family {k!r}"])
    if k == "perm":
        if not spec.generators:
            raise InvalidParameters(["perm needs at least one generator"])
        return
    if len(p) != _ARITY[k]:
        raise InvalidParameters([f"{k} takes {_ARITY[k]} parameters, got {len(p)}"])
    problems = []
    if k in ("C",) and p[0] < 1:
        problems.append("n must be positive")
    if k == "D" and p[0] < 3:
        problems.append("D:n needs n >= 3")
    if k in ("QD", "Mod") and p[0] < 1:
        problems.append("m must be positive")
    if k == "Q" and p[0] < 2:
        problems.append("Q:m needs m >= 2")
    if k == "Z":
        m, n, r = p
        if m < 1 or n < 1:
            problems.append("m, n must be positive")
        else:
            if m % 2 == 0:
                problems.append(f"m = {m} must be odd")
            if gcd(m, n) != 1:
                problems.append(f"gcd(m, n) = {gcd(m, n)} must be 1")
            if gcd(m, r - 1) != 1:
                problems.append(f"gcd(m, r-1) = {gcd(m, r - 1)} must be 1")
            if not 0 <= r < max(m, 1):
                problems.append(f"r = {r} must lie in [0, m)")
            if pow(r, n, m) != 1 % m:
                problems.append(f"r^n = {r}^{n} is not 1 mod {m}")
    if k == "XS" and (not is_prime(p[0]) or p[0] < 3):
        problems.append(f"XS:p needs an odd prime, got {p[0]}")
    if k == "F":
        q, l = p
        if not is_prime(q):
            problems.append(f"{q} is not prime")
        elif l < 1 or (q - 1) % l:
            problems.append(f"l = {l} must divide p - 1 = {q - 1}")
    if problems:
        raise InvalidParameters(problems)
    mp = metacyclic_of(spec)
    if mp is not None:
        mp.validate()


def _family_names(spec, g):
    names = dict(g.names)
    if spec.kind in ("QD", "Mod", "Q"):
        names["sigma"] = names["a"]
        names["tau"] = names["b"]
    if spec.kind == "XS":
        q = spec.params[0]
        # a generates the complement, b the cyclic normal subgroup of order q^2, c = b^q
        pa, pb = names["b"], names["a"]
        names = {"a": pa, "b": pb, "c": pb**q}
    return names


def _default_group(spec: GroupSpec) -> PermGroup:
    base = spec.without_stabilizer()
    k = spec.kind
    if k == "C":
        return cyclic_regular(spec.params[0], family=base)
    if k == "D":
        return dihedral_natural(spec.params[0], family=base)
    if k == "F":
        return frobenius_natural(*spec.params, family=base)
    if k == "perm":
        perms = [Permutation.from_cycles(x) for x in spec.generators]
        n = max(p.degree for p in perms)
        perms = [p.extended(n) for p in perms]
        names = {f"g{i + 1}": p for i, p in enumerate(perms)}
        return PermGroup(perms, degree=n, family=base, names=names)
    g = metacyclic_regular(metacyclic_of(spec), family=base)
    g.names = _family_names(spec, g)
    return g


_WORD_TOKEN = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_subgroup(g: PermGroup, text: str) -> PermGroup:
    """Subgroup of g from ';'-separated items: cycle strings, words in the
    generator names such as "a*b^2", "1" for the identity, or "stab:<point>"."""
    text = text.strip()
    if text.startswith("stab:"):
        pt = int(text[5:]) - 1
        if not 0 <= pt < g.degree:
            raise ValueError(f"point {pt + 1} out of range")
        return stabilizer(g, pt)
    gens = []
    for item in (x.strip() for x in text.split(";")):
        if not item or item in ("1", "()", "e"):
            continue
        if item.startswith("("):
            parse_cycles(item)
            gens.append(Permutation.from_cycles(item, g.degree))
            continue
        x = g.identity()
        for tok in item.split("*"):
            m = _WORD_TOKEN.match(tok.strip())
            if not m or m.group(1) not in g.names:
                known = ", ".join(sorted(g.names))
                raise ValueError(f"cannot read {tok!r} in {item!r}; generator names are {known}")
            x = x * g.names[m.group(1)] ** int(m.group(2) or 1)
        gens.append(x)
    h = PermGroup(gens, degree=g.degree)
    for x in h.generators:
        if not g.contains(x):
            raise ValueError(f"{x} is not an element of the group")
    return h


def build_group(spec: GroupSpec) -> PermGroup:
    """Permutation group for spec; a stabilizer override gives the coset action."""
    validate_spec(spec)
    g = _default_group(spec)
    if spec.stabilizer is None:
        g.label = str(spec)
        return g
    h = parse_subgroup(g, spec.stabilizer)
    act = coset_action(g, h)
    # the family label only describes the image when the action is faithful
    act.family = g.family if act.order() == g.order() else None
    act.label = str(spec)
    act.subgroup = h
    act.source = g
    return act


def expected_multiplier(spec: GroupSpec) -> AbInvariants:
    """Closed-form Schur multiplier of a family; NoClosedForm for raw generators."""
    validate_spec(spec)
    k = spec.kind
    if k == "perm":
        raise NoClosedForm("raw generators have no closed form")
    if k == "D":
        return AbInvariants((2,)) if spec.params[0] % 2 == 0 else TRIVIAL
    if k in ("C", "QD", "Mod", "Q", "Z", "XS", "F"):
        return TRIVIAL
    if k == "Beyl" and beyl_case_of(*spec.params) != "not in list":
        return TRIVIAL
    u = metacyclic_of(spec).multiplier_order()
    return AbInvariants.from_orders([u])


def all_metacyclic_params(max_order):
    """Every valid (m, s, r, t) with 1 <= r <= m and m*s <= max_order."""
    out = []
    for m in range(1, max_order + 1):
        for s in range(1, max_order // m + 1):
            for r in range(1, m + 1):
                rr = r % m
                if pow(rr, s, m) != 1 % m:
                    continue
                for t in range(1, m + 1):
                    if m % t == 0 and (t * (r - 1)) % m == 0:
                        out.append(MetacyclicParams(m, s, r, t))
    return out
