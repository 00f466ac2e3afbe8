"""Structural tests and the norm-principle verdict for a transitive group G with point stabilizer H."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .cohomology import BudgetExceeded, H2_CAP, h1, h2, schur_multiplier, sha2_omega
from .lattice import j_lattice
from .permgroup import (
    CapExceeded,
    PermGroup,
    abelian_invariants,
    core,
    derived_subgroup,
    intersection_order,
    is_cyclic,
    is_transitive,
    stabilizer,
    sylow_subgroup,
)
from .zlinalg import AbInvariants, factorize


class NotTransitive(ValueError):
    pass


class NotCoreFree(ValueError):
    def __init__(self, core_order):
        super().__init__(f"stabilizer has a normal core of order {core_order}; replace G by G/core")
        self.core_order = core_order


class H2Status(enum.Enum):
    ZERO = "ZERO"
    ISO_TO_MG = "ISO_TO_MG"
    COMPUTED = "COMPUTED"
    UNKNOWN = "UNKNOWN"


class Conclusion(enum.Enum):
    HOLDS_UNCONDITIONALLY = "HOLDS_UNCONDITIONALLY"
    BOUNDED_BY_MG = "BOUNDED_BY_MG"
    INCONCLUSIVE = "INCONCLUSIVE"


# ---------------------------------------------------------------------------
# structural predicates


def metacyclic_witness(g: PermGroup) -> PermGroup | None:
    """A cyclic normal N with G/N cyclic, or None."""
    dg = derived_subgroup(g)
    if not is_cyclic(dg):
        return None
    t = g.element_table()
    tab, inv = t.table, t.inverse
    dset = {t.index_of(x) for x in dg.elements()}
    seen = set()
    gens = [t.index_of(s) for s in g.generators]
    for i in range(t.size):
        pw = t.powers(i)
        key = frozenset(pw)
        if key in seen:
            continue
        seen.add(key)
        if not dset <= key:
            continue
        if any(int(tab[tab[inv[s], i], s]) not in key for s in gens):
            continue
        index = t.size // len(pw)
        for x in range(t.size):
            k = 1
            y = x
            while y not in key:
                y = int(tab[y, x])
                k += 1
            if k == index:
                return PermGroup([t.perm(i)] if i else [], degree=g.degree)
    return None


def is_metacyclic(g: PermGroup) -> bool:
    return metacyclic_witness(g) is not None


def is_zgroup(g: PermGroup) -> bool:
    return all(is_cyclic(sylow_subgroup(g, p)) for p in factorize(g.order()))


def cond0(g: PermGroup, h: PermGroup) -> bool:
    """[G,G] ∩ H = [H,H]; the right side is always contained in the left."""
    return intersection_order(derived_subgroup(g), h) == derived_subgroup(h).order()


def abelian_quotient_witness(g: PermGroup, h: PermGroup) -> PermGroup | None:
    """A normal subgroup with abelian quotient meeting H trivially, if any exists.

    Every such subgroup contains [G,G], so one exists exactly when [G,G] works.
    """
    dg = derived_subgroup(g)
    return dg if intersection_order(dg, h) == 1 else None


# ---------------------------------------------------------------------------
# verdict


@dataclass
class Verdict:
    h2_status: H2Status
    hnp_conclusion: Conclusion
    h2_value: AbInvariants | None = None
    sha_omega: AbInvariants | None = None
    facts: list = field(default_factory=list)
    tamagawa: int | None = None
    metacyclic: bool | None = None
    zgroup: bool | None = None
    cond0: bool | None = None
    multiplier_g: AbInvariants | None = None
    multiplier_h: AbInvariants | None = None
    order_g: int = 0
    order_h: int = 0

    @property
    def status_text(self) -> str:
        if self.h2_status is H2Status.COMPUTED:
            return f"COMPUTED({self.h2_value})"
        return self.h2_status.value

    def fact(self, claim, evidence):
        self.facts.append((claim, evidence))


def _safe_multiplier(g, budget):
    report: dict = {}
    try:
        return schur_multiplier(g, budget=budget, report=report), report
    except (BudgetExceeded, CapExceeded) as exc:
        report["error"] = str(exc)
        return None, report


def point_stabilizer(g: PermGroup) -> PermGroup:
    if not is_transitive(g):
        raise NotTransitive("the group must act transitively")
    # a coset action built from (source, subgroup) loses the core of the subgroup
    src, sub = getattr(g, "source", None), getattr(g, "subgroup", None)
    if src is not None and sub is not None:
        c = core(src, sub)
        if c.order() != 1:
            raise NotCoreFree(c.order())
    h = stabilizer(g, 0)
    c = core(g, h)
    if c.order() != 1:
        raise NotCoreFree(c.order())
    return h


def _sha(m, budget, verdict):
    try:
        return sha2_omega(m, budget=budget)
    except (BudgetExceeded, CapExceeded) as exc:
        verdict.fact("Sha^2_omega", f"skipped: {exc}")
        return None


def _within(m, budget):
    n = m.group.order()
    return n * n * max(m.rank, 1) <= (H2_CAP if budget is None else budget)


def hnp_verdict(g: PermGroup, budget_h2: int | None = None, direct_h2: bool = True,
                sha_policy: str = "auto", max_direct_order: int = 24,
                max_direct_degree: int = 10) -> Verdict:
    if sha_policy not in ("auto", "always", "never"):
        raise ValueError(f"unknown sha policy {sha_policy!r}")
    h = point_stabilizer(g)
    v = Verdict(H2Status.UNKNOWN, Conclusion.INCONCLUSIVE, order_g=g.order(), order_h=h.order())
    try:
        witness = metacyclic_witness(g)
        v.metacyclic = witness is not None
        v.fact("metacyclic", f"cyclic normal N of order {witness.order()} with cyclic quotient"
               if witness is not None else "no cyclic normal subgroup with cyclic quotient")
    except CapExceeded as exc:
        v.fact("metacyclic", f"unknown: {exc}")
    try:
        v.zgroup = is_zgroup(g)
        v.fact("Z-group", "all Sylow subgroups cyclic" if v.zgroup else "some Sylow subgroup is not cyclic")
    except CapExceeded as exc:
        v.fact("Z-group", f"unknown: {exc}")
    v.cond0 = cond0(g, h)
    v.fact("[G,G]∩H=[H,H]", f"|[G,G]∩H| = {intersection_order(derived_subgroup(g), h)}, "
           f"|[H,H]| = {derived_subgroup(h).order()}")
    h_cyclic = is_cyclic(h)
    v.fact("H cyclic", str(h_cyclic))
    w3 = abelian_quotient_witness(g, h)
    if w3 is not None:
        v.fact("abelian-quotient normal subgroup meeting H trivially", f"[G,G] of order {w3.order()}")
        if not v.cond0:
            raise AssertionError("a trivially-meeting normal subgroup exists but [G,G]∩H != [H,H]")
    if v.metacyclic and not (h_cyclic and v.cond0):
        raise AssertionError("metacyclic group with core-free stabilizer violates H cyclic and cond0")
    v.multiplier_g, rep_g = _safe_multiplier(g, budget_h2)
    v.fact("M(G)", f"{v.multiplier_g} via {rep_g}" if v.multiplier_g is not None else f"unknown: {rep_g}")
    v.multiplier_h, rep_h = _safe_multiplier(h, budget_h2)
    v.fact("M(H)", f"{v.multiplier_h} via {rep_h}" if v.multiplier_h is not None else f"unknown: {rep_h}")

    mg, mh = v.multiplier_g, v.multiplier_h
    jl = j_lattice(g)
    if v.cond0 and mg is not None and mg.is_trivial:
        v.h2_status = H2Status.ZERO
        v.h2_value = AbInvariants()
        v.sha_omega = AbInvariants()
        v.hnp_conclusion = Conclusion.HOLDS_UNCONDITIONALLY
        v.fact("H^2(G,J)", "0: cond0 and M(G) = 0 make it isomorphic to M(G)")
        v.tamagawa = _tamagawa_value(g, h, jl)
        return v
    if v.cond0 and mh is not None and mh.is_trivial:
        v.h2_status = H2Status.ISO_TO_MG
        v.h2_value = mg
        v.hnp_conclusion = Conclusion.BOUNDED_BY_MG
        v.fact("H^2(G,J)", "isomorphic to M(G): cond0 and M(H) = 0")
        if sha_policy == "always" or (sha_policy == "auto" and _within(jl, budget_h2)):
            v.sha_omega = _sha(jl, budget_h2, v)
            if v.sha_omega is not None:
                v.fact("Sha^2_omega", f"{v.sha_omega} by restriction to cyclic subgroups")
                if v.sha_omega.is_trivial:
                    v.hnp_conclusion = Conclusion.HOLDS_UNCONDITIONALLY
        return v
    small = g.order() <= max_direct_order and g.degree <= max_direct_degree
    if direct_h2 and small and _within(jl, budget_h2):
        val = h2(jl, budget=budget_h2)
        v.h2_status = H2Status.COMPUTED
        v.h2_value = val
        v.fact("H^2(G,J)", f"{val} by direct cocycle computation")
        if val.is_trivial:
            v.sha_omega = AbInvariants()
            v.hnp_conclusion = Conclusion.HOLDS_UNCONDITIONALLY
            return v
        if sha_policy != "never":
            v.sha_omega = _sha(jl, budget_h2, v)
            if v.sha_omega is not None:
                v.fact("Sha^2_omega", f"{v.sha_omega} by restriction to cyclic subgroups")
                if v.sha_omega.is_trivial:
                    v.hnp_conclusion = Conclusion.HOLDS_UNCONDITIONALLY
        return v
    v.fact("H^2(G,J)", "not determined within the configured budget")
    return v


def _tamagawa_value(g, h, jl):
    ga, ha = abelian_invariants(g).order, abelian_invariants(h).order
    if ga % ha:
        raise AssertionError("|H^ab| does not divide |G^ab| although restriction is onto")
    tau = ga // ha
    check = h1(jl).order
    if check != tau:
        raise AssertionError(f"|G^ab|/|H^ab| = {tau} but |H^1(G,J)| = {check}")
    return tau


def tamagawa(g: PermGroup, budget: int | None = None) -> int | None:
    """|G^ab|/|H^ab| when cond0 holds and M(G) = 0, else None."""
    h = point_stabilizer(g)
    if not cond0(g, h):
        return None
    mg, _ = _safe_multiplier(g, budget)
    if mg is None or not mg.is_trivial:
        return None
    return _tamagawa_value(g, h, j_lattice(g))
