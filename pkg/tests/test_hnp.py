import pytest

from conftest import SMALL, group
from hnpgroup import corpus
from hnpgroup.cohomology import h1, h2
from hnpgroup.hnp import (
    Conclusion,
    H2Status,
    NotCoreFree,
    NotTransitive,
    cond0,
    hnp_verdict,
    is_metacyclic,
    is_zgroup,
    metacyclic_witness,
    point_stabilizer,
    abelian_quotient_witness,
    tamagawa,
)
from hnpgroup.lattice import j_lattice
from hnpgroup.permgroup import (
    PermGroup,
    abelian_invariants,
    derived_subgroup,
    intersection_order,
    is_cyclic,
    is_normal,
    quotient,
    stabilizer,
)
from hnpgroup.zlinalg import AbInvariants


def S(n):
    return group("(" + ",".join(map(str, range(1, n + 1))) + ")", "(1,2)", n=n)


def regular(g):
    from hnpgroup.permgroup import coset_action

    return coset_action(g, PermGroup([], degree=g.degree))


F20 = lambda: group("(1,2,3,4,5)", "(2,3,5,4)", n=5)  # noqa: E731


class TestPredicates:
    def test_metacyclic(self):
        assert is_metacyclic(SMALL["Q8"]())
        assert is_metacyclic(SMALL["V4"]())
        assert not is_metacyclic(SMALL["A4"]())
        assert not is_metacyclic(S(4))
        w = metacyclic_witness(SMALL["Q8"]())
        assert w.order() == 4 and is_cyclic(w)

    def test_witness_is_valid(self):
        for _, spec, _, _ in corpus.METACYCLIC_TRIVIAL_M + corpus.METACYCLIC_NONTRIVIAL_M:
            g = corpus.build(spec)
            w = metacyclic_witness(g)
            assert w is not None and is_cyclic(w) and is_normal(g, w)
            assert is_cyclic(quotient(g, w))

    def test_zgroup(self):
        assert is_zgroup(SMALL["S3"]())
        assert not is_zgroup(SMALL["D4"]())
        assert is_zgroup(corpus.build("F:7,3"))

    def test_cond0(self):
        s3 = SMALL["S3"]()
        assert cond0(s3, PermGroup([], degree=3))
        assert cond0(s3, stabilizer(s3, 0))
        s4 = S(4)
        assert cond0(s4, stabilizer(s4, 0))
        # A4 acting on 4 points: [G,G] = V4 meets the stabilizer C3 trivially
        a4 = SMALL["A4"]()
        assert cond0(a4, stabilizer(a4, 0))

    def test_cond0_can_fail(self):
        # S4 on the cosets of a Klein four-group meeting A4 in order 2
        s4 = S(4)
        from hnpgroup.permgroup import Permutation

        h = PermGroup([Permutation.from_cycles("(1,2)", 4), Permutation.from_cycles("(3,4)", 4)], degree=4)
        assert not cond0(s4, h)

    def test_abelian_quotient_witness(self):
        a4 = SMALL["A4"]()
        h = stabilizer(a4, 0)
        w = abelian_quotient_witness(a4, h)
        assert w is not None and w.order() == 4
        c6 = SMALL["C6"]()
        w = abelian_quotient_witness(c6, PermGroup([], degree=6))
        assert w is not None and intersection_order(w, PermGroup([], degree=6)) == 1
        # S4 on 4 points: [G,G] = A4 contains the 3-cycles of S3
        s4 = S(4)
        assert abelian_quotient_witness(s4, stabilizer(s4, 0)) is None

    def test_witness_implies_cond0(self):
        for _, spec, _, _ in corpus.ALL_ROWS:
            g = corpus.build(spec)
            h = stabilizer(g, 0)
            w = abelian_quotient_witness(g, h)
            if w is not None:
                assert is_normal(g, w) and intersection_order(w, h) == 1
                assert derived_subgroup(g).order() <= w.order()
                assert cond0(g, h)


class TestVerdict:
    def test_f20(self):
        v = hnp_verdict(F20())
        assert v.h2_status is H2Status.ZERO
        assert v.hnp_conclusion is Conclusion.HOLDS_UNCONDITIONALLY
        assert v.metacyclic and v.order_h == 4

    def test_d4_natural(self):
        v = hnp_verdict(SMALL["D4"]())
        assert v.h2_status is H2Status.ISO_TO_MG and v.h2_value == AbInvariants((2,))
        assert v.sha_omega.is_trivial
        assert v.hnp_conclusion is Conclusion.HOLDS_UNCONDITIONALLY

    def test_v4_regular(self):
        v = hnp_verdict(SMALL["V4"]())
        assert v.h2_status is H2Status.ISO_TO_MG
        assert v.sha_omega == AbInvariants((2,))
        assert v.hnp_conclusion is Conclusion.BOUNDED_BY_MG

    def test_sha_policy_never(self):
        v = hnp_verdict(SMALL["V4"](), sha_policy="never")
        assert v.sha_omega is None and v.hnp_conclusion is Conclusion.BOUNDED_BY_MG
        with pytest.raises(ValueError):
            hnp_verdict(SMALL["V4"](), sha_policy="sometimes")

    def test_not_transitive(self):
        with pytest.raises(NotTransitive):
            hnp_verdict(SMALL["C3xC3"]())

    def test_not_core_free(self):
        # C4 on the cosets of its subgroup of order 2: that subgroup is the kernel
        g = corpus.build("C:4|H=a^2")
        with pytest.raises(NotCoreFree) as exc:
            hnp_verdict(g)
        assert exc.value.core_order == 2

    def test_a4_computed_directly(self):
        v = hnp_verdict(SMALL["A4"]())
        # cond0 holds and M(H) = M(C3) = 0, so H^2 is identified with M(A4)
        assert v.h2_status is H2Status.ISO_TO_MG and v.h2_value == AbInvariants((2,))

    def test_s4_natural_is_identified_with_multiplier(self):
        v = hnp_verdict(S(4))
        assert v.cond0 and v.multiplier_h.is_trivial
        assert v.h2_status is H2Status.ISO_TO_MG and v.h2_value == AbInvariants((2,))

    def test_direct_h2_when_cond0_fails(self):
        # S4 on the six cosets of <(12), (34)>, which meets A4 in order 2
        g = corpus.build("perm:(1,2,3,4);(1,2)|H=(1,2);(3,4)")
        assert g.degree == 6 and g.order() == 24
        v = hnp_verdict(g)
        assert v.cond0 is False
        assert v.h2_status is H2Status.COMPUTED
        assert v.h2_value == h2(j_lattice(g))
        assert v.status_text == f"COMPUTED({v.h2_value})"
        if v.sha_omega is not None:
            assert v.h2_value.order % v.sha_omega.order == 0

    def test_budget_makes_it_inconclusive(self):
        g = corpus.build("perm:(1,2,3,4);(1,2)|H=(1,2);(3,4)")
        v = hnp_verdict(g, budget_h2=10)
        assert v.h2_status is H2Status.UNKNOWN and v.multiplier_g is None
        assert v.hnp_conclusion is Conclusion.INCONCLUSIVE
        assert hnp_verdict(g, direct_h2=False).h2_status is H2Status.UNKNOWN

    def test_facts_are_recorded(self):
        v = hnp_verdict(SMALL["D4"]())
        claims = [c for c, _ in v.facts]
        for key in ("metacyclic", "[G,G]∩H=[H,H]", "M(G)", "M(H)", "H cyclic", "Sha^2_omega"):
            assert key in claims

    def test_verdict_invariants_on_corpus(self):
        for label, spec, expected, h_order in corpus.ALL_ROWS:
            g = corpus.build(spec)
            v = hnp_verdict(g)
            assert v.order_h == h_order, label
            if v.hnp_conclusion is Conclusion.HOLDS_UNCONDITIONALLY:
                assert v.h2_status is H2Status.ZERO or (v.sha_omega is not None and v.sha_omega.is_trivial)
            if v.h2_status is H2Status.ZERO:
                assert v.cond0 and v.multiplier_g.is_trivial
            if v.sha_omega is not None and v.h2_value is not None:
                assert v.h2_value.order % v.sha_omega.order == 0
            if v.metacyclic:
                assert v.cond0 and is_cyclic(point_stabilizer(g))


class TestTamagawa:
    def test_examples(self):
        for n in (2, 3, 5, 6):
            c = group("(" + ",".join(map(str, range(1, n + 1))) + ")", n=n)
            assert tamagawa(c) == n
        assert tamagawa(SMALL["S3"]()) == 1
        assert tamagawa(corpus.build("G0:3,6,2,3|H=a*b^2")) == 2

    def test_none_when_hypotheses_fail(self):
        assert tamagawa(SMALL["D4"]()) is None

    def test_matches_h1(self):
        for label, spec, _, _ in corpus.METACYCLIC_TRIVIAL_M:
            g = corpus.build(spec)
            tau = tamagawa(g)
            assert tau == h1(j_lattice(g)).order, label
            assert tau == abelian_invariants(g).order // abelian_invariants(stabilizer(g, 0)).order
