import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hnpgroup import zlinalg
from hnpgroup.zlinalg import (
    AbInvariants,
    EntryGrowthError,
    MembershipError,
    SubtractionError,
    cokernel,
    elementary_divisors,
    image_basis,
    kernel_lattice,
    matmul,
    primary_subtract,
    quotient_invariants,
    smith_normal_form,
    solve_in_lattice,
    sparse_elementary_divisors,
)


def det(m):
    """Exact determinant by fraction-free elimination."""
    a = [[int(x) for x in row] for row in np.asarray(m, dtype=object)]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


matrices = st.integers(0, 6).flatmap(
    lambda m: st.integers(0, 6).flatmap(
        lambda n: st.lists(st.integers(-20, 20), min_size=m * n, max_size=m * n).map(
            lambda xs: np.array(xs, dtype=np.int64).reshape(m, n))))


def check_snf(a):
    snf = smith_normal_form(a)
    m, n = a.shape
    d = np.zeros((m, n), dtype=object)
    for i, x in enumerate(snf.d):
        d[i, i] = x
    assert (matmul(matmul(snf.u, a), snf.v) == d).all()
    assert abs(det(snf.u)) == 1 and abs(det(snf.v)) == 1
    nz = [x for x in snf.d if x]
    assert all(x > 0 for x in nz)
    assert all(y % x == 0 for x, y in zip(nz, nz[1:]))
    assert all(x == 0 for x in snf.d[len(nz):])
    return snf


class TestSmithForm:
    def test_examples(self):
        assert elementary_divisors([[2, 4], [6, 8]]) == (2, 4)
        assert elementary_divisors(np.diag([2, 3])) == (1, 6)
        assert smith_normal_form(np.zeros((3, 3), dtype=np.int64)).rank == 0

    def test_empty(self):
        snf = smith_normal_form(np.zeros((0, 3), dtype=np.int64))
        assert snf.rank == 0 and snf.v.shape == (3, 3)
        assert cokernel(np.zeros((2, 0), dtype=np.int64)) == AbInvariants((), 2)

    @settings(max_examples=500, deadline=None)
    @given(matrices)
    def test_unimodular_transforms(self, a):
        check_snf(a)

    @settings(max_examples=60, deadline=None)
    @given(matrices)
    def test_against_sympy(self, a):
        sympy = pytest.importorskip("sympy")
        from sympy.matrices.normalforms import smith_normal_form as sym_snf

        if a.size == 0:
            return
        ref = sym_snf(sympy.Matrix(a.tolist()), domain=sympy.ZZ)
        ref_d = sorted(abs(int(ref[i, i])) for i in range(min(a.shape)) if ref[i, i] != 0)
        assert sorted(x for x in smith_normal_form(a, transforms=False).d if x) == ref_d

    def test_growth_switches_to_python_ints(self):
        a = np.array([[2**40, 3], [5, 2**41 + 1]], dtype=object)
        snf = check_snf(a)
        assert snf.d[0] == 1

    def test_entry_growth_error(self):
        a = np.array([[2**40, 3], [5, 2**41 + 1]], dtype=object)
        with pytest.raises(EntryGrowthError):
            smith_normal_form(a, max_bits=20)


class TestLattices:
    def test_kernel_example(self):
        k = kernel_lattice([[2, -1, 0], [0, 1, -2]])
        assert k.shape == (3, 1)
        assert sorted(abs(int(x)) for x in k[:, 0]) == [1, 1, 2]

    @settings(max_examples=200, deadline=None)
    @given(matrices)
    def test_kernel_correct_and_saturated(self, a):
        k = kernel_lattice(a)
        snf = smith_normal_form(a)
        assert k.shape[1] == a.shape[1] - snf.rank
        if k.size:
            assert not matmul(a, k).any()
            # saturated: the kernel basis extends to a unimodular matrix
            assert elementary_divisors(k) == (1,) * k.shape[1]

    def test_quotients(self):
        assert quotient_invariants(np.eye(2, dtype=np.int64), [[2, 0], [2, 4]]) == AbInvariants((2, 4))
        assert quotient_invariants([[1]], [[6]]) == AbInvariants((6,))

    def test_solve_and_membership(self):
        basis = np.array([[2, 0], [0, 3]])
        assert (solve_in_lattice(basis, [[4], [9]]) == np.array([[2], [3]])).all()
        with pytest.raises(MembershipError) as exc:
            solve_in_lattice(basis, [[4, 1], [9, 0]])
        assert exc.value.column == 1

    def test_image_basis_spans(self):
        gens = np.array([[2, 4, 6], [0, 0, 0]])
        b = image_basis(gens)
        assert b.shape[1] == 1 and abs(int(b[0, 0])) == 2


class TestInvariants:
    def test_from_orders(self):
        assert AbInvariants.from_orders([4, 6, 0, 1]).as_list() == [2, 12, 0]
        assert str(AbInvariants()) == "0"
        assert str(AbInvariants((2, 4))) == "[2,4]"

    def test_validation(self):
        with pytest.raises(ValueError):
            AbInvariants((4, 2))
        with pytest.raises(ValueError):
            AbInvariants((1,))

    def test_primary_subtract(self):
        assert primary_subtract(AbInvariants((2, 12)), AbInvariants((2, 4))) == AbInvariants((3,))
        with pytest.raises(SubtractionError):
            primary_subtract(AbInvariants((4,)), AbInvariants((2,)))

    @settings(max_examples=500, deadline=None)
    @given(st.lists(st.integers(1, 60), max_size=5), st.lists(st.integers(1, 60), max_size=5))
    def test_primary_subtract_round_trip(self, xs, ys):
        a, b = AbInvariants.from_orders(xs), AbInvariants.from_orders(ys)
        assert primary_subtract(a + b, b) == a
        assert (a + b).order == a.order * b.order


def test_sparse_path_matches_dense(monkeypatch):
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.integers(-2, 3, size=(12, 9)) * (rng.random((12, 9)) < 0.3)
        dense = tuple(x for x in smith_normal_form(a, transforms=False).d if x)
        assert sparse_elementary_divisors(a) == dense
    monkeypatch.setattr(zlinalg, "SPARSE_COLUMNS", 5)
    a = rng.integers(-3, 4, size=(8, 6))
    assert elementary_divisors(a) == tuple(x for x in smith_normal_form(a, transforms=False).d if x)
