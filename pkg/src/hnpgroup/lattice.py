"""G-lattices: free Z-modules of finite rank with a group action by integer matrices."""

from __future__ import annotations

import numpy as np

from .permgroup import PermGroup, Permutation, is_transitive


class NotAMember(ValueError):
    pass


def _perm_matrix(p: Permutation):
    n = p.degree
    m = np.zeros((n, n), dtype=np.int64)
    m[p.array, np.arange(n)] = 1
    return m


def _j_matrix(p: Permutation):
    """Action on Z[points]/Z(1,...,1) with basis e_0..e_{n-2}; e_{n-1} = -(sum of the others)."""
    n = p.degree
    m = np.zeros((n - 1, n - 1), dtype=np.int64)
    for i in range(n - 1):
        j = int(p.array[i])
        if j == n - 1:
            m[:, i] = -1
        else:
            m[j, i] = 1
    return m


class GLattice:
    """A rank-r lattice with one r x r matrix per generator of `group`.

    `direct`, when set, computes the matrix of any group element from the
    permutation itself; otherwise elements are evaluated as generator words.
    """

    def __init__(self, group: PermGroup, rank: int, action, direct=None, kind="general"):
        self.group = group
        self.rank = int(rank)
        mats = [np.asarray(a, dtype=np.int64).reshape(self.rank, self.rank) for a in action]
        if len(mats) != len(group.generators):
            raise ValueError("one action matrix per generator is required")
        self.action = tuple(mats)
        self.direct = direct
        self.kind = kind
        self._all = None

    def __repr__(self):
        return f"GLattice(kind={self.kind}, rank={self.rank}, group order {self.group.order()})"

    def all_matrices(self):
        """Matrices of every element, in the order of the group's element table."""
        if self._all is None:
            t = self.group.element_table()
            out = np.zeros((t.size, self.rank, self.rank), dtype=np.int64)
            out[0] = np.eye(self.rank, dtype=np.int64)
            for x in range(1, t.size):
                out[x] = out[t.parent[x]] @ self.action[t.pgen[x]]
            self._all = out
        return self._all

    def verify(self):
        """Check that the generator matrices define a homomorphism.

        Every edge x -> x*s of the Cayley graph must satisfy A(x) A(s) = A(xs).
        """
        t = self.group.element_table()
        mats = self.all_matrices()
        rg = t.right_gen
        for s, a in enumerate(self.action):
            if not np.array_equal(mats[:, :, :] @ a, mats[rg[:, s]]):
                raise AssertionError("action matrices do not define a homomorphism")
        if self.direct is not None:
            for x in range(t.size):
                if not np.array_equal(self.direct(t.perm(x)), mats[x]):
                    raise AssertionError("word evaluation disagrees with the direct action")
        return True


def permutation_lattice(g: PermGroup) -> GLattice:
    """Z[points] with the permutation action."""
    if not is_transitive(g):
        raise ValueError("the permutation lattice needs a transitive group")
    return GLattice(g, g.degree, [_perm_matrix(s) for s in g.generators], _perm_matrix, "permutation")


def j_lattice(g: PermGroup) -> GLattice:
    """Z[points] modulo the all-ones vector, on the images of e_0..e_{n-2}."""
    if g.degree < 2:
        raise ValueError("the quotient lattice needs degree at least 2")
    if not is_transitive(g):
        raise ValueError("the quotient lattice needs a transitive group")
    return GLattice(g, g.degree - 1, [_j_matrix(s) for s in g.generators], _j_matrix, "J")


def trivial_lattice(g: PermGroup, rank: int = 1) -> GLattice:
    eye = np.eye(rank, dtype=np.int64)
    return GLattice(g, rank, [eye for _ in g.generators], lambda p: np.eye(rank, dtype=np.int64), "trivial")


def element_action(m: GLattice, x: Permutation) -> np.ndarray:
    """Matrix by which x acts on m."""
    if not m.group.contains(x):
        raise NotAMember(f"{x} is not in the group")
    if m.direct is not None:
        return m.direct(x)
    t = m.group.element_table()
    return m.all_matrices()[t.index_of(x)]


def restrict(m: GLattice, subgroup: PermGroup) -> GLattice:
    for x in subgroup.generators:
        if not m.group.contains(x):
            raise NotAMember(f"{x} is not in the group")
    mats = [element_action(m, x) for x in subgroup.generators]
    return GLattice(subgroup, m.rank, mats, m.direct, m.kind)


def fixed_sublattice(m: GLattice):
    """Basis (columns) of the vectors fixed by every generator."""
    from .zlinalg import kernel_lattice

    if not m.action:
        return np.eye(m.rank, dtype=np.int64)
    stacked = np.vstack([a - np.eye(m.rank, dtype=np.int64) for a in m.action])
    return kernel_lattice(stacked)
