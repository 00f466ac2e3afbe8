"""Compare the numba and pure-numpy elimination kernels on real workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

The backend is chosen per call from HNPGROUP_BACKEND, so both run in one
process. The first numba call of each kernel is excluded (JIT compile).
"""

import argparse
import os
import time

import numpy as np

from hnpgroup import _kernels, corpus
from hnpgroup.cohomology import _trivial_coboundaries, _trivial_relations, coboundary_matrix, multiplier_uct
from hnpgroup.lattice import j_lattice


def _snf_job(spec):
    m = j_lattice(corpus.build(spec))
    a = coboundary_matrix(m)
    return f"snf  {spec} {a.shape}", lambda: _kernels.snf_int64(a, False, False)


def _local_job(spec):
    g = corpus.build(spec)
    t = g.element_table()
    ns = len(g.generators)
    rel, cob = _trivial_relations(t, ns), _trivial_coboundaries(t, ns)
    p, k = 2, 5
    q = p**k
    return f"local {spec} {rel.shape}", lambda: _kernels.local_eliminate(rel % q, cob % q, p, k)


def _uct_job(spec):
    g = corpus.build(spec)
    return f"uct  {spec} |G|={g.order()}", lambda: multiplier_uct(g)


JOBS = [
    lambda: _snf_job("D:8"),
    lambda: _snf_job("perm:(1,2,3,4);(1,2)"),
    lambda: _local_job("G0:8,4,3,8"),
    lambda: _local_job("D:24"),
    lambda: _uct_job("G0:12,4,5,12"),
    lambda: _uct_job("perm:(1,2,3,4,5);(1,2,3)"),
]


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend is available")

    print(f"{'workload':<44}{'numpy':>10}{'numba':>10}{'speedup':>9}")
    for make in JOBS:
        name, fn = make()
        os.environ["HNPGROUP_BACKEND"] = "numba"
        fn()  # compile
        t_nb, out_nb = timed(fn, args.repeat)
        os.environ["HNPGROUP_BACKEND"] = "numpy"
        t_np, out_np = timed(fn, args.repeat)
        same = _same(out_nb, out_np)
        print(f"{name:<44}{t_np:>9.3f}s{t_nb:>9.3f}s{t_np / t_nb:>8.1f}x" + ("" if same else "  MISMATCH"))
    os.environ.pop("HNPGROUP_BACKEND", None)


def _same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and bool((a == b).all())
    return a == b


if __name__ == "__main__":
    main()
