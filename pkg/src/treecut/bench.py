"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run as ``python -m treecut.bench [--n 500000] [--repeat 5]``.  Builds a
random attachment tree of the requested size and times each kernel pair on
it; the heat-kernel row uses a dense matrix sized by ``--dense``.  When
numba is unavailable (or ``TREECUT_NUMBA=0``) only the numpy column runs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._kernels import HAS_NUMBA, IMPLS
from .rng import SplitMix64
from .tree import from_parents


def _random_attachment_tree(n: int, seed: int):
    rng = SplitMix64(seed)
    parent = [-1] + [rng.below(i) for i in range(1, n)]
    return from_parents(n, parent)


def _time(fn, *args, repeat: int) -> float:
    fn(*args)  # warm-up (and JIT compile for the numba column)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=500_000,
                        help="tree size for the traversal kernels")
    parser.add_argument("--dense", type=int, default=1500,
                        help="matrix size for the TV kernel")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    tree = _random_attachment_tree(args.n, args.seed)
    deg = tree.degrees()
    b = np.ones(tree.n)
    b[tree.root] = 0.0
    x = np.linspace(-1.0, 1.0, tree.n)
    rng = np.random.default_rng(args.seed)
    P = rng.random((args.dense, args.dense))

    cases = {
        "size_and_load": (tree.parent, tree.order, tree.level_ptr),
        "tree_solve": (tree.parent, tree.order, tree.level_ptr, deg, b),
        "laplacian_matvec": (tree.parent, deg, x),
        "tv_from_kernel": (P, 1.0 / args.dense),
    }

    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    print(f"tree n={args.n}, dense={args.dense}, repeat={args.repeat}, "
          f"numba={'yes' if HAS_NUMBA else 'no'}")
    header = f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends)
    if HAS_NUMBA:
        header += f"{'speedup':>10}"
    print(header)
    for name, case_args in cases.items():
        times = [_time(IMPLS[b][name], *case_args, repeat=args.repeat)
                 for b in backends]
        row = f"{name:<18}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if HAS_NUMBA:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
