"""Shared helpers: seeded random trees and independent brute-force oracles.

The oracles deliberately avoid the library's own traversal machinery:
depths walk the parent chain one step at a time, subtree sizes run an
undirected flood fill from the far side of each edge, and so on.  They are
slow and obviously correct, which is the point.
"""

import numpy as np

from treecut import from_parents
from treecut.rng import SplitMix64, derive_seed


def random_tree(n, seed, tall=False):
    """Random attachment tree; ``tall`` biases 70% of edges onto a chain."""
    rng = SplitMix64(seed)
    parent = [-1]
    for i in range(1, n):
        if tall and rng.random() < 0.7:
            parent.append(i - 1)
        else:
            parent.append(rng.below(i))
    return from_parents(n, parent)


def suite_trees(count, max_n, base_seed=0xACE):
    """Deterministic mixed suite of random trees with 2 <= n <= max_n."""
    trees = []
    for i in range(count):
        n = 2 + SplitMix64(derive_seed(base_seed, i)).below(max_n - 1)
        trees.append(random_tree(n, derive_seed(base_seed + 1, i), tall=i % 2 == 0))
    return trees


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------

def adjacency(tree):
    adj = [[] for _ in range(tree.n)]
    for v in range(tree.n):
        p = int(tree.parent[v])
        if p >= 0:
            adj[v].append(p)
            adj[p].append(v)
    return adj


def brute_depth(tree, v):
    d = 0
    while tree.parent[v] >= 0:
        v = int(tree.parent[v])
        d += 1
    return d


def brute_subtree_size(tree, v):
    """Flood fill below v, entered from its parent side."""
    adj = adjacency(tree)
    blocked = int(tree.parent[v])
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w != blocked and w not in seen:
                # only descend away from the root: w must be a child of u
                if int(tree.parent[w]) == u:
                    seen.add(w)
                    stack.append(w)
    return len(seen)


def brute_path_load(tree, v):
    total = 0
    while tree.parent[v] >= 0:
        total += brute_subtree_size(tree, v)
        v = int(tree.parent[v])
    return total


def brute_max_edge_load(tree):
    best = 0
    for v in range(tree.n):
        if tree.parent[v] >= 0:
            best = max(best, brute_depth(tree, v) * brute_subtree_size(tree, v))
    return best


def brute_tail_value(tree):
    depths = [brute_depth(tree, v) for v in range(tree.n)]
    height = max(depths)
    return max((k * sum(1 for d in depths if d >= k) for k in range(1, height + 1)),
               default=0)


def best_center_split(tree, max_components=20):
    """Exhaustive best min-part fraction over all (vertex, bipartition) pairs.

    For each vertex, enumerates every 2-coloring of the components of the
    tree minus that vertex; skips vertices with more than
    ``max_components`` components (never hit by the random suite).
    """
    n = tree.n
    best = 0.0
    for x in range(n):
        comp_sizes = [brute_subtree_size(tree, int(c)) for c in tree.children(x)]
        if tree.parent[x] >= 0:
            comp_sizes.append(n - brute_subtree_size(tree, x))
        d = len(comp_sizes)
        if d == 0:
            return 1.0
        if d > max_components:
            continue
        # fix the last component on side B; both parts include x
        for mask in range(1 << (d - 1)):
            a_sum = sum(s for i, s in enumerate(comp_sizes[:-1]) if mask >> i & 1)
            best = max(best, min(a_sum + 1, n - a_sum) / n)
    return best
