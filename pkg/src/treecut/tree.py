"""Rooted trees as parent arrays, their geometry, and the canonical text format.

A tree on ``n`` vertices is stored as a dense 0-based parent array with a
single ``-1`` sentinel at the root, plus derived structure (children in CSR
form, breadth-first order, level offsets) that the numeric kernels consume.
Instances are immutable and safe to share across workers.

The quantities computed here are purely combinatorial: depths, subtree
sizes, the per-vertex sum of subtree sizes along the root path ("path
load"), the per-edge product of depth and subtree size ("edge load"), the
per-depth tail sizes, and the balanced two-subtree split around a vertex
separator ("center of mass").
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import (CycleError, ParentIndexError, RootCountError,
                     TreeFormatError, ValidationError)

__all__ = [
    "RootedTree", "TreeMetrics", "CenterOfMass", "EdgeLoad", "VertexLoad",
    "TailProfile", "from_parents", "compute_metrics", "max_edge_load",
    "max_path_load", "tail_profile", "center_of_mass", "reroot", "root_path",
    "subtree_vertices", "to_text", "from_text",
]


@dataclass(frozen=True, eq=False)
class RootedTree:
    """Immutable rooted tree on vertices ``0..n-1``.

    ``children(v)`` returns the sorted child indices of ``v``.  The arrays
    ``order`` (breadth-first, root first) and ``level_ptr`` (offsets into
    ``order`` per depth) are what the kernels iterate over.
    """

    n: int
    root: int
    parent: np.ndarray
    child_ptr: np.ndarray = field(repr=False)
    child_flat: np.ndarray = field(repr=False)
    order: np.ndarray = field(repr=False)
    level_ptr: np.ndarray = field(repr=False)

    def children(self, v: int) -> np.ndarray:
        return self.child_flat[self.child_ptr[v]:self.child_ptr[v + 1]]

    @property
    def height(self) -> int:
        return len(self.level_ptr) - 2

    def degrees(self) -> np.ndarray:
        deg = np.diff(self.child_ptr).astype(np.int64)
        deg[np.arange(self.n) != self.root] += 1
        return deg

    def depths(self) -> np.ndarray:
        depth = np.empty(self.n, dtype=np.int64)
        for k in range(len(self.level_ptr) - 1):
            depth[self.order[self.level_ptr[k]:self.level_ptr[k + 1]]] = k
        return depth


def from_parents(n: int, parent: Sequence) -> RootedTree:
    """Validate a parent sequence and build the tree.

    ``parent`` has length ``n``; the root is marked by ``-1`` or ``None``.
    Raises :class:`RootCountError`, :class:`ParentIndexError` or
    :class:`CycleError` for the respective defects.
    """
    if n < 1:
        raise ValidationError(f"vertex count must be >= 1, got {n}")
    if len(parent) != n:
        raise ValidationError(f"parent array has length {len(parent)}, expected {n}")
    par = np.array([-1 if p is None else int(p) for p in parent], dtype=np.int64)
    roots = np.nonzero(par == -1)[0]
    if len(roots) != 1:
        raise RootCountError(f"expected exactly one root sentinel, found {len(roots)}")
    bad = np.nonzero((par < -1) | (par >= n))[0]
    if len(bad):
        raise ParentIndexError(f"parent[{bad[0]}] = {par[bad[0]]} is out of range")
    root = int(roots[0])

    # children in CSR form; counting sort keeps each child list ascending
    counts = np.zeros(n + 1, dtype=np.int64)
    np.add.at(counts, par[par >= 0] + 1, 1)
    child_ptr = np.concatenate(([0], np.cumsum(counts[1:])))
    child_flat = np.empty(max(n - 1, 0), dtype=np.int64)
    cursor = child_ptr[:-1].copy()
    for v in range(n):
        p = par[v]
        if p >= 0:
            child_flat[cursor[p]] = v
            cursor[p] += 1

    # level-synchronous BFS; an unreached vertex means a cycle off the root
    order = np.empty(n, dtype=np.int64)
    bounds = [0]
    order[0] = root
    filled = 1
    start = 0
    while start < filled:
        bounds.append(filled)
        frontier = order[start:filled]
        start = filled
        for v in frontier:
            kids = child_flat[child_ptr[v]:child_ptr[v + 1]]
            order[filled:filled + len(kids)] = kids
            filled += len(kids)
    if filled != n:
        raise CycleError(f"{n - filled} vertices unreachable from the root "
                         "(parent links contain a cycle)")

    tree = RootedTree(n=n, root=root, parent=par, child_ptr=child_ptr,
                      child_flat=child_flat, order=order,
                      level_ptr=np.array(bounds, dtype=np.int64))
    for arr in (par, child_ptr, child_flat, order, tree.level_ptr):
        arr.setflags(write=False)
    return tree


@dataclass(frozen=True, eq=False)
class TreeMetrics:
    """Cached per-tree geometry.

    ``tail_size[k]`` counts the vertices at depth at least ``k`` (the union
    of all subtrees hanging at depth ``k``); ``tail_size[0] == n``.
    """

    depth: np.ndarray
    subtree_size: np.ndarray
    path_load: np.ndarray
    degree: np.ndarray
    max_degree: int
    diameter: int
    tail_size: np.ndarray


class EdgeLoad(NamedTuple):
    value: int
    edge: Optional[int]  # the lower endpoint of the maximizing edge


class VertexLoad(NamedTuple):
    value: int
    vertex: Optional[int]


class TailProfile(NamedTuple):
    value: int
    k: Optional[int]
    table: np.ndarray  # table[k] = k * tail_size[k] for k = 0..height


_metrics_cache: "weakref.WeakKeyDictionary[RootedTree, TreeMetrics]" = \
    weakref.WeakKeyDictionary()


def _bfs_dist(tree: RootedTree, src: int) -> np.ndarray:
    """Undirected breadth-first distances from ``src``."""
    dist = np.full(tree.n, -1, dtype=np.int64)
    dist[src] = 0
    frontier = [src]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            p = tree.parent[v]
            if p >= 0 and dist[p] < 0:
                dist[p] = d
                nxt.append(int(p))
            for c in tree.children(v):
                if dist[c] < 0:
                    dist[c] = d
                    nxt.append(int(c))
        frontier = nxt
    return dist


def compute_metrics(tree: RootedTree) -> TreeMetrics:
    """All per-tree geometric quantities in O(n) plus a double BFS sweep."""
    cached = _metrics_cache.get(tree)
    if cached is not None:
        return cached

    size, load = _kernels.size_and_load(tree.parent, tree.order, tree.level_ptr)
    depth = tree.depths()
    degree = tree.degrees()

    # diameter by double sweep: farthest vertex from the root, then the
    # farthest vertex from that one
    d0 = _bfs_dist(tree, tree.root)
    far = int(np.argmax(d0))
    diameter = int(_bfs_dist(tree, far).max())

    level_counts = np.diff(tree.level_ptr)
    tail = np.cumsum(level_counts[::-1])[::-1].astype(np.int64)

    m = TreeMetrics(depth=depth, subtree_size=size, path_load=load,
                    degree=degree, max_degree=int(degree.max()),
                    diameter=diameter, tail_size=tail)
    for arr in (m.depth, m.subtree_size, m.path_load, m.degree, m.tail_size):
        arr.setflags(write=False)
    _metrics_cache[tree] = m
    return m


def max_edge_load(metrics: TreeMetrics) -> EdgeLoad:
    """Maximum over edges of depth(lower endpoint) * subtree size below it.

    Single-vertex trees have no edges and return value 0.  Ties go to the
    smallest lower-endpoint index.
    """
    loads = metrics.depth * metrics.subtree_size
    loads = np.where(metrics.depth > 0, loads, -1)
    if loads.max() < 0:
        return EdgeLoad(0, None)
    e = int(np.argmax(loads))
    return EdgeLoad(int(loads[e]), e)


def max_path_load(metrics: TreeMetrics) -> VertexLoad:
    v = int(np.argmax(metrics.path_load))
    return VertexLoad(int(metrics.path_load[v]), v)


def tail_profile(metrics: TreeMetrics) -> TailProfile:
    """Per-depth table k * |{v : depth(v) >= k}| and its maximum over k >= 1."""
    ks = np.arange(len(metrics.tail_size), dtype=np.int64)
    table = ks * metrics.tail_size
    table.setflags(write=False)
    if len(table) == 1:
        return TailProfile(0, None, table)
    k = 1 + int(np.argmax(table[1:]))
    return TailProfile(int(table[k]), k, table)


@dataclass(frozen=True)
class CenterOfMass:
    """A vertex plus a two-subtree cover of V overlapping only in it.

    ``delta = min(|part_a|, |part_b|) / n``; the separator construction
    guarantees delta >= 1/3 whenever the split vertex is free.
    """

    vertex: int
    part_a: frozenset
    part_b: frozenset
    delta: float


def subtree_vertices(tree: RootedTree, v: int) -> list:
    """All descendants of ``v`` including ``v`` itself."""
    out = [v]
    stack = [v]
    while stack:
        u = stack.pop()
        for c in tree.children(u):
            out.append(int(c))
            stack.append(int(c))
    return out


def center_of_mass(tree: RootedTree, at: Optional[int] = None) -> CenterOfMass:
    """Split the tree into two balanced subtrees overlapping in one vertex.

    With ``at=None`` the split vertex is the smallest-index vertex whose
    removal leaves only components of size <= n/2; grouping the components
    then yields parts of size >= ceil(n/3) each.  Passing ``at`` forces the
    split vertex and reports whatever balance the grouping achieves there.

    Components are grouped largest-first: with two components they become
    the two parts; with three the largest stands alone; with more, the two
    smallest components are merged (or split off once their combined size
    reaches (n-1)/3) until three remain.
    """
    n = tree.n
    if n == 1:
        whole = frozenset({tree.root})
        return CenterOfMass(tree.root, whole, whole, 1.0)

    metrics = compute_metrics(tree)
    size = metrics.subtree_size

    if at is None:
        max_comp = n - size
        np.maximum.at(max_comp, tree.parent[tree.parent >= 0],
                      size[tree.parent >= 0])
        candidates = np.nonzero(2 * max_comp <= n)[0]
        x = int(candidates[0])
    else:
        if not 0 <= at < n:
            raise ValidationError(f"split vertex {at} out of range")
        x = int(at)

    # components of the tree minus x, keyed by the neighbor they contain
    comps = [(int(size[c]), int(c), (int(c),)) for c in tree.children(x)]
    if x != tree.root:
        comps.append((n - int(size[x]), int(tree.parent[x]), (int(tree.parent[x]),)))
    comps.sort(key=lambda t: (-t[0], t[1]))

    def anchors_to_part(anchor_groups):
        part = {x}
        for a in anchor_groups:
            if a == tree.parent[x]:
                below = set(subtree_vertices(tree, x))
                part.update(v for v in range(n) if v not in below)
            else:
                part.update(subtree_vertices(tree, a))
        return frozenset(part)

    if len(comps) == 1:
        group_a, group_b = [comps[0][1]], []
    elif len(comps) == 2:
        group_a, group_b = [comps[0][1]], [comps[1][1]]
    else:
        while len(comps) > 3:
            s2, s1 = comps[-2], comps[-1]  # second smallest, smallest
            merged_size = s1[0] + s2[0]
            if 3 * merged_size >= n - 1:
                group_a = list(s1[2]) + list(s2[2])
                group_b = [a for c in comps[:-2] for a in c[2]]
                break
            comps = comps[:-2]
            comps.append((merged_size, min(s1[1], s2[1]), s1[2] + s2[2]))
            comps.sort(key=lambda t: (-t[0], t[1]))
        else:
            if len(comps) == 3:
                group_a = list(comps[0][2])
                group_b = list(comps[1][2]) + list(comps[2][2])
            else:  # reduced to 2 by merging
                group_a, group_b = list(comps[0][2]), list(comps[1][2])

    part_a = anchors_to_part(group_a)
    part_b = anchors_to_part(group_b)
    if (len(part_a), sorted(part_a)) > (len(part_b), sorted(part_b)):
        part_a, part_b = part_b, part_a
    delta = min(len(part_a), len(part_b)) / n
    return CenterOfMass(x, part_a, part_b, delta)


def reroot(tree: RootedTree, new_root: int) -> RootedTree:
    """Same undirected edges, parent links re-oriented toward ``new_root``.

    Vertex indices are preserved, so per-vertex quantities stay comparable
    across the two rootings.
    """
    if not 0 <= new_root < tree.n:
        raise ValidationError(f"new root {new_root} out of range")
    if new_root == tree.root:
        return tree
    par = np.full(tree.n, -1, dtype=np.int64)
    seen = np.zeros(tree.n, dtype=bool)
    seen[new_root] = True
    stack = [new_root]
    while stack:
        v = stack.pop()
        nbrs = list(tree.children(v))
        if tree.parent[v] >= 0:
            nbrs.append(int(tree.parent[v]))
        for u in nbrs:
            if not seen[u]:
                seen[u] = True
                par[u] = v
                stack.append(int(u))
    return from_parents(tree.n, par)


def root_path(tree: RootedTree, v: int) -> list:
    """Vertices on the path from the root to ``v``, root first."""
    if not 0 <= v < tree.n:
        raise ValidationError(f"vertex {v} out of range")
    path = [int(v)]
    while tree.parent[path[-1]] >= 0:
        path.append(int(tree.parent[path[-1]]))
    return path[::-1]


# ---------------------------------------------------------------------------
# canonical text format: line 1 vertex count, line 2 parent entries, -1 root
# ---------------------------------------------------------------------------

def to_text(tree: RootedTree) -> str:
    return f"{tree.n}\n{' '.join(str(int(p)) for p in tree.parent)}\n"


def from_text(text: str) -> RootedTree:
    """Parse the canonical format strictly; trailing tokens are rejected."""
    lines = text.split("\n")
    body = [ln for ln in lines[:2]]
    if len(lines) < 2:
        raise TreeFormatError("expected two lines: vertex count, parent entries")
    for extra in lines[2:]:
        if extra.strip():
            raise TreeFormatError(f"trailing content after parent line: {extra!r}")
    head = body[0].split()
    if len(head) != 1:
        raise TreeFormatError(f"first line must hold a single vertex count, got {body[0]!r}")
    try:
        n = int(head[0])
    except ValueError:
        raise TreeFormatError(f"vertex count is not an integer: {head[0]!r}") from None
    tokens = body[1].split()
    if len(tokens) != n:
        raise TreeFormatError(f"expected {n} parent entries, found {len(tokens)}")
    try:
        parent = [int(t) for t in tokens]
    except ValueError:
        raise TreeFormatError("parent entries must be integers") from None
    return from_parents(n, parent)
