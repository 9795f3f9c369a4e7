"""Spectra of the variable-speed walk generator and the spectral bounds.

The walk moves along every edge at rate 1, so its generator is A - D and
the spectral gap equals the second-smallest eigenvalue of the Laplacian
Q = D - A.  Everything here is derived from Q: exact dense spectra (below a
configurable vertex cap), an iterative gap solver for larger trees, the
Rayleigh quotient, the discrete Hardy characterization with its two-sided
interval, weighted-path upper bounds on the relaxation time, and the exact
constrained-minimum ``nu`` of squared edge weights covering a vertex set.

Dense eigendecompositions use the LAPACK symmetric solver and are cached
per tree (the mixing module shares them).  The dense cap defaults to 4096
vertices and can be overridden with the ``TREECUT_MAX_VERTICES``
environment variable.
"""

from __future__ import annotations

import os
import weakref
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import DegenerateInputError, ResourceLimitError, ValidationError
from .rng import SplitMix64
from .tree import (RootedTree, center_of_mass, compute_metrics, max_edge_load,
                   max_path_load, reroot, root_path, tail_profile)

__all__ = [
    "Eigensystem", "SpectrumResult", "HardyCertificate", "HardyLowerBound",
    "WeightScheme", "dense_cap", "laplacian", "decompose", "spectrum",
    "gap_iterative", "rayleigh", "hardy_constant", "hardy_interval",
    "weighted_path_bound", "bound_log_diameter", "bound_summable_weights",
    "bound_path_load", "bound_tail", "hardy_lower", "nu_exact",
]

DEFAULT_DENSE_CAP = 4096


def dense_cap() -> int:
    """Vertex cap for dense eigensolves; TREECUT_MAX_VERTICES overrides."""
    raw = os.environ.get("TREECUT_MAX_VERTICES")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"TREECUT_MAX_VERTICES is not an integer: {raw!r}") from None


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Full symmetric eigendecomposition of Q = D - A, values ascending."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    gap: float
    t_rel: float


_eig_cache: "weakref.WeakKeyDictionary[RootedTree, Eigensystem]" = \
    weakref.WeakKeyDictionary()


def laplacian(tree: RootedTree) -> np.ndarray:
    """Dense symmetric Laplacian Q = D - A; every row sums to zero."""
    Q = np.zeros((tree.n, tree.n), dtype=np.float64)
    deg = tree.degrees()
    np.fill_diagonal(Q, deg)
    nonroot = np.nonzero(tree.parent >= 0)[0]
    pars = tree.parent[nonroot]
    Q[nonroot, pars] = -1.0
    Q[pars, nonroot] = -1.0
    return Q


def decompose(tree: RootedTree) -> Eigensystem:
    """Cached dense eigendecomposition; refuses trees above the dense cap."""
    cached = _eig_cache.get(tree)
    if cached is not None:
        return cached
    cap = dense_cap()
    if tree.n > cap:
        raise ResourceLimitError(
            f"tree has {tree.n} vertices, above the dense cap {cap}; "
            "use gap_iterative for gap-only queries or raise TREECUT_MAX_VERTICES")
    values, vectors = np.linalg.eigh(laplacian(tree))
    eig = Eigensystem(values=values, vectors=vectors)
    _eig_cache[tree] = eig
    return eig


def spectrum(tree: RootedTree) -> SpectrumResult:
    """Eigenvalues of Q, the spectral gap, and the relaxation time 1/gap."""
    if tree.n < 2:
        raise DegenerateInputError("the spectral gap is undefined for a single vertex")
    eig = decompose(tree)
    gap = float(eig.values[1])
    return SpectrumResult(eigenvalues=eig.values, gap=gap, t_rel=1.0 / gap)


def gap_iterative(tree: RootedTree, tol: float = 1e-10, max_iter: int = 1000,
                  seed: int = 0x5EED) -> float:
    """Spectral gap without a dense solve, for trees above the dense cap.

    Lanczos iteration on the pseudo-inverse of Q restricted to the
    mean-zero subspace; each operator application is one O(n) tree-
    structured elimination (no fill-in on a tree).  Full
    reorthogonalization keeps the extremal Ritz value trustworthy; the
    returned gap is 1/theta for the converged top Ritz value theta.
    """
    if tree.n < 2:
        raise DegenerateInputError("the spectral gap is undefined for a single vertex")
    n = tree.n
    deg = tree.degrees()

    def apply_pinv(v):
        w = v - v.mean()
        x = _kernels.tree_solve(tree.parent, tree.order, tree.level_ptr, deg, w)
        return x - x.mean()

    rng = SplitMix64(seed)
    q = np.array([rng.random() - 0.5 for _ in range(n)])
    q -= q.mean()
    q /= np.linalg.norm(q)

    m = min(max_iter, n - 1)
    basis = np.empty((m, n))
    alphas = np.empty(m)
    betas = np.empty(m)
    theta = 0.0
    k = 0
    for j in range(m):
        basis[j] = q
        w = apply_pinv(q)
        alphas[j] = float(w @ q)
        w -= alphas[j] * q
        if j > 0:
            w -= betas[j - 1] * basis[j - 1]
        # two-pass full reorthogonalization against the whole basis
        for _ in range(2):
            w -= basis[:j + 1].T @ (basis[:j + 1] @ w)
        w -= w.mean()
        beta = float(np.linalg.norm(w))
        betas[j] = beta
        k = j + 1
        T = np.diag(alphas[:k])
        if k > 1:
            off = betas[:k - 1]
            T += np.diag(off, 1) + np.diag(off, -1)
        vals, vecs = np.linalg.eigh(T)
        theta = float(vals[-1])
        resid = abs(beta * vecs[-1, -1])
        if resid <= tol * max(theta, 1e-300) or beta <= 1e-14 * max(theta, 1.0):
            break
        q = w / beta
    if theta <= 0:
        raise ResourceLimitError("iterative gap solver failed to find a positive Ritz value")
    return 1.0 / theta


def rayleigh(tree: RootedTree, f) -> float:
    """Dirichlet form over variance of a per-vertex function.

    Both are normalized by n, so the quotient is the usual variational
    upper bound on the spectral gap.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (tree.n,):
        raise ValidationError(f"expected {tree.n} function values, got shape {f.shape}")
    n = tree.n
    var = float(f @ f) / n - (float(f.sum()) / n) ** 2
    if var <= 1e-300:
        raise DegenerateInputError("variance is zero: the function is constant")
    nonroot = np.nonzero(tree.parent >= 0)[0]
    diffs = f[nonroot] - f[tree.parent[nonroot]]
    energy = float(diffs @ diffs) / n
    return energy / var


# ---------------------------------------------------------------------------
# the discrete Hardy inequality on a rooted tree
# ---------------------------------------------------------------------------

def _ancestor_sums(tree: RootedTree, edge_vals: np.ndarray) -> np.ndarray:
    """S[v] = sum of edge_vals over the edges on the root path of v."""
    S = np.zeros(tree.n, dtype=np.float64)
    for lev in range(1, len(tree.level_ptr) - 1):
        verts = tree.order[tree.level_ptr[lev]:tree.level_ptr[lev + 1]]
        S[verts] = S[tree.parent[verts]] + edge_vals[verts]
    return S


def _subtree_sums(tree: RootedTree, vertex_vals: np.ndarray) -> np.ndarray:
    """G[v] = sum of vertex_vals over the subtree below (and including) v."""
    G = vertex_vals.astype(np.float64).copy()
    for lev in range(len(tree.level_ptr) - 2, 0, -1):
        verts = tree.order[tree.level_ptr[lev]:tree.level_ptr[lev + 1]]
        np.add.at(G, tree.parent[verts], G[verts])
    return G


def hardy_constant(tree: RootedTree, part: Iterable[int],
                   dense_limit: int = 1500) -> float:
    """Optimal constant of the Hardy inequality restricted to a root part.

    ``part`` must induce a subtree containing the root.  The constant is
    the top eigenvalue of the Gram matrix of the ancestor-incidence map
    (vertices of the part versus edges of the part), computed densely up
    to ``dense_limit`` edges and by power iteration above that.
    """
    part = sorted(set(int(v) for v in part))
    in_part = np.zeros(tree.n, dtype=bool)
    in_part[part] = True
    if not in_part[tree.root]:
        raise ValidationError("the part must contain the root")
    for v in part:
        if v != tree.root and not in_part[tree.parent[v]]:
            raise ValidationError(f"part is not a subtree: parent of {v} is missing")
    edges = [v for v in part if v != tree.root]  # edge = (parent[v], v)
    m = len(edges)
    if m == 0:
        return 0.0

    if m <= dense_limit:
        col = {v: i for i, v in enumerate(edges)}
        M = np.zeros((len(part), m))
        for r, v in enumerate(part):
            u = v
            while u != tree.root:
                M[r, col[u]] = 1.0
                u = int(tree.parent[u])
        gram_vals = np.linalg.eigvalsh(M.T @ M)
        return float(gram_vals[-1])

    # power iteration on the Gram operator, using O(n) path and subtree sums
    mask = in_part.astype(np.float64)
    g = np.zeros(tree.n)
    g[edges] = 1.0
    g /= np.linalg.norm(g)
    lam = 0.0
    for _ in range(50_000):
        S = _ancestor_sums(tree, g) * mask
        h = _subtree_sums(tree, S)
        new = np.zeros(tree.n)
        new[edges] = h[edges]
        nrm = np.linalg.norm(new)
        if nrm == 0:
            return 0.0
        new /= nrm
        lam_new = float(nrm)
        if abs(lam_new - lam) <= 1e-13 * max(lam_new, 1.0):
            lam = lam_new
            break
        lam, g = lam_new, new
    return lam


@dataclass(frozen=True)
class HardyCertificate:
    """Two-sided enclosure of the gap from the Hardy constants of a split.

    ``interval = [1/A, 1/(delta*A)]`` for the split at ``vertex`` with
    balance ``delta``; the exact gap of the walk lies inside it.
    """

    A: float
    interval: Tuple[float, float]
    delta: float
    vertex: int


def hardy_interval(tree: RootedTree) -> HardyCertificate:
    """Enclose the gap by splitting at the computed center of mass.

    The split vertex is recomputed from the tree's own balance, not taken
    from the stored root, and the delta actually achieved is reported.
    """
    if tree.n < 2:
        raise DegenerateInputError("no gap to enclose for a single vertex")
    com = center_of_mass(tree)
    base = reroot(tree, com.vertex)
    A = max(hardy_constant(base, com.part_a), hardy_constant(base, com.part_b))
    return HardyCertificate(A=A, interval=(1.0 / A, 1.0 / (com.delta * A)),
                            delta=com.delta, vertex=com.vertex)


# ---------------------------------------------------------------------------
# weighted-path upper bounds on the relaxation time
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightScheme:
    """Positive edge weights, indexed by the lower endpoint of each edge."""

    kind: str
    func: Optional[Callable[[int], float]] = None
    table: Optional[tuple] = None
    spine: Optional[tuple] = None

    @staticmethod
    def subtree() -> "WeightScheme":
        """Weight each edge by the size of the subtree hanging below it."""
        return WeightScheme("subtree")

    @staticmethod
    def inverse_depth() -> "WeightScheme":
        return WeightScheme("inverse_depth")

    @staticmethod
    def reciprocal(func: Callable[[int], float]) -> "WeightScheme":
        """Weight an edge at depth k by 1/func(k)."""
        return WeightScheme("reciprocal", func=func)

    @staticmethod
    def retraction_weights(spine: Iterable[int]) -> "WeightScheme":
        """The comb scheme: depth^(-1/2) along the spine, and
        1/(sqrt(max(i,1)) * (depth - i)^2) inside the subtree hanging at
        spine position i."""
        return WeightScheme("retraction", spine=tuple(int(v) for v in spine))

    @staticmethod
    def custom(table) -> "WeightScheme":
        return WeightScheme("custom", table=tuple(float(x) for x in table))

    def edge_weights(self, tree: RootedTree) -> np.ndarray:
        metrics = compute_metrics(tree)
        depth = metrics.depth
        a = np.zeros(tree.n, dtype=np.float64)
        nonroot = depth > 0
        if self.kind == "subtree":
            a[nonroot] = metrics.subtree_size[nonroot]
        elif self.kind == "inverse_depth":
            a[nonroot] = 1.0 / depth[nonroot]
        elif self.kind == "reciprocal":
            for v in np.nonzero(nonroot)[0]:
                a[v] = 1.0 / float(self.func(int(depth[v])))
        elif self.kind == "retraction":
            spine = set(self.spine)
            anchor = np.full(tree.n, -1, dtype=np.int64)
            for v in self.spine:
                anchor[v] = depth[v]
            for lev in range(1, len(tree.level_ptr) - 1):
                verts = tree.order[tree.level_ptr[lev]:tree.level_ptr[lev + 1]]
                for v in verts:
                    if v not in spine:
                        anchor[v] = anchor[tree.parent[v]]
            for v in np.nonzero(nonroot)[0]:
                if v in spine:
                    a[v] = depth[v] ** -0.5
                else:
                    i = anchor[v]
                    a[v] = 1.0 / (max(i, 1) ** 0.5 * (depth[v] - i) ** 2)
        elif self.kind == "custom":
            if len(self.table) != tree.n:
                raise ValidationError("custom weight table must have one entry per vertex")
            a = np.array(self.table, dtype=np.float64)
            a[~nonroot] = 0.0
        else:
            raise ValidationError(f"unknown weight scheme {self.kind!r}")
        if np.any(a[nonroot] <= 0):
            raise ValidationError("edge weights must be strictly positive")
        return a


def weighted_path_bound(tree: RootedTree, scheme: WeightScheme) -> float:
    """Upper bound on the relaxation time from positive edge weights.

    For weights a_e this is max over edges of
    a_e^{-1} * sum over vertices below e of the weight sum along their
    root paths; computed with one downward and one upward pass.
    """
    if tree.n < 2:
        return 0.0
    a = scheme.edge_weights(tree)
    S = _ancestor_sums(tree, a)
    G = _subtree_sums(tree, S)
    nonroot = np.nonzero(tree.parent >= 0)[0]
    return float((G[nonroot] / a[nonroot]).max())


def bound_log_diameter(tree: RootedTree) -> float:
    """(log(diam) + 1) times the maximum edge load."""
    metrics = compute_metrics(tree)
    if metrics.diameter < 1:
        return 0.0
    return (np.log(metrics.diameter) + 1.0) * max_edge_load(metrics).value


def bound_summable_weights(tree: RootedTree, func: Callable[[int], float]) -> float:
    """Partial sum of 1/func up to the height, times max func(depth)*|subtree|.

    On a finite tree the summability assumption reduces to the partial sum
    actually used, which is what gets multiplied in.
    """
    metrics = compute_metrics(tree)
    height = int(metrics.depth.max())
    if height == 0:
        return 0.0
    fvals = np.array([float(func(k)) for k in range(1, height + 1)])
    if np.any(fvals <= 0):
        raise ValidationError("weight function must be positive on 1..height")
    C = float((1.0 / fvals).sum())
    nonroot = metrics.depth > 0
    best = float((fvals[metrics.depth[nonroot] - 1]
                  * metrics.subtree_size[nonroot]).max())
    return C * best


def bound_path_load(tree: RootedTree) -> float:
    """The subtree weighting collapses to the maximal path load."""
    return float(max_path_load(compute_metrics(tree)).value)


def bound_tail(tree: RootedTree) -> float:
    """32 times the maximal k * (number of vertices at depth >= k)."""
    return 32.0 * tail_profile(compute_metrics(tree)).value


@dataclass(frozen=True)
class HardyLowerBound:
    """delta * max edge load, with the explicit certificate function.

    ``g`` puts 1/depth(edge) on every root-path edge of the maximizing
    edge's lower endpoint (in the recentered tree); ``numerator`` and
    ``denominator`` are the two sums of the Hardy quotient of g, so
    numerator/denominator >= max edge load can be re-verified directly.
    """

    value: float
    delta: float
    edge: Optional[int]
    recentered: RootedTree
    g: np.ndarray
    numerator: float
    denominator: float


def hardy_lower(tree: RootedTree) -> HardyLowerBound:
    """Lower bound delta * max|e||T_e| on the relaxation time.

    The tree is re-rooted at its center of mass first, since the bound
    needs the root to carry the split; the gap itself does not depend on
    the rooting.
    """
    com = center_of_mass(tree)
    base = reroot(tree, com.vertex)
    metrics = compute_metrics(base)
    mel = max_edge_load(metrics)
    if mel.edge is None:
        return HardyLowerBound(0.0, com.delta, None, base,
                               np.zeros(tree.n), 0.0, 0.0)
    d = int(metrics.depth[mel.edge])
    g = np.zeros(base.n, dtype=np.float64)
    g[root_path(base, mel.edge)[1:]] = 1.0 / d
    S = _ancestor_sums(base, g)
    numerator = float(S @ S)
    denominator = float(g @ g)
    return HardyLowerBound(value=com.delta * mel.value, delta=com.delta,
                           edge=mel.edge, recentered=base, g=g,
                           numerator=numerator, denominator=denominator)


def nu_exact(tree: RootedTree, B: Iterable[int], cap: int = 12) -> float:
    """Exact minimum of sum f(e)^2 subject to unit root-path sums on B.

    Solved by enumerating active constraint subsets: for each nonempty
    subset the minimum-norm solution of the equality system is checked for
    feasibility, and the best feasible candidate is the exact optimum
    (the true active set is among the subsets).  Exponential in |B|, hence
    the cap.
    """
    B = sorted(set(int(v) for v in B))
    if not B:
        raise ValidationError("B must be nonempty")
    if tree.root in B:
        raise ValidationError("B must not contain the root")
    if len(B) > cap:
        raise ValidationError(f"|B| = {len(B)} exceeds the enumeration cap {cap}")
    for v in B:
        if not 0 <= v < tree.n:
            raise ValidationError(f"vertex {v} out of range")

    m = tree.n  # edge e indexed by its lower endpoint; root column unused
    rows = np.zeros((len(B), m))
    for r, v in enumerate(B):
        rows[r, root_path(tree, v)[1:]] = 1.0
    ones_b = np.ones(len(B))
    best = np.inf
    for mask in range(1, 1 << len(B)):
        sel = [i for i in range(len(B)) if mask >> i & 1]
        M = rows[sel]
        f, *_ = np.linalg.lstsq(M, np.ones(len(sel)), rcond=None)
        if np.all(rows @ f >= 1.0 - 1e-9):
            best = min(best, float(f @ f))
    return best
