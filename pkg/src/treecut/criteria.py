"""Finite-size cutoff diagnostics evaluated over tree families.

The asymptotic comparisons behind the cutoff criteria (same order,
negligible, dominant) are operationalized as least-squares slopes of
log(quotient) against log(vertex count) across a family sweep, with a
configurable threshold (default 0.05) and at least four sizes before a
verdict is issued.  Every verdict carries its slope and R^2 and is labeled
"diagnostic": these are trend readings, not proofs.

A sweep generates each family member, computes the combinatorial load
quantities, and adds the exact relaxation and mixing times while the tree
fits under the dense cap; larger members carry certified bound pairs
instead and are labeled "bounded".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .generate import (OffspringDistribution, binary_of_size, cor15_tree,
                       gw_conditioned_size, gw_survival_truncated, gw_tree,
                       kesten_tree, peres_sousi, segment,
                       spherically_symmetric)
from .mixing import hitting_profile, mixing_time
from .rng import derive_seed
from .spectral import (bound_log_diameter, bound_path_load,
                       bound_summable_weights, bound_tail, dense_cap,
                       hardy_lower, spectrum)
from .tree import (RootedTree, center_of_mass, compute_metrics, max_edge_load,
                   max_path_load, root_path, tail_profile)

__all__ = [
    "TrendFit", "Diagnostic", "FamilyRow", "FamilyReport", "RetractionReport",
    "fit_loglog", "product_ratio", "no_cutoff_check", "tail_cutoff_check",
    "retraction_report", "retraction_trend", "retraction_alpha",
    "analyze_tree", "sweep", "FAMILIES",
]

SLOPE_THRESHOLD = 0.05
MIN_TREND_POINTS = 4


@dataclass(frozen=True)
class TrendFit:
    slope: float
    intercept: float
    r2: float
    points: int


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> TrendFit:
    """Least-squares slope of log(y) against log(x)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValidationError("need at least two (x, y) pairs")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValidationError("log-log fit needs positive values")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(((ly - pred) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return TrendFit(float(slope), float(intercept), r2, len(xs))


@dataclass(frozen=True)
class Diagnostic:
    quotient: str
    verdict: str
    fit: Optional[TrendFit]
    threshold: float
    values: tuple


def product_ratio(tree: RootedTree, epsilon: float) -> float:
    """t_mix(epsilon) times the spectral gap, both exact."""
    return mixing_time(tree, epsilon).t_mix * spectrum(tree).gap


@dataclass(frozen=True)
class FamilyRow:
    """One family member: combinatorial loads plus exact or bounded times.

    Exact rows carry t_rel, t_mix(epsilon) and their ratio.  Bounded rows
    (above the dense cap) carry the certified pair instead: t_rel between
    ``t_rel_lower`` and ``t_rel_upper``, and ``t_mix_lower`` bounding the
    mixing time at target level min(epsilon, delta)/2 from below (no
    numeric upper bound on mixing exists without a universal constant).
    """

    n: float
    sites: float
    max_degree: float
    max_edge_load: float
    max_path_load: float
    tail_max: float
    delta: float
    mode: str                      # "exact" or "bounded"
    t_rel: Optional[float] = None
    t_mix: Optional[float] = None
    ratio: Optional[float] = None
    t_rel_lower: Optional[float] = None
    t_rel_upper: Optional[float] = None
    t_mix_lower: Optional[float] = None


@dataclass(frozen=True)
class FamilyReport:
    family: str
    epsilon: float
    rows: List[FamilyRow]
    trends: dict


def analyze_tree(tree: RootedTree, epsilon: float, size_label: float) -> FamilyRow:
    """Row for one tree: exact spectra under the dense cap, bounds above it."""
    metrics = compute_metrics(tree)
    com = center_of_mass(tree)
    base = dict(
        n=float(size_label), sites=float(tree.n),
        max_degree=float(metrics.max_degree),
        max_edge_load=float(max_edge_load(metrics).value),
        max_path_load=float(max_path_load(metrics).value),
        tail_max=float(tail_profile(metrics).value),
        delta=com.delta,
    )
    lower = hardy_lower(tree)
    upper = min(bound_log_diameter(tree),
                bound_summable_weights(tree, lambda k: k * k),
                bound_path_load(tree), bound_tail(tree))
    if tree.n <= dense_cap():
        t_rel = spectrum(tree).t_rel
        t_mix = mixing_time(tree, epsilon).t_mix
        return FamilyRow(mode="exact", t_rel=t_rel, t_mix=t_mix,
                         ratio=t_mix / t_rel, t_rel_lower=lower.value,
                         t_rel_upper=upper, t_mix_lower=None, **base)
    eps_eff = min(epsilon, com.delta)
    hit = float(hitting_profile(tree, com.vertex).expected.max())
    return FamilyRow(mode="bounded", t_rel=None, t_mix=None, ratio=None,
                     t_rel_lower=lower.value, t_rel_upper=upper,
                     t_mix_lower=0.5 * eps_eff * hit, **base)


def _verdict_fit(rows: Sequence[FamilyRow], quotient: Callable[[FamilyRow], float],
                 name: str, threshold: float, min_points: int,
                 direction: str) -> Diagnostic:
    values = tuple(quotient(r) for r in rows)
    if len(rows) < min_points:
        return Diagnostic(name, "insufficient data (diagnostic)", None,
                          threshold, values)
    fit = fit_loglog([r.sites for r in rows], values)
    if direction == "flat":
        ok = abs(fit.slope) < threshold
        verdict = "consistent with no cutoff (diagnostic)" if ok \
            else "inconclusive (diagnostic)"
    else:  # "down": quotient should vanish
        ok = fit.slope <= -threshold
        verdict = "cutoff predicted (diagnostic)" if ok \
            else "not indicated (diagnostic)"
    return Diagnostic(name, verdict, fit, threshold, values)


def no_cutoff_check(rows: Sequence[FamilyRow],
                    threshold: float = SLOPE_THRESHOLD,
                    min_points: int = MIN_TREND_POINTS) -> Diagnostic:
    """Flat max_path_load / max_edge_load across the family rules out cutoff."""
    return _verdict_fit(rows, lambda r: r.max_path_load / r.max_edge_load,
                        "max_path_load/max_edge_load", threshold, min_points,
                        "flat")


def tail_cutoff_check(rows: Sequence[FamilyRow],
                      threshold: float = SLOPE_THRESHOLD,
                      min_points: int = MIN_TREND_POINTS) -> Diagnostic:
    """Vanishing max_degree * tail_max / max_path_load predicts cutoff."""
    return _verdict_fit(rows,
                        lambda r: r.max_degree * r.tail_max / r.max_path_load,
                        "max_degree*tail_max/max_path_load", threshold,
                        min_points, "down")


@dataclass(frozen=True)
class RetractionReport:
    """Load comparators of one candidate deep vertex against the whole tree."""

    path_sum: float            # sum of subtree sizes along the root path of v*
    max_path_load: float
    sites: float
    max_edge_on_path: float    # max depth*size over the root-path edges of v*


def retraction_report(tree: RootedTree, v_star: int) -> RetractionReport:
    metrics = compute_metrics(tree)
    path = root_path(tree, v_star)[1:]
    edge_loads = [int(metrics.depth[v]) * int(metrics.subtree_size[v]) for v in path]
    return RetractionReport(
        path_sum=float(metrics.path_load[v_star]),
        max_path_load=float(max_path_load(metrics).value),
        sites=float(tree.n),
        max_edge_on_path=float(max(edge_loads, default=0)),
    )


def retraction_trend(reports: Sequence[RetractionReport],
                     threshold: float = SLOPE_THRESHOLD,
                     min_points: int = MIN_TREND_POINTS) -> dict:
    """Trend reading of the retraction-cutoff conditions over a family.

    Checks that the candidate path carries the maximal load (flat ratio),
    that the maximal load dominates the vertex count (rising ratio), and
    that the largest single edge load on the path is negligible against
    the maximal load (falling ratio).  All three together predict cutoff
    for the retracted family.
    """
    if len(reports) < min_points:
        return {"verdict": "insufficient data (diagnostic)", "fits": {}}
    sites = [r.sites for r in reports]
    fits = {
        "path_carries_max": fit_loglog(sites, [r.path_sum / r.max_path_load
                                               for r in reports]),
        "load_dominates_sites": fit_loglog(sites, [r.max_path_load / r.sites
                                                   for r in reports]),
        "path_edge_negligible": fit_loglog(sites, [r.max_edge_on_path / r.max_path_load
                                                   for r in reports]),
    }
    ok = (abs(fits["path_carries_max"].slope) < threshold
          and fits["load_dominates_sites"].slope >= threshold
          and fits["path_edge_negligible"].slope <= -threshold)
    verdict = ("retraction cutoff predicted (diagnostic)" if ok
               else "not indicated (diagnostic)")
    return {"verdict": verdict, "fits": fits}


def retraction_alpha(tree: RootedTree, spine: Sequence[int]) -> float:
    """Worst path-load-to-size ratio among the subtrees hanging off a spine.

    For each edge leaving the spine, the hanging subtree R contributes
    max over v in R of the within-R path load divided by |R|; level-filled
    binary attachments stay at or below 2, length-L path attachments reach
    (L+1)/2.  Returns 1.0 when nothing hangs off the spine.
    """
    spine = [int(v) for v in spine]
    if not spine or spine[0] != tree.root:
        raise ValidationError("spine must start at the root")
    for u, v in zip(spine, spine[1:]):
        if int(tree.parent[v]) != u:
            raise ValidationError("spine must follow parent-child edges")
    on_spine = set(spine)
    metrics = compute_metrics(tree)
    best = 1.0
    for u in spine:
        for c in tree.children(u):
            if int(c) in on_spine:
                continue
            stack = [int(c)]
            local_max = 0.0
            while stack:
                v = stack.pop()
                local_max = max(local_max,
                                float(metrics.path_load[v] - metrics.path_load[u]))
                stack.extend(int(x) for x in tree.children(v))
            best = max(best, local_max / float(metrics.subtree_size[c]))
    return best


# ---------------------------------------------------------------------------
# family sweeps
# ---------------------------------------------------------------------------

def _build_family_member(family: str, size: int, seed: int,
                         offspring: Optional[OffspringDistribution]) -> RootedTree:
    if family in _RANDOM_FAMILIES and offspring is None:
        raise ValidationError(f"family {family!r} needs an offspring distribution")
    if family == "segment":
        return segment(size)
    if family == "star":
        return spherically_symmetric([size])
    if family == "binary":
        return binary_of_size(size)
    if family == "ssym_binary":
        return spherically_symmetric([2] + [3] * (size - 1))
    if family == "cor15":
        return cor15_tree(size)
    if family == "peres_sousi":
        return peres_sousi(size)
    if family == "gw":
        return gw_tree(offspring, size, seed)
    if family == "gw_survival":
        return gw_survival_truncated(offspring, size, seed)
    if family == "gw_size":
        return gw_conditioned_size(offspring, size, seed)[0]
    if family == "kesten":
        return kesten_tree(offspring, size, seed)
    raise ValidationError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")


_RANDOM_FAMILIES = frozenset({"gw", "gw_survival", "gw_size", "kesten"})
FAMILIES = frozenset({"segment", "star", "binary", "ssym_binary", "cor15",
                      "peres_sousi"}) | _RANDOM_FAMILIES


def _median_row(rows: Sequence[FamilyRow]) -> FamilyRow:
    if len(rows) == 1:
        return rows[0]

    def med(getter):
        vals = [getter(r) for r in rows]
        if any(v is None for v in vals):
            return None
        return float(np.median(vals))

    mode = "exact" if all(r.mode == "exact" for r in rows) else "bounded"
    return FamilyRow(
        n=rows[0].n, sites=med(lambda r: r.sites),
        max_degree=med(lambda r: r.max_degree),
        max_edge_load=med(lambda r: r.max_edge_load),
        max_path_load=med(lambda r: r.max_path_load),
        tail_max=med(lambda r: r.tail_max), delta=med(lambda r: r.delta),
        mode=mode, t_rel=med(lambda r: r.t_rel), t_mix=med(lambda r: r.t_mix),
        ratio=med(lambda r: r.ratio), t_rel_lower=med(lambda r: r.t_rel_lower),
        t_rel_upper=med(lambda r: r.t_rel_upper),
        t_mix_lower=med(lambda r: r.t_mix_lower),
    )


def _sweep_one(args):
    family, size, eps, seed, offspring = args
    tree = _build_family_member(family, size, seed, offspring)
    return analyze_tree(tree, eps, size_label=size)


def sweep(family: str, sizes: Sequence[int], epsilon: float = 0.25,
          seed: Optional[int] = None,
          offspring: Optional[OffspringDistribution] = None,
          reps: int = 1, jobs: int = 1,
          threshold: float = SLOPE_THRESHOLD) -> FamilyReport:
    """Generate, analyze, and aggregate a family across sizes.

    Random families require a seed; each (size, rep) draws from the stream
    ``derive_seed(seed, size, rep)``, so results do not depend on
    evaluation order and workers can run concurrently (``jobs``).  With
    ``reps > 1`` each row reports the per-size median.
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    if family in _RANDOM_FAMILIES and seed is None:
        raise ValidationError(f"family {family!r} is random and needs a seed")
    if reps < 1 or jobs < 1:
        raise ValidationError("reps and jobs must be >= 1")
    sizes = sorted(int(s) for s in sizes)
    if not sizes:
        raise ValidationError("need at least one size")

    tasks = [(family, size, epsilon,
              derive_seed(seed, size, rep) if seed is not None else 0, offspring)
             for size in sizes for rep in range(reps)]
    if jobs > 1:
        # spawn context: forking is unsafe once the numba/OpenMP runtime
        # has started in this process
        import multiprocessing as mp
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs,
                                 mp_context=mp.get_context("spawn")) as pool:
            flat = list(pool.map(_sweep_one, tasks))
    else:
        flat = [_sweep_one(t) for t in tasks]

    rows = []
    for i, size in enumerate(sizes):
        rows.append(_median_row(flat[i * reps:(i + 1) * reps]))

    trends = {
        "no_cutoff": no_cutoff_check(rows, threshold),
        "tail_cutoff": tail_cutoff_check(rows, threshold),
    }
    exact = [r for r in rows if r.mode == "exact" and r.ratio is not None]
    if len(exact) >= 2:
        trends["product_ratio"] = fit_loglog([r.sites for r in exact],
                                             [r.ratio for r in exact])
    return FamilyReport(family=family, epsilon=epsilon, rows=rows, trends=trends)
