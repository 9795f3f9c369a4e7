"""Command-line interface: gen, metrics, spectrum, bounds, mix, bdchain, sweep.

Output is machine readable (JSON with a stable ``"schema": "treecut/1"``
field, or CSV where tabular) and byte-identical across runs for identical
arguments and seeds.  Exit codes: 0 success, 2 validation error, 3 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import bdchain as bd
from . import criteria, generate, mixing, spectral
from . import tree as tc
from .errors import ResourceLimitError, ValidationError

SCHEMA = "treecut/1"


def _parse_offspring(text: str) -> generate.OffspringDistribution:
    kind, _, rest = text.partition(":")
    try:
        if kind == "geom":
            return generate.OffspringDistribution.geometric(float(rest))
        if kind == "poisson":
            return generate.OffspringDistribution.poisson(float(rest))
        if kind == "table":
            return generate.OffspringDistribution.table(
                [float(x) for x in rest.split(",")])
    except ValueError as exc:
        raise ValidationError(f"bad offspring spec {text!r}: {exc}") from None
    raise ValidationError(
        f"unknown offspring kind {kind!r}; use geom:P, poisson:L or table:p0,p1,...")


def _parse_int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None


def _build_tree_from_flags(args) -> tc.RootedTree:
    family = args.family
    if family is None:
        raise ValidationError("no input: give a tree file or --family")
    offspring = _parse_offspring(args.offspring) if getattr(args, "offspring", None) else None
    needs_seed = family in criteria._RANDOM_FAMILIES
    if needs_seed and args.seed is None:
        raise ValidationError(f"family {family!r} is random: --seed is required")
    if family == "peres_sousi":
        if args.k is None:
            raise ValidationError("peres_sousi needs --k")
        return generate.peres_sousi(args.k)
    if args.n is None:
        raise ValidationError(f"family {family!r} needs --n")
    return criteria._build_family_member(family, args.n,
                                         args.seed if args.seed is not None else 0,
                                         offspring)


def _resolve_tree(args) -> tc.RootedTree:
    """Exactly one input source: a tree file path or family flags."""
    has_file = getattr(args, "tree", None) is not None
    has_family = getattr(args, "family", None) is not None
    if has_file and has_family:
        raise ValidationError("give either a tree file or --family, not both")
    if has_file:
        with open(args.tree, "r", encoding="ascii") as fh:
            return tc.from_text(fh.read())
    return _build_tree_from_flags(args)


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(args, payload: dict) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "json":
        _emit(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:  # text: flat key/value lines
        lines = []
        for key in sorted(payload):
            lines.append(f"{key} {payload[key]}")
        _emit(args, "\n".join(lines) + "\n")


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=sorted(criteria.FAMILIES))
    p.add_argument("--n", type=int, help="family size parameter")
    p.add_argument("--k", type=int, help="doubly-exponential comb parameter")
    p.add_argument("--seed", type=int)
    p.add_argument("--offspring",
                   help="geom:P | poisson:L | table:p0,p1,... (branching families)")


def cmd_gen(args) -> int:
    tree = _build_tree_from_flags(args)
    _emit(args, tc.to_text(tree))
    return 0


def cmd_metrics(args) -> int:
    tree = _resolve_tree(args)
    m = tc.compute_metrics(tree)
    mel = tc.max_edge_load(m)
    mpl = tc.max_path_load(m)
    tp = tc.tail_profile(m)
    com = tc.center_of_mass(tree)
    payload = {
        "schema": SCHEMA, "sites": tree.n, "root": tree.root,
        "depth": m.depth.tolist(), "subtree_size": m.subtree_size.tolist(),
        "path_load": m.path_load.tolist(), "degree": m.degree.tolist(),
        "max_degree": m.max_degree, "diameter": m.diameter,
        "tail_size": m.tail_size.tolist(),
        "max_edge_load": {"value": mel.value, "edge": mel.edge},
        "max_path_load": {"value": mpl.value, "vertex": mpl.vertex},
        "tail_max": {"value": tp.value, "k": tp.k},
        "center_of_mass": {"vertex": com.vertex, "delta": com.delta,
                           "part_sizes": sorted((len(com.part_a), len(com.part_b)))},
    }
    _dump(args, payload)
    return 0


def cmd_spectrum(args) -> int:
    tree = _resolve_tree(args)
    payload = {"schema": SCHEMA, "sites": tree.n}
    if tree.n <= spectral.dense_cap():
        res = spectral.spectrum(tree)
        payload.update(gap=res.gap, t_rel=res.t_rel, method="dense")
        if args.full:
            payload["eigenvalues"] = res.eigenvalues.tolist()
    else:
        gap = spectral.gap_iterative(tree, tol=args.tol)
        payload.update(gap=gap, t_rel=1.0 / gap, method="iterative")
    _dump(args, payload)
    return 0


def cmd_bounds(args) -> int:
    tree = _resolve_tree(args)
    cert = spectral.hardy_interval(tree)
    lower = spectral.hardy_lower(tree)
    payload = {
        "schema": SCHEMA, "sites": tree.n,
        "bounds": {
            "hardy_lower": lower.value,
            "cor24": spectral.bound_log_diameter(tree),
            "cor25": spectral.bound_summable_weights(tree, lambda k: k * k),
            "cor26": spectral.bound_path_load(tree),
            "tail32": spectral.bound_tail(tree),
            "hardy_interval": list(cert.interval),
        },
        "delta": cert.delta,
    }
    if tree.n <= spectral.dense_cap():
        res = spectral.spectrum(tree)
        payload.update(gap=res.gap, t_rel=res.t_rel, method="dense")
    else:
        gap = spectral.gap_iterative(tree)
        payload.update(gap=gap, t_rel=1.0 / gap, method="iterative")
    _dump(args, payload)
    return 0


def cmd_mix(args) -> int:
    tree = _resolve_tree(args)
    start: Optional[int] = None
    if args.start not in (None, "worst"):
        try:
            start = int(args.start)
        except ValueError:
            raise ValidationError(f"--start must be 'worst' or a vertex, got {args.start!r}") from None
    if args.curve:
        table = mixing.tv_curve(tree, args.curve, start=start)
        lines = ["t,tv"] + [f"{t:.12g},{v:.12g}" for t, v in table]
        _emit(args, "\n".join(lines) + "\n")
        return 0
    res = mixing.mixing_time(tree, args.eps, start=start, rtol=args.rtol)
    payload = {"schema": SCHEMA, "sites": tree.n, "eps": args.eps,
               "t_mix": res.t_mix, "worst_start": res.worst_start,
               "start": "worst" if start is None else start, "rtol": args.rtol}
    _dump(args, payload)
    return 0


def cmd_bdchain(args) -> int:
    degrees = _parse_int_list(args.degrees)
    chain = bd.project(degrees, args.n)
    spec = bd.bd_spectrum(chain)
    tree = generate.spherically_symmetric(chain.degrees)
    lift_res = bd.lift(tree, chain, spec.eigenfunction)
    payload = {
        "schema": SCHEMA, "size": chain.size, "half": chain.half,
        "stripped": chain.stripped,
        "rates": {"up": chain.up_rate.tolist(), "down": chain.down_rate.tolist()},
        "stationary": chain.stationary.tolist(),
        "gap": spec.gap,
        "cs_bound": bd.cs_lower_bound(chain, max(chain.degrees)),
        "lift_residual": lift_res.residual,
    }
    _dump(args, payload)
    return 0


def _row_dict(row: criteria.FamilyRow) -> dict:
    return {k: getattr(row, k) for k in
            ("n", "sites", "mode", "t_rel", "t_mix", "ratio", "t_rel_lower",
             "t_rel_upper", "t_mix_lower", "max_edge_load", "max_path_load",
             "tail_max", "max_degree", "delta")}


def _trend_dict(value) -> dict:
    if isinstance(value, criteria.Diagnostic):
        out = {"quotient": value.quotient, "verdict": value.verdict,
               "threshold": value.threshold, "values": list(value.values)}
        if value.fit is not None:
            out.update(slope=value.fit.slope, r2=value.fit.r2,
                       points=value.fit.points)
        return out
    return {"slope": value.slope, "r2": value.r2, "points": value.points}


def cmd_sweep(args) -> int:
    offspring = _parse_offspring(args.offspring) if args.offspring else None
    report = criteria.sweep(args.family, _parse_int_list(args.sizes),
                            epsilon=args.eps, seed=args.seed,
                            offspring=offspring, reps=args.reps,
                            jobs=args.jobs, threshold=args.threshold)
    if args.format == "csv":
        cols = ("n", "sites", "mode", "t_rel", "t_mix", "ratio", "t_rel_lower",
                "t_rel_upper", "t_mix_lower", "max_edge_load", "max_path_load",
                "tail_max", "max_degree", "delta")
        lines = [",".join(cols)]
        for row in report.rows:
            cells = []
            for c in cols:
                v = getattr(row, c)
                if v is None:
                    cells.append("")
                elif isinstance(v, float):
                    cells.append(f"{v:.12g}")
                else:
                    cells.append(str(v))
            lines.append(",".join(cells))
        _emit(args, "\n".join(lines) + "\n")
        return 0
    payload = {
        "schema": SCHEMA, "family": report.family, "eps": report.epsilon,
        "rows": [_row_dict(r) for r in report.rows],
        "trends": {k: _trend_dict(v) for k, v in report.trends.items()},
    }
    _emit(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecut",
        description="Mixing, relaxation, and cutoff diagnostics for random "
                    "walks on rooted trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a family member in canonical text form")
    _add_family_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    for name, func, extra in (
        ("metrics", cmd_metrics, ()),
        ("spectrum", cmd_spectrum, ("full", "tol")),
        ("bounds", cmd_bounds, ()),
    ):
        p = sub.add_parser(name, help=f"compute {name} for a tree")
        p.add_argument("tree", nargs="?", help="tree file in canonical text form")
        _add_family_flags(p)
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out")
        if "full" in extra:
            p.add_argument("--full", action="store_true",
                           help="include all eigenvalues")
        if "tol" in extra:
            p.add_argument("--tol", type=float, default=1e-10,
                           help="iterative solver tolerance")
        p.set_defaults(func=func)

    p = sub.add_parser("mix", help="epsilon-mixing time or TV curve")
    p.add_argument("tree", nargs="?")
    _add_family_flags(p)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--start", default=None, help="'worst' (default) or a vertex")
    p.add_argument("--curve", type=int, default=0, metavar="N",
                   help="emit an N-sample t,tv CSV instead of the mixing time")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("bdchain", help="project a spherically symmetric tree")
    p.add_argument("--degrees", required=True,
                   help="comma-separated degree per depth")
    p.add_argument("--n", type=int, required=True,
                   help="chain half-length (tree leaves sit at depth n-1)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bdchain)

    p = sub.add_parser("sweep", help="analyze a family across sizes")
    p.add_argument("--family", required=True, choices=sorted(criteria.FAMILIES))
    p.add_argument("--sizes", required=True, help="comma-separated sizes")
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--seed", type=int)
    p.add_argument("--offspring")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--threshold", type=float, default=criteria.SLOPE_THRESHOLD,
                   help="log-log slope threshold for verdicts")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
