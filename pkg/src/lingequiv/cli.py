"""Command-line surface: every pipeline stage as a subcommand.

Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.
Parallelism is capped by the EQUIV_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import digraph as dg
from . import matroid as mt
from .mixing import (
    CONFIDENCE_ALPHA,
    CONFIDENCE_EPS,
    DEFAULT_TOL,
    mixing as compute_mixing,
    read_mixing_csv,
    sample_data,
    sample_weights,
    scramble,
    write_mixing_csv,
)
from .census import census
from .equivalence import (
    EquivalenceClass,
    TraversalBudget,
    check_equivalent,
    presentation,
    traverse_class,
)
from .errors import BudgetExceededError, LingEquivError
from .ranks import duality_gap, edge_rank, min_vertex_cut, path_rank
from .recovery import RecoveryOptions, oracle_from_graph, recover, recover_from_mixing
from .reduction import is_irreducible, reduce


def _threads(requested: int | None) -> int:
    cap = os.environ.get("EQUIV_THREADS")
    cap = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(requested or cap, cap))


def _labels(arg: str, g: dg.Digraph) -> list[int]:
    if not arg:
        return []
    return [g.index_of(tok.strip()) for tok in arg.split(",") if tok.strip()]


def _read_matrix(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip().replace(",", " ")
            if line:
                rows.append([int(tok) for tok in line.split()])
    return np.array(rows, dtype=np.uint8)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def class_payload(ec: EquivalenceClass) -> dict:
    return {
        "members": [dg.to_json_dict(m) for m in ec.members],
        "transitions": [
            {"from_index": t.from_index, "to_index": t.to_index, "kind": t.kind}
            for t in ec.transitions
        ],
        "total": len(ec.members),
        "labeled_count": ec.labeled_count,
        "complete": ec.complete,
    }


def _budget(args) -> TraversalBudget:
    return TraversalBudget(
        max_members=args.budget_members,
        max_seconds=args.budget_seconds,
    )


def cmd_reduce(args) -> int:
    g = dg.load(args.infile)
    report = reduce(g)
    if args.format == "structured":
        _emit(json.dumps({
            "reduced": dg.to_json_dict(report.reduced),
            "removed_vertices": sorted(g.labels[v] for v in report.removed_vertices),
            "added_edges": sorted([g.labels[a], g.labels[b]] for a, b in report.added_edges),
            "mrl": sorted(sorted(g.labels[v] for v in m) for m in report.mrl),
        }, indent=2), args.out)
    else:
        _emit(dg.dumps(report.reduced).rstrip("\n"), args.out)
    return 0


def cmd_irreducible(args) -> int:
    g = dg.load(args.infile)
    verdict = is_irreducible(g)
    _emit(json.dumps({"irreducible": verdict}) if args.format == "structured"
          else ("irreducible" if verdict else "reducible"), args.out)
    return 0


def cmd_rank(args) -> int:
    g = dg.load(args.infile)
    z = _labels(args.z, g)
    y = _labels(args.y, g)
    if args.kind == "path":
        value = path_rank(g, z, y)
        if args.format == "structured":
            cut = sorted(g.labels[v] for v in min_vertex_cut(g, z, y))
            _emit(json.dumps({"path_rank": value, "min_cut": cut}), args.out)
            return 0
    elif args.kind == "edge":
        value = edge_rank(g, z, y)
    else:
        value = duality_gap(g, z, y)
    _emit(json.dumps({args.kind: value}) if args.format == "structured" else str(value),
          args.out)
    return 0


def cmd_equiv(args) -> int:
    g = dg.load(args.infile)
    if args.action == "check":
        if not args.infile_b:
            print("equiv check needs --in-b SECOND_GRAPH", file=sys.stderr)
            return 2
        h = dg.load(args.infile_b)
        same, witness = check_equivalent(g, h)
        if args.format == "structured":
            _emit(json.dumps({
                "equivalent": same,
                "witness": {h.labels[a]: g.labels[b] for a, b in witness.items()}
                if witness else None,
            }, indent=2), args.out)
        else:
            _emit("equivalent" if same else "not equivalent", args.out)
        return 0
    if args.action == "class":
        try:
            ec = traverse_class(g, budget=_budget(args),
                                with_transitions=not args.no_transitions)
        except BudgetExceededError as exc:
            ec = exc.partial
        payload = class_payload(ec)
        if args.format == "structured":
            _emit(json.dumps(payload, indent=2), args.out)
        else:
            lines = [f"{payload['total']} members"
                     f"{'' if payload['complete'] else ' (partial)'}"]
            lines += [dg.dumps(m).rstrip("\n") for m in ec.members]
            _emit("\n".join(lines), args.out)
        return 0
    p = presentation(g)
    if args.format == "structured":
        _emit(json.dumps({
            "base": dg.to_json_dict(p.base),
            "solid": sorted([g.labels[a], g.labels[b]] for a, b in p.solid_edges),
            "dashed": sorted([g.labels[a], g.labels[b]] for a, b in p.dashed_edges),
        }, indent=2), args.out)
    else:
        solid = ", ".join(f"{g.labels[a]}->{g.labels[b]}" for a, b in sorted(p.solid_edges))
        dashed = ", ".join(f"{g.labels[a]}->{g.labels[b]}" for a, b in sorted(p.dashed_edges))
        _emit(f"solid: {solid}\ndashed: {dashed}", args.out)
    return 0


def cmd_matroid(args) -> int:
    if args.action in ("families", "colaug") and not args.matrix:
        print(f"matroid {args.action} needs --matrix FILE", file=sys.stderr)
        return 2
    if args.action == "realize" and (args.ground is None or not args.bases):
        print("matroid realize needs --ground M --bases '0,1;0,2'", file=sys.stderr)
        return 2
    if args.action == "colaug" and args.col is None:
        print("matroid colaug needs --col INDEX", file=sys.stderr)
        return 2
    if args.action == "families":
        fam = mt.families(_read_matrix(args.matrix))
        _emit(json.dumps({
            "bases": sorted(sorted(b) for b in fam.bases),
            "circuits": sorted(sorted(c) for c in fam.circuits),
            "cocircuits": sorted(sorted(d) for d in fam.cocircuits),
            "coloops": sorted(fam.coloops),
            "flats": sorted(sorted(f) for f in fam.flats),
        }, indent=2), args.out)
        return 0
    if args.action == "realize":
        bases = [set(map(int, tok.split(","))) for tok in args.bases.split(";")]
        h = mt.realize_from_bases(args.ground, bases)
        _emit("\n".join(" ".join(str(v) for v in row) for row in h), args.out)
        return 0
    q = _read_matrix(args.matrix)
    sols = mt.colaug(q, args.col)
    _emit(json.dumps({
        "solutions": sorted(sorted(s) for s in sols),
        "maximal": sorted(mt.colaug_maximal(q, args.col)),
        "minimal": sorted(sorted(s) for s in mt.colaug_minimal(q, args.col)),
    }, indent=2), args.out)
    return 0


def cmd_recover(args) -> int:
    opts = RecoveryOptions(
        traverse=args.traverse,
        budget=_budget(args),
        with_transitions=not args.no_transitions,
    )
    if args.mixing:
        a = read_mixing_csv(args.mixing)
        opts.strict = False
        result = recover_from_mixing(a, args.latents, tol=args.tol,
                                     alpha=args.confidence_alpha,
                                     eps=args.confidence_eps, options=opts)
    elif args.oracle:
        g = dg.load(args.oracle)
        result = recover(oracle_from_graph(g), g.num_latent, opts)
    else:
        print("recover needs --mixing CSV --latents k, or --oracle GRAPH",
              file=sys.stderr)
        return 2
    out = {"seed": dg.to_json_dict(result.seed_graph),
           "diagnostics": list(result.diagnostics)}
    if result.equivalence_class is not None:
        out["class"] = class_payload(result.equivalence_class)
    if args.format == "structured":
        _emit(json.dumps(out, indent=2), args.out)
    else:
        _emit(dg.dumps(result.seed_graph).rstrip("\n"), args.out)
        for line in result.diagnostics:
            print(f"# {line}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    g = dg.load(args.graph)
    model = sample_weights(g, args.seed)
    if args.mixing_out:
        a = compute_mixing(model)
        if args.scramble_seed is not None:
            a = scramble(a, args.scramble_seed)
        write_mixing_csv(a, args.mixing_out)
    if args.out:
        data = sample_data(model, args.samples, args.seed + 1)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(",".join(g.labels[v] for v in sorted(g.observed)) + "\n")
            for row in data:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return 0


def cmd_census(args) -> int:
    row = census(args.n, args.l, parallelism=_threads(args.parallelism),
                 allow_n6=args.allow_n6)
    if args.format == "structured":
        _emit(json.dumps({
            "n": row.n, "num_latent": row.num_latent,
            "wc_digraphs": row.wc_digraphs,
            "irreducible_with_variants": row.irreducible_with_variants,
            "irreducible_unique": row.irreducible_unique,
            "class_count": row.class_count,
            "class_size_histogram": row.class_size_histogram,
            "class_size_histogram_unique": row.class_size_histogram_unique,
        }, indent=2), args.out)
    else:
        lines = [f"{row.wc_digraphs} {row.irreducible_with_variants} "
                 f"{row.irreducible_unique} {row.class_count}"]
        lines += [f"{size} {count}"
                  for size, count in sorted(row.class_size_histogram.items())]
        _emit("\n".join(lines), args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="lingequiv",
        description="Equivalence-class toolchain for latent-variable "
                    "linear non-Gaussian causal models.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, infile=True):
        if infile:
            p.add_argument("--in", dest="infile", required=True,
                           help="graph file (canonical JSON format)")
        p.add_argument("--out", default=None, help="write output to file")
        p.add_argument("--format", choices=["text", "structured"], default="text")

    def budgets(p):
        p.add_argument("--budget-members", type=int, default=10**6)
        p.add_argument("--budget-seconds", type=float, default=600.0)
        p.add_argument("--no-transitions", action="store_true")

    p = sub.add_parser("reduce", help="reduce a model to irreducible form")
    common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("irreducible", help="decide irreducibility")
    common(p)
    p.set_defaults(func=cmd_irreducible)

    p = sub.add_parser("rank", help="path/edge rank or duality gap")
    p.add_argument("kind", choices=["path", "edge", "duality"])
    common(p)
    p.add_argument("--z", required=True, help="comma-separated target labels")
    p.add_argument("--y", required=True, help="comma-separated source labels")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("equiv", help="equivalence check / class / presentation")
    p.add_argument("action", choices=["check", "class", "present"])
    common(p)
    p.add_argument("--in-b", dest="infile_b", help="second graph for check")
    budgets(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("matroid", help="families / realize / colaug")
    p.add_argument("action", choices=["families", "realize", "colaug"])
    p.add_argument("--matrix", help="binary matrix file (rows of 0/1)")
    p.add_argument("--ground", type=int, help="ground size for realize")
    p.add_argument("--bases", help="realize input, e.g. '0,1,2;0,2,3'")
    p.add_argument("--col", type=int, help="column index for colaug")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.set_defaults(func=cmd_matroid)

    p = sub.add_parser("recover", help="recover a class from a mixing matrix")
    p.add_argument("--mixing", help="mixing CSV")
    p.add_argument("--latents", type=int, default=0)
    p.add_argument("--oracle", help="graph file: run with its exact rank oracle")
    p.add_argument("--traverse", action="store_true",
                   help="also traverse the recovered class")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--confidence-alpha", type=float, default=CONFIDENCE_ALPHA)
    p.add_argument("--confidence-eps", type=float, default=CONFIDENCE_EPS)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    budgets(p)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("simulate", help="sample weights and data from a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", help="data CSV output")
    p.add_argument("--mixing-out", help="write the exact mixing matrix CSV")
    p.add_argument("--scramble-seed", type=int, default=None,
                   help="scramble the mixing before writing")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("census", help="exhaustive (n, l) census")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--parallelism", type=int, default=None)
    p.add_argument("--allow-n6", action="store_true",
                   help="permit the multi-hour n=6 batch")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("serve", help="run the local JSON API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.set_defaults(func=cmd_serve)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LingEquivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
