"""Local JSON API: one POST endpoint per pipeline stage.

Every endpoint is a pure function of its request (stateless service); the
envelope mirrors the library results byte-for-byte after canonical
serialization.  Domain failures come back as ``ok: false`` with a
structured error, never as a dead process.  A client-supplied revision
token (params.revision) is echoed in every response so stale answers can
be discarded by the UI.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI
from pydantic import BaseModel

from . import digraph as dg
from .cli import class_payload
from .equivalence import (
    TraversalBudget,
    can_add_edge,
    can_delete_edge,
    check_equivalent,
    presentation,
    traverse_class,
)
from .errors import BudgetExceededError, LingEquivError
from .mixing import CONFIDENCE_ALPHA, CONFIDENCE_EPS, DEFAULT_TOL, MixingMatrix
from .ranks import duality_gap, edge_rank, min_vertex_cut, path_rank
from .recovery import RecoveryOptions, oracle_from_graph, recover, recover_from_mixing
from .reduction import is_irreducible, reduce


class ApiRequest(BaseModel):
    command: Optional[str] = None
    graph: Optional[dict] = None
    graph_b: Optional[dict] = None
    matrix_ref: Optional[dict] = None
    params: dict = {}


def _envelope(payload: Any = None, diagnostics: Optional[list[str]] = None,
              error: Optional[str] = None, revision: Any = None) -> dict:
    return {
        "ok": error is None,
        "payload": payload,
        "diagnostics": diagnostics or [],
        "error": error,
        "revision": revision,
    }


def _graph(req: ApiRequest, which: str = "graph") -> dg.Digraph:
    data = getattr(req, which)
    if data is None:
        raise LingEquivError(f"request is missing the '{which}' field")
    return dg.from_json_dict(data)


def _budget(params: dict) -> TraversalBudget:
    return TraversalBudget(
        max_members=int(params.get("budget_members", 10**6)),
        max_seconds=float(params.get("budget_seconds", 600.0)),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="lingequiv", docs_url=None, redoc_url=None)

    from fastapi.middleware.cors import CORSMiddleware

    # the explorer is a static page served from anywhere local
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])

    def run(req: ApiRequest, fn) -> dict:
        revision = req.params.get("revision")
        try:
            payload, diagnostics = fn(req)
            return _envelope(payload, diagnostics, revision=revision)
        except LingEquivError as exc:
            return _envelope(error=str(exc), revision=revision)

    @app.post("/reduce")
    def reduce_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            g = _graph(req)
            report = reduce(g)
            return {
                "graph": dg.to_json_dict(report.reduced),
                "removed_vertices": sorted(g.labels[v] for v in report.removed_vertices),
                "added_edges": sorted(
                    [g.labels[a], g.labels[b]] for a, b in report.added_edges),
                "was_irreducible": not report.removed_vertices and not report.added_edges,
            }, []
        return run(req, fn)

    @app.post("/irreducible")
    def irreducible_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            g = _graph(req)
            return {"irreducible": is_irreducible(g)}, []
        return run(req, fn)

    @app.post("/rank")
    def rank_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            g = _graph(req)
            z = [g.index_of(lbl) for lbl in req.params.get("z", [])]
            y = [g.index_of(lbl) for lbl in req.params.get("y", [])]
            kind = req.params.get("kind", "path")
            if kind == "path":
                payload = {
                    "value": path_rank(g, z, y),
                    "min_cut": sorted(g.labels[v] for v in min_vertex_cut(g, z, y)),
                }
            elif kind == "edge":
                payload = {"value": edge_rank(g, z, y)}
            elif kind == "duality":
                payload = {"value": duality_gap(g, z, y)}
            else:
                raise LingEquivError(f"unknown rank kind {kind!r}")
            return payload, []
        return run(req, fn)

    @app.post("/equiv/check")
    def equiv_check_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            g = _graph(req)
            h = _graph(req, "graph_b")
            same, witness = check_equivalent(g, h)
            return {
                "equivalent": same,
                "witness": {h.labels[a]: g.labels[b] for a, b in witness.items()}
                if witness else None,
            }, []
        return run(req, fn)

    @app.post("/equiv/class")
    def equiv_class_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            g = _graph(req)
            offset = int(req.params.get("offset", 0))
            limit = int(req.params.get("limit", 24))
            with_transitions = bool(req.params.get("with_transitions", True))
            diagnostics = []
            try:
                ec = traverse_class(g, budget=_budget(req.params),
                                    with_transitions=with_transitions)
            except BudgetExceededError as exc:
                ec = exc.partial
                diagnostics.append("budget exceeded: partial class")
            payload = class_payload(ec)
            payload["offset"] = offset
            payload["limit"] = limit
            payload["members"] = payload["members"][offset:offset + limit]
            diagnostics.append(f"members_found={payload['total']}")
            return payload, diagnostics
        return run(req, fn)

    @app.post("/edge/admissible")
    def edge_admissible_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            g = _graph(req)
            absent, present = [], []
            for tail in range(g.n):
                for head in range(g.n):
                    if tail == head:
                        continue
                    if g.has_edge(tail, head):
                        present.append({
                            "tail": g.labels[tail], "head": g.labels[head],
                            "deletable": can_delete_edge(g, tail, head),
                        })
                    else:
                        absent.append({
                            "tail": g.labels[tail], "head": g.labels[head],
                            "addable": can_add_edge(g, tail, head),
                        })
            return {"absent": absent, "present": present}, []
        return run(req, fn)

    @app.post("/present")
    def present_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            g = _graph(req)
            p = presentation(g)
            return {
                "base": dg.to_json_dict(p.base),
                "solid": sorted([g.labels[a], g.labels[b]] for a, b in p.solid_edges),
                "dashed": sorted([g.labels[a], g.labels[b]] for a, b in p.dashed_edges),
            }, []
        return run(req, fn)

    @app.post("/recover")
    def recover_endpoint(req: ApiRequest) -> dict:
        def fn(req):
            params = req.params
            opts = RecoveryOptions(
                traverse=bool(params.get("traverse", False)),
                budget=_budget(params),
                with_transitions=bool(params.get("with_transitions", True)),
            )
            if req.graph is not None:
                g = _graph(req)
                result = recover(oracle_from_graph(g), g.num_latent, opts)
            else:
                matrix = params.get("matrix")
                if matrix is None:
                    raise LingEquivError("recover needs 'graph' or params.matrix")
                a = MixingMatrix(
                    values=matrix,
                    row_labels=tuple(params.get("row_labels", [])),
                    col_labels=tuple(params["col_labels"])
                    if params.get("col_labels") else None,
                )
                opts.strict = False
                result = recover_from_mixing(
                    a, int(params.get("latents", 0)),
                    tol=float(params.get("tol", DEFAULT_TOL)),
                    alpha=float(params.get("confidence_alpha", CONFIDENCE_ALPHA)),
                    eps=float(params.get("confidence_eps", CONFIDENCE_EPS)),
                    options=opts)
            payload = {"seed": dg.to_json_dict(result.seed_graph)}
            if result.equivalence_class is not None:
                payload["class"] = class_payload(result.equivalence_class)
            return payload, list(result.diagnostics)
        return run(req, fn)

    return app
