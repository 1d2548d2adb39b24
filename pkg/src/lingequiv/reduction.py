"""Irreducibility test and reduction to irreducible form.

A latent-variable model is irreducible when no model with fewer vertices
is distributionally equivalent; graphically, every nonempty latent subset
must have at least two children outside itself.  ``reduce`` rewrites an
arbitrary model into an equivalent irreducible one by dropping latents
with no effect on the observed set and contracting maximal redundant
latent groups onto their unique outside child.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .digraph import Digraph, bits


def _has_cycle(g: Digraph) -> bool:
    indeg = [len(g.parents(v)) for v in range(g.n)]
    queue = [v for v in range(g.n) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in bits(g.out_masks[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen < g.n


def _children_outside(g: Digraph, lset: tuple[int, ...]) -> int:
    mask = 0
    for v in lset:
        mask |= g.out_masks[v]
    for v in lset:
        mask &= ~(1 << v)
    return mask


def is_irreducible(g: Digraph, full: bool | None = None) -> bool:
    """True iff every nonempty latent subset has >= 2 children outside it.

    On acyclic graphs checking single latents suffices, so the subset sweep
    is skipped unless ``full`` forces it.
    """
    latents = sorted(g.latent)
    if not latents:
        return True
    if full is None:
        full = _has_cycle(g)
    sizes = range(1, len(latents) + 1) if full else (1,)
    for r in sizes:
        for lset in combinations(latents, r):
            if bin(_children_outside(g, lset)).count("1") < 2:
                return False
    return True


@dataclass(frozen=True)
class ReductionReport:
    reduced: Digraph
    removed_vertices: frozenset[int]   # indices in the input graph
    added_edges: frozenset[tuple[int, int]]  # indices in the input graph
    mrl: frozenset[frozenset[int]]


def reduce(g: Digraph, shuffle_seed: int | None = None) -> ReductionReport:
    """Reduce to an equivalent irreducible model.

    Step 1 copies the graph; step 2 drops vertices that are not ancestors
    of any observed vertex; step 3 finds the maximal redundant latent sets;
    step 4 rewires each set's outside parents onto its unique outside child
    and deletes the set.  Sets are processed in lexicographic order; the
    result is order-independent, and ``shuffle_seed`` randomizes the order
    so the suite can assert that.
    """
    ancestors_of_x = g.ancestors(g.observed)
    removed = set(range(g.n)) - ancestors_of_x
    keep = [v for v in range(g.n) if v not in removed]
    edges = {(a, b) for a, b in g.edges if a not in removed and b not in removed}

    def children_of(lset):
        return {b for a, b in edges if a in lset} - set(lset)

    def parents_of(lset):
        return {a for a, b in edges if b in lset} - set(lset)

    latents = [v for v in keep if v < g.num_latent]
    mrl: set[frozenset[int]] = set()
    for r in range(len(latents), 0, -1):
        for lset in combinations(latents, r):
            fs = frozenset(lset)
            if any(fs < m for m in mrl):
                continue
            if len(children_of(fs)) < 2:
                mrl.add(fs)

    order = sorted(mrl, key=sorted)
    if shuffle_seed is not None:
        import random

        random.Random(shuffle_seed).shuffle(order)
    added: set[tuple[int, int]] = set()
    for lset in order:
        outside_children = children_of(lset)
        # zero outside children cannot happen: such a set was removed in step 2
        (c,) = outside_children
        for p in parents_of(lset) - {c}:
            if (p, c) not in edges:
                edges.add((p, c))
                added.add((p, c))
        edges = {(a, b) for a, b in edges if a not in lset and b not in lset}
        removed |= set(lset)

    label = {v: g.labels[v] for v in range(g.n)}
    kept = [v for v in range(g.n) if v not in removed]
    reduced = Digraph.build(
        [label[v] for v in kept if v < g.num_latent],
        [label[v] for v in kept if v >= g.num_latent],
        [(label[a], label[b]) for a, b in edges],
    )
    return ReductionReport(
        reduced=reduced,
        removed_vertices=frozenset(removed),
        added_edges=frozenset(added),
        mrl=frozenset(mrl),
    )
