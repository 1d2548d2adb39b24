"""Latent-variable digraphs: representation, serialization, elementary relations.

A digraph here is a directed graph without self-loops whose vertex set is
partitioned into latent and observed vertices.  Vertices are indexed
0..n-1 with latents first, then observed, each group in natural label
order; all matrices produced by this package follow that ordering, which
keeps the latent/observed column blocks of support matrices stable.

Adjacency is stored as one bitmask per vertex (n <= 64 in practice), so
edge tests and subset operations are single integer operations.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import GraphFormatError, InvalidCycleError, InvalidVertexError


class VertexId(NamedTuple):
    index: int
    label: str


def natural_key(label: str):
    """Sort key treating digit runs numerically, so L2 < L10."""
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", label) if t)


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Digraph:
    """Immutable digraph with latents at indices 0..num_latent-1."""

    labels: tuple[str, ...]
    num_latent: int
    edges: frozenset[tuple[int, int]]
    out_masks: tuple[int, ...] = field(default=(), compare=False)
    in_masks: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise GraphFormatError("vertex labels must be unique")
        if not 0 <= self.num_latent <= n:
            raise GraphFormatError("latent count out of range")
        out = [0] * n
        inn = [0] * n
        for tail, head in self.edges:
            if not (0 <= tail < n and 0 <= head < n):
                raise InvalidVertexError(f"edge ({tail},{head}) out of range")
            if tail == head:
                raise InvalidVertexError(f"self-loop at vertex {tail}")
            out[tail] |= 1 << head
            inn[head] |= 1 << tail
        object.__setattr__(self, "out_masks", tuple(out))
        object.__setattr__(self, "in_masks", tuple(inn))

    # -- construction ------------------------------------------------------

    @staticmethod
    def build(latent: Iterable[str], observed: Iterable[str],
              edges: Iterable[tuple[str, str]]) -> "Digraph":
        """Build from label lists; reorders vertices canonically."""
        lat = sorted(set(latent), key=natural_key)
        obs = sorted(set(observed), key=natural_key)
        if set(lat) & set(obs):
            raise GraphFormatError("latent and observed labels overlap")
        labels = tuple(lat + obs)
        index = {lab: i for i, lab in enumerate(labels)}
        try:
            edge_idx = frozenset((index[a], index[b]) for a, b in edges)
        except KeyError as exc:
            raise InvalidVertexError(f"unknown vertex label {exc.args[0]!r}") from exc
        return Digraph(labels, len(lat), edge_idx)

    @staticmethod
    def from_config(config: int, n: int, num_latent: int,
                    labels: Sequence[str] | None = None) -> "Digraph":
        """Decode an integer edge-bit encoding (bit i*n+j <=> edge i->j)."""
        if labels is None:
            labels = default_labels(n, num_latent)
        edges = frozenset((p // n, p % n) for p in bits(config))
        return Digraph(tuple(labels), num_latent, edges)

    # -- elementary queries ------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def latent(self) -> frozenset[int]:
        return frozenset(range(self.num_latent))

    @property
    def observed(self) -> frozenset[int]:
        return frozenset(range(self.num_latent, self.n))

    @property
    def vertex_ids(self) -> tuple[VertexId, ...]:
        return tuple(VertexId(i, lab) for i, lab in enumerate(self.labels))

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidVertexError(f"unknown vertex label {label!r}") from None

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InvalidVertexError(f"vertex {v} not in graph of size {self.n}")

    def has_edge(self, tail: int, head: int) -> bool:
        return bool(self.out_masks[tail] >> head & 1)

    def parents(self, v: int) -> set[int]:
        self.check_vertex(v)
        return set(bits(self.in_masks[v]))

    def children(self, v: int) -> set[int]:
        self.check_vertex(v)
        return set(bits(self.out_masks[v]))

    def ancestors(self, seeds: Iterable[int]) -> set[int]:
        """Reflexive-transitive closure over reversed edges (includes seeds)."""
        mask = 0
        for v in seeds:
            self.check_vertex(v)
            mask |= 1 << v
        while True:
            grown = mask
            for v in bits(mask):
                grown |= self.in_masks[v]
            if grown == mask:
                return set(bits(mask))
            mask = grown

    def descendants(self, seeds: Iterable[int]) -> set[int]:
        mask = 0
        for v in seeds:
            self.check_vertex(v)
            mask |= 1 << v
        while True:
            grown = mask
            for v in bits(mask):
                grown |= self.out_masks[v]
            if grown == mask:
                return set(bits(mask))
            mask = grown

    def is_weakly_connected(self) -> bool:
        if self.n == 0:
            return True
        und = [self.out_masks[i] | self.in_masks[i] for i in range(self.n)]
        mask = 1
        while True:
            grown = mask
            for v in bits(mask):
                grown |= und[v]
            if grown == mask:
                break
            mask = grown
        return mask == (1 << self.n) - 1

    # -- support matrix ----------------------------------------------------

    def support_columns(self) -> tuple[int, ...]:
        """Column v of the support matrix as a row-index bitmask:
        children(v) plus the forced diagonal entry v."""
        return tuple(self.out_masks[v] | (1 << v) for v in range(self.n))

    def support_rows(self) -> tuple[int, ...]:
        """Row v of the support matrix as a column-index bitmask:
        parents(v) plus the diagonal entry v."""
        return tuple(self.in_masks[v] | (1 << v) for v in range(self.n))

    def to_config(self) -> int:
        config = 0
        for tail, head in self.edges:
            config |= 1 << (tail * self.n + head)
        return config

    # -- transformations ----------------------------------------------------

    def with_edges(self, edges: Iterable[tuple[int, int]]) -> "Digraph":
        return Digraph(self.labels, self.num_latent, frozenset(edges))

    def add_edge(self, tail: int, head: int) -> "Digraph":
        return self.with_edges(self.edges | {(tail, head)})

    def remove_edge(self, tail: int, head: int) -> "Digraph":
        return self.with_edges(self.edges - {(tail, head)})

    def relabel_latents(self, perm: dict[int, int]) -> "Digraph":
        """Permute latent indices; observed vertices keep their identity."""
        lat = set(range(self.num_latent))
        if set(perm) != lat or set(perm.values()) != lat:
            raise InvalidVertexError("permutation must biject the latent set")
        full = {**{i: i for i in range(self.n)}, **perm}
        return self.with_edges((full[a], full[b]) for a, b in self.edges)

    def __repr__(self):
        es = ", ".join(f"{self.labels[a]}->{self.labels[b]}"
                       for a, b in sorted(self.edges))
        return f"Digraph({self.n} vertices, L={sorted(self.latent)}, [{es}])"


def default_labels(n: int, num_latent: int) -> tuple[str, ...]:
    return tuple([f"L{i + 1}" for i in range(num_latent)]
                 + [f"X{i + 1}" for i in range(n - num_latent)])


@dataclass(frozen=True)
class SupportMatrix:
    """Binary support matrix of a digraph: nonzero diagonal plus, at
    (j, i), the edge i->j."""

    entries: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def nonzero_count(self) -> int:
        return int(self.entries.sum())


def support_matrix(g: Digraph) -> SupportMatrix:
    n = g.n
    m = np.zeros((n, n), dtype=np.uint8)
    for v, col in enumerate(g.support_columns()):
        for r in bits(col):
            m[r, v] = 1
    return SupportMatrix(m, g.labels)


# -- cycles ---------------------------------------------------------------


def simple_cycles(g: Digraph) -> list[tuple[int, ...]]:
    """All simple directed cycles, each rotated to start at its minimum vertex."""
    found = set()
    n = g.n

    def dfs(start: int, v: int, path: list[int], on_path: int):
        for w in bits(g.out_masks[v]):
            if w == start and len(path) >= 2:
                found.add(tuple(path))
            elif w > start and not on_path >> w & 1:
                path.append(w)
                dfs(start, w, path, on_path | 1 << w)
                path.pop()

    for s in range(n):
        dfs(s, s, [s], 1 << s)
    return sorted(found)


def enumerate_disjoint_cycle_sets(g: Digraph) -> Iterator[frozenset[tuple[int, ...]]]:
    """Yield every collection (including the empty one) of pairwise
    vertex-disjoint simple cycles of g, each exactly once."""
    cycles = simple_cycles(g)
    masks = [sum(1 << v for v in c) for c in cycles]

    def rec(i: int, used: int, chosen: list[tuple[int, ...]]):
        yield frozenset(chosen)
        for j in range(i, len(cycles)):
            if not masks[j] & used:
                chosen.append(cycles[j])
                yield from rec(j + 1, used | masks[j], chosen)
                chosen.pop()

    yield from rec(0, 0, [])


def cycle_reversal(g: Digraph, cycles: Iterable[Sequence[int]]) -> Digraph:
    """Reverse a collection of vertex-disjoint simple cycles.

    Three-case rewiring: on-cycle edges are reversed; an edge into a cycle
    vertex is redirected to that vertex's on-cycle predecessor; all other
    edges are copied.  Always equivalence-preserving.
    """
    cyc = [tuple(c) for c in cycles]
    seen: set[int] = set()
    pred: dict[int, int] = {}
    cycle_edges: set[tuple[int, int]] = set()
    for c in cyc:
        if len(c) < 2 or len(set(c)) != len(c):
            raise InvalidCycleError(f"not a simple cycle: {c}")
        if seen & set(c):
            raise InvalidCycleError("cycles are not vertex-disjoint")
        seen |= set(c)
        for k, v in enumerate(c):
            u = c[k - 1]
            if not g.has_edge(u, v):
                raise InvalidCycleError(f"cycle edge {u}->{v} not present")
            pred[v] = u
            cycle_edges.add((u, v))
    new_edges = set()
    for i, j in g.edges:
        if (i, j) in cycle_edges:
            new_edges.add((j, i))
        elif j in pred:
            new_edges.add((i, pred[j]))
        else:
            new_edges.add((i, j))
    return g.with_edges(new_edges)


# -- serialization ---------------------------------------------------------


def to_json_dict(g: Digraph) -> dict:
    return {
        "vertices": list(g.labels),
        "latent": list(g.labels[: g.num_latent]),
        "edges": sorted([g.labels[a], g.labels[b]] for a, b in g.edges),
    }


def dumps(g: Digraph) -> str:
    """Canonical text form; byte-stable under round-trip."""
    return json.dumps(to_json_dict(g), indent=2) + "\n"


def from_json_dict(data: dict) -> Digraph:
    try:
        vertices = data["vertices"]
        latent = data["latent"]
        edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"missing graph field: {exc}") from exc
    if not set(latent) <= set(vertices):
        raise GraphFormatError("latent labels not a subset of vertices")
    observed = [v for v in vertices if v not in set(latent)]
    for e in edges:
        if len(e) != 2:
            raise GraphFormatError(f"bad edge entry: {e!r}")
    return Digraph.build(latent, observed, [(a, b) for a, b in edges])


def loads(text: str) -> Digraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(
            f"invalid graph file at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return from_json_dict(data)


def load(path) -> Digraph:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dump(g: Digraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(g))
