"""Path ranks, edge ranks, matching ranks, and the duality bridge.

Path rank rho(Z, Y): maximum number of vertex-disjoint directed paths from
Y to Z (a vertex in both counts as a length-0 path); computed as a
unit-vertex-capacity max-flow, equal by Menger to the minimum vertex cut.

Edge rank r(Z, Y): maximum bipartite matching from Y to Z via direct edges,
with self-matches allowed for vertices in both sets; equals the matching
rank of the corresponding support submatrix.

The two are linked by the duality
    min(|Z|,|Y|) - rho(Z,Y) = |V| - max(|Z|,|Y|) - r(V\\Y, V\\Z),
exposed here as ``duality_gap`` (identically zero).
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

from .digraph import Digraph, bits


class RankQuery(NamedTuple):
    targets: frozenset[int]  # Z
    sources: frozenset[int]  # Y


# -- bipartite matching on bitmask adjacency --------------------------------


def max_bipartite_matching(adj: Sequence[int]) -> tuple[int, dict[int, int]]:
    """Kuhn's algorithm; adj[i] is a bitmask of right vertices open to left i.

    Returns (matching size, right->left assignment).
    """
    owner: dict[int, int] = {}

    def augment(i: int, seen: list[int]) -> bool:
        avail = adj[i] & ~seen[0]
        seen[0] |= avail
        for r in bits(avail):
            if r not in owner or augment(owner[r], seen):
                owner[r] = i
                return True
        return False

    size = 0
    for i in range(len(adj)):
        if adj[i] and augment(i, [0]):
            size += 1
    return size, owner


def mrank_from_rows(row_masks: Sequence[int]) -> int:
    return max_bipartite_matching(row_masks)[0]


def matching_rank(matrix) -> int:
    """Maximum number of nonzeros placeable on the diagonal by permuting
    columns of a binary (or real, nonzero-pattern) matrix."""
    rows = [sum(1 << j for j, v in enumerate(row) if v) for row in matrix]
    return mrank_from_rows(rows)


def edge_rank(g: Digraph, z: Iterable[int], y: Iterable[int]) -> int:
    """r_G(Z, Y): matching from sources Y into targets Z via edges,
    self-matches allowed on Y & Z."""
    zs = sorted(set(z))
    ys = set(y)
    for v in zs:
        g.check_vertex(v)
    for v in ys:
        g.check_vertex(v)
    pos = {v: k for k, v in enumerate(zs)}
    adj = []
    for s in ys:
        mask = 0
        targets = g.out_masks[s] | (1 << s)
        for t in zs:
            if targets >> t & 1:
                mask |= 1 << pos[t]
        adj.append(mask)
    return max_bipartite_matching(adj)[0]


# -- max-flow with vertex splitting -----------------------------------------


class _Dinic:
    def __init__(self, num_nodes: int):
        self.graph: list[list[list[int]]] = [[] for _ in range(num_nodes)]

    def add_edge(self, u: int, v: int, cap: int) -> None:
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * len(self.graph)
        self.level[s] = 0
        queue = [s]
        for u in queue:
            for v, cap, _ in self.graph[u]:
                if cap > 0 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    queue.append(v)
        return self.level[t] >= 0

    def _dfs(self, u: int, t: int, f: int) -> int:
        if u == t:
            return f
        while self.it[u] < len(self.graph[u]):
            edge = self.graph[u][self.it[u]]
            v, cap, rev = edge
            if cap > 0 and self.level[v] == self.level[u] + 1:
                d = self._dfs(v, t, min(f, cap))
                if d > 0:
                    edge[1] -= d
                    self.graph[v][rev][1] += d
                    return d
            self.it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while self._bfs(s, t):
            self.it = [0] * len(self.graph)
            while True:
                f = self._dfs(s, t, 1 << 30)
                if f == 0:
                    break
                flow += f
        return flow

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, cap, _ in self.graph[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def _flow_network(g: Digraph, z: set[int], y: set[int]) -> _Dinic:
    # in-node v, out-node n+v; only split arcs carry finite capacity so the
    # min cut consists purely of vertices.
    n = g.n
    big = n + 1
    net = _Dinic(2 * n + 2)
    src, snk = 2 * n, 2 * n + 1
    for v in range(n):
        net.add_edge(v, n + v, 1)
    for tail, head in g.edges:
        net.add_edge(n + tail, head, big)
    for v in y:
        net.add_edge(src, v, big)
    for v in z:
        net.add_edge(n + v, snk, big)
    return net


def path_rank(g: Digraph, z: Iterable[int], y: Iterable[int]) -> int:
    """rho_G(Z, Y): maximum vertex-disjoint directed paths from Y to Z."""
    zs, ys = set(z), set(y)
    for v in zs | ys:
        g.check_vertex(v)
    net = _flow_network(g, zs, ys)
    return net.max_flow(2 * g.n, 2 * g.n + 1)


def min_vertex_cut(g: Digraph, z: Iterable[int], y: Iterable[int]) -> set[int]:
    """A witness vertex cut of size path_rank(g, Z, Y): removing it leaves
    no directed path from Y minus the cut to Z minus the cut."""
    zs, ys = set(z), set(y)
    for v in zs | ys:
        g.check_vertex(v)
    net = _flow_network(g, zs, ys)
    net.max_flow(2 * g.n, 2 * g.n + 1)
    reach = net.reachable(2 * g.n)
    return {v for v in range(g.n) if v in reach and g.n + v not in reach}


def duality_gap(g: Digraph, z: Iterable[int], y: Iterable[int]) -> int:
    """Always 0; exposed so the identity can be checked wholesale."""
    zs, ys = set(z), set(y)
    n = g.n
    rho = path_rank(g, zs, ys)
    all_v = set(range(n))
    r_dual = edge_rank(g, all_v - ys, all_v - zs)
    return min(len(zs), len(ys)) - rho - (n - max(len(zs), len(ys)) - r_dual)


# -- brute-force oracles (used by the test-suite) ----------------------------


def path_rank_bruteforce(g: Digraph, z: Iterable[int], y: Iterable[int]) -> int:
    """Exhaustive search over families of vertex-disjoint Y-to-Z paths."""
    zs, ys = set(z), set(y)
    paths: list[int] = []  # vertex masks

    def extend(v: int, mask: int):
        if v in zs:
            paths.append(mask)
        for w in bits(g.out_masks[v]):
            if not mask >> w & 1:
                extend(w, mask | 1 << w)

    for s in ys:
        extend(s, 1 << s)

    best = 0

    def choose(i: int, used: int, count: int):
        nonlocal best
        best = max(best, count)
        if count + len(paths) - i <= best:
            return
        for j in range(i, len(paths)):
            if not paths[j] & used:
                choose(j + 1, used | paths[j], count + 1)

    choose(0, 0, 0)
    return best
