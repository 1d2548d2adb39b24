"""Distributional equivalence: decision, class traversal, presentation.

The decision criterion compares, under some vertex permutation, the
children-bases families of the latent set and of every latent-plus-single-
observed set.  The traversal exploits the support-matrix view: class
members are exactly the matrices assembled from (a) any single-entry-flip
reachable realization of the latent columns, (b) per observed column, any
member of its column-augmentation solution space, re-read as digraphs
through every row permutation that puts the diagonal on nonzeros, and
finally closed under latent relabeling.  Observed columns decompose
independently; latent columns must be walked jointly.

The presentation is the unique maximal member of the seed's cycle-reversal
configuration with its always-present edges marked solid.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Iterable, NamedTuple, Optional

from .digraph import Digraph, bits, cycle_reversal, enumerate_disjoint_cycle_sets
from .errors import BudgetExceededError, InvalidVertexError, LingEquivError
from .ranks import edge_rank, max_bipartite_matching
from .reduction import is_irreducible

# -- children bases and the equivalence check --------------------------------


@dataclass(frozen=True)
class ChildrenBases:
    sources: frozenset[int]
    family: frozenset[frozenset[int]]


def children_bases(g: Digraph, sources: Iterable[int]) -> ChildrenBases:
    """Vertex sets admitting a perfect edge matching from the sources:
    the bases of the transversal matroid presented by the source columns
    of the support matrix."""
    y = sorted(set(sources))
    for v in y:
        g.check_vertex(v)
    if not y:
        return ChildrenBases(frozenset(), frozenset({frozenset()}))
    cols = [g.out_masks[v] | (1 << v) for v in y]
    candidates = 0
    for c in cols:
        candidates |= c
    cand = sorted(bits(candidates))
    k = len(y)
    fam = set()
    for z in combinations(cand, k):
        zmask = sum(1 << v for v in z)
        size, _ = max_bipartite_matching([c & zmask for c in cols])
        if size == k:
            fam.add(frozenset(z))
    return ChildrenBases(frozenset(y), frozenset(fam))


def _bases_families(g: Digraph) -> list[frozenset[frozenset[int]]]:
    lat = sorted(g.latent)
    fams = [children_bases(g, lat).family]
    for x in sorted(g.observed):
        fams.append(children_bases(g, lat + [x]).family)
    return fams


def match_families(fams_g, fams_h, n: int) -> Optional[dict[int, int]]:
    """Search for a vertex permutation pi with pi(fams_h[k]) == fams_g[k]
    for every family; candidates are pruned by per-vertex membership
    signatures across the families."""
    if [len(f) for f in fams_g] != [len(f) for f in fams_h]:
        return None

    def signature(fams, v):
        return tuple(sum(1 for b in fam if v in b) for fam in fams)

    sig_g: dict[tuple, list[int]] = {}
    for w in range(n):
        sig_g.setdefault(signature(fams_g, w), []).append(w)
    candidates = []
    for v in range(n):
        cand = sig_g.get(signature(fams_h, v))
        if not cand:
            return None
        candidates.append(cand)

    order = sorted(range(n), key=lambda v: len(candidates[v]))
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def verify(pi: dict[int, int]) -> bool:
        for fam_h, fam_g in zip(fams_h, fams_g):
            if {frozenset(pi[e] for e in b) for b in fam_h} != fam_g:
                return False
        return True

    def backtrack(k: int) -> bool:
        if k == n:
            return verify(assignment)
        v = order[k]
        for w in candidates[v]:
            if w not in used:
                assignment[v] = w
                used.add(w)
                if backtrack(k + 1):
                    return True
                used.discard(w)
                del assignment[v]
        return False

    if backtrack(0):
        return dict(assignment)
    return None


def families_signature(fams) -> tuple:
    """Permutation-invariant fingerprint of a bases-family list."""
    out = []
    for fam in fams:
        counts = sorted(
            sum(1 for b in fam if v in b)
            for v in {e for b in fam for e in b} | set()
        )
        out.append((len(fam), tuple(counts)))
    return tuple(out)


def check_equivalent(g: Digraph, h: Digraph) -> tuple[bool, Optional[dict[int, int]]]:
    """Decide distributional equivalence of two irreducible models on the
    same observed label set; returns a witness vertex permutation
    (h-index -> g-index) when equivalent."""
    if not is_irreducible(g) or not is_irreducible(h):
        raise LingEquivError("check_equivalent needs irreducible inputs; reduce first")
    if set(g.labels[g.num_latent:]) != set(h.labels[h.num_latent:]):
        raise LingEquivError("models must share the same observed label set")
    if g.n != h.n or g.num_latent != h.num_latent:
        return False, None
    pi = match_families(_bases_families(g), _bases_families(h), g.n)
    return (True, pi) if pi is not None else (False, None)


# -- admissible single-edge edits ---------------------------------------------


def can_add_edge(g: Digraph, tail: int, head: int) -> bool:
    """Adding tail->head preserves equivalence iff the head is a coloop of
    the tail's non-children in the matroid of the other latent columns."""
    g.check_vertex(tail)
    g.check_vertex(head)
    if tail == head:
        raise InvalidVertexError("self-loops are not allowed")
    if g.has_edge(tail, head):
        raise InvalidVertexError(f"edge {tail}->{head} already present")
    nonch = set(range(g.n)) - g.children(tail) - {tail}
    y = g.latent - {tail}
    return edge_rank(g, nonch - {head}, y) < edge_rank(g, nonch, y)


def can_delete_edge(g: Digraph, tail: int, head: int) -> bool:
    """An edge can be deleted iff it could be re-added afterwards."""
    if not g.has_edge(tail, head):
        raise InvalidVertexError(f"edge {tail}->{head} not present")
    return can_add_edge(g.remove_edge(tail, head), tail, head)


# -- config-level machinery ----------------------------------------------------


def support_cols_of_config(config: int, n: int) -> tuple[int, ...]:
    cols = [1 << v for v in range(n)]
    for p in bits(config):
        cols[p // n] |= 1 << (p % n)
    return tuple(cols)


def config_of_digraph(g: Digraph) -> int:
    return g.to_config()


def latent_bit_maps(n: int, num_latent: int) -> list[list[int]]:
    """Bit-position remappings of edge configs for every non-identity
    latent permutation."""
    maps = []
    for perm in permutations(range(num_latent)):
        if perm == tuple(range(num_latent)):
            continue
        full = list(perm) + list(range(num_latent, n))
        maps.append([full[i] * n + full[j] for i in range(n) for j in range(n)])
    return maps


def canonical_config(config: int, bit_maps: list[list[int]]) -> int:
    best = config
    for mp in bit_maps:
        mapped = 0
        for p in bits(config):
            mapped |= 1 << mp[p]
        if mapped < best:
            best = mapped
    return best


def config_orbit(config: int, bit_maps: list[list[int]]) -> set[int]:
    orbit = {config}
    for mp in bit_maps:
        mapped = 0
        for p in bits(config):
            mapped |= 1 << mp[p]
        orbit.add(mapped)
    return orbit


class _RankCache:
    """Matching ranks of row subsets against a fixed column tuple."""

    def __init__(self, cols: tuple[int, ...]):
        self.cols = cols
        self.cache: dict[int, int] = {0: 0}

    def rank(self, rows_mask: int) -> int:
        r = self.cache.get(rows_mask)
        if r is None:
            r, _ = max_bipartite_matching([c & rows_mask for c in self.cols])
            self.cache[rows_mask] = r
        return r


@dataclass
class TraversalBudget:
    max_members: int = 10**6
    max_seconds: float = 600.0


class _Deadline:
    def __init__(self, budget: TraversalBudget):
        self.t_end = time.monotonic() + budget.max_seconds
        self.max_members = budget.max_members

    def check(self, count: int) -> None:
        if count > self.max_members or time.monotonic() > self.t_end:
            raise _BudgetStop()


class _BudgetStop(Exception):
    pass


def _column_solutions(col: int, rank_l, full: int, deadline: _Deadline) -> set[int]:
    """All replacements of one observed column preserving the matroid
    tower: grow to the maximal solution, then walk removals."""
    union = col
    for i in bits(full & ~col):
        if rank_l.rank((full & ~col) & ~(1 << i)) < rank_l.rank(full & ~col):
            union |= 1 << i
    seen = {union}
    stack = [union]
    while stack:
        cur = stack.pop()
        comp = full & ~cur
        r0 = rank_l.rank(comp)
        for i in bits(cur):
            if rank_l.rank(comp | (1 << i)) > r0:
                nxt = cur & ~(1 << i)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        deadline.check(len(seen))
    return seen


def _latent_states(l_cols: tuple[int, ...], full: int, deadline: _Deadline,
                   off_diagonal_only: bool = False) -> set[tuple[int, ...]]:
    """All single-entry-flip reachable realizations of the latent columns
    (flip admissibility is judged within the latent block only; the rest of
    the tower follows because observed columns are untouched)."""
    l = len(l_cols)
    if l == 0:
        return {()}
    start = tuple(l_cols)
    seen = {start}
    stack = [start]
    caches: dict[tuple[int, ...], _RankCache] = {}

    def rank_for(others: tuple[int, ...]):
        key = tuple(sorted(others))
        rc = caches.get(key)
        if rc is None:
            rc = _RankCache(key)
            caches[key] = rc
        return rc

    while stack:
        state = stack.pop()
        for c in range(l):
            others = state[:c] + state[c + 1:]
            rc = rank_for(others)
            support = state[c]
            comp = full & ~support
            r_comp = rc.rank(comp)
            for i in range(full.bit_length()):
                if off_diagonal_only and i == c:
                    continue
                if support >> i & 1:
                    removable = rc.rank(comp | (1 << i)) > r_comp
                    if removable:
                        nxt = state[:c] + (support & ~(1 << i),) + state[c + 1:]
                        if nxt not in seen:
                            seen.add(nxt)
                            stack.append(nxt)
                else:
                    addable = rc.rank(comp & ~(1 << i)) < r_comp
                    if addable:
                        nxt = state[:c] + (support | (1 << i),) + state[c + 1:]
                        if nxt not in seen:
                            seen.add(nxt)
                            stack.append(nxt)
        deadline.check(len(seen))
    return seen


def _diagonal_assignments(cols: list[int], n: int):
    """All injective column->row assignments with cols[c] covering its row
    (the row permutations yielding nonzero diagonals)."""
    order = sorted(range(n), key=lambda c: bin(cols[c]).count("1"))
    assign = [0] * n

    def rec(k: int, used: int):
        if k == n:
            yield assign
            return
        c = order[k]
        for r in bits(cols[c] & ~used):
            assign[c] = r
            yield from rec(k + 1, used | (1 << r))

    yield from rec(0, 0)


def expand_class_configs(n: int, num_latent: int, seed_config: int,
                         budget: TraversalBudget | None = None
                         ) -> tuple[set[int], bool]:
    """Every labeled digraph config distributionally equivalent to the seed
    (the whole class, L-isomorphic variants included).

    Returns (configs, complete).  The seed must be irreducible.
    """
    budget = budget or TraversalBudget()
    deadline = _Deadline(budget)
    full = (1 << n) - 1
    cols = support_cols_of_config(seed_config, n)
    rank_l = _RankCache(cols[:num_latent])
    found: set[int] = {seed_config}
    complete = True
    try:
        x_solutions = [
            sorted(_column_solutions(cols[c], rank_l, full, deadline))
            for c in range(num_latent, n)
        ]
        l_states = _latent_states(cols[:num_latent], full, deadline)
        seen_row_keys: set[tuple[int, ...]] = set()
        for state in l_states:
            for choice in product(*x_solutions):
                comb = list(state) + list(choice)
                rows = [0] * n
                for c, cm in enumerate(comb):
                    for r in bits(cm):
                        rows[r] |= 1 << c
                key = tuple(sorted(rows))
                if key in seen_row_keys:
                    continue
                seen_row_keys.add(key)
                for assign in _diagonal_assignments(comb, n):
                    config = 0
                    for i in range(n):
                        for c in bits(rows[assign[i]] & ~(1 << i)):
                            config |= 1 << (c * n + i)
                    found.add(config)
                    deadline.check(len(found))
    except _BudgetStop:
        complete = False

    bit_maps = latent_bit_maps(n, num_latent)
    labeled: set[int] = set()
    for cfg in found:
        labeled |= config_orbit(cfg, bit_maps)
    return labeled, complete


# -- equivalence class objects -------------------------------------------------


class Transition(NamedTuple):
    from_index: int
    to_index: int
    kind: str  # "edge-add" | "edge-del" | "reversal"


@dataclass(frozen=True)
class EquivalenceClass:
    seed: Digraph
    members: tuple[Digraph, ...]
    transitions: tuple[Transition, ...]
    complete: bool
    labeled_count: int

    def __len__(self):
        return len(self.members)


def traverse_class(g: Digraph, budget: TraversalBudget | None = None,
                   with_transitions: bool = True) -> EquivalenceClass:
    """BFS the whole equivalence class of an irreducible model.

    Members are canonical up to latent relabeling and sorted by canonical
    config.  Raises BudgetExceededError carrying the partial class when the
    member or time budget is hit.
    """
    if not is_irreducible(g):
        raise LingEquivError("traverse_class needs an irreducible input; reduce first")
    budget = budget or TraversalBudget()
    n, l = g.n, g.num_latent
    labeled, complete = expand_class_configs(n, l, g.to_config(), budget)
    bit_maps = latent_bit_maps(n, l)
    canon = sorted({canonical_config(c, bit_maps) for c in labeled})
    index_of = {c: i for i, c in enumerate(canon)}
    members = tuple(Digraph.from_config(c, n, l, labels=g.labels) for c in canon)

    transitions: list[Transition] = []
    if with_transitions and complete:
        deadline = _Deadline(budget)
        try:
            seen: set[Transition] = set()
            for i, member in enumerate(members):
                for tail in range(n):
                    for head in range(n):
                        if tail == head:
                            continue
                        if member.has_edge(tail, head):
                            if can_delete_edge(member, tail, head):
                                tgt = member.remove_edge(tail, head)
                                kind = "edge-del"
                            else:
                                continue
                        elif can_add_edge(member, tail, head):
                            tgt = member.add_edge(tail, head)
                            kind = "edge-add"
                        else:
                            continue
                        j = index_of[canonical_config(tgt.to_config(), bit_maps)]
                        seen.add(Transition(i, j, kind))
                for cset in enumerate_disjoint_cycle_sets(member):
                    if not cset:
                        continue
                    tgt = cycle_reversal(member, cset)
                    j = index_of[canonical_config(tgt.to_config(), bit_maps)]
                    if j != i:
                        seen.add(Transition(i, j, "reversal"))
                deadline.check(0)
            transitions = sorted(seen)
        except _BudgetStop:
            complete = False

    result = EquivalenceClass(
        seed=g,
        members=members,
        transitions=tuple(transitions),
        complete=complete,
        labeled_count=len(labeled),
    )
    if not complete:
        raise BudgetExceededError("traversal budget exceeded", partial=result)
    return result


# -- presentation ---------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    base: Digraph
    solid_edges: frozenset[tuple[int, int]]
    dashed_edges: frozenset[tuple[int, int]]


def presentation(g: Digraph, budget: TraversalBudget | None = None) -> Presentation:
    """The unique maximal equivalent digraph of the seed's cycle-reversal
    configuration, with edges present in every configuration member marked
    solid and the removable ones dashed."""
    if not is_irreducible(g):
        raise LingEquivError("presentation needs an irreducible input; reduce first")
    budget = budget or TraversalBudget()
    deadline = _Deadline(budget)
    n, l = g.n, g.num_latent
    full = (1 << n) - 1
    cols = g.support_columns()
    rank_l = _RankCache(cols[:l])

    union_cols = list(cols)
    solid_cols = list(cols)

    # observed columns decompose: union by one-step additions, solids as the
    # union entries whose one-step removal leaves the solution space
    for c in range(l, n):
        col = cols[c]
        union = col
        comp0 = full & ~col
        r0 = rank_l.rank(comp0)
        for i in bits(comp0):
            if rank_l.rank(comp0 & ~(1 << i)) < r0:
                union |= 1 << i
        comp_u = full & ~union
        r_u = rank_l.rank(comp_u)
        solid = union
        for i in bits(union & ~(1 << c)):
            if rank_l.rank(comp_u | (1 << i)) > r_u:
                solid &= ~(1 << i)
        union_cols[c] = union
        solid_cols[c] = solid

    # latent columns are walked jointly; only digraph-level (off-diagonal)
    # flips stay inside the cycle-reversal configuration
    states = _latent_states(cols[:l], full, deadline, off_diagonal_only=True)
    for c in range(l):
        u, s = 0, full
        for state in states:
            u |= state[c]
            s &= state[c]
        union_cols[c] = u
        solid_cols[c] = s

    base_edges = set()
    solid_edges = set()
    for c in range(n):
        for r in bits(union_cols[c] & ~(1 << c)):
            base_edges.add((c, r))
    for c in range(n):
        for r in bits(solid_cols[c] & ~(1 << c)):
            solid_edges.add((c, r))
    base = g.with_edges(base_edges)
    return Presentation(
        base=base,
        solid_edges=frozenset(solid_edges),
        dashed_edges=frozenset(base_edges - solid_edges),
    )


def edge_flip_component(g: Digraph) -> set[int]:
    """Configs reachable from g via admissible single-edge edits only
    (the seed's cycle-reversal configuration); test-scale helper."""
    seen = {g.to_config()}
    stack = [g]
    while stack:
        cur = stack.pop()
        for tail in range(g.n):
            for head in range(g.n):
                if tail == head:
                    continue
                if cur.has_edge(tail, head):
                    if not can_delete_edge(cur, tail, head):
                        continue
                    nxt = cur.remove_edge(tail, head)
                elif can_add_edge(cur, tail, head):
                    nxt = cur.add_edge(tail, head)
                else:
                    continue
                cfg = nxt.to_config()
                if cfg not in seen:
                    seen.add(cfg)
                    stack.append(nxt)
    return seen
