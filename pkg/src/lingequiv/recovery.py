"""End-to-end recovery: rank oracle -> support-matrix reconstruction ->
diagonal row permutation -> seed digraph -> equivalence class.

The oracle answers matching ranks of an unknown support matrix whose rows
are anonymous and whose columns are the latent block plus the labeled
observed vertices.  Phase 1 extracts the latent-column matroid from
size-l queries and realizes a presentation for it; Phase 2 fills each
observed column independently with the maximal augmentation solution of
its singleton-extension matroid; a final perfect matching on nonzeros
relabels rows so the diagonal is nonzero, which reads off a digraph
equivalent to the generating model.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Optional, Sequence

import numpy as np

from .digraph import Digraph, bits, default_labels
from .errors import InfeasibleOracleError, LingEquivError, NotAMatroidError, NotTransversalError
from .equivalence import EquivalenceClass, TraversalBudget, traverse_class
from .matroid import (
    TransversalMatroid,
    basis_exchange_holds,
    col_masks_of,
    maximal_augmentation_from_ranks,
    mrank_cols,
    popcount,
    rank_function_from_bases,
    realize_from_bases,
)
from .mixing import (
    CONFIDENCE_ALPHA,
    CONFIDENCE_EPS,
    DEFAULT_TOL,
    MixingMatrix,
    numeric_rank,
)
from .ranks import edge_rank, max_bipartite_matching

# -- rank oracles -------------------------------------------------------------


class ExactGraphOracle:
    """Answers matching-rank queries from a known digraph, optionally with
    a hidden row relabeling (row index -> graph vertex) to mimic the
    anonymity of estimated mixing columns."""

    def __init__(self, g: Digraph, row_to_vertex: Optional[Sequence[int]] = None):
        self.graph = g
        self.n = g.n
        self.num_latent = g.num_latent
        self.row_to_vertex = tuple(row_to_vertex) if row_to_vertex is not None \
            else tuple(range(g.n))
        if sorted(self.row_to_vertex) != list(range(g.n)):
            raise LingEquivError("row_to_vertex must be a permutation")
        self._cache: dict[tuple[int, int], int] = {}
        self.query_count = 0

    def query(self, rows_mask: int, cols_mask: int) -> int:
        key = (rows_mask, cols_mask)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        z = [self.row_to_vertex[r] for r in bits(rows_mask)]
        y = list(bits(cols_mask))
        val = edge_rank(self.graph, z, y)
        self._cache[key] = val
        self.query_count += 1
        return val

    def confidence(self, rows_mask: int, cols_mask: int) -> float:
        """Independence-at-full-size is certain either way for an exact oracle."""
        return 1.0 if self.query(rows_mask, cols_mask) == popcount(rows_mask) else 0.0

    def replay_ok(self, candidate_cols: Sequence[int]) -> bool:
        """Every query answered so far must hold on the candidate matrix."""
        for (rows_mask, cols_mask), val in self._cache.items():
            sub = [candidate_cols[c] & rows_mask for c in bits(cols_mask)]
            if max_bipartite_matching(sub)[0] != val:
                return False
        return True


class NumericMixingOracle:
    """Matching ranks through the path/edge duality: a query on rows Z and
    columns Y (with the latent block inside Y) is one SVD rank of the
    mixing block with observed rows X minus Y and columns outside Z."""

    def __init__(self, a: MixingMatrix, num_latent: int,
                 tol: float = DEFAULT_TOL,
                 alpha: float = CONFIDENCE_ALPHA, eps: float = CONFIDENCE_EPS):
        self.values = np.asarray(a.values, dtype=float)
        self.num_latent = num_latent
        self.n = a.num_columns
        if self.values.shape[0] + num_latent != self.n:
            raise LingEquivError(
                "mixing must have |X| rows and |X| + num_latent columns")
        self.x_labels = a.row_labels
        self.tol = tol
        self.alpha = alpha
        self.eps = eps
        self.scale = float(np.linalg.svd(self.values, compute_uv=False)[0]) \
            if self.values.size else 1.0
        self._cache: dict[tuple[int, int], tuple[int, float]] = {}
        self.query_count = 0

    def _block(self, rows_mask: int, cols_mask: int) -> np.ndarray:
        n, l = self.n, self.num_latent
        x_rows = [v - l for v in range(l, n) if not cols_mask >> v & 1]
        cols = [r for r in range(n) if not rows_mask >> r & 1]
        return self.values[np.ix_(x_rows, cols)] if x_rows and cols else \
            self.values[x_rows][:, cols]

    def _query_full(self, rows_mask: int, cols_mask: int) -> tuple[int, float]:
        key = (rows_mask, cols_mask)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        block = self._block(rows_mask, cols_mask)
        rank = numeric_rank(block, self.tol, scale=self.scale)
        val = popcount(rows_mask) + popcount(cols_mask) - self.n + rank
        conf = self._routing_confidence(block, rank)
        self._cache[key] = (val, conf)
        self.query_count += 1
        return val, conf

    def _routing_confidence(self, block: np.ndarray, rank: int) -> float:
        """Independence score coherent with the tolerance-based rank call.

        The raw sigmoid score never drops below ~0.38 even for an exactly
        singular block, so it is folded to the side of the rank decision:
        blocks judged full rank score in [1/2, 1), deficient ones in
        [0, 1/2), approaching 0 as the trailing singular value vanishes
        against the whole-matrix scale.
        """
        if min(block.shape) == 0:
            return 1.0
        svals = np.linalg.svd(block, compute_uv=False)
        sigma_min = float(svals[-1])
        p = 1.0 / (1.0 + math.exp(-self.alpha * (sigma_min - self.eps)))
        if rank == min(block.shape):
            return max(p, 1.0 - p)
        floor = self.tol * self.scale
        return 0.5 * sigma_min / (sigma_min + 100.0 * floor)

    def query(self, rows_mask: int, cols_mask: int) -> int:
        return self._query_full(rows_mask, cols_mask)[0]

    def confidence(self, rows_mask: int, cols_mask: int) -> float:
        """Score that the queried row set is independent at full size
        (the duality block then being square and nonsingular)."""
        return self._query_full(rows_mask, cols_mask)[1]


def oracle_from_graph(g: Digraph, row_to_vertex=None) -> ExactGraphOracle:
    return ExactGraphOracle(g, row_to_vertex)


# -- noisy family repair --------------------------------------------------------


def _clip(p: float) -> float:
    return min(max(p, 1e-9), 1.0 - 1e-9)


def _predicts_full_rank(family: frozenset[frozenset[int]], z: frozenset[int],
                        rank: int) -> bool:
    """Whether a family of rank-`rank` bases entails a full-rank block for
    the queried row set: independence below the rank (inside some basis),
    spanning above it (containing some basis)."""
    if len(z) <= rank:
        return any(z <= b for b in family)
    return any(b <= z for b in family)


def _agreement(family: frozenset[frozenset[int]],
               scores: Mapping[frozenset[int], float],
               rank: Optional[int] = None) -> float:
    """Sum of log-confidence agreement over every scored block; scored sets
    of non-basis sizes are judged through the family's rank function."""
    if rank is None:
        rank = len(next(iter(family))) if family else 0
    total = 0.0
    for z, p in scores.items():
        p = _clip(p)
        total += math.log(p) if _predicts_full_rank(family, z, rank) \
            else math.log(1.0 - p)
    return total


def _is_valid_transversal_family(ground_size: int,
                                 family: frozenset[frozenset[int]]) -> bool:
    if not family:
        return False
    if not basis_exchange_holds(family):
        return False
    try:
        realize_from_bases(ground_size, family, verify=True)
    except (NotAMatroidError, NotTransversalError):
        return False
    return True


def _exchange_violation(family: frozenset[frozenset[int]]):
    for b1 in family:
        for b2 in family:
            for e in b1 - b2:
                if not any(b1 - {e} | {f} in family for f in b2 - b1):
                    return b1, b2, e
    return None


EXACT_REPAIR_CAP = 6
_FAMILY_CATALOGS: dict[tuple[int, int], tuple[list, "np.ndarray"]] = {}


def _transversal_family_catalog(m: int, rank: int):
    """All basis families of rank-`rank` transversal matroids on [m],
    with their full-rank-block prediction vectors over every nonempty
    subset; cached per (m, rank)."""
    key = (m, rank)
    cached = _FAMILY_CATALOGS.get(key)
    if cached is not None:
        return cached
    from itertools import combinations_with_replacement

    subsets = list(range(1, 1 << m))
    seen: dict[frozenset[int], list[bool]] = {}
    full = (1 << m) - 1
    for cols in combinations_with_replacement(range(1, 1 << m), rank):
        tm = TransversalMatroid(cols, m)
        if tm.rank(full) != rank:
            continue
        fam_key = frozenset(tm.bases_masks())
        if fam_key in seen:
            continue
        vec = []
        for sm in subsets:
            size = popcount(sm)
            r = tm.rank(sm)
            vec.append(r == size if size <= rank else r == rank)
        seen[fam_key] = vec
    keys = list(seen)
    matrix = np.array([seen[k] for k in keys], dtype=bool)
    _FAMILY_CATALOGS[key] = (keys, matrix)
    return keys, matrix


def _exact_repair(scores: Mapping[frozenset[int], float], m: int,
                  rank: int) -> frozenset[frozenset[int]]:
    """Global agreement maximizer over the full catalog of valid families."""
    keys, matrix = _transversal_family_catalog(m, rank)
    logp = np.zeros(matrix.shape[1])
    log1p = np.zeros(matrix.shape[1])
    for z, p in scores.items():
        idx = sum(1 << v for v in z) - 1
        p = _clip(float(p))
        logp[idx] = math.log(p)
        log1p[idx] = math.log(1.0 - p)
    agr = matrix @ logp + (~matrix) @ log1p
    best = keys[int(np.argmax(agr))]
    return frozenset(frozenset(bits(bm)) for bm in best)


def repair_noisy_families(scores: Mapping[frozenset[int], float],
                          ground_size: int,
                          rank: Optional[int] = None,
                          beam_width: int = 4,
                          max_depth: int = 24) -> frozenset[frozenset[int]]:
    """Closest valid transversal-matroid basis family under log-confidence
    agreement.

    Scores may cover blocks of every size (independence below the rank,
    spanning above it); basis-sized candidates are the flip moves.  For
    ground sets small enough to enumerate (<= 6) the maximizer is exact
    over the full family catalog; otherwise the search thresholds at 1/2,
    restores the exchange axiom by greedy flip-repair (beam over candidate
    families, deepest violation first), then hill-climbs agreement among
    valid families with single and paired flips.  Always returns a valid
    family; heuristic beyond the exact cap, so callers log the agreement.
    """
    scores = {frozenset(z): float(p) for z, p in scores.items()}
    if rank is None:
        above = [z for z, p in scores.items() if p >= 0.5]
        rank = max((len(z) for z in above), default=0)
        rank = min(rank, min((len(z) for z, p in scores.items()
                              if p < 0.5 and len(z) <= rank), default=rank))
        rank = max((len(z) for z in above if len(z) <= rank), default=0)
    candidates = sorted((z for z in scores if len(z) == rank),
                        key=lambda z: (-scores[z], sorted(z)))
    if not candidates:
        raise InfeasibleOracleError("no basis-sized scored sets to repair over")
    if ground_size <= EXACT_REPAIR_CAP and rank >= 1:
        return _exact_repair(scores, ground_size, rank)

    def agreement(family):
        return _agreement(family, scores, rank)

    start = frozenset(z for z in candidates if scores[z] >= 0.5) \
        or frozenset({candidates[0]})

    best_valid: Optional[frozenset[frozenset[int]]] = None
    beam = [start]
    seen = {start}
    for _ in range(max_depth):
        next_pool: set[frozenset[frozenset[int]]] = set()
        for family in beam:
            if family and _is_valid_transversal_family(ground_size, family):
                if best_valid is None or agreement(family) > agreement(best_valid):
                    best_valid = family
                continue
            violation = _exchange_violation(family) if family else None
            moves: list[frozenset[frozenset[int]]] = []
            if violation is not None:
                b1, b2, e = violation
                moves.append(family - {b1})
                moves.append(family - {b2})
                for f in b2 - b1:
                    repaired = frozenset(b1 - {e} | {f})
                    if repaired in scores:
                        moves.append(family | {repaired})
            else:
                # matroid but not transversal, or empty: flip near-threshold sets
                uncertain = sorted(candidates,
                                   key=lambda z: abs(scores[z] - 0.5))[:6]
                for z in uncertain:
                    moves.append(family - {z} if z in family else family | {z})
            for move in moves:
                if move and move not in seen:
                    seen.add(move)
                    next_pool.add(move)
        if not next_pool:
            break
        beam = sorted(next_pool, key=lambda f: -agreement(f))[:beam_width]

    if best_valid is None:
        for z in candidates:
            single = frozenset({z})
            if _is_valid_transversal_family(ground_size, single):
                best_valid = single
                break
    if best_valid is None:
        raise InfeasibleOracleError("no valid transversal family found")

    # hill-climb agreement among valid families: single flips, then paired
    # flips to step over validity-forced saddles
    improved = True
    while improved:
        improved = False
        current = agreement(best_valid)
        for z in candidates:
            move = best_valid - {z} if z in best_valid else best_valid | {z}
            if move and agreement(move) > current and \
                    _is_valid_transversal_family(ground_size, move):
                best_valid = move
                improved = True
                break
        if improved:
            continue
        for i, z1 in enumerate(candidates):
            m1 = best_valid - {z1} if z1 in best_valid else best_valid | {z1}
            for z2 in candidates[i + 1:]:
                move = m1 - {z2} if z2 in m1 else m1 | {z2}
                if move and agreement(move) > current and \
                        _is_valid_transversal_family(ground_size, move):
                    best_valid = move
                    improved = True
                    break
            if improved:
                break
    return best_valid


# -- the pipeline ---------------------------------------------------------------


@dataclass
class RecoveryOptions:
    verify: bool = True
    strict: bool = True
    noisy_low: float = 0.05
    noisy_high: float = 0.95
    traverse: bool = False
    budget: Optional[TraversalBudget] = None
    with_transitions: bool = True


@dataclass(frozen=True)
class RecoveryResult:
    seed_graph: Digraph
    equivalence_class: Optional[EquivalenceClass]
    diagnostics: tuple[str, ...]
    # reconstructed support columns in the oracle's anonymous row indexing,
    # before the diagonal row permutation
    reconstructed_columns: tuple[int, ...] = ()


def _bases_from_oracle(oracle, size: int, cols_mask: int, noisy: bool,
                       band: tuple[float, float] = (0.05, 0.95)
                       ) -> tuple[list[int], dict[frozenset[int], float], bool]:
    """Candidate row sets of the given size judged independent, plus the
    independence-confidence scores and whether any landed in the uncertain
    band.  For the numeric oracle the relevant duality block is square, so
    its full-rank confidence scores independence directly."""
    m = oracle.n
    masks = []
    scores: dict[frozenset[int], float] = {}
    uncertain = False
    for z in combinations(range(m), size):
        zm = sum(1 << r for r in z)
        val = oracle.query(zm, cols_mask)
        conf = oracle.confidence(zm, cols_mask)
        scores[frozenset(z)] = conf
        if noisy:
            uncertain |= band[0] < conf < band[1]
        if val == size:
            masks.append(zm)
    return masks, scores, uncertain


def recover(oracle, num_latent: int,
            options: Optional[RecoveryOptions] = None) -> RecoveryResult:
    """Reconstruct a support matrix satisfying the oracle and read off a
    seed digraph (plus, optionally, its whole equivalence class)."""
    opts = options or RecoveryOptions()
    diagnostics: list[str] = []
    m = oracle.n
    l = num_latent
    if l != oracle.num_latent:
        raise LingEquivError("num_latent disagrees with the oracle")
    if not 0 <= l < m:
        raise LingEquivError("need 0 <= num_latent < total vertex count")
    l_cols_mask = (1 << l) - 1
    numeric = isinstance(oracle, NumericMixingOracle)

    t0 = time.perf_counter()
    band = (opts.noisy_low, opts.noisy_high)
    base_masks, scores, uncertain = _bases_from_oracle(
        oracle, l, l_cols_mask, numeric, band)
    routed_through_repair = False
    if l == 0:
        family = frozenset({frozenset()})
    elif numeric and (uncertain or not base_masks):
        family = repair_noisy_families(scores, m, rank=l)
        routed_through_repair = True
        diagnostics.append(
            f"phase1: repaired noisy family, agreement={_agreement(family, scores):.3f} (heuristic)")
    else:
        family = frozenset(frozenset(bits(bm)) for bm in base_masks)
    if not family:
        raise InfeasibleOracleError("no independent latent-column basis found")
    diagnostics.append(f"phase1: |bases(L)|={len(family)}")

    try:
        h_l = realize_from_bases(m, family, verify=True)
    except (NotAMatroidError, NotTransversalError) as exc:
        raise InfeasibleOracleError(
            f"phase1 family is not a transversal matroid: {exc}") from exc
    l_masks, _ = col_masks_of(h_l)
    l_masks = list(l_masks) + [0] * (l - len(l_masks))
    rank_l = rank_function_from_bases(m, [sum(1 << e for e in b) for b in family])
    diagnostics.append(f"phase1: realized latent block in {time.perf_counter()-t0:.3f}s")

    t1 = time.perf_counter()
    x_masks: list[int] = []
    for x in range(l, m):
        cols_mask = l_cols_mask | (1 << x)
        bx_masks, x_scores, x_uncertain = _bases_from_oracle(
            oracle, l + 1, cols_mask, numeric, band)
        fam_x = frozenset(frozenset(bits(bm)) for bm in bx_masks)
        if not fam_x or not basis_exchange_holds(fam_x):
            if numeric:
                fam_x = repair_noisy_families(x_scores, m, rank=l + 1)
                diagnostics.append(f"phase2[{x}]: repaired singleton-extension family")
            else:
                raise InfeasibleOracleError(
                    f"column {x}: queried extension family is not a matroid")
        rank_x = rank_function_from_bases(
            m, [sum(1 << e for e in b) for b in fam_x])
        d_mask = maximal_augmentation_from_ranks(m, rank_x, rank_l)
        x_masks.append(d_mask)
        if opts.verify:
            got = _bases_of_cols(l_masks + [d_mask], m, l + 1)
            if got != fam_x:
                msg = f"column {x}: augmentation does not realize the queried matroid"
                if opts.strict and not routed_through_repair:
                    raise InfeasibleOracleError(msg)
                diagnostics.append("warning: " + msg)
    diagnostics.append(
        f"phase2: filled {m - l} observed columns in {time.perf_counter()-t1:.3f}s")

    all_cols = l_masks + x_masks
    if opts.verify and hasattr(oracle, "replay_ok"):
        if not oracle.replay_ok(all_cols):
            if opts.strict:
                raise InfeasibleOracleError(
                    "reconstructed matrix fails an already-answered query")
            diagnostics.append(
                "warning: reconstructed matrix fails an already-answered query")
    size, owner = max_bipartite_matching(all_cols)
    if size != m:
        raise InfeasibleOracleError(
            "no row permutation yields a nonzero diagonal")
    assign = [0] * m  # column -> its diagonal row
    for row, col in owner.items():
        assign[col] = row
    rows = [0] * m
    for c, cm in enumerate(all_cols):
        for r in bits(cm):
            rows[r] |= 1 << c
    edges = []
    for i in range(m):
        for c in bits(rows[assign[i]] & ~(1 << i)):
            edges.append((c, i))

    if numeric:
        labels = tuple([f"L{k + 1}" for k in range(l)] + list(oracle.x_labels))
    elif hasattr(oracle, "graph"):
        labels = oracle.graph.labels
    else:
        labels = default_labels(m, l)
    seed = Digraph(labels, l, frozenset(edges))
    diagnostics.append(f"seed: {len(edges)} edges, total {time.perf_counter()-t0:.3f}s")

    eq_class = None
    if opts.traverse:
        eq_class = traverse_class(seed, budget=opts.budget,
                                  with_transitions=opts.with_transitions)
        diagnostics.append(f"class: {len(eq_class.members)} members")
    return RecoveryResult(seed, eq_class, tuple(diagnostics), tuple(all_cols))


def _bases_of_cols(cols: Sequence[int], m: int, size: int) -> frozenset[frozenset[int]]:
    out = set()
    for z in combinations(range(m), size):
        zm = sum(1 << r for r in z)
        if mrank_cols(cols, zm) == size:
            out.add(frozenset(z))
    return frozenset(out)


def recover_from_mixing(a: MixingMatrix, num_latent: int,
                        tol: float = DEFAULT_TOL,
                        alpha: float = CONFIDENCE_ALPHA,
                        eps: float = CONFIDENCE_EPS,
                        options: Optional[RecoveryOptions] = None) -> RecoveryResult:
    """Numeric front door: build the SVD-backed oracle and recover."""
    oracle = NumericMixingOracle(a, num_latent, tol=tol, alpha=alpha, eps=eps)
    opts = options or RecoveryOptions(strict=False)
    return recover(oracle, num_latent, opts)
