"""Transversal matroids on binary matrices: derived families, realization
from a basis family, and matroid-preserving column augmentation.

Conventions.  A presentation is a binary m x k matrix whose columns point
to rows; the matroid lives on the row indices (the ground set).  Internally
a matrix is a tuple of column bitmasks over rows.  The rank of a row subset
is the matching rank of the corresponding submatrix.

Realization reconstructs a presentation from nothing but the basis family:
form the dual matroid, compute the recursive alpha values on its flats,
cover every (flat, copy) pair by a maximal matching against the ground set,
then dualize the resulting strict-gammoid digraph back into a bipartite
presentation.  The alpha values are nonnegative and the covering matching
exists exactly when the input matroid is transversal.

Column augmentation (``colaug``) is the solution space of one column:
every indicator vector that can replace column x while preserving the
matroid.  It has a unique maximal element (the union of all solutions),
its minimal elements are the minimum-size new cocircuits, and one-step
Hasse moves connect the whole space, which is what the class traversal and
the recovery pipeline exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .digraph import bits
from .errors import NotAMatroidError, NotTransversalError, SizeCapError
from .ranks import max_bipartite_matching

FAMILY_CAP = 16

_x = np.arange(1 << 16, dtype=np.uint32)
_x = _x - ((_x >> 1) & 0x55555555)
_x = (_x & 0x33333333) + ((_x >> 2) & 0x33333333)
_x = (_x + (_x >> 4)) & 0x0F0F0F0F
_POPCOUNT16 = ((_x * 0x01010101) >> 24).astype(np.uint8)
del _x


def popcount(x: int) -> int:
    return bin(x).count("1")


def col_masks_of(matrix) -> tuple[tuple[int, ...], int]:
    """Normalize a matrix-like (rows of 0/1 entries) into column bitmasks."""
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d binary matrix")
    m, k = arr.shape
    cols = tuple(int(sum(1 << r for r in range(m) if arr[r, c])) for c in range(k))
    return cols, m


def masks_to_matrix(cols: Sequence[int], m: int) -> np.ndarray:
    out = np.zeros((m, len(cols)), dtype=np.uint8)
    for j, cm in enumerate(cols):
        for r in bits(cm):
            out[r, j] = 1
    return out


def mrank_cols(cols: Sequence[int], rows_mask: int) -> int:
    """Matching rank of the submatrix given by a row subset (all columns)."""
    adj = [c & rows_mask for c in cols]
    return max_bipartite_matching(adj)[0]


class TransversalMatroid:
    """Matroid on row indices presented by column bitmasks, with a
    write-once rank cache (safe under concurrent reads)."""

    def __init__(self, cols: Sequence[int], ground_size: int):
        self.cols = tuple(cols)
        self.m = ground_size
        self.full_mask = (1 << ground_size) - 1
        self._rank_cache: dict[int, int] = {0: 0}

    @staticmethod
    def from_matrix(matrix) -> "TransversalMatroid":
        cols, m = col_masks_of(matrix)
        return TransversalMatroid(cols, m)

    def rank(self, subset_mask: int) -> int:
        r = self._rank_cache.get(subset_mask)
        if r is None:
            r = mrank_cols(self.cols, subset_mask)
            self._rank_cache[subset_mask] = r
        return r

    def is_independent(self, subset_mask: int) -> bool:
        return self.rank(subset_mask) == popcount(subset_mask)

    def full_rank(self) -> int:
        return self.rank(self.full_mask)

    def bases_masks(self) -> list[int]:
        r = self.full_rank()
        return [
            _mask(c) for c in combinations(range(self.m), r)
            if self.rank(_mask(c)) == r
        ]

    def families(self, cap: int = FAMILY_CAP) -> "MatroidFamilies":
        if self.m > cap:
            raise SizeCapError(
                f"family enumeration needs ground size <= {cap}, got {self.m}")
        return _families_from_rank(self.m, self.rank)


@dataclass(frozen=True)
class MatroidFamilies:
    bases: frozenset[frozenset[int]]
    circuits: frozenset[frozenset[int]]
    cocircuits: frozenset[frozenset[int]]
    coloops: frozenset[int]
    flats: frozenset[frozenset[int]]


def _mask(subset: Iterable[int]) -> int:
    return sum(1 << v for v in subset)


def _fset(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


def _circuit_masks(m: int, rank: Callable[[int], int], r_full: int) -> list[int]:
    found = []
    for size in range(1, r_full + 2):
        for c in combinations(range(m), size):
            cm = _mask(c)
            if rank(cm) == size - 1 and all(
                rank(cm & ~(1 << e)) == size - 1 for e in c
            ):
                found.append(cm)
    return found


def _cocircuit_sets(m: int, rank: Callable[[int], int]) -> set[frozenset[int]]:
    full = (1 << m) - 1
    r_full = rank(full)
    out = set()
    for size in range(1, m - r_full + 2):
        for d in combinations(range(m), size):
            dm = _mask(d)
            if rank(full & ~dm) == r_full - 1 and all(
                rank(full & ~(dm & ~(1 << e))) == r_full for e in d
            ):
                out.add(frozenset(d))
    return out


def _families_from_rank(m: int, rank: Callable[[int], int]) -> MatroidFamilies:
    full = (1 << m) - 1
    r_full = rank(full)

    bases = frozenset(
        frozenset(c) for c in combinations(range(m), r_full)
        if rank(_mask(c)) == r_full
    )
    circuits = frozenset(_fset(cm) for cm in _circuit_masks(m, rank, r_full))
    cocircuits = frozenset(_cocircuit_sets(m, rank))
    coloops = frozenset(
        e for e in range(m) if rank(full & ~(1 << e)) == r_full - 1)

    flats = set()
    for fm in range(1 << m):
        rf = rank(fm)
        if all(rank(fm | 1 << x) == rf + 1
               for x in range(m) if not fm >> x & 1):
            flats.add(_fset(fm))

    return MatroidFamilies(
        bases=bases,
        circuits=circuits,
        cocircuits=cocircuits,
        coloops=coloops,
        flats=frozenset(flats),
    )


def families(matrix_or_matroid, cap: int = FAMILY_CAP) -> MatroidFamilies:
    if isinstance(matrix_or_matroid, TransversalMatroid):
        return matrix_or_matroid.families(cap)
    return TransversalMatroid.from_matrix(matrix_or_matroid).families(cap)


def verify_family_axioms(matroid: TransversalMatroid, cap: int = FAMILY_CAP) -> bool:
    """Executable axiom checks: basis exchange, a circuit under every
    dependent set, and the cocircuit intersection rules."""
    fam = matroid.families(cap)
    if not basis_exchange_holds(fam.bases):
        return False
    for size in range(1, matroid.m + 1):
        for z in combinations(range(matroid.m), size):
            if matroid.rank(_mask(z)) < size:
                if not any(c <= frozenset(z) for c in fam.circuits):
                    return False
    for d in fam.cocircuits:
        if any(len(d & b) < 1 for b in fam.bases):
            return False
        if any(len(d & c) == 1 for c in fam.circuits):
            return False
    return True


def basis_exchange_holds(bases: Iterable[frozenset[int]]) -> bool:
    base_sets = set(bases)
    if not base_sets:
        return False
    sizes = {len(b) for b in base_sets}
    if len(sizes) != 1:
        return False
    for b1 in base_sets:
        for b2 in base_sets:
            for e in b1 - b2:
                if not any(b1 - {e} | {f} in base_sets for f in b2 - b1):
                    return False
    return True


def rank_function_from_bases(ground_size: int, bases_masks: Sequence[int]):
    """r(S) = max over bases of |B & S|; vectorized for ground <= 16."""
    if ground_size <= 16 and len(bases_masks) > 8:
        arr = np.asarray(bases_masks, dtype=np.uint32)

        def rank(subset_mask: int) -> int:
            return int(_POPCOUNT16[arr & subset_mask].max())

        return rank

    masks = list(bases_masks)

    def rank(subset_mask: int) -> int:
        return max(popcount(b & subset_mask) for b in masks)

    return rank


# -- realization (matroid -> bipartite presentation) -------------------------


@dataclass(frozen=True)
class AlphaSystem:
    """Recursive alpha values on the dual matroid's flats, plus the
    bipartite incidence between ground elements and (flat, copy) pairs;
    a covering matching of the copies dualizes into a presentation."""

    flats_of_dual: tuple[frozenset[int], ...]
    alpha: dict[frozenset[int], int]
    incidence: tuple[tuple[int, tuple[frozenset[int], int]], ...]

    def copy_count(self) -> int:
        return sum(self.alpha.values())


def alpha_system(ground_size: int, bases: Iterable[Iterable[int]]) -> AlphaSystem:
    """Dual-matroid flats and their alpha values for a basis family.

    Alpha of a flat is its size minus its dual rank minus the alphas of all
    flats strictly below it; every value is nonnegative exactly when the
    matroid is transversal, and they sum to the rank.
    """
    base_sets = frozenset(frozenset(b) for b in bases)
    m = ground_size
    full = (1 << m) - 1
    dual_rank = rank_function_from_bases(
        m, [full & ~_mask(b) for b in base_sets])

    dual_flats = []
    for fm in range(1 << m):
        rf = dual_rank(fm)
        if all(dual_rank(fm | 1 << x) == rf + 1
               for x in range(m) if not fm >> x & 1):
            dual_flats.append(fm)
    dual_flats.sort(key=popcount)

    alpha: dict[frozenset[int], int] = {}
    positive: list[tuple[int, int]] = []  # (flat mask, alpha value)
    for fm in dual_flats:
        below = sum(a for gm, a in positive if gm != fm and gm & fm == gm)
        a = popcount(fm) - dual_rank(fm) - below
        if a < 0:
            raise NotTransversalError(
                "negative alpha value: matroid is not transversal")
        alpha[_fset(fm)] = a
        if a > 0:
            positive.append((fm, a))

    incidence = tuple(
        (e, (_fset(fm), i))
        for fm, a in positive
        for i in range(1, a + 1)
        for e in bits(fm)
    )
    return AlphaSystem(
        flats_of_dual=tuple(_fset(fm) for fm in dual_flats),
        alpha=alpha,
        incidence=incidence,
    )


def realize_from_bases(ground_size: int, bases: Iterable[Iterable[int]],
                       verify: bool = True) -> np.ndarray:
    """Build a binary presentation whose transversal matroid has exactly
    the given bases.

    Raises NotAMatroidError when the family fails the exchange axiom, and
    NotTransversalError when the family is a matroid but no bipartite
    presentation exists (negative alpha value, uncoverable alpha system,
    or failed round-trip verification).
    """
    base_sets = frozenset(frozenset(b) for b in bases)
    if not base_sets:
        raise NotAMatroidError("empty basis family")
    for b in base_sets:
        if not all(0 <= e < ground_size for e in b):
            raise NotAMatroidError("basis element outside the ground set")
    if not basis_exchange_holds(base_sets):
        raise NotAMatroidError("basis exchange axiom fails")

    m = ground_size
    r_full = len(next(iter(base_sets)))
    if r_full == 0:
        return np.zeros((m, 0), dtype=np.uint8)

    system = alpha_system(m, base_sets)
    copies = [_mask(f) for f in system.flats_of_dual
              for _ in range(system.alpha[f])]
    if len(copies) != r_full:
        raise NotTransversalError("alpha values do not sum to the rank")

    # match every (flat, copy) pair to a distinct ground element in the flat
    size, owner = max_bipartite_matching(copies)
    if size != len(copies):
        raise NotTransversalError(
            "alpha system has no matching covering all flat copies")

    # owner: element -> copy; each matched element becomes a column whose
    # support is its matched flat (strict-gammoid duality)
    cols = [copies[owner[e]] for e in sorted(owner)]

    if verify:
        got = TransversalMatroid(cols, m)
        recomputed = frozenset(
            frozenset(c) for c in combinations(range(m), r_full)
            if got.rank(_mask(c)) == r_full
        )
        if recomputed != base_sets:
            raise NotTransversalError(
                "realization round-trip mismatch: matroid is not transversal")

    return masks_to_matrix(cols, m)


# -- column augmentation ------------------------------------------------------


def maximal_augmentation_from_ranks(
    m: int,
    whole_rank: Callable[[int], int],
    rest_rank: Callable[[int], int],
) -> int:
    """Maximal solution mask of a singleton augmentation, given only the
    two rank functions (augmented matroid and remaining-columns matroid).

    A row enters unless it completes some new circuit whose remainder is
    already independent without the augmented column.
    """
    full = (1 << m) - 1
    r_full = whole_rank(full)
    circuits = _circuit_masks(m, whole_rank, r_full)

    def rest_independent(mask: int) -> bool:
        return rest_rank(mask) == popcount(mask)

    out = 0
    for i in range(m):
        if all(not rest_independent(cm & ~(1 << i))
               for cm in circuits if cm >> i & 1):
            out |= 1 << i
    return out


def _colaug_context(matrix, x: int):
    cols, m = col_masks_of(matrix)
    if not 0 <= x < len(cols):
        raise ValueError(f"column index {x} out of range")
    others = tuple(c for j, c in enumerate(cols) if j != x)
    return cols, others, m


def colaug_maximal(matrix, x: int) -> frozenset[int]:
    """Unique maximal column filling; equals the union of all solutions."""
    cols, others, m = _colaug_context(matrix, x)
    whole = TransversalMatroid(cols, m)
    rest = TransversalMatroid(others, m)
    return _fset(maximal_augmentation_from_ranks(m, whole.rank, rest.rank))


def colaug_minimal(matrix, x: int) -> frozenset[frozenset[int]]:
    """Minimum-size members of the cocircuit difference; exactly the
    minimal elements of colaug.  Their intersection is the set of rows
    forced into every solution."""
    cols, others, m = _colaug_context(matrix, x)
    whole = TransversalMatroid(cols, m)
    rest = TransversalMatroid(others, m)
    diff = _cocircuit_sets(m, whole.rank) - _cocircuit_sets(m, rest.rank)
    if not diff:
        return frozenset({frozenset()})
    k = min(len(d) for d in diff)
    return frozenset(d for d in diff if len(d) == k)


def remove_keeps_matroid(rest_rank, full_mask: int, support: int, i: int) -> bool:
    """Dropping row i from a column support preserves the matroid iff i is
    a coloop of the zero-rows (plus i) in the remaining columns."""
    comp = full_mask & ~support
    return rest_rank(comp | 1 << i) > rest_rank(comp)


def add_keeps_matroid(rest_rank, full_mask: int, support: int, i: int) -> bool:
    comp = full_mask & ~support
    return rest_rank(comp & ~(1 << i)) < rest_rank(comp)


def colaug(matrix, x: int) -> frozenset[frozenset[int]]:
    """All column fillings preserving the matroid: grow the current column
    to the maximal solution by one-step additions, then walk downward by
    one-step removals (the Hasse diagram of solutions is connected, so the
    walk is exhaustive)."""
    cols, others, m = _colaug_context(matrix, x)
    rest = TransversalMatroid(others, m)
    full = (1 << m) - 1
    cur = cols[x]
    seed = cur
    for i in bits(full & ~cur):
        if add_keeps_matroid(rest.rank, full, cur, i):
            seed |= 1 << i
    seen = {seed}
    stack = [seed]
    while stack:
        s = stack.pop()
        for i in bits(s):
            if remove_keeps_matroid(rest.rank, full, s, i):
                nxt = s & ~(1 << i)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return frozenset(_fset(s) for s in seen)


def colaug_bruteforce(matrix, x: int) -> frozenset[frozenset[int]]:
    """Oracle: try all 2^m fillings and compare basis families directly."""
    cols, others, m = _colaug_context(matrix, x)
    whole = TransversalMatroid(cols, m)
    r_full = whole.full_rank()
    want = frozenset(frozenset(bits(bm)) for bm in whole.bases_masks())
    out = []
    for dmask in range(1 << m):
        cand = TransversalMatroid(others + (dmask,), m)
        if cand.full_rank() != r_full:
            continue
        got = frozenset(frozenset(bits(bm)) for bm in cand.bases_masks())
        if got == want:
            out.append(_fset(dmask))
    return frozenset(out)


def colaug_hasse_neighbors(matrix, x: int,
                           d: Iterable[int]) -> frozenset[frozenset[int]]:
    """Solutions at symmetric distance one from d, in both directions."""
    cols, others, m = _colaug_context(matrix, x)
    whole = TransversalMatroid(cols, m)
    rest = TransversalMatroid(others, m)
    full = (1 << m) - 1
    dmask = _mask(d)
    probe = TransversalMatroid(others + (dmask,), m)
    if probe.full_rank() != whole.full_rank() or set(
            probe.bases_masks()) != set(whole.bases_masks()):
        raise ValueError("d is not a solution of this column augmentation")
    out = []
    for i in bits(dmask):
        if remove_keeps_matroid(rest.rank, full, dmask, i):
            out.append(_fset(dmask & ~(1 << i)))
    for i in bits(full & ~dmask):
        if add_keeps_matroid(rest.rank, full, dmask, i):
            out.append(_fset(dmask | 1 << i))
    return frozenset(out)
