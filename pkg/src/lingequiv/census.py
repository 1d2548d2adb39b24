"""Exhaustive census of labeled digraphs, irreducible models, and their
distributional equivalence classes, per (vertex count, latent count) cell.

Graphs are iterated as n(n-1)-bit edge integers; weak connectivity and
irreducibility are bitmask filters; classes are discovered by traversing
each class once from its first-encountered member and marking all labeled
members visited.  Work can be split over chunks of the edge-bit range:
chunks are scanned independently and classes deduplicated at merge time by
their canonical key (lexicographically least labeled member), so the
result is independent of the chunk layout and worker count.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .digraph import Digraph, bits
from .equivalence import (
    TraversalBudget,
    canonical_config,
    expand_class_configs,
    latent_bit_maps,
)
from .errors import SizeCapError

HARD_CAP = 6
DEFAULT_CAP = 5


@dataclass(frozen=True)
class CensusRow:
    n: int
    num_latent: int
    wc_digraphs: int
    irreducible_with_variants: int
    irreducible_unique: int
    class_count: int
    class_size_histogram: dict[int, int]          # labeled members per class
    class_size_histogram_unique: dict[int, int]   # members up to L-relabeling


def _edge_tables(n: int) -> list[list[int]]:
    """Per-vertex expansion of an (n-1)-bit chunk into an n-bit out-mask."""
    tables = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        table = []
        for chunk in range(1 << (n - 1)):
            mask = 0
            for k in range(n - 1):
                if chunk >> k & 1:
                    mask |= 1 << others[k]
            table.append(mask)
        tables.append(table)
    return tables


def _out_masks(e: int, n: int, tables) -> list[int]:
    width = n - 1
    sel = (1 << width) - 1
    return [tables[i][(e >> (i * width)) & sel] for i in range(n)]


def _weakly_connected(out: list[int], n: int) -> bool:
    comp = 1
    while True:
        grown = comp
        for i in range(n):
            if comp >> i & 1:
                grown |= out[i]
            elif out[i] & comp:
                grown |= 1 << i
        if grown == comp:
            return comp == (1 << n) - 1
        comp = grown


def _latent_subset_masks(num_latent: int) -> list[int]:
    return [s for s in range(1, 1 << num_latent)]


def _irreducible(out: list[int], lsubsets: list[int]) -> bool:
    for s in lsubsets:
        children = 0
        for i in bits(s):
            children |= out[i]
        children &= ~s
        if bin(children).count("1") < 2:
            return False
    return True


def _config_of_out(out: list[int], n: int) -> int:
    config = 0
    for i in range(n):
        config |= out[i] << (i * n)
    return config


def _scan_chunk(n: int, num_latent: int, start: int, stop: int):
    """(wc count, irreducible count, passing configs) for an edge-bit range."""
    tables = _edge_tables(n)
    lsubsets = _latent_subset_masks(num_latent)
    wc = 0
    passing = []
    for e in range(start, stop):
        out = _out_masks(e, n, tables)
        if not _weakly_connected(out, n):
            continue
        wc += 1
        if _irreducible(out, lsubsets):
            passing.append(_config_of_out(out, n))
    return wc, passing


def _discover_chunk(n: int, num_latent: int, seeds: list[int]):
    """Classes touching this seed list, keyed by canonical class key."""
    visited: set[int] = set()
    classes: dict[int, tuple[int, int]] = {}
    budget = TraversalBudget(max_members=10**8, max_seconds=10**9)
    bit_maps = latent_bit_maps(n, num_latent)
    for cfg in seeds:
        if cfg in visited:
            continue
        labeled, complete = expand_class_configs(n, num_latent, cfg, budget)
        assert complete
        visited |= labeled
        key = min(labeled)
        unique = len({canonical_config(c, bit_maps) for c in labeled})
        classes[key] = (len(labeled), unique)
    return classes


def census(n: int, num_latent: int, parallelism: int = 1,
           allow_n6: bool = False) -> CensusRow:
    """Count weakly connected digraphs, irreducible models (labeled and up
    to latent relabeling), and equivalence classes for one (n, l) cell."""
    cap = HARD_CAP if allow_n6 else DEFAULT_CAP
    if not 1 <= n <= cap:
        raise SizeCapError(
            f"census supports n <= {cap} (n=6 needs allow_n6); got {n}")
    if not 0 <= num_latent < max(n, 1):
        raise SizeCapError("need 0 <= num_latent < n")
    parallelism = max(1, min(parallelism, os.cpu_count() or 1))

    total = 1 << (n * (n - 1))
    if parallelism == 1 or total < (1 << 16):
        wc, passing = _scan_chunk(n, num_latent, 0, total)
        chunk_classes = [_discover_chunk(n, num_latent, passing)]
    else:
        num_chunks = parallelism * 4
        bounds = [total * k // num_chunks for k in range(num_chunks + 1)]
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            scans = list(pool.map(
                _scan_chunk,
                [n] * num_chunks, [num_latent] * num_chunks,
                bounds[:-1], bounds[1:],
            ))
            wc = sum(s[0] for s in scans)
            passing_lists = [s[1] for s in scans]
            # rebalance seeds into one list per worker, preserving order
            seeds = [cfg for chunk in passing_lists for cfg in chunk]
            per = max(1, (len(seeds) + parallelism - 1) // parallelism)
            seed_chunks = [seeds[k:k + per] for k in range(0, len(seeds), per)]
            chunk_classes = list(pool.map(
                _discover_chunk,
                [n] * len(seed_chunks), [num_latent] * len(seed_chunks),
                seed_chunks,
            ))
        passing = seeds

    merged: dict[int, tuple[int, int]] = {}
    for classes in chunk_classes:
        merged.update(classes)

    with_variants = sum(v for v, _ in merged.values())
    unique = sum(u for _, u in merged.values())
    hist = Counter(v for v, _ in merged.values())
    hist_unique = Counter(u for _, u in merged.values())
    if parallelism == 1 or total < (1 << 16):
        assert with_variants == len(passing)
    return CensusRow(
        n=n,
        num_latent=num_latent,
        wc_digraphs=wc,
        irreducible_with_variants=with_variants,
        irreducible_unique=unique,
        class_count=len(merged),
        class_size_histogram=dict(sorted(hist.items())),
        class_size_histogram_unique=dict(sorted(hist_unique.items())),
    )


def brute_force_partition(n: int, num_latent: int) -> list[set[int]]:
    """Independent oracle: pairwise equivalence over all weakly connected
    irreducible digraphs, grouped by union-find.  Capped at n <= 4.

    Decisions use only the permutation-matching criterion on children-bases
    families (never the traversal), with families precomputed per graph and
    pairs pruned by a permutation-invariant fingerprint.
    """
    from .equivalence import _bases_families, families_signature, match_families

    if n > 4:
        raise SizeCapError("brute-force partition is capped at n <= 4")
    tables = _edge_tables(n)
    lsubsets = _latent_subset_masks(num_latent)
    graphs: list[Digraph] = []
    for e in range(1 << (n * (n - 1))):
        out = _out_masks(e, n, tables)
        if _weakly_connected(out, n) and _irreducible(out, lsubsets):
            graphs.append(Digraph.from_config(_config_of_out(out, n), n, num_latent))

    fams = [_bases_families(g) for g in graphs]
    sigs = [families_signature(f) for f in fams]
    parent = list(range(len(graphs)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    buckets: dict[tuple, list[int]] = {}
    for i, s in enumerate(sigs):
        buckets.setdefault(s, []).append(i)
    for idxs in buckets.values():
        for pos, i in enumerate(idxs):
            for j in idxs[:pos]:
                ri, rj = find(i), find(j)
                if ri != rj and match_families(fams[j], fams[i], n) is not None:
                    parent[max(ri, rj)] = min(ri, rj)

    cells: dict[int, set[int]] = {}
    for i, g in enumerate(graphs):
        cells.setdefault(find(i), set()).add(g.to_config())
    return list(cells.values())
