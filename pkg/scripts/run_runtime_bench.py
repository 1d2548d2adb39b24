#!/usr/bin/env python3
"""Reconstruction timing sweep: exact rank oracle, Erdos-Renyi models with
a target average in-degree, latent counts designated up front.  Reports
mean/std per cell over irreducible draws, phases included, class traversal
excluded.
"""

import argparse
import random
import statistics
import time

from lingequiv.digraph import Digraph
from lingequiv.recovery import oracle_from_graph, recover
from lingequiv.reduction import is_irreducible


def random_irreducible(n, l, avgdeg, rng):
    p = avgdeg / (n - 1)
    while True:
        edges = {(i, j) for i in range(n) for j in range(n)
                 if i != j and rng.random() < p}
        labels = tuple([f"L{k+1}" for k in range(l)]
                       + [f"X{k+1}" for k in range(n - l)])
        g = Digraph(labels, l, frozenset(edges))
        if is_irreducible(g) and g.is_weakly_connected():
            return g


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="5,7,9,10,11,13")
    ap.add_argument("--latents", default="1,3")
    ap.add_argument("--avgdeg", default="1,3")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    for n in map(int, args.sizes.split(",")):
        for l in map(int, args.latents.split(",")):
            if l > n - 2:
                continue
            for deg in map(float, args.avgdeg.split(",")):
                times = []
                for _ in range(args.trials):
                    g = random_irreducible(n, l, deg, rng)
                    perm = list(range(n))
                    rng.shuffle(perm)
                    t0 = time.perf_counter()
                    recover(oracle_from_graph(g, perm), l)
                    times.append(time.perf_counter() - t0)
                mean = statistics.mean(times)
                sd = statistics.stdev(times) if len(times) > 1 else 0.0
                print(f"n={n} l={l} avgdeg={deg:g}: "
                      f"{mean:.3f} +- {sd:.3f} s  (max {max(times):.3f})",
                      flush=True)


if __name__ == "__main__":
    main()
