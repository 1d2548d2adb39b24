#!/usr/bin/env python3
"""Census rows for every latent count at a given vertex count.

The n=6 cell iterates 2^30 digraphs and is a multi-hour batch job; it
stays off unless --allow-n6 is passed.  Output: one line per (n, l) with
wc/variants/unique/classes, then 'size count' histogram rows.
"""

import argparse
import os
import time

from lingequiv.census import census


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--parallelism", type=int,
                    default=int(os.environ.get("EQUIV_THREADS", os.cpu_count() or 1)))
    ap.add_argument("--allow-n6", action="store_true")
    ap.add_argument("--histograms", action="store_true")
    args = ap.parse_args()

    for l in range(args.n):
        t0 = time.perf_counter()
        row = census(args.n, l, parallelism=args.parallelism,
                     allow_n6=args.allow_n6)
        dt = time.perf_counter() - t0
        print(f"n={row.n} l={row.num_latent}: wc={row.wc_digraphs} "
              f"variants={row.irreducible_with_variants} "
              f"unique={row.irreducible_unique} classes={row.class_count} "
              f"({dt:.1f}s)", flush=True)
        if args.histograms:
            for size, count in row.class_size_histogram.items():
                print(f"  {size} {count}")


if __name__ == "__main__":
    main()
