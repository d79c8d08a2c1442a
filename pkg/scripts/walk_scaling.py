"""Walk-generation wall time as |V| and |E| grow together (fixed out-degree).

    python3 scripts/walk_scaling.py --sizes 10000,20000,40000,80000
"""

import argparse

from sac2vec.experiments import time_walks
from sac2vec.walker import WalkParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10000,20000,40000")
    ap.add_argument("--degree", type=int, default=5)
    ap.add_argument("--walks", type=int, default=5)
    ap.add_argument("--length", type=int, default=40)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    params = WalkParams(walks_per_node=args.walks, walk_length=args.length)
    prev = None
    for n in (int(s) for s in args.sizes.split(",")):
        t = time_walks(n, args.degree, params, args.repeats)
        growth = "" if prev is None else f"  x{t / prev:.2f}"
        print(f"n={n:7d} arcs/layer={n * args.degree:8d}  {t:.3f}s{growth}", flush=True)
        prev = t


if __name__ == "__main__":
    main()
