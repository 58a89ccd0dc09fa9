"""Unitarity of the sector intertwiner and growth of the lowering-operator intertwiner.

    python3 scripts/intertwiner_study.py --k 1.25 --dims 50 100 200 400
"""
import argparse

import numpy as np

from su11lab import intertwine as it
from su11lab.matcore import Window


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=1.25)
    ap.add_argument("--k0", type=float, default=0.75)
    ap.add_argument("--dims", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--window", type=int, default=16)
    args = ap.parse_args(argv)
    w = Window(args.window)
    print(f"{'N':>6} {'|UdagU-1|':>12} {'|UUdag-1|':>12} {'min row norm':>13} {'|U1_00|':>10}")
    for N in args.dims:
        u = it.unitary_U(args.k, args.k0, N)
        r = it.unitarity_defect(u, w)
        rn = it.row_norms(u, args.window).min()
        u1 = abs(it.intertwiner_U1(args.k, args.k0, N).matrix.entries[0, 0])
        print(f"{N:>6} {r.components['UdagU']:>12.4e} {r.components['UUdag']:>12.4e} "
              f"{rn:>13.8f} {u1:>10.4f}")
    print(f"|U1_00| / sqrt(N) should level off if the growth is sqrt(N): "
          f"{[round(float(abs(it.intertwiner_U1(args.k, args.k0, N).matrix.entries[0, 0]) / np.sqrt(N)), 4) for N in args.dims]}")


if __name__ == "__main__":
    main()
