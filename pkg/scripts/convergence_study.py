"""Windowed commutator defects of the time operators as the truncation grows.

Prints one table per operator with the residual and the empirical order p
in N^-p between consecutive dimensions.

    python3 scripts/convergence_study.py --k 1.25 --dims 32 64 128 256 --window 8
"""
import argparse

from su11lab.conformal import conformal_triple
from su11lab.matcore import Window
from su11lab.records import convergence_orders
from su11lab.su11 import Sector
from su11lab import timeops as to


def _table(title, dims, values):
    orders = [None] + convergence_orders(dims, values)
    print(f"\n{title}")
    print(f"{'N':>6} {'residual':>12} {'order':>8}")
    for N, v, p in zip(dims, values, orders):
        print(f"{N:>6} {v:>12.4e} {'' if p is None else f'{p:8.3f}':>8}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=1.25)
    ap.add_argument("--omega", type=float, default=0.5)
    ap.add_argument("--dims", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--window", type=int, default=8)
    args = ap.parse_args(argv)
    w = Window(args.window)
    t_om, t_min, conj = [], [], []
    for N in args.dims:
        t = conformal_triple(Sector(args.k, N))
        t_om.append(to.commutator_defect(t.H, to.t_omega(t, args.omega), w).residual)
        t_min.append(to.x_defect(t.H, to.t_minimal(t), w).defect_norm)
        conj.append(to.bch_conjugation_defect(t, args.omega, w).residual)
    _table(f"[H, T(w)] - i, w={args.omega}, k={args.k}, M={args.window}", args.dims, t_om)
    _table(f"[H, T_min] - i (defect X), k={args.k}, M={args.window}", args.dims, t_min)
    _table(f"exp(-wK) H exp(wK) + 2w K-w, w={args.omega}, M={args.window}", args.dims, conj)


if __name__ == "__main__":
    main()
