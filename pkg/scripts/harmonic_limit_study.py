"""Arctangent time operator: distance from -T0 as omega shrinks.

The gap closes like omega^2 with a prefactor set by the truncated Q^3,
which grows with N.

    python3 scripts/harmonic_limit_study.py --dims 64 128 256
"""
import argparse

from su11lab.conformal import conformal_triple
from su11lab.matcore import Window, window_defect
from su11lab.su11 import Sector
from su11lab.timeops import K_FREE, t_harmonic, t_minimal


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--omegas", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4])
    ap.add_argument("--window", type=int, default=8)
    args = ap.parse_args(argv)
    w = Window(args.window)
    print(f"{'N':>6} " + " ".join(f"{'w=' + format(om, 'g'):>12}" for om in args.omegas))
    for N in args.dims:
        s = Sector(K_FREE, N)
        T0 = t_minimal(conformal_triple(s)).matrix
        vals = [window_defect(t_harmonic(s, om).matrix, -T0, w) for om in args.omegas]
        print(f"{N:>6} " + " ".join(f"{v:>12.4e}" for v in vals))


if __name__ == "__main__":
    main()
