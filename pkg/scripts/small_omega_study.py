"""Small-omega behaviour of T(omega): Hermitian and anti-Hermitian parts.

The Hermitian part differs from T_min by a truncation-only constant, so
its error does not shrink with omega.  The anti-Hermitian part is compared
with both signs of the 1/H correction.

    python3 scripts/small_omega_study.py --k 1.25 --N 256 --omegas 0.4 0.2 0.1 0.05
"""
import argparse

from su11lab.conformal import conformal_triple
from su11lab.matcore import Window
from su11lab.su11 import Sector
from su11lab.timeops import small_omega_report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=1.25)
    ap.add_argument("--N", type=int, default=256)
    ap.add_argument("--window", type=int, default=8)
    ap.add_argument("--omegas", type=float, nargs="+", default=[0.4, 0.2, 0.1, 0.05])
    args = ap.parse_args(argv)
    r = small_omega_report(conformal_triple(Sector(args.k, args.N)), args.omegas, Window(args.window))
    cols = ("omega", "hermitian_error", "antihermitian_error", "corrected_antihermitian_error",
            "leading_only_error", "closed_form_error")
    print(" ".join(f"{c:>16.16}" for c in cols))
    for row in r.table:
        print(" ".join(f"{row[c]:>16.4e}" for c in cols))
    print(f"orders of the Hermitian error in omega: {r.components['orders']}")
    for N in (args.N // 4, args.N // 2, args.N):
        rr = small_omega_report(conformal_triple(Sector(args.k, N)), args.omegas[-1:], Window(args.window))
        print(f"N={N:>5}: hermitian error at w={args.omegas[-1]} = {rr.table[0]['hermitian_error']:.4e}")


if __name__ == "__main__":
    main()
