#!/usr/bin/env python3
"""h-refinement study for the annulus Newton solver.

Solves the Monge-Ampere and special-Lagrangian Dirichlet problems on
[rIn, rOut] with boundary data sampled from closed-form solutions, then
reports max-norm errors and h-halving ratios over three grids.
"""
import argparse
import math
import time

from asymlab import EquationSpec, LaurentCoeffs, oracle_sle
from asymlab.core import AnnulusGrid
from asymlab.oracle2d import builtin
from asymlab.solver import convergence_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r-inner", type=float, default=1.0)
    ap.add_argument("--r-outer", type=float, default=8.0)
    ap.add_argument("--base", default="33,64", help="coarsest nR,nTheta")
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--spacing", choices=["uniform", "logarithmic"],
                    default="uniform")
    args = ap.parse_args()

    n_r, n_t = (int(v) for v in args.base.split(","))
    grids = [AnnulusGrid(args.r_inner, args.r_outer, n_r, n_t, args.spacing)]
    for _ in range(args.levels - 1):
        grids.append(grids[-1].refine())

    cases = [
        ("MA  (radial, c=1)", EquationSpec("MA", 2),
         builtin("ma-radial", {"c": 1.0})),
        ("SLE (Theta=pi/2)", EquationSpec("SLE", 2, theta=math.pi / 2),
         oracle_sle(LaurentCoeffs(a1=0.1, am1=0.5), math.pi / 4)),
    ]
    for name, spec, P in cases:
        t0 = time.perf_counter()
        rows = convergence_study(spec, P, grids)
        print(f"{name}  [{time.perf_counter() - t0:.1f}s]")
        print(f"  {'h':>10} {'max error':>12} {'ratio':>7} {'iters':>6}")
        for row in rows:
            ratio = "" if row["ratio"] != row["ratio"] else f"{row['ratio']:.3f}"
            print(f"  {row['h']:10.5f} {row['maxError']:12.3e} {ratio:>7} "
                  f"{row['iterations']:6d}")


if __name__ == "__main__":
    main()
