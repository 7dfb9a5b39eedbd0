"""Flux-law profiles for Phi_mu against hand-derived antiderivatives.

Prints the largest deviation on 100 radii for every (mu, lambda) pair and,
with --csv, writes the profiles themselves.
"""

import argparse
import csv

import numpy as np

from radial_bv import PhiMu, RadialProblem, closed_form_profile, profile_at, solution_with_flux


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho2", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--csv", help="write r, mu, lambda, u_solver, u_closed")
    args = ap.parse_args()

    r = np.linspace(1.0, args.rho2, args.points)
    rows = []
    print(f"{'mu':>5} {'lambda':>7} {'max |error|':>12}")
    for mu in (1.5, 2.0, 3.0):
        p = RadialProblem(1.0, args.rho2, 0.0, 0.0, PhiMu(mu))
        for lam in (0.25, 0.5, 0.9):
            u, _ = profile_at(solution_with_flux(p, lam), p, r)
            ref = closed_form_profile(mu, lam, r, args.rho2)
            print(f"{mu:5.2f} {lam:7.2f} {np.max(np.abs(u - ref)):12.3e}")
            rows += [(x, mu, lam, a, b) for x, a, b in zip(r, u, ref)]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "mu", "lambda", "u_solver", "u_closed"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
