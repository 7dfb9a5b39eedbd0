"""L1 distance of regularized discrete minimizers to the relaxed solution.

Runs both the Dirichlet problem with delta/2 |grad u|^2 and the density
perturbation g + delta Phi_tau. The non-attained mu=3 case (--m2 2) shows
the boundary layer: u_delta(rho1) = m1 for every delta in the quadratic
mode while the limit detaches.
"""

import argparse
import math

from radial_bv import OracleConfig, PhiMu, RadialProblem, regularization_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=2.0)
    ap.add_argument("--m2", type=float, default=0.5 * math.log(3.0))
    ap.add_argument("--cells", type=int, default=2048)
    ap.add_argument("--deltas", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4, 1e-5])
    args = ap.parse_args()

    p = RadialProblem(1.0, 2.0, 0.0, args.m2, PhiMu(args.mu))
    cfg = OracleConfig(cells=args.cells)
    for kind in ("quadratic", "density"):
        print(kind)
        prev = None
        for pt in regularization_study(p, args.deltas, cfg, kind=kind):
            if pt.error:
                print(f"  delta={pt.delta:.0e}  failed: {pt.error}")
                continue
            rate = "" if prev is None else f"  ratio {prev / pt.l1_distance_to_limit:6.2f}"
            print(f"  delta={pt.delta:.0e}  L1={pt.l1_distance_to_limit:.4e}  E={pt.energy:.10f}{rate}")
            prev = pt.l1_distance_to_limit


if __name__ == "__main__":
    main()
