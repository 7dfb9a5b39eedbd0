"""Solver against discrete oracle on random problems, with a cell-count study.

Each line is one problem; the last block refines the oracle grid on one
attained benchmark and shows the energy approaching the flux-law value.
"""

import argparse
import math
import time

from radial_bv import OracleConfig, PhiMu, RadialProblem, minimize, oracle_agreement, random_problems, solve
from radial_bv.analysis import DEFAULT_SEED


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--cells", type=int, default=2048)
    args = ap.parse_args()

    cfg = OracleConfig(cells=args.cells)
    t0 = time.perf_counter()
    for i, p in enumerate(random_problems(args.n, args.seed)):
        rep = oracle_agreement(p, cfg)
        print(f"{i:3d} mu={p.density.mu:3.1f} gap={p.gap:7.3f} attained={rep.attained!s:5} "
              f"Linf={rep.linf:.2e} dE={rep.energy_gap:.2e} {'ok' if rep.passed else 'FAIL'}")
    print(f"{time.perf_counter() - t0:.1f} s")

    p = RadialProblem(1.0, 2.0, 0.0, 0.5 * math.log(3.0), PhiMu(2.0))
    exact = solve(p).energy.total
    for cells in (256, 512, 1024, 2048, 4096):
        e = minimize(p, OracleConfig(cells=cells)).energy
        print(f"cells={cells:5d}  E={e:.12f}  rel. excess={(e - exact) / exact:.3e}")


if __name__ == "__main__":
    main()
