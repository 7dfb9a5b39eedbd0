"""Inner trace as a function of the inner datum zeta, with m2 fixed.

For mu > 2 the trace follows zeta until zeta reaches m2 - delta_m_inf and
then stays put; for mu <= 2 it follows zeta everywhere.
"""

import argparse

import numpy as np

from radial_bv import PhiMu, trace_monotonicity_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=3.0)
    ap.add_argument("--m2", type=float, default=1.0)
    ap.add_argument("--zmin", type=float, default=-3.0)
    ap.add_argument("--zmax", type=float, default=0.9)
    ap.add_argument("--n", type=int, default=50)
    args = ap.parse_args()

    st = trace_monotonicity_study(PhiMu(args.mu), 1.0, 2.0, args.m2,
                                  np.linspace(args.zmin, args.zmax, args.n))
    print(f"saturation level: {st.saturation_level}")
    for z, t, a in zip(st.zetas, st.traces, st.attained):
        print(f"zeta={z:+.4f}  trace={t:+.10f}  {'attained' if a else 'detached'}")
    print(f"monotone={st.monotone} plateau spread={st.saturated_trace_spread:.2e} "
          f"profile Linf={st.saturated_profile_linf:.2e}")


if __name__ == "__main__":
    main()
