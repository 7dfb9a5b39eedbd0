"""How far inv_g_prime(eval_g_prime(t)) can return t in double precision.

Once g'_inf - g'(t) is comparable to the spacing of doubles near g'_inf,
the rounded value of g'(t) no longer determines t. The table compares the
plain composition with the complement pair, which carries g'_inf - g'(t)
directly and keeps full relative accuracy.
"""

import argparse

import numpy as np

from radial_bv import DomainError, eval_g_prime, inv_g_prime
from radial_bv.analysis import verification_densities
from radial_bv.density import eval_g_prime_complement, inv_g_prime_gap


def _rel(back, t):
    return float(np.max(np.abs(back - t) / t))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, nargs="+", default=[1e0, 1e2, 1e4, 1e6])
    args = ap.parse_args()
    t = np.array(args.t)
    print(f"{'density':<22}" + "".join(f"{x:>12.0e}" for x in t) + "   complement pair")
    for d in verification_densities():
        plain = []
        for x in t:
            try:
                plain.append(_rel(inv_g_prime(d, eval_g_prime(d, x)), x))
            except DomainError:
                plain.append(float("inf"))
        comp = _rel(inv_g_prime_gap(d, eval_g_prime_complement(d, t)), t)
        name = f"{type(d).__name__}({d.mu:g})"
        print(f"{name:<22}" + "".join(f"{e:12.1e}" for e in plain) + f"   {comp:.1e}")


if __name__ == "__main__":
    main()
