"""Vectorized adaptive Gauss-Legendre panels and dyadic-shell integration.

Integrands are functions of the offset x = r - rho1 >= 0, so an endpoint
singularity always sits at x = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_RULES = {n: np.polynomial.legendre.leggauss(n) for n in (10, 20)}

SHELLS = 60
DIVERGENCE_RATIO = 0.999
DIVERGENCE_RUN = 10


class QuadratureError(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _rule(f, a, b, n):
    xs, ws = _RULES[n]
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * xs
    return half * (f(x) @ ws)


def panel_integrals(f, a, b, rtol=1e-13, atol=1e-300, max_depth=50):
    """Integral of a vectorized ``f`` over each panel [a_i, b_i].

    Each panel is bisected until the 20-point and 10-point Gauss-Legendre
    values agree to ``max(atol, rtol * |I|)``; the 20-point value is kept.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    out = np.zeros(a.shape)
    owner = np.arange(a.size)
    for depth in range(max_depth + 1):
        if a.size == 0:
            return out
        hi = _rule(f, a, b, 20)
        lo = _rule(f, a, b, 10)
        if not np.all(np.isfinite(hi)):
            bad = int(np.flatnonzero(~np.isfinite(hi))[0])
            raise QuadratureError("non-finite panel integral",
                                  {"panel": [float(a[bad]), float(b[bad])]})
        ok = np.abs(hi - lo) <= np.maximum(atol, rtol * np.abs(hi))
        np.add.at(out, owner[ok], hi[ok])
        a, b, owner = a[~ok], b[~ok], owner[~ok]
        m = 0.5 * (a + b)
        a, b, owner = np.concatenate([a, m]), np.concatenate([m, b]), np.concatenate([owner, owner])
    raise QuadratureError("adaptive panels did not converge",
                          {"unresolved": [[float(x), float(y)] for x, y in zip(a[:5], b[:5])]})


@dataclass(frozen=True)
class ShellIntegral:
    value: float  # math.inf when divergent
    shells: np.ndarray
    divergent: bool
    tail: float


def shell_integral(f, width, singular, rtol=1e-13):
    """Integral of ``f`` over [0, width] split into dyadic shells toward 0.

    Shell k covers [2^-(k+1) width, 2^-k width], k < SHELLS. For a regular
    integrand the leftover [0, 2^-SHELLS width] is one more panel. For a
    singular one the leftover is the geometric tail of the shell sequence,
    and the integral is declared divergent when DIVERGENCE_RUN consecutive
    shell ratios reach DIVERGENCE_RATIO.
    """
    k = np.arange(SHELLS + 1)
    edges = width * np.exp2(-k.astype(float))
    shells = panel_integrals(f, edges[1:], edges[:-1], rtol=rtol)
    if not singular:
        tail = float(panel_integrals(f, [0.0], [edges[-1]], rtol=rtol)[0])
        return ShellIntegral(float(np.sum(shells[::-1])) + tail, shells, False, tail)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = shells[1:] / shells[:-1]
    run = 0
    for q in ratio:
        run = run + 1 if (q >= DIVERGENCE_RATIO or not np.isfinite(q)) else 0
        if run >= DIVERGENCE_RUN:
            return ShellIntegral(math.inf, shells, True, math.inf)
    q = ratio[-1]
    tail = float(shells[-1] * q / (1.0 - q)) if 0 <= q < 1 else 0.0
    return ShellIntegral(float(np.sum(shells[::-1])) + tail, shells, False, tail)
