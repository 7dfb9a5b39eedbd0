"""Semi-analytic generalized minimizer of the relaxed radial problem.

A radial minimizer with boundary gap m2 - m1 satisfies the flux law
r g'(|u'(r)|) = lambda on (rho1, rho2). The height it gains across the
annulus is

    delta_m(lambda) = int_{rho1}^{rho2} (g')^{-1}(lambda / r) dr,

which increases up to delta_m_inf at lambda = rho1 g'_inf. If the gap is
smaller, lambda solves delta_m(lambda) = gap and both data are attained.
Otherwise lambda saturates, the profile hangs from the outer datum and the
inner boundary pays g'_inf 2 pi rho1 (gap - delta_m_inf).

Internally every integrand is written in the offset x = r - rho1 together
with the flux deficit ``rho1 g'_inf - lambda``; this keeps the slope gap
g'_inf - lambda / r = (g'_inf x + deficit) / (rho1 + x) exact near rho1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .density import DomainError, EnergyDensity, inv_g_prime, inv_g_prime_gap
from .quadrature import QuadratureError, panel_integrals, shell_integral

DEFAULT_NODES = 512
GRID_STRETCH = 18.0
DU_CAP = 1e12
QUAD_RTOL = 1e-13
BISECTION_RTOL = 1e-10


@dataclass(frozen=True)
class RadialProblem:
    rho1: float
    rho2: float
    m1: float
    m2: float
    density: EnergyDensity

    def __post_init__(self):
        if not (0 < self.rho1 < self.rho2 and math.isfinite(self.rho2)):
            raise DomainError(f"need 0 < rho1 < rho2 < inf, got ({self.rho1}, {self.rho2})")
        if not (math.isfinite(self.m1) and math.isfinite(self.m2)):
            raise DomainError("boundary data must be finite")
        if not isinstance(self.density, EnergyDensity):
            raise DomainError("density must be an EnergyDensity")

    @property
    def width(self) -> float:
        return self.rho2 - self.rho1

    @property
    def max_flux(self) -> float:
        """rho1 * g'_inf, the largest admissible flux."""
        return self.rho1 * self.density.g_prime_inf

    @property
    def gap(self) -> float:
        return abs(self.m2 - self.m1)

    @property
    def sign(self) -> int:
        return 1 if self.m2 >= self.m1 else -1

    def with_data(self, m1: float | None = None, m2: float | None = None) -> "RadialProblem":
        return RadialProblem(self.rho1, self.rho2, self.m1 if m1 is None else m1,
                             self.m2 if m2 is None else m2, self.density)


@dataclass(frozen=True)
class EnergyBreakdown:
    bulk: float
    singular: float
    penalty_inner: float
    penalty_outer: float

    @property
    def total(self) -> float:
        return self.bulk + self.singular + self.penalty_inner + self.penalty_outer

    def as_dict(self) -> dict:
        return {"bulk": self.bulk, "singular": self.singular, "penalty_inner": self.penalty_inner,
                "penalty_outer": self.penalty_outer, "total": self.total}


@dataclass(frozen=True)
class RadialSolution:
    lam: float
    lam_deficit: float  # rho1 g'_inf - lam, carried separately for precision
    sign: int
    attained_inner: bool
    trace_inner: float
    trace_outer: float
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    singular: np.ndarray  # nodes whose |du| was capped at DU_CAP
    energy: EnergyBreakdown
    delta_m_inf: float
    panel_integrals: np.ndarray = field(repr=False)
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def profile(self) -> list[tuple[float, float, float]]:
        return list(zip(self.r.tolist(), self.u.tolist(), self.du.tolist()))

    @property
    def delta_m_infinite(self) -> bool:
        return math.isinf(self.delta_m_inf)


# -- grid -------------------------------------------------------------------

def graded_offsets(width: float, cells: int, stretch: float = GRID_STRETCH) -> np.ndarray:
    """Offsets x_i in [0, width] clustered geometrically toward 0.

    x(xi) = width (e^(stretch xi) - 1) / (e^stretch - 1) at xi = i / cells,
    so grids whose cell counts differ by a power of two are node-aligned.
    """
    xi = np.arange(cells + 1) / cells
    x = width * np.expm1(stretch * xi) / np.expm1(stretch)
    x[0], x[-1] = 0.0, width
    return x


def graded_grid(rho1: float, rho2: float, cells: int, stretch: float = GRID_STRETCH) -> np.ndarray:
    r = rho1 + graded_offsets(rho2 - rho1, cells, stretch)
    r[0], r[-1] = rho1, rho2
    return r


# -- integrands ---------------------------------------------------------------

def _slope(p: RadialProblem, deficit: float, lam: float | None = None):
    """x -> (g')^{-1}(lambda / (rho1 + x)) for lambda = rho1 g'_inf - deficit."""
    d = p.density
    ginf, rho1 = d.g_prime_inf, p.rho1

    if lam is None:
        lam = rho1 * ginf - deficit
    if lam <= deficit:
        # small flux: lambda / r is accurate, the gap form would cancel
        def f(x):
            return inv_g_prime(d, lam / (rho1 + x))

        return f

    def f(x):
        c = (ginf * x + deficit) / (rho1 + x)
        out = np.where(c > 0, 0.0, np.inf)
        pos = (c > 0) & (c < ginf)
        out[pos] = inv_g_prime_gap(d, c[pos])
        return out

    return f


def _bulk_integrand(p: RadialProblem, deficit: float):
    slope = _slope(p, deficit)
    d = p.density

    def f(x):
        return d._g(slope(x)) * (p.rho1 + x)

    return f


def _check_flux(p: RadialProblem, lam: float) -> float:
    top = p.max_flux
    if not (0 <= lam <= top * (1 + 1e-15)):
        raise DomainError(f"lambda={lam} outside [0, rho1 g'_inf = {top}]")
    return max(top - lam, 0.0)


def _delta_m_deficit(p: RadialProblem, deficit: float, lam: float | None = None) -> float:
    if deficit >= p.max_flux or lam == 0:
        return 0.0
    res = shell_integral(_slope(p, deficit, lam), p.width, singular=(deficit == 0.0), rtol=QUAD_RTOL)
    return res.value


def delta_m(p: RadialProblem, lam: float) -> float:
    """Height gain of the flux-lambda profile; math.inf when it diverges."""
    return _delta_m_deficit(p, _check_flux(p, lam), float(lam))


def delta_m_infinity(p: RadialProblem) -> float:
    """delta_m at the saturated flux rho1 g'_inf, or math.inf if divergent."""
    return _delta_m_deficit(p, 0.0)


def solve_flux(p: RadialProblem, gap: float, dm_inf: float | None = None) -> float:
    """Flux deficit rho1 g'_inf - lambda with delta_m(lambda) = gap (attained case)."""
    top = p.max_flux
    dm_inf = delta_m_infinity(p) if dm_inf is None else dm_inf
    if not gap < dm_inf:
        raise ValueError("gap is not attainable")

    def resid(deficit):
        return _delta_m_deficit(p, deficit) - gap

    lo = top * 1e-14
    if math.isinf(dm_inf):
        lo = 0.5 * top
        while resid(lo) < 0:
            lo *= 0.5
            if lo < top * 1e-300:
                raise QuadratureError("could not bracket the flux", {"gap": gap})
    elif resid(lo) < 0:
        lo = 0.0
    hi = top
    deficit = brentq(resid, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400)
    return deficit


def _profile_panels(p: RadialProblem, deficit: float, r: np.ndarray) -> np.ndarray:
    """Integrals of |u'| over each grid cell; the first cell may be singular."""
    x = r - p.rho1
    f = _slope(p, deficit)
    out = np.empty(len(r) - 1)
    out[1:] = panel_integrals(f, x[1:-1], x[2:], rtol=QUAD_RTOL)
    out[0] = shell_integral(f, x[1], singular=(deficit == 0.0), rtol=QUAD_RTOL).value
    return out


def assemble(p: RadialProblem, deficit: float, trace_inner: float, attained: bool,
             dm_inf: float, n_nodes: int = DEFAULT_NODES,
             diagnostics: dict | None = None) -> RadialSolution:
    """Build the solution with flux rho1 g'_inf - deficit, anchored at (rho2, m2)."""
    sign = p.sign
    lam = p.max_flux - deficit
    r = graded_grid(p.rho1, p.rho2, n_nodes - 1)
    if deficit >= p.max_flux:  # lambda = 0
        u = np.full(r.shape, float(p.m2))
        du = np.zeros(r.shape)
        panels = np.zeros(len(r) - 1)
        flags = np.zeros(r.shape, dtype=bool)
    else:
        panels = _profile_panels(p, deficit, r)
        drop = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])
        u = p.m2 - sign * drop
        u[0] = trace_inner
        slope = _slope(p, deficit)(r - p.rho1)
        flags = ~np.isfinite(slope) | (slope > DU_CAP)
        if deficit == 0.0:
            flags[0] = True
        du = sign * np.where(flags, DU_CAP, slope)
    energy = _energy(p, deficit, trace_inner)
    return RadialSolution(
        lam=float(lam), lam_deficit=float(deficit), sign=sign, attained_inner=bool(attained),
        trace_inner=float(trace_inner), trace_outer=float(p.m2), r=r, u=u, du=du,
        singular=flags, energy=energy, delta_m_inf=float(dm_inf), panel_integrals=panels,
        diagnostics=diagnostics or {},
    )


def _energy(p: RadialProblem, deficit: float, trace_inner: float) -> EnergyBreakdown:
    ginf = p.density.g_prime_inf
    if deficit >= p.max_flux:
        bulk = 0.0
    else:
        res = shell_integral(_bulk_integrand(p, deficit), p.width, singular=(deficit == 0.0),
                             rtol=QUAD_RTOL)
        if res.divergent:
            raise QuadratureError("bulk energy diverges", {"deficit": deficit})
        bulk = 2 * math.pi * res.value
    pen_in = ginf * 2 * math.pi * p.rho1 * abs(trace_inner - p.m1)
    return EnergyBreakdown(bulk=bulk, singular=0.0, penalty_inner=pen_in, penalty_outer=0.0)


def solve(p: RadialProblem, n_nodes: int = DEFAULT_NODES) -> RadialSolution:
    """Generalized minimizer of the relaxed radial problem."""
    gap = p.gap
    dm_inf = delta_m_infinity(p)
    if gap == 0:
        return assemble(p, p.max_flux, float(p.m2), True, dm_inf, n_nodes)
    if dm_inf > gap:
        deficit = solve_flux(p, gap, dm_inf)
        residual = _delta_m_deficit(p, deficit) - gap
        diag = {"bisection_residual": residual}
        if abs(residual) > BISECTION_RTOL * max(1.0, gap):
            raise QuadratureError("flux bisection failed to reach tolerance", diag)
        return assemble(p, deficit, float(p.m1), True, dm_inf, n_nodes, diag)
    return assemble(p, 0.0, p.m2 - p.sign * dm_inf, False, dm_inf, n_nodes)


def solution_with_flux(p: RadialProblem, lam: float, n_nodes: int = DEFAULT_NODES) -> RadialSolution:
    """Profile with a prescribed flux, anchored at (rho2, m2); m1 only enters the penalty."""
    deficit = _check_flux(p, lam)
    trace = p.m2 - p.sign * _delta_m_deficit(p, deficit)
    attained = abs(trace - p.m1) <= 1e-12 * max(1.0, abs(p.m1))
    return assemble(p, deficit, trace, attained, delta_m_infinity(p), n_nodes)


def energy(p: RadialProblem, sol: RadialSolution) -> EnergyBreakdown:
    """Bulk, singular and boundary-penalty parts of the relaxed energy of ``sol``."""
    return _energy(p, sol.lam_deficit, sol.trace_inner)


def profile_at(sol: RadialSolution, p: RadialProblem, r):
    """(u(r), u'(r)) by integrating the flux law down from the nearest grid node above r.

    u'(rho1) is +-inf on a saturated solution.
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(~((r_arr >= p.rho1) & (r_arr <= p.rho2))):
        raise DomainError(f"r outside [{p.rho1}, {p.rho2}]")
    grid = sol.r
    # first node at or above r
    j_up = np.clip(np.searchsorted(grid, r_arr, side="left"), 0, len(grid) - 1)
    x = r_arr - p.rho1
    x_up = grid[j_up] - p.rho1
    if sol.lam_deficit >= p.max_flux:
        u = np.full(r_arr.shape, sol.trace_outer)
        du = np.zeros(r_arr.shape)
    else:
        f = _slope(p, sol.lam_deficit)
        need = (x < x_up) & (x > 0)
        part = np.zeros(r_arr.shape)
        if need.any():
            part[need] = panel_integrals(f, x[need], x_up[need], rtol=QUAD_RTOL)
        u = sol.u[j_up] - sol.sign * part
        u = np.where(x == 0, sol.u[0], u)
        slope = f(x)
        if sol.lam_deficit == 0.0:
            slope = np.where(x == 0, np.inf, slope)
        du = sol.sign * slope
    if np.ndim(r) == 0:
        return float(u[0]), float(du[0])
    return u, du


def closed_form_profile(mu: float, lam: float, r, rho2: float):
    """Exact profile for g = Phi_mu, mu in {3/2, 2, 3}, normalized to 0 at r = rho2.

    Antiderivatives of u' = (r / (r - lam))^(1/(mu-1)) - 1:
      mu = 3/2:  2 lam ln(r - lam) - lam^2 / (r - lam)
      mu = 2:    lam ln(r - lam)
      mu = 3:    sqrt(r^2 - r lam) - r + (lam / 2) ln(2r - lam + 2 sqrt(r^2 - r lam))
    """
    r_arr = np.asarray(r, dtype=float)

    def F(s):
        if mu == 1.5:
            return 2 * lam * np.log(s - lam) - lam * lam / (s - lam)
        if mu == 2:
            return lam * np.log(s - lam)
        if mu == 3:
            root = np.sqrt(s * (s - lam))
            return root - s + 0.5 * lam * np.log(2 * s - lam + 2 * root)
        raise DomainError(f"closed form only for mu in (1.5, 2, 3), got {mu}")

    if mu in (1.5, 2) and np.any(r_arr <= lam):
        raise DomainError("closed form needs r > lambda")
    if mu == 3 and np.any(r_arr < lam):
        raise DomainError("closed form needs r >= lambda")
    out = F(r_arr) - F(np.asarray(rho2, dtype=float))
    return float(out) if np.ndim(r) == 0 else out
