"""Direct minimization of the discretized relaxed energy over piecewise-linear radial functions.

This path knows nothing about the flux law. It sums the exact relaxed
energy of a continuous piecewise-linear u on a graded radial mesh (g(|u'|)
is constant per cell, so int 2 pi r g dr = 2 pi r_mid h g) plus the two
boundary penalties, and minimizes it by damped Newton. The kink |u - m| of the penalties is smoothed to
sqrt((u - m)^2 + eps^2) during the solve; reported energies are unsmoothed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .density import EnergyDensity, make_regularized, tau_window
from .solver import RadialProblem, graded_grid, profile_at, solve


@dataclass(frozen=True)
class Relaxed:
    pass


@dataclass(frozen=True)
class QuadraticReg:
    """delta/2 |grad u|^2 added, both boundary values imposed exactly."""
    delta: float


@dataclass(frozen=True)
class DensityReg:
    """g replaced by delta Phi_tau + g; tau=None picks the midpoint of its window."""
    delta: float
    tau: float | None = None


@dataclass(frozen=True)
class OracleConfig:
    cells: int = 2048
    penalty_smoothing: float = 1e-8
    tol: float = 1e-10
    max_iters: int = 500
    mode: Relaxed | QuadraticReg | DensityReg = field(default_factory=Relaxed)

    def __post_init__(self):
        if self.cells < 1 or self.max_iters < 1:
            raise ValueError("cells and max_iters must be positive")
        if self.penalty_smoothing < 0 or self.tol <= 0:
            raise ValueError("penalty_smoothing must be >= 0 and tol > 0")


@dataclass
class DiscreteRadialFunction:
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.nodes.shape != self.values.shape or self.nodes.ndim != 1 or self.nodes.size < 2:
            raise ValueError("nodes and values must be matching 1-d arrays")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")


@dataclass
class MinimizeResult:
    function: DiscreteRadialFunction
    energy: float
    iterations: int
    converged: bool
    grad_norm: float
    energy_history: list = field(default_factory=list, repr=False)


class OracleDidNotConverge(RuntimeError):
    def __init__(self, message, result: MinimizeResult):
        super().__init__(message)
        self.result = result


def oracle_grid(p: RadialProblem, cfg: OracleConfig) -> np.ndarray:
    return graded_grid(p.rho1, p.rho2, cfg.cells)


def effective_density(p: RadialProblem, cfg: OracleConfig) -> EnergyDensity:
    mode = cfg.mode
    if isinstance(mode, DensityReg) and mode.delta > 0:
        return make_regularized(p.density, mode.delta, mode.tau)
    return p.density


class _Energy:
    """Smoothed objective in increment coordinates.

    Free variables are the increments v_i = u_{i+1} - u_i of every cell but
    the last, plus the boundary offsets a0 = u_0 - m1 and aN = u_N - m2 of
    the ends that are not clamped (Dirichlet problems clamp both). The last,
    widest cell takes up the remainder by exact summation. Slopes v_i / h_i
    are then exact even on cells of relative width 1e-11, and rounding in
    the sum lands where it moves a slope the least. With nodal values as
    unknowns, cancellation puts a floor of about 1e-6 under the gradient.
    """

    def __init__(self, p: RadialProblem, cfg: OracleConfig, nodes: np.ndarray,
                 clamp: tuple[bool, bool] | None = None):
        self.p = p
        self.cfg = cfg
        self.d = effective_density(p, cfg)
        self.r = nodes
        self.h = np.diff(nodes)
        self.w = 2 * math.pi * 0.5 * (nodes[:-1] + nodes[1:])  # 2 pi r_mid
        self.mode_delta = cfg.mode.delta if isinstance(cfg.mode, QuadraticReg) else 0.0
        self.homotopy = 0.0  # temporary convexifier, zero in the final stage
        self.dirichlet = isinstance(cfg.mode, QuadraticReg)
        if clamp is None:
            clamp = (self.dirichlet, self.dirichlet)
        self.free = (not clamp[0], not clamp[1])
        ginf = self.d.g_prime_inf
        self.pen_coef = (ginf * 2 * math.pi * p.rho1, ginf * 2 * math.pi * p.rho2)
        n = self.h.size
        # d v_last / d z: -1 for every head increment and for a0, +1 for aN
        tail = [-1.0] * self.free[0] + [1.0] * self.free[1]
        self.b = np.concatenate([-np.ones(n - 1), tail])

    @property
    def quad_delta(self):
        return self.mode_delta + self.homotopy

    # -- coordinates --------------------------------------------------------
    def split(self, z):
        n = self.h.size
        head = z[:n - 1]
        k = n - 1
        a0 = an = 0.0
        if self.free[0]:
            a0, k = float(z[k]), k + 1
        if self.free[1]:
            an = float(z[k])
        last = math.fsum([self.p.m2, an, -self.p.m1, -a0, *(-head)])
        return np.append(head, last), a0, an

    def from_values(self, u):
        u = np.asarray(u, dtype=float)
        ends = [u[0] - self.p.m1] * self.free[0] + [u[-1] - self.p.m2] * self.free[1]
        return np.concatenate([np.diff(u)[:-1], ends])

    def to_values(self, z):
        v, a0, an = self.split(z)
        u = np.empty(v.size + 1)
        u[0] = self.p.m1 + a0
        u[1:] = u[0] + np.cumsum(v)
        u[-1] = self.p.m2 + an
        return u

    @staticmethod
    def _pen(x, eps):
        if eps == 0:
            return abs(x), float(np.sign(x)), 0.0
        root = math.hypot(x, eps)
        return root, x / root, eps * eps / root ** 3

    # -- objective ----------------------------------------------------------
    def value(self, z, eps=None):
        eps = self.cfg.penalty_smoothing if eps is None else eps
        v, a0, an = self.split(z)
        s = v / self.h
        e = float(np.sum(self.w * self.h * self.d._g(np.abs(s))))
        if self.quad_delta:
            e += 0.5 * self.quad_delta * float(np.sum(self.w * self.h * s * s))
        if self.free[0]:
            e += self.pen_coef[0] * self._pen(a0, eps)[0]
        if self.free[1]:
            e += self.pen_coef[1] * self._pen(an, eps)[0]
        return e

    def cell_terms(self, v):
        """Per-cell flux phi'(v_i) and curvature phi''(v_i)."""
        s = v / self.h
        a = np.abs(s)
        flux = self.w * np.sign(s) * self.d._dg(a)
        curv = self.w * self.d._d2g(a) / self.h
        if self.quad_delta:
            flux = flux + self.quad_delta * self.w * s
            curv = curv + self.quad_delta * self.w / self.h
        return flux, curv

    def nodal_gradient(self, z, eps):
        """dE/du_j at every node that is free to move."""
        v, a0, an = self.split(z)
        flux, _ = self.cell_terms(v)
        g = np.zeros(v.size + 1)
        g[:-1] -= flux
        g[1:] += flux
        g[0] += self.pen_coef[0] * self._pen(a0, eps)[1]
        g[-1] += self.pen_coef[1] * self._pen(an, eps)[1]
        return g[(0 if self.free[0] else 1):(g.size if self.free[1] else -1)]

    def _local(self, z, eps):
        """Gradient in z, the diagonal D and rank-one weight beta of the Hessian."""
        v, a0, an = self.split(z)
        flux, curv = self.cell_terms(v)
        grad = flux[:-1] + self.b[:v.size - 1] * flux[-1]
        diag = curv[:-1]
        c0, cn = self.pen_coef
        if self.free[0]:
            _, p0, q0 = self._pen(a0, eps)
            grad = np.append(grad, c0 * p0 - flux[-1])
            diag = np.append(diag, c0 * q0)
        if self.free[1]:
            _, pn, qn = self._pen(an, eps)
            grad = np.append(grad, cn * pn + flux[-1])
            diag = np.append(diag, cn * qn)
        return grad, diag, float(curv[-1])

    def newton_step(self, z, eps):
        """Newton direction and the directional derivative along it.

        The Hessian is D + beta b b^T, inverted by Sherman-Morrison. D can
        vanish in the penalty entries far from the kink, so it is floored
        relative to its largest entry; the line search absorbs the bias.
        """
        grad, diag, beta = self._local(z, eps)
        diag = np.maximum(diag, 1e-14 * float(np.max(diag)) + 1e-300)
        b = self.b
        x = grad / diag
        y = b / diag
        coef = beta * float(b @ x) / (1.0 + beta * float(b @ y))
        dz = -(x - coef * y)
        return dz, float(grad @ dz)

    def gradient_step(self, z, eps):
        """Diagonally scaled steepest descent, the fallback direction."""
        grad, diag, beta = self._local(z, eps)
        dz = -grad / np.maximum(diag + beta, 1e-300)
        return dz, float(grad @ dz)


def discrete_energy(p: RadialProblem, f: DiscreteRadialFunction, cfg: OracleConfig,
                    smoothed: bool = False) -> float:
    """Relaxed (or regularized) energy of a piecewise-linear radial function.

    ``smoothed=False`` evaluates the penalties with the exact absolute value.
    In QuadraticReg mode the boundary values are taken as given.
    """
    nodes = oracle_grid(p, cfg)
    if f.nodes.shape != nodes.shape or not np.allclose(f.nodes, nodes, rtol=1e-14, atol=0):
        raise ValueError("function is not defined on the grid implied by the config")
    obj = _Energy(p, cfg, nodes)
    u = f.values
    s = np.diff(u) / obj.h
    e = float(np.sum(obj.w * obj.h * obj.d._g(np.abs(s))))
    if obj.mode_delta:
        e += 0.5 * obj.mode_delta * float(np.sum(obj.w * obj.h * s * s))
    eps = cfg.penalty_smoothing if smoothed else 0.0
    e += obj.pen_coef[0] * obj._pen(float(u[0] - p.m1), eps)[0]
    e += obj.pen_coef[1] * obj._pen(float(u[-1] - p.m2), eps)[0]
    return e


def _newton(obj: _Energy, z, eps, tol, max_iters, history, callback=None):
    e = obj.value(z, eps)
    g_norm = math.inf
    for it in range(1, max_iters + 1):
        grad = obj.nodal_gradient(z, eps)
        g_norm = float(np.max(np.abs(grad))) if grad.size else 0.0
        if g_norm <= tol * (1 + abs(e)):
            return z, e, it - 1, True, g_norm
        dz, slope = obj.newton_step(z, eps)
        if not (slope < 0 and np.all(np.isfinite(dz))):
            dz, slope = obj.gradient_step(z, eps)
        z_new = None
        if -slope <= 1e-13 * (1 + abs(e)):
            # predicted decrease below the roundoff of E: judge by the gradient instead
            trial = z + dz
            if float(np.max(np.abs(obj.nodal_gradient(trial, eps)))) < g_norm:
                z_new, e_new = trial, obj.value(trial, eps)
        if z_new is None:
            t = 1.0
            for _ in range(60):
                trial = z + t * dz
                e_trial = obj.value(trial, eps)
                if e_trial <= e + 1e-4 * t * slope:
                    z_new, e_new = trial, e_trial
                    break
                t *= 0.5
        if z_new is None:
            return z, e, it, False, g_norm
        z, e = z_new, e_new
        history.append(obj.value(z, 0.0))
        if callback is not None:
            callback(obj.to_values(z))
    return z, e, max_iters, False, g_norm


# (penalty smoothing, quadratic convexifier) per warm-start stage
_STAGES = [(1e-2, 1.0), (1e-3, 1e-1), (1e-4, 1e-2), (1e-5, 1e-3), (1e-6, 1e-4), (1e-7, 1e-6)]


def minimize(p: RadialProblem, cfg: OracleConfig = OracleConfig(), initial=None,
             callback=None, raise_on_failure: bool = True) -> MinimizeResult:
    """Minimize the discrete energy for ``cfg.mode``.

    The default start is the straight line between the boundary data.
    Warm-start stages shrink the penalty smoothing toward
    ``cfg.penalty_smoothing`` while a vanishing term c/2 |grad u|^2
    (c = 1 down to 1e-6) keeps early Newton steps well conditioned; the
    last stage minimizes the true objective. ``callback(values)`` sees every
    accepted iterate.

    Raises:
        OracleDidNotConverge: carrying the best iterate, when the gradient
            test ``max|dE/du| <= tol (1 + |E|)`` fails within ``max_iters``.
    """
    nodes = oracle_grid(p, cfg)
    obj = _Energy(p, cfg, nodes)
    if initial is None:
        initial = p.m1 + (p.m2 - p.m1) * (nodes - p.rho1) / p.width
        initial[0], initial[-1] = p.m1, p.m2
    initial = np.array(initial, dtype=float)
    if initial.shape != nodes.shape:
        raise ValueError("initial guess must have one value per grid node")
    if obj.dirichlet:
        initial[0], initial[-1] = p.m1, p.m2
    z = obj.from_values(initial)
    history: list = []
    eps_final = cfg.penalty_smoothing
    iters = 0
    for eps, extra in _STAGES:
        obj.homotopy = extra
        eps = max(eps, eps_final)
        z, _, k, _, _ = _newton(obj, z, eps, max(cfg.tol, 1e-8), cfg.max_iters, history, callback)
        iters += k
    obj.homotopy = 0.0
    z, _, k, ok, g_norm = _newton(obj, z, eps_final, cfg.tol, cfg.max_iters, history, callback)
    iters += k
    u, e = obj.to_values(z), obj.value(z, 0.0)
    if ok and not obj.dirichlet:
        polished = _clamp_kinks(p, cfg, nodes, obj, z, history, callback)
        if polished is not None and polished[1] < e:
            u, e, k, g_norm = polished
            iters += k
    res = MinimizeResult(DiscreteRadialFunction(nodes, u), e, iters, ok, g_norm, history)
    if not ok and raise_on_failure:
        raise OracleDidNotConverge(
            f"gradient norm {g_norm:.3e} above tolerance after {iters} Newton steps", res)
    return res


KINK_WIDTH = 1e4  # boundary offsets within this many smoothing widths are clamp candidates


def _clamp_kinks(p, cfg, nodes, obj, z, history, callback):
    """Re-solve with near-kink boundary values pinned to the data.

    The smoothed penalty leaves a boundary value about eps off the data
    even where the unsmoothed minimizer sits exactly on it, which costs
    O(eps) energy. Pinning such ends and re-solving removes that cost. The
    pinned point is kept only if it satisfies the subgradient condition
    |dE_bulk/du| <= g'_inf 2 pi rho at every pinned end (the caller also
    requires a lower energy).
    """
    _, a0, an = obj.split(z)
    width = KINK_WIDTH * max(cfg.penalty_smoothing, 1e-14)
    clamp = (abs(a0) <= width, abs(an) <= width)
    if not any(clamp):
        return None
    pinned = _Energy(p, cfg, nodes, clamp)
    u = obj.to_values(z)
    if clamp[0]:
        u[0] = p.m1
    if clamp[1]:
        u[-1] = p.m2
    z2 = pinned.from_values(u)
    z2, _, k, ok, g_norm = _newton(pinned, z2, cfg.penalty_smoothing, cfg.tol, cfg.max_iters,
                                   history, callback)
    if not ok:
        return None
    v, _, _ = pinned.split(z2)
    flux, _ = pinned.cell_terms(v)
    if (clamp[0] and abs(flux[0]) > pinned.pen_coef[0]) or (clamp[1] and abs(flux[-1]) > pinned.pen_coef[1]):
        return None
    return pinned.to_values(z2), pinned.value(z2, 0.0), k, g_norm


def l1_distance(p: RadialProblem, f: DiscreteRadialFunction, sol) -> float:
    """2 pi int |u_f - u_sol| r dr, trapezoidal on the function's nodes."""
    u_ref, _ = profile_at(sol, p, f.nodes)
    y = np.abs(f.values - u_ref) * f.nodes
    return float(2 * math.pi * np.sum(0.5 * (y[:-1] + y[1:]) * np.diff(f.nodes)))


@dataclass(frozen=True)
class RegularizationPoint:
    delta: float
    l1_distance_to_limit: float | None
    energy: float | None
    error: str | None = None


def regularization_study(p: RadialProblem, deltas, cfg: OracleConfig = OracleConfig(),
                         kind: str = "quadratic", tau: float | None = None) -> list[RegularizationPoint]:
    """Distance of regularized discrete minimizers to the relaxed minimizer as delta shrinks.

    ``kind`` is ``"quadratic"`` (Dirichlet, delta/2 |grad u|^2) or
    ``"density"`` (g + delta Phi_tau, relaxed boundary terms).
    """
    deltas = list(deltas)
    if any(d < 0 for d in deltas) or any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be nonnegative and strictly decreasing")
    limit = solve(p)
    if tau is None and kind == "density":
        lo, hi = tau_window(p.density)
        tau = 0.5 * (lo + hi)
    out = []
    for delta in deltas:
        if kind == "quadratic":
            mode = QuadraticReg(delta) if delta > 0 else Relaxed()
        elif kind == "density":
            mode = DensityReg(delta, tau)
        else:
            raise ValueError(f"unknown regularization kind {kind!r}")
        try:
            res = minimize(p, replace(cfg, mode=mode))
        except (OracleDidNotConverge, ValueError) as exc:
            out.append(RegularizationPoint(delta, None, None, str(exc)))
            continue
        out.append(RegularizationPoint(delta, l1_distance(p, res.function, limit), res.energy))
    return out
