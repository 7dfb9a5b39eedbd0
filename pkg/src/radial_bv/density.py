"""Linear-growth, mu-elliptic energy densities g: [0, inf) -> [0, inf).

Every density exposes g, g', g'' and the complementary slope
``g'_inf - g'(t)``. The complement is what the radial solver actually
consumes: near the singular radius the flux ratio lambda/r sits within
rounding distance of the recession slope, and only the complement keeps
the inverse derivative accurate there.

All methods accept scalars or numpy arrays. Domain checks happen in the
module-level ``eval_*`` functions; the methods themselves assume valid input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ArrayLike = float | np.ndarray


class DomainError(ValueError):
    """Argument outside the domain of a density operation."""


def _as_array(t):
    return np.asarray(t, dtype=float)


def _unwrap(x, like):
    """Return a python float when the caller passed a scalar."""
    if np.ndim(like) == 0:
        return float(np.asarray(x).reshape(-1)[0])
    return x


class EnergyDensity:
    """Base class. Subclasses implement the ``_g``, ``_dg``, ``_d2g`` family."""

    #: lower and upper ellipticity exponents
    mu: float
    mu_bar: float
    g_prime_inf: float
    g_prime_inf_estimated: bool = False

    @property
    def name(self) -> str:
        return type(self).__name__

    def params(self) -> dict:
        return {}

    # -- pointwise ---------------------------------------------------------
    def _g(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _dg(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _d2g(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _dg_complement(self, t: np.ndarray) -> np.ndarray:
        """g'_inf - g'(t), computed without cancellation where possible."""
        return self.g_prime_inf - self._dg(t)

    def _inv_dg(self, s: np.ndarray) -> np.ndarray:
        return _invert_monotone(self, s, self.g_prime_inf - s)

    def _inv_dg_gap(self, c: np.ndarray) -> np.ndarray:
        """Solve g'_inf - g'(t) = c for t; c in (0, g'_inf]."""
        return _invert_monotone(self, self.g_prime_inf - c, c)


@dataclass(frozen=True)
class PhiMu(EnergyDensity):
    """g(t) = (mu - 1) int_0^t int_0^s (1 + r)^(-mu) dr ds."""

    mu: float = 2.0
    mu_bar: float | None = None
    g_prime_inf: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not self.mu > 1:
            raise DomainError(f"PhiMu needs mu > 1, got {self.mu}")
        if self.mu_bar is None:
            object.__setattr__(self, "mu_bar", float(self.mu))

    def params(self):
        return {"mu": self.mu}

    def _g(self, t):
        mu = self.mu
        lt = np.log1p(t)
        if mu == 2.0:
            big = t - lt
        else:
            big = t - np.expm1((2.0 - mu) * lt) / (2.0 - mu)
        # Taylor branch: the closed form cancels catastrophically for small t
        ts = np.minimum(t, 0.02)
        small = np.zeros_like(ts)
        term = (mu - 1.0) * ts * ts / 2.0
        for j in range(14):
            small = small + term
            term = -term * (mu + j) * ts / (j + 3.0)
        return np.where(t < 0.02, small, big)

    def _dg(self, t):
        return -np.expm1((1.0 - self.mu) * np.log1p(t))

    def _d2g(self, t):
        return (self.mu - 1.0) * np.exp(-self.mu * np.log1p(t))

    def _dg_complement(self, t):
        return np.exp((1.0 - self.mu) * np.log1p(t))

    def _inv_dg(self, s):
        return np.expm1(-np.log1p(-s) / (self.mu - 1.0))

    def _inv_dg_gap(self, c):
        return np.expm1(-np.log(c) / (self.mu - 1.0))


@dataclass(frozen=True)
class MinimalSurface(EnergyDensity):
    """g(t) = sqrt(1 + t^2) - 1."""

    mu: float = field(default=3.0, init=False)
    mu_bar: float = field(default=3.0, init=False)
    g_prime_inf: float = field(default=1.0, init=False)

    def _g(self, t):
        return t * t / (1.0 + np.hypot(1.0, t))

    def _dg(self, t):
        return t / np.hypot(1.0, t)

    def _d2g(self, t):
        return np.hypot(1.0, t) ** -3

    def _dg_complement(self, t):
        h = np.hypot(1.0, t)
        return 1.0 / (h * (h + t))

    def _inv_dg(self, s):
        return s / np.sqrt((1.0 - s) * (1.0 + s))

    def _inv_dg_gap(self, c):
        return (1.0 - c) / np.sqrt(c * (2.0 - c))


@dataclass(frozen=True)
class GTildeK(EnergyDensity):
    """g(t) = (1 + t^k)^(1/k) - 1, mu-elliptic with mu = k + 1.

    For k != 2 the lower bound fails at t = 0 (g''(0) is 0 for k > 2 and
    infinite for k < 2); ``verify_ellipticity`` reports this when 0 is sampled.
    """

    k: float = 2.0
    mu: float = field(default=0.0, init=False)
    mu_bar: float = field(default=0.0, init=False)
    g_prime_inf: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not self.k > 1:
            raise DomainError(f"GTildeK needs k > 1, got {self.k}")
        object.__setattr__(self, "mu", self.k + 1.0)
        object.__setattr__(self, "mu_bar", self.k + 1.0)

    def params(self):
        return {"k": self.k}

    def _log1p_tk(self, t):
        k = self.k
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            lt = np.log(t)
            big = k * lt + np.log1p(np.exp(-k * lt))
            small = np.log1p(np.exp(k * lt))
        return np.where(t > 1.0, big, small)

    def _g(self, t):
        return np.expm1(self._log1p_tk(t) / self.k)

    def _dg(self, t):
        k = self.k
        with np.errstate(divide="ignore"):
            out = np.exp((k - 1.0) / k * (k * np.log(t) - self._log1p_tk(t)))
        return np.where(t > 0, out, 0.0)

    def _d2g(self, t):
        k = self.k
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (k - 1.0) * np.exp((k - 2.0) * np.log(t) + (1.0 / k - 2.0) * self._log1p_tk(t))
        at0 = (k - 1.0) if k == 2.0 else (0.0 if k > 2.0 else np.inf)
        return np.where(t > 0, out, at0)

    def _dg_complement(self, t):
        k = self.k
        with np.errstate(divide="ignore", over="ignore"):
            out = -np.expm1(-(k - 1.0) / k * np.log1p(t ** -k))
        return np.where(t > 0, out, 1.0)

    def _inv_from_log_s(self, log_s):
        k = self.k
        a = k / (k - 1.0) * log_s  # log q, q = s^(k/(k-1))
        with np.errstate(divide="ignore"):
            return np.exp((a - np.log(-np.expm1(a))) / k)

    def _inv_dg(self, s):
        with np.errstate(divide="ignore"):
            out = self._inv_from_log_s(np.log(s))
        return np.where(s > 0, out, 0.0)

    def _inv_dg_gap(self, c):
        return self._inv_from_log_s(np.log1p(-c))


# Gauss-Legendre pairs shared by the tabulated density
_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(20)


class CustomPsi(EnergyDensity):
    """Density Psi(t) = int_0^t int_0^s psi(r) dr ds for a user-supplied psi > 0.

    g' and the first moment int_0^t s psi(s) ds are tabulated once on an
    adaptively refined panel grid in x = log(1 + t); g follows from
    g(t) = t g'(t) - int_0^t s psi(s) ds. Evaluation between table nodes
    adds one fixed-order Gauss-Legendre pass over the partial panel.
    psi must be continuous and accept numpy arrays.
    """

    X_MAX = 62.0  # t up to ~1e27

    def __init__(self, psi: Callable, mu: float, mu_bar: float, rtol: float = 1e-10):
        if not mu > 1 or not 1 <= mu_bar <= mu:
            raise DomainError(f"need mu > 1 and 1 <= mu_bar <= mu, got ({mu}, {mu_bar})")
        self.psi = psi
        self.mu = float(mu)
        self.mu_bar = float(mu_bar)
        self._rtol = rtol
        self._build_table()
        self.g_prime_inf = max(self._estimate_g_prime_inf(), float(self._dg_tab[-1]))
        self.g_prime_inf_estimated = True
        # the part of g'_inf beyond the table, so the complement stays consistent with it
        self._beyond = self.g_prime_inf - float(self._dg_tab[-1])

    def params(self):
        return {"mu": self.mu, "mu_bar": self.mu_bar}

    def _psi(self, t):
        out = np.asarray(self.psi(t), dtype=float)
        if out.shape != np.shape(t):
            out = np.vectorize(self.psi, otypes=[float])(t)
        return out

    def _panel(self, a, b, rule):
        xs, ws = rule
        half = 0.5 * (b - a)
        y = (a + b)[..., None] * 0.5 + half[..., None] * xs
        t = np.expm1(y)
        f = self._psi(t) * np.exp(y)
        return half * (f @ ws), half * ((f * t) @ ws)

    MAX_PANELS = 200_000

    def _build_table(self):
        edges = list(np.linspace(0.0, self.X_MAX, int(self.X_MAX / 0.25) + 1))
        final = []
        stack = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)][::-1]
        while stack:
            a, b = stack.pop()
            lo = self._panel(np.array(a), np.array(b), _GL_LO)
            hi = self._panel(np.array(a), np.array(b), _GL_HI)
            err = max(abs(hi[j] - lo[j]) / max(abs(hi[j]), 1e-300) for j in (0, 1))
            if err > self._rtol * 1e-2 and b - a > 1e-6:
                m = 0.5 * (a + b)
                stack.append((m, b))
                stack.append((a, m))
            else:
                final.append((a, b, float(hi[0]), float(hi[1])))
                if len(final) > self.MAX_PANELS:
                    raise DomainError(f"psi not resolved within {self.MAX_PANELS} table panels; "
                                      "strongly oscillating psi is not supported")
        self._x = np.array([f[0] for f in final] + [final[-1][1]])
        panels = np.array([f[2] for f in final])
        self._dg_tab = np.concatenate([[0.0], np.cumsum(panels)])
        # int_x^X_MAX of the g' integrand, summed from the far end so it keeps
        # relative accuracy where g' is already close to its limit
        self._tail_tab = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])
        self._m1_tab = np.concatenate([[0.0], np.cumsum([f[3] for f in final])])

    def _tables_at(self, t):
        x = np.log1p(t)
        i = np.clip(np.searchsorted(self._x, x, side="right") - 1, 0, len(self._x) - 2)
        dg_part, m1_part = self._panel(self._x[i], x, _GL_HI)
        return self._dg_tab[i] + dg_part, self._m1_tab[i] + m1_part

    def _estimate_g_prime_inf(self):
        # Aitken extrapolation over T, 10T, 100T
        x0, x1, x2 = self._tables_at(np.array([1e12, 1e13, 1e14]))[0]
        denom = (x2 - x1) - (x1 - x0)
        if denom == 0 or not np.isfinite(denom):
            return float(x2)
        est = x2 - (x2 - x1) ** 2 / denom
        return float(est if est >= x2 else x2)

    def _dg_complement(self, t):
        x = np.log1p(t)
        i = np.clip(np.searchsorted(self._x, x, side="right") - 1, 0, len(self._x) - 2)
        part, _ = self._panel(x, self._x[i + 1], _GL_HI)
        return self._beyond + self._tail_tab[i + 1] + part

    def _g(self, t):
        dg, m1 = self._tables_at(t)
        return np.maximum(t * dg - m1, 0.0)

    def _dg(self, t):
        return self._tables_at(t)[0]

    def _d2g(self, t):
        return self._psi(t)

    def __repr__(self):
        return f"CustomPsi(mu={self.mu}, mu_bar={self.mu_bar})"


@dataclass(frozen=True)
class Regularized(EnergyDensity):
    """g_delta(t) = delta * Phi_tau(t) + g(t)."""

    base: EnergyDensity
    delta: float
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "_phi", PhiMu(mu=self.tau))

    @property
    def mu(self):
        return self.tau

    @property
    def mu_bar(self):
        return self.tau

    @property
    def g_prime_inf(self):
        return self.delta + self.base.g_prime_inf

    @property
    def g_prime_inf_estimated(self):
        return self.base.g_prime_inf_estimated

    def params(self):
        return {"base": self.base.name, **self.base.params(), "delta": self.delta, "tau": self.tau}

    def _g(self, t):
        return self.delta * self._phi._g(t) + self.base._g(t)

    def _dg(self, t):
        return self.delta * self._phi._dg(t) + self.base._dg(t)

    def _d2g(self, t):
        return self.delta * self._phi._d2g(t) + self.base._d2g(t)

    def _dg_complement(self, t):
        return self.delta * self._phi._dg_complement(t) + self.base._dg_complement(t)


def _invert_monotone(d: EnergyDensity, s, c, rtol: float = 1e-14, maxiter: int = 200):
    """Vectorized safeguarded Newton for g'(t) = s, written in y = log(1 + t).

    Where s < g'_inf / 2 the residual is g'(t) - s; otherwise it is
    log(c) - log(g'_inf - g'(t)), which is close to linear in y for
    mu-elliptic densities and keeps full relative precision in c.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    s, c = np.broadcast_arrays(s, c)
    out = np.zeros(s.shape)
    active = s > 0
    if not active.any():
        return out
    s_a, c_a = s[active], c[active]
    upper = s_a >= 0.5 * d.g_prime_inf
    log_c = np.log(c_a)

    def resid(y):
        t = np.expm1(y)
        r = np.where(upper, log_c - np.log(d._dg_complement(t)), d._dg(t) - s_a)
        dr = np.where(upper, d._d2g(t) * (1 + t) / d._dg_complement(t), d._d2g(t) * (1 + t))
        return r, dr

    lo = np.zeros(s_a.shape)
    hi = np.ones(s_a.shape)
    for _ in range(200):
        r_hi, _ = resid(hi)
        need = r_hi < 0
        if not need.any():
            break
        lo = np.where(need, hi, lo)
        hi = np.where(need, hi * 2.0, hi)
    y = 0.5 * (lo + hi)
    # near t = 0, g'(t) ~ g''(0) t; starting there spares hundreds of bisections
    # when s is tiny
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        y0 = np.log1p(s_a / float(d._d2g(np.zeros(1))[0]))
    seed_ok = ~upper & np.isfinite(y0) & (y0 > lo) & (y0 < hi)
    y = np.where(seed_ok, y0, y)
    for _ in range(maxiter):
        r, dr = resid(y)
        lo = np.where(r < 0, y, lo)
        hi = np.where(r > 0, y, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = r / dr
        y_new = y - step
        bad = ~np.isfinite(y_new) | (y_new <= lo) | (y_new >= hi)
        y_new = np.where(bad, 0.5 * (lo + hi), y_new)
        done = np.abs(y_new - y) <= rtol * np.maximum(np.abs(y), 1e-300)
        y = y_new
        if done.all() or (hi - lo <= rtol * np.abs(hi)).all():
            break
    out[active] = np.expm1(y)
    return out


# -- public operations --------------------------------------------------------

def _check_t(t):
    arr = _as_array(t)
    if np.any(~(arr >= 0)):
        raise DomainError("density argument t must be finite and >= 0")
    return arr


def eval_g(d: EnergyDensity, t: ArrayLike) -> ArrayLike:
    """g(t) for t >= 0."""
    return _unwrap(d._g(_check_t(t)), t)


def eval_g_prime(d: EnergyDensity, t: ArrayLike) -> ArrayLike:
    return _unwrap(d._dg(_check_t(t)), t)


def eval_g_second(d: EnergyDensity, t: ArrayLike) -> ArrayLike:
    return _unwrap(d._d2g(_check_t(t)), t)


def eval_g_prime_complement(d: EnergyDensity, t: ArrayLike) -> ArrayLike:
    """g'_inf - g'(t), accurate for large t."""
    return _unwrap(d._dg_complement(_check_t(t)), t)


def inv_g_prime(d: EnergyDensity, s: ArrayLike) -> ArrayLike:
    """The unique t >= 0 with g'(t) = s, for 0 <= s < g'_inf.

    Raises:
        DomainError: if s < 0 or s >= g'_inf (1 - 1e-14).
    """
    arr = _as_array(s)
    if np.any(~(arr >= 0)) or np.any(arr >= d.g_prime_inf * (1.0 - 1e-14)):
        raise DomainError(f"inv_g_prime needs 0 <= s < g'_inf = {d.g_prime_inf}")
    return _unwrap(np.asarray(d._inv_dg(arr), dtype=float), s)


def inv_g_prime_gap(d: EnergyDensity, c: ArrayLike) -> ArrayLike:
    """The t with g'_inf - g'(t) = c, for 0 < c <= g'_inf."""
    arr = _as_array(c)
    if np.any(~(arr > 0)) or np.any(arr > d.g_prime_inf):
        raise DomainError(f"slope gap must lie in (0, {d.g_prime_inf}]")
    out = np.asarray(d._inv_dg_gap(arr), dtype=float)
    return _unwrap(np.where(arr >= d.g_prime_inf, 0.0, out), c)


@dataclass(frozen=True)
class EllipticityCheck:
    ok: bool
    nu1: float
    nu2: float
    reason: str = ""


def verify_ellipticity(d: EnergyDensity, t_grid, mu: float | None = None,
                       mu_bar: float | None = None) -> EllipticityCheck:
    """Tightest constants with nu1 (1+t)^-mu <= g''(t) <= nu2 (1+t)^-mu_bar on the grid.

    Returns a failed check (never raises) when either constant is not
    positive and finite, i.e. the claimed exponent pair is violated.
    """
    mu = d.mu if mu is None else mu
    mu_bar = d.mu_bar if mu_bar is None else mu_bar
    t = _check_t(np.atleast_1d(t_grid))
    if t.size == 0 or np.any(np.diff(t) < 0):
        raise DomainError("t_grid must be nonempty and nondecreasing")
    h = d._d2g(t)
    with np.errstate(invalid="ignore", over="ignore"):
        nu1 = float(np.min(h * (1.0 + t) ** mu))
        nu2 = float(np.max(h * (1.0 + t) ** mu_bar))
    ok = math.isfinite(nu1) and math.isfinite(nu2) and nu1 > 0 and nu2 > 0
    reason = "" if ok else f"constants not positive and finite: nu1={nu1}, nu2={nu2}"
    return EllipticityCheck(ok, nu1, nu2, reason)


def tau_window(base: EnergyDensity) -> tuple[float, float]:
    """Open interval of admissible tau for the density shift: (max(mu - 1, 1), mu_bar)."""
    return max(base.mu - 1.0, 1.0), base.mu_bar


def make_regularized(base: EnergyDensity, delta: float, tau: float | None = None) -> Regularized:
    """g_delta = delta Phi_tau + g; tau defaults to the midpoint of its window."""
    lo, hi = tau_window(base)
    if not lo < hi:
        raise DomainError(f"empty tau window ({lo}, {hi}) for {base!r}")
    if tau is None:
        tau = 0.5 * (lo + hi)
    if not lo < tau < hi:
        raise DomainError(f"tau={tau} outside admissible window ({lo}, {hi})")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return Regularized(base=base, delta=float(delta), tau=float(tau))


FAMILIES = ("phi-mu", "g-tilde-k", "minimal-surface", "custom")


def from_spec(spec: dict) -> EnergyDensity:
    """Build a density from a config mapping such as ``{"family": "phi-mu", "mu": 3}``.

    The ``custom`` family takes ``psi`` as a python expression in ``t``
    (numpy available as ``np``), plus ``mu`` and ``mu_bar``.
    """
    family = spec.get("family")
    if family == "phi-mu":
        return PhiMu(mu=float(spec["mu"]))
    if family == "g-tilde-k":
        return GTildeK(k=float(spec["k"]))
    if family == "minimal-surface":
        return MinimalSurface()
    if family == "custom":
        expr = spec["psi"]
        code = compile(expr, "<psi>", "eval")

        def psi(t):
            return eval(code, {"np": np, "__builtins__": {}}, {"t": t})

        return CustomPsi(psi, mu=float(spec["mu"]), mu_bar=float(spec.get("mu_bar", spec["mu"])))
    raise DomainError(f"unknown density family {family!r}; expected one of {FAMILIES}")


def to_spec(d: EnergyDensity) -> dict:
    names = {PhiMu: "phi-mu", GTildeK: "g-tilde-k", MinimalSurface: "minimal-surface",
             CustomPsi: "custom", Regularized: "regularized"}
    return {"family": names.get(type(d), d.name), **d.params()}
