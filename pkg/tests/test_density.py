import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radial_bv.density import (CustomPsi, DomainError, GTildeK, MinimalSurface, PhiMu,
                               eval_g, eval_g_prime, eval_g_prime_complement,
                               eval_g_second, from_spec, inv_g_prime, inv_g_prime_gap,
                               make_regularized, tau_window, to_spec, verify_ellipticity)

FAMILIES = [PhiMu(1.5), PhiMu(2.0), PhiMu(3.0), GTildeK(2.0), MinimalSurface(),
            make_regularized(PhiMu(3.0), 0.2)]
ids = lambda d: repr(d)[:40]


# -- examples -----------------------------------------------------------------

@pytest.mark.parametrize("d, t, expected", [
    (PhiMu(2.0), 0.0, 0.0),
    (PhiMu(2.0), 1.0, 1.0 - math.log(2.0)),
    (MinimalSurface(), 1.0, math.sqrt(2.0) - 1.0),
    (GTildeK(2.0), 3.0, math.sqrt(10.0) - 1.0),
])
def test_eval_g_examples(d, t, expected):
    assert eval_g(d, t) == pytest.approx(expected, rel=1e-14, abs=1e-300)


def test_derivative_examples():
    assert eval_g_prime(PhiMu(3.0), 0.0) == 0.0
    assert eval_g_prime(PhiMu(3.0), 1.0) == pytest.approx(0.75, rel=1e-15)
    assert eval_g_second(PhiMu(2.0), 1.0) == pytest.approx(0.25, rel=1e-15)


@pytest.mark.parametrize("d, s, t", [
    (PhiMu(2.0), 0.5, 1.0),
    (MinimalSurface(), 1 / math.sqrt(2.0), 1.0),
    (GTildeK(2.0), 0.0, 0.0),
    (PhiMu(3.0), 0.0, 0.0),
])
def test_inverse_examples(d, s, t):
    assert inv_g_prime(d, s) == pytest.approx(t, rel=1e-14, abs=1e-300)


def test_fd_checks_against_hand_stencil():
    d = PhiMu(3.0)
    h = 1e-5
    fd = (eval_g(d, 1 + h) - eval_g(d, 1 - h)) / (2 * h)
    assert fd == pytest.approx(0.75, rel=1e-8)


def test_small_t_branch_is_continuous():
    d = PhiMu(2.5)
    t = np.array([0.02 * (1 - 1e-12), 0.02, 0.02 * (1 + 1e-12)])
    g = eval_g(d, t)
    assert np.all(np.diff(g) > 0)
    assert g[2] / g[0] - 1 < 1e-10


# -- errors ---------------------------------------------------------------------

@pytest.mark.parametrize("fn", [eval_g, eval_g_prime, eval_g_second])
def test_negative_t_rejected(fn):
    with pytest.raises(DomainError):
        fn(PhiMu(2.0), -1e-3)


@pytest.mark.parametrize("s", [-0.1, 1.0, 1.5, 1.0 - 1e-16])
def test_inverse_outside_range(s):
    with pytest.raises(DomainError):
        inv_g_prime(PhiMu(2.0), s)


def test_inverse_just_inside_range_is_finite():
    t = inv_g_prime(PhiMu(2.0), 1.0 - 1e-13)
    assert math.isfinite(t) and t > 1e12


def test_invalid_parameters():
    with pytest.raises(DomainError):
        PhiMu(1.0)
    with pytest.raises(DomainError):
        GTildeK(0.5)
    with pytest.raises(DomainError):
        CustomPsi(lambda t: (1 + t) ** -3, mu=3.0, mu_bar=4.0)


# -- ellipticity ------------------------------------------------------------------

def test_ellipticity_phi_mu_exact_constants():
    chk = verify_ellipticity(PhiMu(3.0), [0, 1, 10, 100])
    assert chk.ok and chk.nu1 == pytest.approx(2.0, rel=1e-14) and chk.nu2 == pytest.approx(2.0, rel=1e-14)


def test_ellipticity_weaker_upper_exponent():
    chk = verify_ellipticity(PhiMu(3.0), np.geomspace(1e-6, 1e6, 200), mu=3.0, mu_bar=1.0)
    assert chk.ok and chk.nu2 <= 2.0 + 1e-14


def test_ellipticity_g_tilde_and_minimal_surface():
    grid = np.unique(np.concatenate([[0.0, 1.0], np.geomspace(1e-6, 1e8, 500)]))
    for d in (GTildeK(2.0), MinimalSurface()):
        chk = verify_ellipticity(d, grid)
        assert chk.ok and chk.nu1 <= chk.nu2
    # (1+t)^3 / (1+t^2)^(3/2) ranges over [1, 2^(3/2)]
    chk = verify_ellipticity(MinimalSurface(), grid)
    assert chk.nu1 == pytest.approx(1.0, rel=1e-12)
    assert chk.nu2 == pytest.approx(2 ** 1.5, rel=1e-14)  # attained at t = 1


def test_ellipticity_failure_is_a_result():
    # g''(0) = 0 for k = 3, so no positive nu1 exists once 0 is sampled
    chk = verify_ellipticity(GTildeK(3.0), [0.0, 1.0, 2.0])
    assert not chk.ok and chk.reason


def test_ellipticity_grid_must_be_sorted():
    with pytest.raises(DomainError):
        verify_ellipticity(PhiMu(2.0), [1.0, 0.5])


# -- regularized densities ------------------------------------------------------------

def test_tau_window_and_default():
    lo, hi = tau_window(PhiMu(3.0))
    assert (lo, hi) == (2.0, 3.0)
    assert make_regularized(PhiMu(3.0), 0.1).tau == 2.5


def test_regularized_second_derivative_at_zero():
    d = make_regularized(PhiMu(3.0), 0.5, 2.5)
    assert eval_g_second(d, 0.0) == pytest.approx(0.5 * 1.5 + 2.0, rel=1e-15)


def test_regularized_tau_outside_window():
    # tau = 1.9 lies below mu - 1 = 2 for the cubic base
    with pytest.raises(DomainError):
        make_regularized(PhiMu(3.0), 0.5, 1.9)
    with pytest.raises(DomainError):
        make_regularized(PhiMu(3.0), 1.5, 2.5)


def test_regularized_vanishing_delta():
    t = np.geomspace(1e-3, 1e3, 50)
    base = PhiMu(3.0)
    d = make_regularized(base, 1e-12)
    assert np.allclose(eval_g(d, t), eval_g(base, t), rtol=1e-9)


def test_regularized_g_tilde_ellipticity():
    d = make_regularized(GTildeK(2.0), 0.1, 2.5)
    chk = verify_ellipticity(d, np.concatenate([[0.0], np.geomspace(1e-6, 1e8, 400)]), 2.5, 2.5)
    assert chk.ok


# -- custom psi --------------------------------------------------------------------

def test_custom_psi_reproduces_phi_mu():
    d = CustomPsi(lambda t: 2.0 * (1.0 + t) ** -3, mu=3.0, mu_bar=3.0)
    ref = PhiMu(3.0)
    t = np.geomspace(1e-6, 1e6, 300)
    assert np.allclose(eval_g(d, t), eval_g(ref, t), rtol=1e-10, atol=0)
    assert np.allclose(eval_g_prime(d, t), eval_g_prime(ref, t), rtol=1e-10, atol=0)
    assert np.allclose(eval_g_prime_complement(d, t), eval_g_prime_complement(ref, t), rtol=1e-9)
    assert d.g_prime_inf == pytest.approx(1.0, rel=1e-10)
    assert d.g_prime_inf_estimated


def test_custom_psi_rejects_oscillation():
    with pytest.raises(DomainError):
        CustomPsi(lambda t: (2.0 + np.sin(t)) * (1.0 + t) ** -3, mu=3.0, mu_bar=3.0)


def test_spec_round_trip():
    for d in (PhiMu(2.5), GTildeK(2.0), MinimalSurface()):
        assert to_spec(from_spec(to_spec(d))) == to_spec(d)
    d = from_spec({"family": "custom", "psi": "2*(1+t)**-3", "mu": 3})
    assert eval_g(d, 1.0) == pytest.approx(eval_g(PhiMu(3.0), 1.0), rel=1e-10)
    with pytest.raises(DomainError):
        from_spec({"family": "nope"})


# -- properties -------------------------------------------------------------------------

t_values = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False)


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
@given(t=t_values)
def test_first_derivative_matches_fd(d, t):
    h = 1e-3 * t
    fd = (eval_g(d, t - 2 * h) - 8 * eval_g(d, t - h) + 8 * eval_g(d, t + h)
          - eval_g(d, t + 2 * h)) / (12 * h)
    assert fd == pytest.approx(eval_g_prime(d, t), rel=1e-6)


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
@given(t=t_values)
def test_second_derivative_matches_fd_of_complement(d, t):
    h = 1e-3 * t
    c = lambda x: eval_g_prime_complement(d, x)
    fd = -(c(t - 2 * h) - 8 * c(t - h) + 8 * c(t + h) - c(t + 2 * h)) / (12 * h)
    assert fd == pytest.approx(eval_g_second(d, t), rel=1e-5)


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
@given(t=t_values)
def test_gap_inverse_round_trip(d, t):
    assert inv_g_prime_gap(d, eval_g_prime_complement(d, t)) == pytest.approx(t, rel=1e-9)


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
@given(t=st.floats(min_value=0.0, max_value=10.0))
def test_plain_inverse_round_trip_moderate_t(d, t):
    assert inv_g_prime(d, eval_g_prime(d, t)) == pytest.approx(t, rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
@given(a=t_values, b=t_values, theta=st.floats(0.0, 1.0))
def test_convexity(d, a, b, theta):
    lhs = eval_g(d, theta * a + (1 - theta) * b)
    rhs = theta * eval_g(d, a) + (1 - theta) * eval_g(d, b)
    assert lhs <= rhs * (1 + 64 * np.finfo(float).eps)


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
def test_g_prime_increasing_and_bounded(d):
    t = np.geomspace(1e-8, 1e8, 4000)
    comp = eval_g_prime_complement(d, t)
    assert np.all(np.diff(comp) < 0) and np.all(comp > 0)
    assert np.all(eval_g_prime(d, t) <= d.g_prime_inf)


@pytest.mark.parametrize("d", [PhiMu(2.0), PhiMu(4.0), GTildeK(2.0), GTildeK(3.0)], ids=ids)
def test_recession_slope_reached(d):
    assert abs(eval_g_prime(d, 1e12) - 1.0) <= 1e-6


def test_recession_slope_reached_slowest_phi_mu():
    # 1 - g'(1e12) = (1 + 1e12)^(-1/2) sits a hair under 1e-6; the subtraction
    # 1 - g' in double precision rounds it above, so read the complement
    assert eval_g_prime_complement(PhiMu(1.5), 1e12) <= 1e-6


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
def test_normalization_and_linear_growth(d):
    assert eval_g(d, 0.0) == 0.0 and eval_g_prime(d, 0.0) == 0.0
    t = np.geomspace(1e-3, 1e9, 200)
    g = eval_g(d, t)
    # g(t) <= g'_inf t and g(t) >= g'_inf t - C with C bounded over the grid when mu > 2
    assert np.all(g <= d.g_prime_inf * t * (1 + 1e-14))
    assert np.all(g >= 0)


@pytest.mark.parametrize("d", FAMILIES, ids=ids)
def test_sandwich(d):
    grid = np.concatenate([[0.0], np.geomspace(1e-8, 1e9, 3000)])
    chk = verify_ellipticity(d, grid)
    t = np.geomspace(1e-6, 1e6, 500)
    g = eval_g(d, t)
    c_lo = chk.nu1 / (d.mu - 1)
    c_hi = chk.nu2 / (d.mu_bar - 1)
    assert np.all(c_lo * eval_g(PhiMu(d.mu), t) <= g * (1 + 1e-12))
    assert np.all(g <= c_hi * eval_g(PhiMu(d.mu_bar), t) * (1 + 1e-12))


def test_vectorized_and_scalar_agree():
    d = MinimalSurface()
    t = np.array([0.0, 0.5, 3.0])
    assert [eval_g(d, x) for x in t] == list(eval_g(d, t))
    assert isinstance(eval_g(d, 0.5), float)
