import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import mp_det

from ite_ball import rootfind as rf
from ite_ball.errors import ConditionError, DomainError
from ite_ball.scaled import arr_value
from ite_ball.transmission import (
    ANISOTROPIC,
    ISOTROPIC,
    VIOLATED,
    IntegratorSettings,
    Medium,
    MediumPair,
    ProfileFunction,
    RadialProfile,
    _shoot,
    as_profile,
    char_det_arrays,
    char_det_constant,
    char_det_constant_derivative,
    char_det_radial,
    char_det_radial_raw,
    dn_approx_error,
    dn_symbol,
    g_symbol,
    g_symbol_difference,
    harmonic_dimension,
    make_mode,
    medium_pair_from_values,
    mode_orders,
    parse_coefficient,
    parse_medium,
    rho0,
    rho_tilde,
    t_symbol,
)

GAMMA2 = medium_pair_from_values(1, 1, 1, 4, 3)


def test_modes():
    m = make_mode(0, 3)
    assert (m.nu, m.mu2, m.multiplicity) == (0.5, 0.0, 1)
    m = make_mode(2, 3)
    assert (m.nu, m.mu2, m.multiplicity) == (2.5, 6.0, 5)
    m = make_mode(3, 2)
    assert (m.nu, m.mu2, m.multiplicity) == (3.0, 9.0, 2)
    assert harmonic_dimension(2, 4) == 9
    with pytest.raises(DomainError):
        make_mode(-1, 3)


def test_mode_orders():
    assert list(mode_orders(3, 3.0)) == [0.5, 1.5, 2.5]


def test_conditions():
    assert medium_pair_from_values(1, 1, 1, 2).condition == ISOTROPIC
    assert medium_pair_from_values(1, 4, 4, 0.5).condition == ANISOTROPIC
    assert medium_pair_from_values(1, 1, 2, 2).condition == VIOLATED
    with pytest.raises(DomainError):
        Medium(1.0, 0.0)


def test_parsing():
    assert parse_coefficient("2.5") == 2.5
    assert parse_coefficient("constant:3") == 3.0
    p = parse_coefficient("poly:1,0,1")
    assert isinstance(p, ProfileFunction) and p(0.5) == pytest.approx(1.25)
    assert isinstance(parse_medium("1", "poly:1,0,1"), RadialProfile)
    with pytest.raises(DomainError):
        parse_coefficient("abc")


def test_profile_flat_near_boundary():
    p = ProfileFunction((1.0, 0.0, 1.0), 0.1)
    assert p(0.95) == p(1.0) == pytest.approx(1.81)
    v, dv = p.value_and_derivative(np.array([0.86]))
    h = 1e-6
    assert dv[0] == pytest.approx((p(0.86 + h) - p(0.86 - h)) / (2 * h), rel=1e-6)


# ----------------------------------------------------------------------------
# Bessel-form determinant


def test_identical_media_determinant_vanishes():
    pair = medium_pair_from_values(2, 3, 2, 3)
    m, e = char_det_arrays(make_mode(1, 3), np.array([2 + 1j, 7.5]), pair)
    assert np.all(m == 0) or np.all(np.abs(arr_value(m, e)) < 1e-13)


def test_gamma2_mode0_is_sin_cubed():
    lams = np.array([0.7, 1.9 + 0.4j, 4.0 - 0.9j, 8.3 + 0.1j])
    d = arr_value(*char_det_arrays(make_mode(0, 3), lams, GAMMA2))
    ratio = d / np.sin(lams) ** 3
    assert np.allclose(ratio, 2 * math.sqrt(2) / math.pi, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(l=st.integers(0, 12), x=st.floats(0.3, 40.0), y=st.floats(-8.0, 8.0))
def test_determinant_against_mpmath(l, x, y):
    lam = complex(x, y)
    pair = medium_pair_from_values(1.0, 1.0, 2.0, 3.0, 3)
    mode = make_mode(l, 3)
    d = char_det_constant(mode, lam, pair).value()
    ref = mp_det(mode.nu, lam, 1.0, math.sqrt(1.5), 1.0, 2.0, 3)
    j_scale = abs(lam) * math.exp(abs(y) * (1 + math.sqrt(1.5)))
    assert abs(d - ref) <= 1e-11 * max(abs(ref), 1e-3 * j_scale / max(1.0, abs(lam)) ** 0)


@pytest.mark.parametrize("lam", [2.3 + 0.4j, 11.0 - 2.0j, 25.0 + 0.01j])
def test_determinant_derivative_finite_difference(lam):
    pair = medium_pair_from_values(1.0, 1.0, 1.0, 2.0, 3)
    mode = make_mode(3, 3)
    h = 1e-6
    fd = (char_det_constant(mode, lam + h, pair).value() - char_det_constant(mode, lam - h, pair).value()) / (2 * h)
    d = char_det_constant_derivative(mode, lam, pair).value()
    assert abs(d - fd) <= 1e-7 * abs(d)


def test_bessel_form_needs_constant_media():
    prof = MediumPair((as_profile(Medium(1, 1)), Medium(1, 2)), 3)
    with pytest.raises(DomainError):
        char_det_arrays(make_mode(0, 3), [1.0], prof)


# ----------------------------------------------------------------------------
# shooting


def _rk4_ratio(mode, lam, medium, n_steps=20000, r0=1e-3):
    """v'(1)/v(1) by fixed-step RK4 from a two-term Frobenius start (l = 0 only)."""
    assert mode.l == 0
    c0, n0 = float(medium.c(0.0)), float(medium.n(0.0))
    k = lam * lam * n0 / c0
    d = mode.d
    v = 1 - k * r0 * r0 / (2 * d)
    w = -k * r0 / d
    h = (1.0 - r0) / n_steps

    def f(r, v, w):
        c, dc = medium.c.value_and_derivative(r)
        n = medium.n(r)
        return w, -((dc + c * (d - 1) / r) * w + lam * lam * n * v) / c

    r = r0
    for _ in range(n_steps):
        k1 = f(r, v, w)
        k2 = f(r + h / 2, v + h / 2 * k1[0], w + h / 2 * k1[1])
        k3 = f(r + h / 2, v + h / 2 * k2[0], w + h / 2 * k2[1])
        k4 = f(r + h, v + h * k3[0], w + h * k3[1])
        v += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        w += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        r += h
    return w / v


def test_shooting_variable_profile_against_fixed_step_rk4():
    medium = parse_medium("1", "poly:1,0,1")
    mode = make_mode(0, 3)
    lam = 4.0 + 0.5j
    v, w = _shoot(mode, np.array([lam]), medium, IntegratorSettings())
    ref = _rk4_ratio(mode, lam, medium)
    assert abs(w[0] / v[0] - ref) <= 1e-8 * abs(ref)


def test_shooting_constant_matches_bessel_zeros():
    pair = medium_pair_from_values(1, 1, 1, 2, 3)
    prof = MediumPair(tuple(as_profile(m) for m in pair.media), 3)
    mode = make_mode(2, 3)
    recs = rf.subdivide_localize(rf.mode_evaluator(mode, pair), rf.Rectangle((1.0, 9.0), (-2.0, 2.0)), mode=mode)
    z0 = np.array([r.lam for r in recs])
    z, steps = rf.newton_many(rf.mode_evaluator(mode, prof), z0, tol=1e-11, max_iter=30)
    assert len(z0) > 0
    assert np.max(np.abs(z - z0)) <= 1e-8


def test_shooting_winding_matches_bessel_count():
    pair = medium_pair_from_values(1, 1, 1, 2, 3)
    prof = MediumPair(tuple(as_profile(m) for m in pair.media), 3)
    mode = make_mode(1, 3)
    rect = rf.Rectangle((1.03, 6.97), (-1.51, 1.49))
    n_const = rf.winding_count(rf.mode_evaluator(mode, pair), rect)
    n_rad = rf.winding_count(rf.mode_evaluator(mode, prof), rect)
    assert n_const == n_rad > 0


def test_radial_identical_profiles_vanish():
    m = parse_medium("1", "poly:1,0,1")
    pair = MediumPair((m, m), 3)
    assert abs(char_det_radial(make_mode(0, 3), 0.5, pair)) < 1e-14
    assert char_det_radial_raw(make_mode(0, 3), np.array([0.5, 1.2]), pair).shape == (2,)


# ----------------------------------------------------------------------------
# DN symbols


def test_dn_symbol_half_order():
    assert dn_symbol(make_mode(0, 3), math.pi / 2, Medium(1, 1)) == pytest.approx(2 / math.pi, abs=1e-14)


def test_rho0_square():
    r = rho0(0.0, 1j, 2)
    assert r * r == pytest.approx(-1)
    assert abs(rho0(0.0, 1e-3 + 1j, 2) - r) < 1e-2


def test_rho_tilde_is_scaled_rho0():
    med = Medium(1.0, 4.0)
    lam = 30 + 2j
    assert rho_tilde(8.0, lam, med, 3) == pytest.approx(2 * rho0(8.0, 2 * lam, 3))


def test_t_symbol_gamma2_closed_form():
    # half order: -psi(lam) + 2 psi(2 lam) collapses to -tan(lam)
    for lam in (0.3, 1.0, 2.0 + 0.5j, 7.1 - 1.2j):
        assert t_symbol(make_mode(0, 3), lam, GAMMA2) == pytest.approx(-cmath.tan(lam), rel=1e-12)


def test_t_symbol_equal_media():
    pair = medium_pair_from_values(1, 2, 1, 2)
    assert abs(t_symbol(make_mode(2, 3), 5 + 1j, pair)) < 1e-14


@pytest.mark.parametrize("pair", [medium_pair_from_values(1, 1, 1, 2), medium_pair_from_values(1, 4, 4, 0.5)])
def test_g_symbol_quotient_equals_difference(pair):
    for sigma in (0.0, 12.0, 3e4):
        lam = 100 + 10j
        assert g_symbol(sigma, lam, pair) == pytest.approx(g_symbol_difference(sigma, lam, pair), rel=1e-10)


def test_g_symbol_violated():
    with pytest.raises(ConditionError):
        g_symbol(1.0, 10 + 1j, medium_pair_from_values(1, 1, 2, 2))


def test_dn_approx_error_threshold_and_precondition():
    assert dn_approx_error(300 + 20j, Medium(1, 1), 3, 1200) <= 0.1
    with pytest.raises(DomainError):
        dn_approx_error(300 + 20j, Medium(1, 1), 3, 1000)


def test_dn_approx_error_refinement_stable():
    med = Medium(1, 1)
    coarse = dn_approx_error(300 + 20j, med, 3, 1200)
    fine = dn_approx_error(300 + 20j, med, 3, 1200, nus=np.arange(0.5, 1200, 0.25))
    assert abs(fine - coarse) <= 0.01 * coarse
