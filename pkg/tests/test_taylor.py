import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smeary.checks import richardson_derivative
from smeary.errors import DomainError
from smeary.geometry import random_unit
from smeary.taylor import (
    R_CEILING, W_SWITCH, check_radius, coeffs_expanded, cubic_g_diag, f_line, g_exact, g_taylor,
    hessian_g, polarize4, quartic_closed, quartic_g_diag, quartic_parts, quartic_series,
    radial_coeffs, taylor_coeffs, taylor_coeffs_cosine,
)

FACT = [1, 1, 2, 6, 24]


def test_quartic_parts_at_half_pi():
    a0, a2r2, a4r4 = quartic_parts(np.pi / 2)
    assert a0 == pytest.approx(0.0, abs=1e-15)
    assert a2r2 == pytest.approx(-1 / 3, abs=1e-15)
    assert a4r4 == pytest.approx(1 / 3, abs=1e-15)


def test_a0_near_half_pi_is_linear_then_quadratic():
    for t in (1e-3, 5e-3, 1e-2):
        a0 = float(quartic_parts(np.pi / 2 + t)[0])
        assert a0 == pytest.approx(np.pi / 24 * t + t ** 2 / 3, abs=5 * t ** 3)


def test_routes_agree():
    R = np.linspace(np.pi / 2 - W_SWITCH, np.pi / 2 + W_SWITCH, 41)
    R = R[np.abs(R - np.pi / 2) > 1e-3]
    assert np.max(np.abs(np.array(quartic_closed(R)) - np.array(quartic_series(R)))) < 1e-12
    mid = np.linspace(0.5, 2.6, 50)
    expanded = np.array(coeffs_expanded(mid))[2:]
    closed = np.array([[radial_coeffs(r, method="closed").to_dict()[k] for k in ("A4", "A2", "A0")]
                       for r in mid]).T
    assert np.max(np.abs(expanded - closed)) < 1e-10


def test_auto_route_continuous_across_switch():
    # the cot forms lose about 3e-12 to cancellation this close to pi/2
    for s in (-1, 1):
        edge = np.pi / 2 + s * W_SWITCH
        inside = np.array(quartic_parts(edge - s * 1e-12))
        outside = np.array(quartic_parts(edge + s * 1e-12))
        assert np.max(np.abs(inside - outside)) < 1e-11


def test_high_order_fd_fit_at_R_1_2():
    R = 1.2
    for c in (0.0, 0.3, -0.3, 0.7, -0.7, 1.0, -1.0):
        ref = lambda t: float(f_line(t, R, R * c))
        tc = taylor_coeffs_cosine(R, c).as_tuple()
        for k in range(5):
            d = richardson_derivative(ref, k, steps=(0.2, 0.1, 0.05, 0.025))
            assert abs(FACT[k] * tc[k] - d) <= 1e-7 * max(1.0, abs(d)), (c, k)


@pytest.mark.parametrize("R", [0.3, 1.0, 2.0, 2.9])
def test_alpha_zero_collapse(R):
    tc = taylor_coeffs(R, 0.0)
    assert tc.c1 == 0 and tc.c3 == 0
    assert tc.c2 == pytest.approx(R / math.tan(R), rel=1e-14)
    assert tc.c4 == pytest.approx(float(quartic_parts(R)[0]), rel=1e-14)


def test_R_one_alpha_one():
    tc = taylor_coeffs(1.0, 1.0)
    assert tc.c0 == pytest.approx(1.0) and tc.c1 == pytest.approx(-2.0)


def test_remainder_is_fifth_order():
    R, alpha = 0.9, 0.4
    tc = taylor_coeffs(R, alpha)
    rem = [abs(float(f_line(t, R, alpha)) - tc(t)) for t in (0.1, 0.05, 0.025)]
    ratios = [rem[0] / rem[1], rem[1] / rem[2]]
    assert all(25 < r < 40 for r in ratios), ratios


def test_alpha_bound_enforced():
    with pytest.raises(DomainError):
        taylor_coeffs(1.0, 1.5)
    with pytest.raises(DomainError):
        taylor_coeffs_cosine(1.0, 1.5)


def test_check_radius_names_endpoint():
    with pytest.raises(DomainError, match="0"):
        check_radius(1e-6)
    with pytest.raises(DomainError, match="pi"):
        check_radius(np.pi - R_CEILING / 10)


def test_g_taylor_basics_and_remainder(rng):
    v = 2.0 * random_unit(rng, 3)
    assert g_taylor(np.zeros(3), v) == pytest.approx(4.0)
    assert g_exact(np.zeros(3), v) == pytest.approx(4.0)
    assert g_exact(v, v) == pytest.approx(0.0, abs=1e-14)
    for _ in range(10):
        u = 1e-2 * random_unit(rng, 3)
        assert abs(g_exact(u, v) - g_taylor(u, v)) <= 10 * 1e-10


def _perp(rng, theta):
    w = rng.standard_normal(len(theta))
    w -= (w @ theta) * theta
    return w


def test_hessian_special_directions(rng):
    R = 1.3
    theta = random_unit(rng, 4)
    w = _perp(rng, theta)
    assert hessian_g(R, theta, w) == pytest.approx(2 * R / math.tan(R) * (w @ w))
    assert hessian_g(R, theta, 0.7 * theta) == pytest.approx(2 * 0.49)


def _line(u_dir, v):
    return lambda t: g_exact(t * u_dir, v)


def test_hessian_matches_second_difference(rng):
    R = 2.0
    for _ in range(5):
        theta = random_unit(rng, 3)
        w = random_unit(rng, 3)
        ref = richardson_derivative(_line(w, R * theta), 2)
        assert abs(hessian_g(R, theta, w) - ref) < 1e-6


def test_cubic_matches_third_difference(rng):
    R = 1.8
    for _ in range(5):
        theta = random_unit(rng, 3)
        w = random_unit(rng, 3)
        ref = richardson_derivative(_line(w, R * theta), 3)
        assert cubic_g_diag(R, theta, w) == pytest.approx(ref, rel=1e-5, abs=1e-7)


def test_quartic_special_directions(rng):
    theta = random_unit(rng, 4)
    w = _perp(rng, theta)
    R = 2.1
    assert quartic_g_diag(R, theta, w) == pytest.approx(24 * float(quartic_parts(R)[0]) * (w @ w) ** 2)
    assert abs(quartic_g_diag(np.pi / 2, theta, w)) < 1e-14


def test_quartic_matches_fourth_difference(rng):
    R = 2.2
    for _ in range(5):
        theta = random_unit(rng, 3)
        w = random_unit(rng, 3)
        ref = richardson_derivative(_line(w, R * theta), 4, steps=(0.1, 0.05, 0.025))
        assert quartic_g_diag(R, theta, w) == pytest.approx(ref, rel=1e-4)


@given(st.integers(0, 2 ** 32 - 1))
def test_polarize_diagonal_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    R = float(rng.uniform(0.2, 2.9))
    theta = random_unit(rng, 3)
    diag = lambda w: quartic_g_diag(R, theta, w)
    w = rng.standard_normal((4, 3))
    assert polarize4(diag, w[0], w[0], w[0], w[0]) == pytest.approx(diag(w[0]), rel=1e-12, abs=1e-12)
    base = polarize4(diag, *w)
    for perm in ([1, 0, 2, 3], [3, 2, 1, 0], [2, 0, 3, 1]):
        assert polarize4(diag, *w[perm]) == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_polarized_quartic_matches_mixed_difference(rng):
    R = 1.9
    theta = random_unit(rng, 3)
    v = R * theta
    w, z = random_unit(rng, 3), random_unit(rng, 3)
    d3 = lambda s: richardson_derivative(lambda t: g_exact(t * w + s * z, v), 3)
    ref = richardson_derivative(d3, 1, steps=(0.1, 0.05, 0.025))
    val = polarize4(lambda x: quartic_g_diag(R, theta, x), w, w, w, z)
    assert val == pytest.approx(ref, rel=1e-4)
