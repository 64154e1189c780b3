import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from smeary import kernels as K
from smeary.checks import random_bumps
from smeary.constructions import calibrate_two_bumps, check_not_global
from smeary.densities import AngularModel, Bump, RadialDensity, angular_moments
from smeary.errors import ClassificationError
from smeary.geometry import distance, exp_north
from smeary.spectra import (
    SpectralReport, classify, funk_hecke, funk_hecke_average, hessian_product, hessian_rot,
    lambda_max_check, meridian_profile, quad_radial, quartic_on_kernel, quartic_rot, rcot,
    spectral_report, sphere_volume, spherical_moment,
)


def test_radial_quadrature_basics():
    assert quad_radial(np.sin, (0, np.pi)) == pytest.approx(2.0, abs=1e-11)
    assert quad_radial(lambda R: np.sin(R) ** 2, (0, np.pi)) == pytest.approx(np.pi / 2, abs=1e-11)
    lhs = quad_radial(lambda R: np.sin(R) ** 2, (0, np.pi)) * sphere_volume(2)
    assert lhs == pytest.approx(sphere_volume(3), rel=1e-12)


def test_sphere_volumes():
    assert sphere_volume(1) == pytest.approx(2 * np.pi)
    assert sphere_volume(2) == pytest.approx(4 * np.pi)
    assert sphere_volume(3) == pytest.approx(2 * np.pi ** 2)


def test_spherical_moments():
    assert spherical_moment(3, 2) == pytest.approx(1 / 3)
    assert spherical_moment(2, 4) == pytest.approx(3 / 8)


@pytest.mark.parametrize("m", range(2, 11))
def test_funk_hecke_against_weighted_quadrature(m):
    # independent route: scipy's algebraic-weight quadrature on (-1, 1)
    a = (m - 3) / 2
    w = lambda f: integrate.quad(f, -1, 1, weight="alg", wvar=(a, a), epsabs=1e-13, epsrel=1e-13)[0]
    z = w(lambda t: 1.0)
    assert abs(w(lambda t: t ** 2) / z - 1 / m) < 1e-10
    assert abs(w(lambda t: t ** 4) / z - 3 / (m * (m + 2))) < 1e-10
    assert funk_hecke_average(lambda t: t ** 2, m) == pytest.approx(w(lambda t: t ** 2) / z, abs=1e-12)


def test_funk_hecke_simple_integrands():
    for m in (2, 3, 6):
        assert funk_hecke(lambda t: np.ones_like(t), m) == pytest.approx(sphere_volume(m - 1), rel=1e-12)
        assert abs(funk_hecke(lambda t: t, m)) < 1e-12
    assert funk_hecke(lambda t: t ** 2, 4) == pytest.approx(sphere_volume(3) / 4, rel=1e-12)


def test_narrow_bump_point_mass_limit():
    R0 = np.pi / 4
    rep = hessian_rot(RadialDensity.from_bumps([Bump(R0, 1e-3)]), 2)
    assert rep.hess_eigs[0] == pytest.approx(1 + np.pi / 4, abs=1e-3)


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 40))
def test_ball_obstruction(seed, m):
    rng = np.random.default_rng(seed)
    dens = random_bumps(rng, 1e-3, K.find_R_m(m).value)
    assert hessian_rot(dens, m).hess_eigs[0] > 0


def test_quartic_negative_for_m3():
    for dens in (RadialDensity.uniform(0.2, 2.5), RadialDensity.from_bumps([Bump(2.2, 0.3)])):
        assert quartic_rot(dens, 3) < 0


@pytest.mark.parametrize("m", [4, 10, 50])
def test_quartic_negative_inside_S_m(m):
    dens = RadialDensity.uniform(0.3, K.find_S_m(m).value)
    assert quartic_rot(dens, m) < 0


def test_uniform_angular_reduces_to_rotational():
    dens = RadialDensity.from_bumps([Bump(1.2, 0.3), Bump(1.9, 0.1, 0.5)])
    for m in (2, 3, 7):
        a = hessian_product(dens, AngularModel.uniform(), m)
        b = hessian_rot(dens, m)
        assert np.allclose(a.hess_eigs, b.hess_eigs, atol=1e-10)
        assert quartic_on_kernel(dens, AngularModel.uniform(), m) == pytest.approx(quartic_rot(dens, m), abs=1e-10)


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 20), st.floats(0.0, 200.0))
def test_hemispherical_obstruction(seed, m, kappa):
    rng = np.random.default_rng(seed)
    rep = hessian_product(random_bumps(rng, 1e-3, np.pi / 2), AngularModel.theta1_exp(kappa), m)
    assert min(rep.hess_eigs) > 0


def test_lambda_min_lower_bound():
    eps = 0.3
    dens = RadialDensity.uniform(0.2, np.pi / 2 - eps)
    c = float(np.min(rcot(np.linspace(0.2, np.pi / 2 - eps, 2001))))
    for kappa in (0.0, 5.0, 80.0):
        rep = hessian_product(dens, AngularModel.theta1_exp(kappa), 4)
        assert min(rep.hess_eigs) >= 2 * c - 1e-12


def test_angular_moments_uniform_and_trace():
    for m in (2, 3, 6):
        mom = angular_moments(0.0, m)
        assert mom.lambda_par == pytest.approx(1 / m, abs=1e-12)
        assert mom.lambda_perp == pytest.approx(1 / m, abs=1e-12)
        assert mom.beta_perp == pytest.approx(3 / (m * (m + 2)), abs=1e-12)
    for kappa in (0.0, 1.0, 10.0, 100.0):
        mom = angular_moments(kappa, 4)
        assert mom.lambda_par + 3 * mom.lambda_perp == pytest.approx(1.0, abs=1e-10)


def test_concentrated_angular_against_sphere_quadrature():
    kappa = 100.0
    mom = angular_moments(kappa, 3)
    # 2-D quadrature on S^2: Theta_1 = cos(a), Theta_2 = sin(a) cos(b)
    dens = lambda b, a: np.exp(kappa * (np.cos(a) ** 2 - 1)) * np.sin(a)
    z = integrate.dblquad(dens, 0, np.pi, 0, 2 * np.pi, epsabs=1e-13, epsrel=1e-12)[0]
    num = integrate.dblquad(lambda b, a: dens(b, a) * (np.sin(a) * np.cos(b)) ** 2,
                            0, np.pi, 0, 2 * np.pi, epsabs=1e-13, epsrel=1e-12)[0]
    assert mom.lambda_perp < 0.01
    assert mom.lambda_perp == pytest.approx(num / z, rel=1e-8)


def test_meridian_profile_at_pole_is_second_moment():
    dens = RadialDensity.from_bumps([Bump(1.8, 0.2)])
    assert meridian_profile(dens, 5, 0.0) == pytest.approx(dens.expect(lambda R: R * R, 5), rel=1e-14)


def test_meridian_profile_two_directions_m2():
    """Direct 2-D evaluation on S^2 along two meridians both match the profile."""
    dens = RadialDensity.from_bumps([Bump.on(np.pi / 2 + 0.1, np.pi / 2 + 0.3)])
    r = 0.4
    xg, wg = np.polynomial.legendre.leggauss(64)
    lo, hi = dens.support
    R = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xg
    wR = 0.5 * (hi - lo) * wg * dens.weight(R) * np.sin(R)
    phi = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    pts = exp_north(np.stack([np.outer(R, np.cos(phi)), np.outer(R, np.sin(phi))], axis=-1))
    vals = []
    for e in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        d2 = distance(exp_north(r * e), pts) ** 2
        vals.append(float(wR @ d2.mean(axis=1)) / float(wR.sum()))
    assert abs(vals[0] - vals[1]) < 1e-10
    assert meridian_profile(dens, 2, r) == pytest.approx(vals[0], abs=1e-10)


def test_annulus_not_global_for_large_m():
    dens = RadialDensity.from_bumps([Bump(np.pi / 2 + 0.3, 0.05)])
    assert check_not_global(dens, 50).positive


def test_lambda_max_check_cases():
    rep = hessian_rot(RadialDensity.cap(np.pi / 2), 2)
    assert lambda_max_check(rep)
    c = 2.0
    m = 3
    Rm = K.find_R_m(m).value
    rep = hessian_rot(RadialDensity.from_bumps([Bump(Rm - 0.02, 0.01)]), m)
    assert lambda_max_check(rep) and rep.hess_eigs[0] < 0.1
    assert not lambda_max_check(SpectralReport(2, [c, 1.0], 3.0))


def test_classification():
    assert spectral_report(RadialDensity.cap(1.2), m=3).classification == "PositiveDefinite"
    m = 3
    Rm = K.find_R_m(m).value
    dens, _ = calibrate_two_bumps(m, Bump.on(0.8, 1.2), Bump.on(Rm + 0.2, Rm + 0.4))
    rep = spectral_report(dens, m=m)
    assert abs(rep.hess_eigs[0]) < 1e-8
    assert rep.classification == "ZeroHessianQuarticNegative"
    with pytest.raises(ClassificationError):
        classify(SpectralReport(2, [-1.0, 1.0], 0.0))
    with pytest.raises(ClassificationError):
        classify(SpectralReport(3, [0.0, 0.0, 0.0], 0.0, quartic_scalar=0.0))
