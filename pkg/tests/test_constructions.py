import json

import numpy as np
import pytest

from smeary import kernels as K
from smeary.constructions import (
    asymptotic_feasibility, build_directional, build_high_modulation, build_smeary_rot,
    check_not_global, local_quartic_window, minimal_feasible_m, smeary_feasibility,
)
from smeary.densities import Bump, RadialDensity, load_density
from smeary.errors import ConstructionError, DomainError
from smeary.spectra import spectral_report


@pytest.fixture(scope="module")
def wide_recipe():
    return build_smeary_rot(12, 0.8)


def test_below_threshold_names_minimal_m():
    m_min = K.minimal_admissible_m(0.05)
    with pytest.raises(ConstructionError) as exc:
        build_smeary_rot(m_min - 1, 0.05)
    assert exc.value.details["minimal_m"] == m_min


def test_wide_annulus_recipe_properties(wide_recipe):
    rec = wide_recipe
    assert abs(rec.report.hess_eigs[0]) < 1e-8
    assert rec.report.quartic_scalar > 0
    assert rec.report.classification == "ZeroHessianQuarticPositive"
    assert rec.mass == pytest.approx(1.0, abs=1e-10)
    lo, hi = rec.density.support
    assert np.pi / 2 < lo and hi < np.pi / 2 + 0.8
    R = np.linspace(0.01, np.pi - 0.01, 4001)
    outside = (R <= np.pi / 2) | (R >= np.pi / 2 + 0.8)
    assert np.all(rec.density.weight(R[outside]) == 0)


def test_recipe_json_replay(wide_recipe):
    cfg = json.loads(json.dumps(wide_recipe.to_dict()))
    radial, angular, m = load_density(cfg)
    rep = spectral_report(radial, angular, m)
    assert rep.classification == "ZeroHessianQuarticPositive"
    assert rep.quartic_scalar == pytest.approx(wide_recipe.report.quartic_scalar, rel=1e-10)


def test_wide_annulus_is_not_a_global_minimum(wide_recipe):
    gap = check_not_global(wide_recipe)
    assert gap.m == 12 and gap.delta > 0
    assert np.isfinite(gap.gap)


def test_infeasible_annulus_reports_diagnostics():
    m = K.minimal_admissible_m(0.2)
    assert smeary_feasibility(m, 0.2) < 1
    with pytest.raises(ConstructionError) as exc:
        build_smeary_rot(m, 0.2)
    d = exc.value.details
    assert d["pointwise_ratio"] < 1 and d["minimal_feasible_m"] is None
    assert d["I1"] > 0 > d["I2"]


def test_asymptotic_feasibility_threshold():
    r = np.tan(0.6759)
    # at the threshold R c^2 - c - R = 0 with c = -tan(eps), R = pi/2 + eps
    assert (np.pi / 2 + 0.6759) * r ** 2 + r - (np.pi / 2 + 0.6759) == pytest.approx(0, abs=2e-3)
    assert asymptotic_feasibility(0.5) < 1 < asymptotic_feasibility(0.8)
    vals = [asymptotic_feasibility(e) for e in (0.2, 0.4, 0.6, 0.8, 1.0)]
    assert np.all(np.diff(vals) > 0)


def test_minimal_feasible_m():
    m = minimal_feasible_m(0.8)
    assert smeary_feasibility(m, 0.8) > 1
    if m > K.minimal_admissible_m(0.8):
        assert smeary_feasibility(m - 1, 0.8) <= 1
    assert minimal_feasible_m(0.2) is None


def test_meridian_gap_point_mass_limit():
    bump = RadialDensity.from_bumps([Bump(np.pi / 2 + 0.3, 0.01)])
    assert check_not_global(bump, 50).positive
    gap2 = check_not_global(bump, 2)
    assert gap2.positive in (True, False)
    with pytest.raises(DomainError):
        check_not_global(RadialDensity.uniform(np.pi / 2, 2.0), 5)


@pytest.mark.parametrize("m", [2, 4])
def test_directional_recipe(m):
    eps = 0.3
    rec = build_directional(m, eps)
    eigs = np.asarray(rec.report.hess_eigs)
    assert eigs[0] > 1e-8 and np.all(np.abs(eigs[1:]) < 1e-8)
    assert rec.mu_par == pytest.approx(rec.mu_par_closed, abs=1e-8)
    assert rec.report.classification == "Rank1PSD"
    assert rec.density.support[1] < np.pi / 2 + eps
    assert rec.kernel_quartic / 24 > rec.delta ** 2 / 64
    assert max(abs(x) for x in rec.moments["odd_moments"]) < 1e-12


def test_local_quartic_window_positive():
    d0 = local_quartic_window()
    assert 0 < d0 < 1


def test_high_modulation():
    dens, rep = build_high_modulation(2, 0.1)
    assert 0 < rep.hess_eigs[0] <= 0.1
    assert rep.extras["m_inf"] >= 400
    assert dens.support[1] < K.find_R_m(2).value
    _, rep = build_high_modulation(2, 1.9)
    assert 0 < rep.hess_eigs[0] <= 1.9


def test_input_validation():
    with pytest.raises(DomainError):
        build_smeary_rot(20, 0.0)
    with pytest.raises(DomainError):
        build_directional(1, 0.3)
    with pytest.raises(DomainError):
        build_high_modulation(3, 2.5)
