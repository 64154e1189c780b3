import csv
import io
import warnings
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from scipy import optimize, stats

from smeary.densities import AngularModel, RadialDensity
from smeary.errors import DomainError, SamplingError
from smeary.geometry import distance, exp_at, exp_north, north_pole
from smeary.montecarlo import (
    CSV_COLUMNS, RadialSampler, experiment_curse, frechet_mean_gd, frechet_objective,
    modulation_samples, replicate_seed, sample_points, sample_sphere_uniform, sample_theta1_exp,
    second_moment, theory_row, to_csv, write_svg,
)

N_DRAWS = 100_000


def test_radial_sampler_mean_support_and_ks(rng):
    dens = RadialDensity.cap(np.pi / 2 - 1e-4)
    sampler = RadialSampler(dens, 2)
    R = sampler(rng, N_DRAWS)
    assert R.min() >= 0 and R.max() <= dens.support[1]
    mean = dens.expect(lambda r: r, 2)
    assert abs(R.mean() - mean) < 3 * R.std() / np.sqrt(N_DRAWS)
    # m = 2 CDF of the cap is 1 - cos R normalized
    cdf = lambda r: (1 - np.cos(r)) / (1 - np.cos(dens.support[1]))
    assert stats.kstest(R, cdf).statistic < 0.02


def test_radial_sampler_annulus_support(rng):
    dens = RadialDensity.uniform(1.7, 1.9)
    R = RadialSampler(dens, 5)(rng, 10_000)
    assert R.min() >= 1.7 and R.max() <= 1.9


def test_uniform_angular_first_moment(rng):
    th = sample_theta1_exp(0.0, 4, rng, N_DRAWS)
    assert np.linalg.norm(th.mean(axis=0)) < 3 / np.sqrt(N_DRAWS)


@pytest.mark.parametrize("kappa,m,method", [(5.0, 3, "rejection"), (5.0, 3, "marginal"),
                                            (400.0, 5, "marginal"), (2.0, 2, "auto")])
def test_angular_sampler_moments(rng, kappa, m, method):
    th = sample_theta1_exp(kappa, m, rng, N_DRAWS, method=method)
    assert np.allclose(np.linalg.norm(th, axis=1), 1.0)
    mom = AngularModel.theta1_exp(kappa).moments(m)
    t2 = th[:, 0] ** 2
    assert abs(t2.mean() - mom.lambda_par) < 3 * t2.std() / np.sqrt(N_DRAWS) + 1e-12
    for odd in (th[:, 0], th[:, 0] ** 3):
        assert abs(odd.mean()) < 3 * odd.std() / np.sqrt(N_DRAWS)


def test_rejection_refuses_tiny_acceptance(rng):
    with pytest.raises(SamplingError):
        sample_theta1_exp(1e5, 10, rng, 10, method="rejection")
    with pytest.raises(DomainError):
        sample_theta1_exp(-1.0, 3, rng, 10)


def test_sample_points_on_sphere(rng):
    X = sample_points(RadialDensity.cap(1.0), 3, rng, 500)
    assert X.shape == (500, 4)
    assert np.allclose(np.linalg.norm(X, axis=1), 1.0)
    assert np.all(distance(X, north_pole(3)) <= 1.0 + 1e-12)


def test_frechet_mean_of_identical_points(rng):
    q = sample_sphere_uniform(3, rng)
    p = frechet_mean_gd(np.tile(q, (5, 1)), init=sample_sphere_uniform(3, rng))
    p1, info1 = frechet_mean_gd(np.tile(q, (5, 1)), init=q, return_info=True)
    assert np.allclose(p1, q) and info1["iterations"] <= 1
    assert distance(p, q) < 1e-10


def test_frechet_mean_symmetric_pair_stays():
    N = north_pole(2)
    X = exp_north(np.array([[0.5, 0.0], [-0.5, 0.0]]))
    assert np.allclose(frechet_mean_gd(X, N), N)


def test_frechet_mean_matches_polished_optimum(rng):
    m = 3
    X = sample_points(RadialDensity.cap(np.pi / 2 - 1e-4), m, rng, 500)
    p = frechet_mean_gd(X, north_pole(m))
    # tangent basis at p, then local Nelder-Mead polish of F_n
    basis = np.linalg.svd(np.eye(m + 1) - np.outer(p, p))[0][:, :m]
    F = lambda u: frechet_objective(exp_at(p, basis @ u), X)
    res = optimize.minimize(F, np.zeros(m), method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 20_000})
    assert distance(p, exp_at(p, basis @ res.x)) < 1e-6
    assert F(np.zeros(m)) <= res.fun + 1e-12


def test_frechet_mean_warns_on_maxiter(rng):
    X = sample_points(RadialDensity.cap(1.2), 2, rng, 50)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        frechet_mean_gd(X, north_pole(2), step=1e-6, maxiter=3)
    assert any(issubclass(w.category, RuntimeWarning) for w in rec)


def test_single_sample_modulation_has_unit_mean():
    dens = RadialDensity.cap(1.2)
    z = np.array([r.z_n for r in modulation_samples(3, 1, 4000, dens, master_seed=7)])
    assert abs(z.mean() - 1) < 3 * z.std() / np.sqrt(len(z))


def test_seeds_are_reproducible_and_distinct():
    assert replicate_seed(1, 2, 3, 4) == replicate_seed(1, 2, 3, 4)
    seeds = {replicate_seed(1, m, n, r) for m in (2, 3) for n in (10, 20) for r in range(3)}
    assert len(seeds) == 12
    dens = RadialDensity.cap(1.0)
    a = modulation_samples(2, 50, 3, dens, master_seed=99)
    b = modulation_samples(2, 50, 3, dens, master_seed=99)
    assert [r.z_n for r in a] == [r.z_n for r in b]


def test_second_moment_and_theory_row():
    dens = RadialDensity.cap(1.0)
    assert second_moment(dens, 2) == pytest.approx(dens.expect(lambda R: R * R, 2))
    row = theory_row(2, dens)
    assert row.lambda_m == pytest.approx(2 * (row.s_m + (1 - row.s_m) / 2))
    assert row.m_inf == pytest.approx(4 / row.lambda_m ** 2)
    with pytest.raises(DomainError):
        theory_row(2, RadialDensity.cap(2.0))


def test_small_experiment_schema_and_determinism(tmp_path):
    kw = dict(dims=(2, 4), ns=(1, 30), reps=2, R_eps=1.2, master_seed=5)
    res = experiment_curse(**kw)
    text = to_csv(res)
    assert text == to_csv(experiment_curse(**kw))
    assert text == to_csv(experiment_curse(jobs=2, **kw))
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert sum(r["kind"] == "empirical" for r in rows) == 2 * 2 * 2
    assert sum(r["kind"] == "theory" for r in rows) == 2
    path = tmp_path / "plot.svg"
    write_svg(res, str(path))
    assert ET.parse(path).getroot().tag.endswith("svg")
    first = path.read_bytes()
    write_svg(res, str(path))
    assert path.read_bytes() == first
