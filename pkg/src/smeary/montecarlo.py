"""Sampling, sample Fréchet means and the variance-modulation experiment.

For i.i.d. samples of size n from a measure with Fréchet mean N, the
rescaled squared error Z_n = n d(mu_n, N)^2 / V with V = E[d(X, N)^2]
measures finite-sample variance modulation; its mean tends to
m_inf = 4 / lambda^2 where lambda is the Hessian eigenvalue at N.
"""
import csv
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .densities import RadialDensity
from .errors import CutLocusError, DomainError, SamplingError, SmearyError
from .geometry import distance, exp_at, exp_north, log_at, north_pole
from .quadrature import quad
from .spectra import rcot

TABLE_NODES = 4096
MIN_ACCEPTANCE = 1e-6
DEFAULT_DIMS = (2, 3, 5, 10, 50, 100, 200)
DEFAULT_NS = (1000, 2000, 3000)
DEFAULT_R_EPS = np.pi / 2 - 1e-4


class RadialSampler:
    """Inverse-CDF table of nu_m on a uniform grid with linear interpolation."""

    def __init__(self, density, m, nodes=TABLE_NODES):
        a, b = density.support
        self.grid = np.linspace(a, b, nodes)
        x, w = np.polynomial.legendre.leggauss(8)
        lo, hi = self.grid[:-1], self.grid[1:]
        half = 0.5 * (hi - lo)
        pts = 0.5 * (lo + hi)[:, None] + half[:, None] * x[None, :]
        cell = half * (density.pdf(pts, m) @ w)
        if not np.sum(cell) > 0:
            raise SamplingError("radial density has zero mass", m=m)
        self.cdf = np.concatenate([[0.0], np.cumsum(cell)])
        self.cdf /= self.cdf[-1]

    def __call__(self, rng, size=None):
        return np.interp(rng.random(size), self.cdf, self.grid)


def sample_radial(density, m, rng, size=None):
    return RadialSampler(density, m)(rng, size)


def sample_sphere_uniform(k, rng, size=None):
    """Uniform points on S^k in R^(k+1), from normalized Gaussians."""
    shape = (k + 1,) if size is None else (size, k + 1)
    z = rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def theta1_acceptance(kappa, m):
    """Acceptance probability of uniform proposals for density exp(kappa(theta_1^2 - 1))."""
    if kappa == 0:
        return 1.0
    weight = lambda th: np.sin(th) ** (m - 2)
    brk = [c / math.sqrt(kappa) for c in (1, 3, 10) if c / math.sqrt(kappa) < np.pi / 2] + [np.pi / 2]
    num = quad(lambda th: np.exp(-kappa * np.sin(th) ** 2) * weight(th), 0, np.pi / 2,
               tol=1e-300, rtol=1e-10, breakpoints=brk)
    den = quad(weight, 0, np.pi / 2, tol=1e-300, rtol=1e-12)
    return num / den


def _theta1_marginal(kappa, m, rng, size):
    """theta ~ exp(-kappa sin^2 th) sin^(m-2) th on [0, pi/2] by inverse CDF, then reflect."""
    top = min(np.pi / 2, 40 / math.sqrt(max(kappa, 1e-12)))
    grid = np.unique(np.r_[np.linspace(0, top, TABLE_NODES), np.linspace(top, np.pi / 2, 256)])
    x, w = np.polynomial.legendre.leggauss(8)
    lo, hi = grid[:-1], grid[1:]
    half = 0.5 * (hi - lo)
    pts = 0.5 * (lo + hi)[:, None] + half[:, None] * x[None, :]
    dens = np.exp(-kappa * np.sin(pts) ** 2) * np.sin(pts) ** (m - 2)
    cdf = np.concatenate([[0.0], np.cumsum(half * (dens @ w))])
    cdf /= cdf[-1]
    th = np.interp(rng.random(size), cdf, grid)
    t = np.cos(th) * np.where(rng.random(size) < 0.5, -1.0, 1.0)
    if m == 2:
        perp = np.where(rng.random(size) < 0.5, -1.0, 1.0)[:, None]
    else:
        perp = sample_sphere_uniform(m - 2, rng, size)
    return np.concatenate([t[:, None], np.sin(th)[:, None] * perp], axis=1)


def sample_theta1_exp(kappa, m, rng, size, method="auto", return_rate=False):
    """Samples on S^{m-1} with density proportional to exp(kappa theta_1^2).

    ``method`` is "rejection" (uniform proposals, envelope 1),
    "marginal" (inverse CDF of theta_1, uniform remainder) or "auto", which
    uses rejection unless its acceptance rate falls below 1e-6.
    """
    if kappa < 0:
        raise DomainError("kappa must be nonnegative", kappa=kappa)
    rate = theta1_acceptance(kappa, m)
    if method == "auto":
        method = "rejection" if rate >= MIN_ACCEPTANCE else "marginal"
    if method == "marginal":
        out = _theta1_marginal(kappa, m, rng, size)
        return (out, rate) if return_rate else out
    if method != "rejection":
        raise DomainError("unknown sampling method", method=method)
    if rate < MIN_ACCEPTANCE:
        raise SamplingError("rejection acceptance rate too small; use method='marginal'",
                            kappa=kappa, m=m, acceptance=rate)
    chunks, have, tried, accepted = [], 0, 0, 0
    while have < size:
        batch = int(min(10_000_000, max(1024, 1.2 * (size - have) / rate)))
        prop = sample_sphere_uniform(m - 1, rng, batch)
        keep = rng.random(batch) < np.exp(kappa * (prop[:, 0] ** 2 - 1.0))
        chunks.append(prop[keep])
        have += int(keep.sum())
        tried += batch
        accepted += int(keep.sum())
    out = np.concatenate(chunks)[:size]
    return (out, accepted / tried) if return_rate else out


def sample_points(density, m, rng, size, angular=None, sampler=None):
    """Points exp_N(R Theta) on S^m for a product measure."""
    sampler = sampler or RadialSampler(density, m)
    R = sampler(rng, size)
    if angular is None or angular.is_uniform:
        theta = sample_sphere_uniform(m - 1, rng, size)
    elif angular.kind == "theta1_exp":
        theta = sample_theta1_exp(angular.params["kappa"], m, rng, size)
    else:
        raise DomainError("sampling supports uniform and theta1_exp angular laws", kind=angular.kind)
    return exp_north(R[:, None] * theta)


def frechet_objective(p, points):
    return float(np.mean(distance(p, points) ** 2))


def frechet_mean_gd(points, init=None, step=1.0, tol=1e-10, maxiter=10_000, return_info=False):
    """Karcher iteration p <- exp_p(step * mean log_p(X_j)) with step halving.

    A step is accepted only if it does not increase the sample Fréchet
    function by more than 1e-14; otherwise the step is halved (up to 60 times).
    """
    X = np.asarray(points, dtype=float)
    p = X[0].copy() if init is None else np.asarray(init, dtype=float) / np.linalg.norm(init)
    logs = log_at(p, X)
    F = float(np.mean(np.sum(logs * logs, axis=1)))
    history = [F]
    converged = False
    it = 0
    for it in range(1, maxiter + 1):
        g = logs.mean(axis=0)
        t = step
        for _ in range(61):
            v = t * g
            q = exp_at(p, v)
            try:
                logs_q = log_at(q, X)
            except CutLocusError:
                t *= 0.5
                continue
            Fq = float(np.mean(np.sum(logs_q * logs_q, axis=1)))
            if Fq <= F + 1e-14:
                break
            t *= 0.5
        else:
            converged = True  # no descent direction left at floating-point resolution
            break
        p, logs, F = q, logs_q, Fq
        history.append(F)
        if np.linalg.norm(v) < tol:
            converged = True
            break
    if not converged:
        warnings.warn(f"frechet_mean_gd hit maxiter={maxiter}", RuntimeWarning, stacklevel=2)
    if return_info:
        return p, {"iterations": it, "converged": converged, "objective": F, "history": history}
    return p


@dataclass(frozen=True)
class ModulationRecord:
    m: int
    n: int
    rep: int
    z_n: float
    seed: int


@dataclass(frozen=True)
class TheoryRow:
    m: int
    s_m: float
    lambda_m: float
    m_inf: float


def replicate_seed(master_seed, m, n, rep):
    """64-bit seed from numpy's SeedSequence hash of (master_seed, m, n, rep)."""
    ss = np.random.SeedSequence([int(master_seed), int(m), int(n), int(rep)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def second_moment(density, m):
    """V_m = E[d(X, N)^2] = E[R^2] under nu_m."""
    return density.expect(lambda R: R * R, m)


def modulation_samples(m, n, reps, density, master_seed, init="north", angular=None):
    V = second_moment(density, m)
    sampler = RadialSampler(density, m)
    N = north_pole(m)
    out = []
    for rep in range(reps):
        seed = replicate_seed(master_seed, m, n, rep)
        rng = np.random.default_rng(seed)
        X = sample_points(density, m, rng, n, angular, sampler)
        p0 = N if init == "north" else X[rng.integers(n)]
        mu = frechet_mean_gd(X, p0)
        out.append(ModulationRecord(m, n, rep, float(n * distance(mu, N) ** 2 / V), seed))
    return out


def theory_row(m, weight, R_eps=None):
    a, b = weight.support
    R_eps = b if R_eps is None else R_eps
    if not (b <= R_eps < np.pi / 2):
        raise DomainError("theory requires support inside (0, R_eps] with R_eps < pi/2",
                          support=[a, b], R_eps=R_eps)
    s = weight.expect(rcot, m)
    lam = 2.0 * (s + (1.0 - s) / m)
    return TheoryRow(int(m), float(s), float(lam), float(4.0 / lam ** 2))


@dataclass
class ExperimentResult:
    records: list
    theory: list
    failures: list

    def means(self):
        cells = {}
        for r in self.records:
            cells.setdefault((r.m, r.n), []).append(r.z_n)
        return {k: float(np.mean(v)) for k, v in sorted(cells.items())}

    def monotone_in_m(self):
        """Per n, whether the empirical means increase with m (soft check)."""
        out = {}
        means = self.means()
        for n in sorted({k[1] for k in means}):
            seq = [means[k] for k in sorted(means) if k[1] == n]
            out[n] = bool(np.all(np.diff(seq) > 0))
        return out

    def summary(self):
        theory = {t.m: t.m_inf for t in self.theory}
        return {
            "cells": [{"m": m, "n": n, "mean_z_n": z, "m_inf": theory.get(m),
                       "rel_err": None if m not in theory else z / theory[m] - 1}
                      for (m, n), z in self.means().items()],
            "monotone_in_m": {str(k): v for k, v in self.monotone_in_m().items()},
            "failures": self.failures,
        }


def _cell(args):
    m, n, reps, R_eps, master_seed, init = args
    dens = RadialDensity.cap(R_eps)
    try:
        return m, n, modulation_samples(m, n, reps, dens, master_seed, init), None
    except SmearyError as exc:
        recs = [ModulationRecord(m, n, r, float("nan"), replicate_seed(master_seed, m, n, r))
                for r in range(reps)]
        return m, n, recs, exc.to_dict()


def experiment_curse(dims=DEFAULT_DIMS, ns=DEFAULT_NS, reps=3, R_eps=DEFAULT_R_EPS, master_seed=0,
                     init="north", jobs=1):
    """Cap-uniform modulation experiment over a grid of dimensions and sample sizes."""
    tasks = [(int(m), int(n), int(reps), float(R_eps), int(master_seed), init)
             for m in sorted(dims) for n in sorted(ns)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell, tasks))
    else:
        results = [_cell(t) for t in tasks]
    records, failures = [], []
    for m, n, recs, err in sorted(results, key=lambda r: (r[0], r[1])):
        records.extend(recs)
        if err is not None:
            failures.append({"m": m, "n": n, **err})
    dens = RadialDensity.cap(R_eps)
    theory = [theory_row(m, dens, R_eps) for m in sorted(dims)]
    return ExperimentResult(records, theory, failures)


CSV_COLUMNS = ("kind", "m", "n", "rep", "z_n", "s_m", "lambda_m", "m_inf")


def to_csv(result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.records:
        w.writerow(["empirical", r.m, r.n, r.rep, repr(r.z_n), "", "", ""])
    for t in result.theory:
        w.writerow(["theory", t.m, "", "", "", repr(t.s_m), repr(t.lambda_m), repr(t.m_inf)])
    return buf.getvalue()


def write_svg(result, path):
    """Mean Z_n versus m, one polyline per n, with the theory curve; log y-axis."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "modulation"
    means = result.means()
    fig, ax = plt.subplots(figsize=(6, 4))
    for n in sorted({k[1] for k in means}):
        ms = [k[0] for k in sorted(means) if k[1] == n]
        ax.plot(ms, [means[(m, n)] for m in ms], marker="o", label=f"n = {n}")
    ax.plot([t.m for t in result.theory], [t.m_inf for t in result.theory], "k--", label="4 / lambda_m^2")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("dimension m")
    ax.set_ylabel("mean Z_n")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
