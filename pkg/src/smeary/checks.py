"""Acceptance checks shared by the test suite and ``smeary verify``.

Each check returns a CheckResult; none of them raise on failure. Reference
values come from routes independent of the code under test (finite
differences of the exact distance, separate bisection formulations,
closed forms) wherever one exists.
"""
import io
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .constructions import (
    build_directional, build_high_modulation, build_smeary_rot, calibrate_two_bumps,
)
from .densities import AngularModel, Bump, RadialDensity
from .errors import SmearyError
from .geometry import distance, exp_north
from .montecarlo import (
    CSV_COLUMNS, DEFAULT_DIMS, DEFAULT_NS, experiment_curse, modulation_samples, theory_row, to_csv,
    write_svg,
)
from .spectra import (
    funk_hecke_average, hessian_product, lambda_max_check, spectral_report, trace_b,
)
from .taylor import taylor_coeffs_cosine

MC_SEED = 12345
TAYLOR_RADII = (0.3, 0.8, np.pi / 2, 2.0, 2.8)
TAYLOR_COSINES = (-1.0, -0.5, 0.0, 0.5, 1.0)
FD_STEPS = (0.1, 0.05, 0.025, 0.0125)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        detail = json.dumps(self.detail, default=float, sort_keys=True)
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.seconds:.1f}s) {detail}"

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "seconds": self.seconds, "detail": self.detail}


def run_check(name, fn):
    """Run one check, converting package errors into a failed result."""
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except SmearyError as exc:
        passed, detail = False, exc.to_dict()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t0)


def line_function(R, cosine):
    """t -> d(exp_N(t a), exp_N(R e))^2 on S^2 with <a, e> = cosine."""
    v = np.array([R, 0.0])
    a = np.array([cosine, np.sqrt(max(0.0, 1 - cosine ** 2))])
    return lambda t: float(distance(exp_north(t * a), exp_north(v)) ** 2)


def _stencil(f, k, h):
    if k == 0:
        return f(0.0)
    if k == 1:
        return (f(h) - f(-h)) / (2 * h)
    if k == 2:
        return (f(h) - 2 * f(0.0) + f(-h)) / h ** 2
    if k == 3:
        return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h ** 3)
    return (f(2 * h) - 4 * f(h) + 6 * f(0.0) - 4 * f(-h) + f(-2 * h)) / h ** 4


def richardson_derivative(f, k, steps=FD_STEPS):
    """k-th derivative at 0 from central stencils at halving steps, full Richardson table."""
    table = [_stencil(f, k, h) for h in steps]
    p = 1
    while len(table) > 1:
        table = [(4 ** p * table[i + 1] - table[i]) / (4 ** p - 1) for i in range(len(table) - 1)]
        p += 1
    return table[0]


def check_taylor_oracle():
    worst = {}
    ok = True
    fact = [1, 1, 2, 6, 24]
    for R in TAYLOR_RADII:
        for c in TAYLOR_COSINES:
            f = line_function(R, c)
            tc = taylor_coeffs_cosine(R, c).as_tuple()
            for k in range(5):
                ref = richardson_derivative(f, k)
                err = abs(fact[k] * tc[k] - ref) / max(1.0, abs(ref))
                tol = 1e-4 if k == 4 else 1e-6
                worst[k] = max(worst.get(k, 0.0), err)
                ok &= err <= tol
    return ok, {f"max_rel_err_C{k}": v for k, v in worst.items()}


def check_endpoint():
    m_vals = range(2, 65)
    err = max(abs(float(K.h_m(m, np.pi / 2)) - K.h_m_endpoint_value(m)) for m in m_vals)
    slopes = {}
    for m in (7, 8, 9):
        h = 1e-4
        slopes[m] = (float(K.h_m(m, np.pi / 2 + h)) - float(K.h_m(m, np.pi / 2 - h))) / (2 * h)
    slope_err = max(abs(slopes[m] - K.h_m_endpoint_slope(m)) for m in slopes)
    flips = (K.h_m_endpoint_slope(7) <= 0 < K.h_m_endpoint_slope(8)
             and slopes[7] < 1e-8 and slopes[8] > 0 and slopes[9] > 0)
    ok = err <= 1e-10 and flips and slope_err < 1e-8
    return ok, {"max_value_err": err, "numeric_slopes": slopes, "slope_err": slope_err}


def check_closed_forms():
    R = np.linspace(0.05, np.pi - 0.05, 500)
    e3 = float(np.max(np.abs(K.h_m(3, R) - K.h_3_closed(R))))
    e2 = float(np.max(np.abs(K.h_m(2, R) - K.h_2_closed(R))))
    return e3 <= 1e-10 and e2 <= 1e-10, {"max_err_m3": e3, "max_err_m2": e2}


def independent_R2():
    """Zero of sin R + R cos R on (pi/2, pi) by plain bisection to 1e-13."""
    f = lambda R: np.sin(R) + R * np.cos(R)
    lo, hi = np.pi / 2, np.pi - 1e-6
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_roots():
    r2 = K.find_R_m(2).value
    oracle = independent_R2()
    order = all(K.find_R_m(m).value < K.find_S_m(m).value for m in range(4, 201))
    ratios_R = [(K.find_R_m(m).value - np.pi / 2) * np.pi * (m - 1) / 2 for m in range(100, 401)]
    ratios_S = [(K.find_S_m(m).value - np.pi / 2) * np.pi * m / 8 for m in range(100, 401)]
    asym = all(0.9 <= r <= 1.1 for r in ratios_R + ratios_S)
    ok = abs(r2 - oracle) <= 1e-10 and order and asym
    return ok, {"R_2": r2, "oracle": oracle, "ordering": order,
                "R_ratio_range": [min(ratios_R), max(ratios_R)],
                "S_ratio_range": [min(ratios_S), max(ratios_S)]}


def check_moments():
    err = 0.0
    for m in range(2, 13):
        err = max(err, abs(funk_hecke_average(lambda t: t ** 2, m) - 1 / m),
                  abs(funk_hecke_average(lambda t: t ** 4, m) - 3 / (m * (m + 2))))
    return err <= 1e-10, {"max_err": err}


def random_bumps(rng, lo, hi, k_max=3):
    """Random mixture of 1..k_max bumps inside [lo, hi]."""
    bumps = []
    for _ in range(int(rng.integers(1, k_max + 1))):
        a, b = np.sort(rng.uniform(lo, hi, 2))
        if b - a < 1e-3:
            b = min(hi, a + 1e-3)
            a = b - 1e-3
        bumps.append(Bump.on(a, b, float(rng.uniform(0.1, 1.0))))
    return RadialDensity.from_bumps(bumps)


def random_angular(rng):
    if rng.random() < 0.3:
        return AngularModel.uniform()
    return AngularModel.theta1_exp(float(np.exp(rng.uniform(-2, 4))))


def check_obstruction(n=200, seed=1):
    rng = np.random.default_rng(seed)
    min_eig, min_trace = np.inf, np.inf
    for _ in range(n):
        m = int(rng.integers(2, 31))
        rep = hessian_product(random_bumps(rng, 1e-3, np.pi / 2), random_angular(rng), m)
        min_eig = min(min_eig, min(rep.hess_eigs))
    for _ in range(n):
        m = int(rng.integers(2, 31))
        Rm = K.find_R_m(m).value
        min_trace = min(min_trace, trace_b(random_bumps(rng, 1e-3, Rm), m))
    return min_eig > 0 and min_trace > 0, {"min_eigenvalue": min_eig, "min_trace": min_trace}


def check_smeary(epsilon=0.2):
    m = K.minimal_admissible_m(epsilon)
    try:
        rec = build_smeary_rot(m, epsilon)
    except SmearyError as exc:
        return False, {"m": m, "epsilon": epsilon, **exc.to_dict()}
    lo, hi = rec.density.support
    lam = rec.report.hess_eigs[0]
    ok = (abs(lam) <= 1e-8 and rec.report.quartic_scalar > 0 and abs(rec.mass - 1) <= 1e-10
          and np.pi / 2 < lo and hi < np.pi / 2 + epsilon)
    return ok, {"m": m, "hessian": lam, "quartic": rec.report.quartic_scalar, "mass": rec.mass,
                "support": [lo, hi], "classification": rec.report.classification}


def check_directional(dims=(2, 3, 5), epsilon=0.3):
    ok = True
    detail = {}
    for m in dims:
        rec = build_directional(m, epsilon)
        eigs = np.asarray(rec.report.hess_eigs)
        spectrum = eigs[0] > 1e-8 and np.all(np.abs(eigs[1:]) <= 1e-8)
        mu_err = abs(rec.mu_par - rec.mu_par_closed)
        odd = max(abs(x) for x in rec.moments["odd_moments"])
        inside = rec.density.support[1] < np.pi / 2 + epsilon
        good = spectrum and mu_err <= 1e-8 and odd <= 1e-12 and rec.kernel_quartic > 0 and inside
        ok &= bool(good)
        detail[m] = {"eig_par": float(eigs[0]), "max_perp": float(np.max(np.abs(eigs[1:]))),
                     "mu_par_err": mu_err, "odd_max": odd, "kernel_quartic": rec.kernel_quartic,
                     "kappa": rec.kappa, "support": list(rec.density.support)}
    return ok, detail


def check_semi_tight(n=50, seed=2):
    rng = np.random.default_rng(seed)
    classes = []
    for i in range(n):
        m = int(rng.integers(2, 4)) if i % 2 == 0 else int(rng.integers(4, 61))
        Rm = K.find_R_m(m).value
        upper = np.pi - 0.05 if m < 4 else K.find_S_m(m).value
        phi1 = Bump.on(*np.sort(rng.uniform(0.05, Rm - 1e-3, 2)) + [0, 1e-3])
        a = rng.uniform(Rm + 1e-4, upper - 2e-4)
        phi2 = Bump.on(a, rng.uniform(a + 1e-4, upper))
        dens, _ = calibrate_two_bumps(m, phi1, phi2)
        classes.append(spectral_report(dens, AngularModel.uniform(), m).classification)
    ok = all(c == "ZeroHessianQuarticNegative" for c in classes)
    return ok, {"counts": {c: classes.count(c) for c in set(map(str, classes))}}


def check_theory(R_eps=1.0):
    cap = RadialDensity.cap(R_eps)
    rows = [theory_row(m, cap, R_eps) for m in range(2, 200)]
    s_dec = all(b.s_m < a.s_m for a, b in zip(rows, rows[1:]))
    m_inc = all(b.m_inf > a.m_inf for a, b in zip(rows, rows[1:]))
    lim = theory_row(400, cap, R_eps).m_inf * (R_eps / np.tan(R_eps)) ** 2
    return s_dec and m_inc and abs(lim - 1) < 0.05, {"s_decreasing": s_dec, "m_inf_increasing": m_inc,
                                                     "m_inf_400_over_limit": lim}


def check_monte_carlo(dims=(2, 3, 5), n=1000, reps=200, seed=MC_SEED, R_eps=np.pi / 2 - 1e-4):
    cap = RadialDensity.cap(R_eps)
    means, theory = [], []
    for m in dims:
        z = [r.z_n for r in modulation_samples(m, n, reps, cap, seed)]
        means.append(float(np.mean(z)))
        theory.append(theory_row(m, cap, R_eps).m_inf)
    rel = [mu / th - 1 for mu, th in zip(means, theory)]
    ok = all(abs(r) < 0.15 for r in rel) and all(b > a for a, b in zip(means, means[1:]))
    return ok, {"means": means, "m_inf": theory, "rel_err": rel, "seed": seed}


def check_full_grid(reps=3, seed=MC_SEED, workdir=None):
    """Full default grid end to end, validating the CSV schema and the SVG."""
    import csv
    import tempfile
    import xml.etree.ElementTree as ET

    res = experiment_curse(reps=reps, master_seed=seed)
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        svg = os.path.join(tmp, "grid.svg")
        write_svg(res, svg)
        root = ET.parse(svg).getroot()
    rows = list(csv.DictReader(io.StringIO(to_csv(res))))
    n_emp = sum(r["kind"] == "empirical" for r in rows)
    n_th = sum(r["kind"] == "theory" for r in rows)
    cells = len(DEFAULT_DIMS) * len(DEFAULT_NS) * reps
    finite = all(np.isfinite(float(r["z_n"])) for r in rows if r["kind"] == "empirical")
    ok = (tuple(rows[0].keys()) == CSV_COLUMNS and n_emp == cells and n_th == len(DEFAULT_DIMS)
          and finite and not res.failures and root.tag.endswith("svg"))
    return ok, {"empirical_rows": n_emp, "theory_rows": n_th, "failures": len(res.failures),
                "monotone_in_m": res.monotone_in_m()}


def check_spectral_bound(n=200, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    for _ in range(n):
        m = int(rng.integers(2, 31))
        rep = hessian_product(random_bumps(rng, 1e-3, np.pi - 0.05), random_angular(rng), m)
        worst = max(worst, max(rep.hess_eigs))
        ok &= lambda_max_check(rep)
    _, rep = build_high_modulation(2, 0.1)
    m_inf = 4.0 / max(rep.hess_eigs) ** 2
    return ok and m_inf >= 400, {"max_eigenvalue": worst, "high_modulation_m_inf": m_inf}


ACCEPTANCE = (
    ("1 taylor oracle", check_taylor_oracle),
    ("2 endpoint identities", check_endpoint),
    ("3 closed forms", check_closed_forms),
    ("4 roots", check_roots),
    ("5 moment identities", check_moments),
    ("6 obstruction", check_obstruction),
    ("7 smeary construction", check_smeary),
    ("8 directional construction", check_directional),
    ("9 semi-tightness", check_semi_tight),
    ("10 modulation theory", check_theory),
    ("11 monte carlo", check_monte_carlo),
    ("11b full grid", check_full_grid),
    ("12 spectral bound", check_spectral_bound),
)


def run_acceptance(select=None):
    out = []
    for name, fn in ACCEPTANCE:
        if select is None or name.split()[0] in select:
            out.append(run_check(name, fn))
    return out
