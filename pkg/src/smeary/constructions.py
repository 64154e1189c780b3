"""Constructive measures with prescribed Hessian and quartic behaviour at N.

* ``build_smeary_rot``: rotationally symmetric two-bump density on the annulus
  (pi/2, pi/2 + epsilon) with vanishing Hessian and positive quartic term.
* ``build_directional``: product density with a rank-one Hessian and positive
  quartic on the kernel.
* ``build_high_modulation``: narrow bump whose Hessian eigenvalue is as small
  as requested, so the asymptotic variance modulation 4/lambda^2 is large.
"""
from dataclasses import dataclass, field

import numpy as np

from .densities import KAPPA_MAX, AngularModel, Bump, RadialDensity
from .errors import ConstructionError, DomainError, NumericalError
from .kernels import b_m, bisect, find_R_m, find_S_m, h_m, minimal_admissible_m
from .spectra import (
    CLASS_TOL, classify, hessian_rot, meridian_profile, rcot, spectral_report,
)
from .taylor import quartic_parts

MAX_SHRINK = 60
RATIO_GRID = 4001
EDGE_MARGIN = 1e-6
MIN_WIDTH = 1e-9


def _moment(bump, kernel, m):
    """Integral of bump(R) kernel(R) (sin R)^(m-1) dR, with the bump mass."""
    sin_part = lambda R: np.sin(R) ** (m - 1)
    scale = bump.integrate(sin_part, rtol=1e-14)
    return bump.integrate(lambda R: kernel(R) * sin_part(R), tol=1e-14 * scale), scale


def calibrate_two_bumps(m, phi1, phi2):
    """Mix phi1 (b_m-positive) and phi2 (b_m-negative) so that E[b_m] = 0.

    Returns the normalized density and the moment diagnostics.
    """
    I1, Z1 = _moment(phi1, lambda R: b_m(m, R), m)
    I2, Z2 = _moment(phi2, lambda R: b_m(m, R), m)
    if not (I1 > 0 > I2):
        raise ConstructionError("calibration needs I1 > 0 > I2", I1=I1, I2=I2)
    a, b = 1.0, I1 / (-I2)
    mass = a * Z1 + b * Z2
    a, b = a / mass, b / mass
    dens = RadialDensity.from_bumps([
        Bump(phi1.center, phi1.halfwidth, phi1.amplitude * a),
        Bump(phi2.center, phi2.halfwidth, phi2.amplitude * b),
    ])
    return dens, {"I1": I1, "I2": I2, "Z1": Z1, "Z2": Z2, "a": a, "b": b,
                  "mass": a * Z1 + b * Z2}


@dataclass
class SmearyRecipe:
    m: int
    epsilon: float
    phi1: Bump
    phi2: Bump
    a: float
    b: float
    I1: float
    I2: float
    J1: float
    J2: float
    C: float
    R_m: float
    S_m: float
    shrink_steps: int
    density: RadialDensity
    report: object
    mass: float

    def to_dict(self):
        return {
            "kind": "smeary",
            "m": self.m, "epsilon": self.epsilon,
            "phi1": self.phi1.to_dict(), "phi2": self.phi2.to_dict(),
            "a": self.a, "b": self.b,
            "I1": self.I1, "I2": self.I2, "J1": self.J1, "J2": self.J2,
            "C": self.C, "R_m": self.R_m, "S_m": self.S_m,
            "shrink_steps": self.shrink_steps, "mass": self.mass,
            "density": {"radial": self.density.to_dict(), "angular": {"kind": "uniform"}, "m": self.m},
            "report": self.report.to_dict(),
        }


def ratio_profiles(m, epsilon, npts=RATIO_GRID):
    """Pointwise quartic-to-Hessian ratios on the two admissible regions.

    Left region (pi/2, (pi/2 + R_m)/2): -h_m / b_m (h < 0 < b).
    Right region (S_m, pi/2 + epsilon) up to the next zero of h_m: h_m / (-b_m).
    A two-bump calibration can have positive quartic only if the best right
    ratio exceeds the best left ratio.
    """
    Rm, Sm = find_R_m(m).value, find_S_m(m).value
    top = np.pi / 2 + epsilon
    if not (np.pi / 2 < Rm < Sm < top):
        raise ConstructionError("need pi/2 < R_m < S_m < pi/2 + epsilon", m=m, R_m=Rm, S_m=Sm,
                                upper=top)
    L = np.linspace(np.pi / 2, 0.5 * (np.pi / 2 + Rm), npts)[1:-1]
    left = -h_m(m, L) / b_m(m, L)
    J = np.linspace(Sm, top, npts)[1:-1]
    hv = h_m(m, J)
    neg = np.nonzero(hv <= 0)[0]
    if len(neg):
        J, hv = J[:neg[0]], hv[:neg[0]]
    right = hv / (-b_m(m, J))
    return {"R_m": Rm, "S_m": Sm, "left_R": L, "left": left, "right_R": J, "right": right}


def smeary_feasibility(m, epsilon):
    """max right ratio / min left ratio; values above 1 admit a construction."""
    prof = ratio_profiles(m, epsilon)
    if len(prof["right"]) == 0:
        return 0.0
    return float(np.max(prof["right"]) / np.min(prof["left"]))


def asymptotic_feasibility(epsilon):
    """Large-m limit of smeary_feasibility.

    As m grows, -h_m/b_m -> 1/(3m) on the left region while
    h_m/(-b_m) -> A0(R) / (-m R cot R) on the right, so their ratio tends to
    3 max A0(R)/(-R cot R) over (pi/2, pi/2 + epsilon].
    """
    R = np.linspace(np.pi / 2 + 1e-4, np.pi / 2 + epsilon, 20001)
    a0, _, _ = quartic_parts(R)
    return float(3 * np.max(a0 / (-rcot(R))))


def minimal_feasible_m(epsilon, m_max=4096):
    m0 = minimal_admissible_m(epsilon, m_max)
    if m0 is None:
        return None
    ok = lambda m: smeary_feasibility(m, epsilon) > 1.0
    m = m0
    while not ok(m):
        if m >= m_max:
            return None
        m = min(2 * m, m_max)
    lo = max(m0, m // 2)
    if lo < m and ok(lo):
        return lo
    while m - lo > 1:
        mid = (lo + m) // 2
        if ok(mid):
            m = mid
        else:
            lo = mid
    return m


def _shrunk(center, width, lo, hi):
    """Bump of the given width around ``center`` clipped inside (lo, hi)."""
    half = 0.5 * min(width, hi - lo)
    c = min(max(center, lo + half), hi - half)
    return Bump(c, half)


def build_smeary_rot(m, epsilon, phi2_scale=1.0, max_shrink=MAX_SHRINK):
    """Zero-Hessian, positive-quartic rotationally symmetric density.

    phi1 sits where -h_m/b_m is smallest left of the Hessian root R_m and phi2
    where h_m/(-b_m) is largest beyond the quartic root S_m. Both supports are
    shrunk geometrically (factor 1/2) around these points until the quartic
    ratio condition J2/(-I2) > (-J1)/I1 holds. ``phi2_scale`` in (0, 1] sets
    the initial width of phi2 relative to its admissible region.
    """
    if not 0 < epsilon < np.pi / 2:
        raise DomainError("epsilon must lie in (0, pi/2)", epsilon=epsilon)
    if not 0 < phi2_scale <= 1:
        raise DomainError("phi2_scale must lie in (0, 1]", phi2_scale=phi2_scale)
    m = int(m)
    m_min = minimal_admissible_m(epsilon)
    if m < 4 or m_min is None or m < m_min:
        raise ConstructionError("dimension below the threshold pi/2 < R_m < S_m < pi/2 + epsilon",
                                m=m, epsilon=epsilon, minimal_m=m_min)
    prof = ratio_profiles(m, epsilon)
    Rm, Sm = prof["R_m"], prof["S_m"]
    if len(prof["right"]) == 0:
        raise ConstructionError("h_m has no positive window inside the annulus", m=m, epsilon=epsilon)
    L_lo, L_hi = np.pi / 2 + EDGE_MARGIN, 0.5 * (np.pi / 2 + Rm) - EDGE_MARGIN
    J_lo, J_hi = Sm + EDGE_MARGIN, float(prof["right_R"][-1])
    c1 = float(prof["left_R"][np.argmin(prof["left"])])
    c2 = float(prof["right_R"][np.argmax(prof["right"])])
    w1, w2 = L_hi - L_lo, phi2_scale * (J_hi - J_lo)
    boundL = float(np.min(prof["left"]))
    boundR = float(np.max(prof["right"]))
    C = float(np.max(np.abs(h_m(m, np.linspace(np.pi / 2, Rm, 2001)))))
    hk = lambda R: h_m(m, R)
    bk = lambda R: b_m(m, R)
    diag = {}
    for step in range(max_shrink + 1):
        if max(w1, w2) < MIN_WIDTH:
            # bumps narrower than this only reproduce the pointwise ratios
            break
        phi1 = _shrunk(c1, w1, L_lo, L_hi)
        phi2 = _shrunk(c2, w2, J_lo, J_hi)
        I1, _ = _moment(phi1, bk, m)
        I2, _ = _moment(phi2, bk, m)
        J1, _ = _moment(phi1, hk, m)
        J2, _ = _moment(phi2, hk, m)
        diag = {"I1": I1, "I2": I2, "J1": J1, "J2": J2}
        if J2 / (-I2) > (-J1) / I1:
            break
        w1 *= 0.5
        w2 *= 0.5
    if not J2 / (-I2) > (-J1) / I1:
        raise ConstructionError(
            "quartic ratio condition J2/(-I2) > (-J1)/I1 unattainable after the shrink budget",
            m=m, epsilon=epsilon, shrink_steps=max_shrink, **diag,
            pointwise_right_max=boundR, pointwise_left_min=boundL,
            pointwise_ratio=boundR / boundL,
            asymptotic_ratio=asymptotic_feasibility(epsilon),
            minimal_feasible_m=minimal_feasible_m(epsilon),
        )
    dens, cal = calibrate_two_bumps(m, phi1, phi2)
    report = spectral_report(dens, AngularModel.uniform(), m)
    lam = report.hess_eigs[0]
    if abs(lam) > CLASS_TOL or not report.quartic_scalar > 0:
        raise NumericalError("calibrated density failed verification", hessian=lam,
                             quartic=report.quartic_scalar)
    return SmearyRecipe(
        m=m, epsilon=float(epsilon), phi1=dens.bumps[0], phi2=dens.bumps[1],
        a=cal["a"], b=cal["b"], I1=I1, I2=I2, J1=J1, J2=J2, C=C, R_m=Rm, S_m=Sm,
        shrink_steps=step, density=dens, report=report, mass=cal["mass"],
    )


@dataclass
class MeridianGap:
    gap: float
    phi_0: float
    phi_half_pi: float
    delta: float
    m: int

    @property
    def positive(self):
        return self.gap > 0

    def to_dict(self):
        return {"gap": self.gap, "phi_0": self.phi_0, "phi_half_pi": self.phi_half_pi,
                "delta": self.delta, "m": self.m, "positive": self.positive}


def check_not_global(recipe_or_density, m=None):
    """Phi_m(0) - Phi_m(pi/2) for a density supported in [pi/2 + delta, ...]."""
    if isinstance(recipe_or_density, SmearyRecipe):
        dens, m = recipe_or_density.density, recipe_or_density.m
    else:
        dens = recipe_or_density
    if m is None:
        raise DomainError("dimension m is required")
    delta = dens.support[0] - np.pi / 2
    if delta <= 0:
        raise DomainError("support must start strictly beyond pi/2", delta=delta)
    p0 = meridian_profile(dens, m, 0.0)
    ph = meridian_profile(dens, m, np.pi / 2)
    return MeridianGap(p0 - ph, p0, ph, delta, m)


@dataclass
class DirectionalRecipe:
    m: int
    epsilon: float
    delta: float
    delta0: float
    kappa: float
    p_star: float
    g_plus: Bump
    g_minus: Bump
    s0: float
    s1: float
    M: float
    mu_par: float
    mu_par_closed: float
    kernel_quartic: float
    density: RadialDensity
    angular: AngularModel
    report: object
    moments: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": "directional",
            "m": self.m, "epsilon": self.epsilon, "delta": self.delta, "delta0": self.delta0,
            "kappa": self.kappa, "p_star": self.p_star,
            "g_plus": self.g_plus.to_dict(), "g_minus": self.g_minus.to_dict(),
            "s0": self.s0, "s1": self.s1, "M": self.M,
            "mu_par": self.mu_par, "mu_par_closed": self.mu_par_closed,
            "kernel_quartic": self.kernel_quartic, "moments": self.moments,
            "density": {"radial": self.density.to_dict(), "angular": self.angular.to_dict(), "m": self.m},
            "report": self.report.to_dict(),
        }


def local_quartic_window(npts=4001, delta_max=1.0):
    """Largest delta with |A0 + (R cot R)/12 - t^2/4| <= t^2/8 for |t| <= delta."""
    t = np.linspace(-delta_max, delta_max, 2 * npts + 1)
    t = t[t != 0]
    a0, _, _ = quartic_parts(np.pi / 2 + t)
    err = np.abs(a0 + rcot(np.pi / 2 + t) / 12 - t * t / 4) - t * t / 8
    bad = np.abs(t[err > 0])
    return float(bad.min()) if len(bad) else delta_max


def _normalized(bump, m):
    _, z = _moment(bump, lambda R: np.ones_like(R), m)
    return Bump(bump.center, bump.halfwidth, bump.amplitude / z)


def build_directional(m, epsilon, kappa0=1.0, kappa_max=KAPPA_MAX):
    """Rank-one Hessian product density supported in B(N, pi/2 + epsilon)."""
    if int(m) != m or m < 2:
        raise DomainError("m must be an integer >= 2", m=m)
    if not 0 < epsilon < np.pi / 2:
        raise DomainError("epsilon must lie in (0, pi/2)", epsilon=epsilon)
    m = int(m)
    delta0 = local_quartic_window()
    delta = min(epsilon, delta0) / 2
    h = np.pi / 2
    g_plus = _normalized(Bump.on(h - delta, h - delta / 2), m)
    g_minus = _normalized(Bump.on(h + delta / 2, h + delta), m)
    s1, _ = _moment(g_plus, rcot, m)
    s0, _ = _moment(g_minus, rcot, m)
    if not (s0 < 0 < s1):
        raise NumericalError("bracket failure: need s(0) < 0 < s(1)", s0=s0, s1=s1)
    window = np.linspace(h - delta, h + delta, 2001)
    _, a2r2, a4r4 = quartic_parts(window)
    M = float(np.max(np.abs(a2r2) + np.abs(a4r4)))
    kappa = float(kappa0)
    while True:
        ang = AngularModel.theta1_exp(kappa)
        mom = ang.moments(m)
        lp = mom.lambda_perp
        if lp < -s0 / (1 - s0) and 2 * M * lp < delta ** 2 / 64:
            break
        if 2 * kappa > kappa_max:
            raise NumericalError("concentration search exceeded the guard", kappa=kappa,
                                 kappa_max=kappa_max, lambda_perp=lp)
        kappa *= 2
    mu_perp = lambda p: lp + (p * s1 + (1 - p) * s0) * (1 - lp)
    p_star = bisect(mu_perp, 0.0, 1.0).value
    dens = RadialDensity.from_bumps([
        Bump(g_plus.center, g_plus.halfwidth, p_star * g_plus.amplitude),
        Bump(g_minus.center, g_minus.halfwidth, (1 - p_star) * g_minus.amplitude),
    ])
    report = spectral_report(dens, ang, m)
    mu_par = report.hess_eigs[0] / 2
    mu_par_closed = (mom.lambda_par - lp) / (1 - lp)
    kq = report.quartic_scalar
    if not (mu_par_closed > 0 and kq > 0):
        raise NumericalError("directional recipe failed verification", mu_par=mu_par_closed,
                             kernel_quartic=kq)
    return DirectionalRecipe(
        m=m, epsilon=float(epsilon), delta=delta, delta0=delta0, kappa=kappa, p_star=p_star,
        g_plus=g_plus, g_minus=g_minus, s0=s0, s1=s1, M=M, mu_par=mu_par,
        mu_par_closed=mu_par_closed, kernel_quartic=kq, density=dens, angular=ang,
        report=report, moments=mom.to_dict(),
    )


def build_high_modulation(m, lambda_target, max_refine=40):
    """Narrow bump with Hessian eigenvalue in (0, lambda_target]."""
    if not 0 < lambda_target < 2:
        raise DomainError("lambda_target must lie in (0, 2)", lambda_target=lambda_target)
    m = int(m)
    Rm = find_R_m(m).value
    aim = lambda_target / 2
    achieved = None
    for _ in range(max_refine):
        # point-mass eigenvalue (2/m) b_m(R) equals aim at the centre
        c = bisect(lambda R: 2.0 / m * float(b_m(m, R)) - aim, 1e-6, Rm).value
        hw = min(0.01, c / 2, (Rm - c) / 2)
        dens = RadialDensity.from_bumps([Bump(c, hw)])
        rep = hessian_rot(dens, m)
        achieved = rep.hess_eigs[0]
        if 0 < achieved <= lambda_target:
            rep.classification = classify(rep)
            rep.extras["m_inf"] = 4.0 / achieved ** 2
            return dens, rep
        aim /= 2
    raise ConstructionError("modulation target unreachable", lambda_target=lambda_target,
                            achieved=achieved)
