"""Radial weights and even angular models for measures on S^m.

A measure is described in geodesic polar coordinates (R, theta) around N by
an unnormalized radial weight w(R) and an angular density on S^{m-1}. For
dimension m the radial law is

    nu_m(dR) = w(R) (sin R)^(m-1) dR / Z_m,

and every expectation in this package is taken against nu_m.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .quadrature import quad
from .taylor import R_CEILING

KAPPA_MAX = 1e6
EXPECT_RTOL = 1e-12


def bump_profile(R, lo, hi):
    """(x(1-x))^3 on [lo, hi] with x the affine coordinate; zero outside."""
    R = np.asarray(R, dtype=float)
    x = (R - lo) / (hi - lo)
    inside = (x > 0) & (x < 1)
    xc = np.where(inside, x, 0.0)
    return np.where(inside, (xc * (1 - xc)) ** 3, 0.0)


@dataclass(frozen=True)
class Bump:
    center: float
    halfwidth: float
    amplitude: float = 1.0

    @property
    def lo(self):
        return self.center - self.halfwidth

    @property
    def hi(self):
        return self.center + self.halfwidth

    @classmethod
    def on(cls, lo, hi, amplitude=1.0):
        return cls(0.5 * (lo + hi), 0.5 * (hi - lo), amplitude)

    def __call__(self, R):
        return self.amplitude * bump_profile(R, self.lo, self.hi)

    def integrate(self, g, tol=1e-300, rtol=1e-13):
        """Integral of bump(R) g(R) dR, taken in the affine coordinate of the bump.

        Working in x in [0, 1] keeps the polynomial profile exact however
        narrow the bump is.
        """
        width = 2.0 * self.halfwidth
        lo = self.lo
        f = lambda x: (x * (1 - x)) ** 3 * g(lo + width * x)
        return self.amplitude * width * quad(f, 0.0, 1.0, tol=tol / max(self.amplitude * width, 1e-300),
                                             rtol=rtol, breakpoints=[0.5])

    def to_dict(self):
        return {"center": self.center, "halfwidth": self.halfwidth, "amplitude": self.amplitude}


class RadialDensity:
    """Unnormalized radial weight w(R) on a support interval [a, b]."""

    KINDS = ("uniform", "vmf", "watson", "zonal", "bumps", "grid")

    def __init__(self, kind, support, **params):
        if kind not in self.KINDS:
            raise DomainError(f"unknown radial kind {kind!r}", choices=list(self.KINDS))
        a, b = (float(x) for x in support)
        if not (0.0 <= a < b <= np.pi - R_CEILING):
            raise DomainError(
                "radial support must satisfy 0 <= a < b <= pi - r_ceiling",
                support=[a, b], r_ceiling=R_CEILING,
            )
        self.kind = kind
        self.support = (a, b)
        self.params = params
        self._z = {}
        if kind == "bumps":
            self._bumps = [b_ if isinstance(b_, Bump) else Bump(**b_) for b_ in params["bumps"]]
            if any(bp.halfwidth <= 0 or bp.amplitude < 0 for bp in self._bumps):
                raise DomainError("bumps need positive halfwidth and nonnegative amplitude")
        if kind == "grid":
            self._gr = np.asarray(params["R"], dtype=float)
            self._gw = np.asarray(params["w"], dtype=float)
            if np.any(np.diff(self._gr) <= 0) or np.any(self._gw < 0):
                raise DomainError("grid weight needs increasing nodes and nonnegative values")
        if kind == "zonal":
            probe = self.weight(np.linspace(a, b, 2001))
            if np.any(probe < 0):
                raise DomainError("zonal weight polynomial is negative on the support")

    # constructors
    @classmethod
    def uniform(cls, a, b):
        return cls("uniform", (a, b))

    @classmethod
    def cap(cls, R_eps):
        return cls("uniform", (0.0, R_eps))

    @classmethod
    def vmf(cls, kappa, b=np.pi - R_CEILING):
        return cls("vmf", (0.0, b), kappa=float(kappa))

    @classmethod
    def watson(cls, kappa, b=np.pi - R_CEILING):
        return cls("watson", (0.0, b), kappa=float(kappa))

    @classmethod
    def zonal(cls, coeffs, a=0.0, b=np.pi - R_CEILING):
        return cls("zonal", (a, b), coeffs=[float(c) for c in coeffs])

    @classmethod
    def from_bumps(cls, bumps):
        bumps = [b if isinstance(b, Bump) else Bump(**b) for b in bumps]
        if not bumps:
            raise DomainError("bump mixture needs at least one bump")
        return cls("bumps", (min(b.lo for b in bumps), max(b.hi for b in bumps)), bumps=bumps)

    @classmethod
    def grid(cls, R, w):
        R = [float(x) for x in R]
        return cls("grid", (R[0], R[-1]), R=R, w=[float(x) for x in w])

    # evaluation
    @property
    def bumps(self):
        return list(self._bumps) if self.kind == "bumps" else []

    def weight(self, R):
        R = np.asarray(R, dtype=float)
        a, b = self.support
        if self.kind == "uniform":
            w = np.ones_like(R)
        elif self.kind == "vmf":
            w = np.exp(self.params["kappa"] * (np.cos(R) - 1.0))
        elif self.kind == "watson":
            w = np.exp(self.params["kappa"] * (np.cos(R) ** 2 - 1.0))
        elif self.kind == "zonal":
            w = np.polynomial.polynomial.polyval(np.cos(R), self.params["coeffs"])
        elif self.kind == "bumps":
            w = sum(bp(R) for bp in self._bumps)
        else:
            w = np.interp(R, self._gr, self._gw)
        return np.where((R >= a) & (R <= b), w, 0.0)

    __call__ = weight

    def breakpoints(self):
        a, b = self.support
        pts = {a, b}
        if self.kind == "bumps":
            for bp in self._bumps:
                pts.update((bp.lo, bp.center, bp.hi))
        elif self.kind == "grid":
            pts.update(self._gr.tolist())
        if a < np.pi / 2 < b:
            pts.add(np.pi / 2)
        return sorted(p for p in pts if a <= p <= b)

    def _sin_shifted(self, m):
        """(sin R)^(m-1) divided by its value at the support point nearest pi/2."""
        a, b = self.support
        ref = math.log(np.sin(min(max(np.pi / 2, a), b)))

        def vs(R):
            s = np.sin(R)
            logs = (m - 1) * (np.log(np.where(s > 0, s, 1.0)) - ref)
            return np.where(s > 0, np.exp(logs), 0.0 if m > 1 else 1.0)

        return vs

    def _shifted(self, m):
        a, b = self.support
        vs = self._sin_shifted(m)
        return (lambda R: self.weight(R) * vs(R)), (m - 1) * math.log(np.sin(min(max(np.pi / 2, a), b)))

    def _integrate(self, g, m, tol=1e-300, rtol=0.0):
        """Integral of g(R) w(R) (sin R)^(m-1) dR, up to the fixed log shift."""
        psi, _ = self._shifted(m)
        if self.kind == "bumps":
            sin_part = self._sin_shifted(m)
            n = len(self._bumps)
            return sum(bp.integrate(lambda R: g(R) * sin_part(R), tol=tol / n, rtol=rtol)
                       for bp in self._bumps)
        a, b = self.support
        return quad(lambda R: g(R) * psi(R), a, b, tol=tol, rtol=rtol, breakpoints=self.breakpoints())

    def _mass_shifted(self, m):
        if m not in self._z:
            z = self._integrate(np.ones_like, m, rtol=1e-13)
            if not z > 0:
                raise DomainError("radial weight has zero mass", m=m)
            self._z[m] = z
        return self._z[m]

    def normalization(self, m):
        """Z_m = integral of w(R) (sin R)^(m-1) dR."""
        _, log_shift = self._shifted(m)
        return self._mass_shifted(m) * math.exp(log_shift)

    def expect(self, f, m, rtol=EXPECT_RTOL):
        """E_nu_m[f(R)] for a vectorized f."""
        z = self._mass_shifted(m)
        return self._integrate(f, m, tol=rtol * z) / z

    def pdf(self, R, m):
        psi, _ = self._shifted(m)
        return psi(R) / self._mass_shifted(m)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "bumps":
            d["bumps"] = [bp.to_dict() for bp in self._bumps]
        elif self.kind == "grid":
            d["R"] = self._gr.tolist()
            d["w"] = self._gw.tolist()
        else:
            d["support"] = list(self.support)
            d.update(self.params)
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind")
        if kind == "bumps":
            return cls.from_bumps(d["bumps"])
        if kind == "grid":
            return cls.grid(d["R"], d["w"])
        if "support" not in d:
            raise DomainError("radial config needs a support interval", kind=kind)
        params = {k: v for k, v in d.items() if k not in ("kind", "support")}
        return cls(kind, d["support"], **params)

    def __repr__(self):
        return f"RadialDensity({self.kind!r}, support={self.support})"


@dataclass(frozen=True)
class AngularMoments:
    """Moment summaries of an even angular law on S^{m-1}, zonal about e1."""

    m: int
    lambda_par: float
    lambda_perp: float
    beta_perp: float
    odd_moments: tuple = field(default=(0.0, 0.0, 0.0))

    @property
    def trace(self):
        return self.lambda_par + (self.m - 1) * self.lambda_perp

    def to_dict(self):
        return {"m": self.m, "lambda_par": self.lambda_par, "lambda_perp": self.lambda_perp,
                "beta_perp": self.beta_perp, "odd_moments": list(self.odd_moments)}


class AngularModel:
    """Even angular density on S^{m-1} depending on theta_1 = <Theta, e1> only."""

    KINDS = ("uniform", "theta1_exp", "custom_even")

    def __init__(self, kind="uniform", **params):
        if kind not in self.KINDS:
            raise DomainError(f"unknown angular kind {kind!r}", choices=list(self.KINDS))
        if kind == "theta1_exp":
            k = float(params["kappa"])
            if not 0 <= k <= KAPPA_MAX:
                raise DomainError("concentration must lie in [0, KAPPA_MAX]", kappa=k, kappa_max=KAPPA_MAX)
            params = {"kappa": k}
        if kind == "custom_even":
            t = np.asarray(params["t"], dtype=float)
            q = np.asarray(params["q"], dtype=float)
            if t[0] != 0 or t[-1] != 1 or np.any(np.diff(t) <= 0) or np.any(q < 0):
                raise DomainError("custom angular grid must cover [0, 1] in |theta_1| with q >= 0")
        self.kind = kind
        self.params = params
        self._cache = {}

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def theta1_exp(cls, kappa):
        return cls("theta1_exp", kappa=kappa)

    @property
    def is_uniform(self):
        return self.kind == "uniform" or (self.kind == "theta1_exp" and self.params["kappa"] == 0)

    def density_t(self, t):
        """Unnormalized density as a function of theta_1 (bounded by 1)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "uniform":
            return np.ones_like(t)
        if self.kind == "theta1_exp":
            return np.exp(self.params["kappa"] * (t * t - 1.0))
        return np.interp(np.abs(t), self.params["t"], self.params["q"])

    def density_theta(self, th):
        """density_t(cos th), with the exponent written as -kappa sin^2 th."""
        th = np.asarray(th, dtype=float)
        if self.kind == "theta1_exp":
            return np.exp(-self.params["kappa"] * np.sin(th) ** 2)
        return self.density_t(np.cos(th))

    def _theta_breaks(self, m):
        pts = {np.pi / 2}
        if self.kind == "theta1_exp" and self.params["kappa"] > 0:
            k = self.params["kappa"]
            for c in (1.0, 3.0, 10.0, 30.0):
                th = c / math.sqrt(k)
                if th < np.pi / 2:
                    pts.update((th, np.pi - th))
        for c in (1.0, 3.0, 10.0):
            th = c / math.sqrt(m)
            if th < np.pi / 2:
                pts.update((np.pi / 2 - th, np.pi / 2 + th))
        return sorted(pts)

    def expect_t(self, g, m, rtol=EXPECT_RTOL):
        """E[g(theta_1)] under the angular law on S^{m-1}, via theta_1 = cos(th)."""
        breaks = self._theta_breaks(m)

        def weight(th):
            return self.density_theta(th) * np.sin(th) ** (m - 2)

        key = ("z", m)
        if key not in self._cache:
            self._cache[key] = quad(weight, 0.0, np.pi, tol=1e-300, rtol=1e-13, breakpoints=breaks)
        z = self._cache[key]
        val = quad(lambda th: g(np.cos(th)) * weight(th), 0.0, np.pi, tol=rtol * z, breakpoints=breaks)
        return val / z

    def moments(self, m):
        if m < 2:
            raise DomainError("angular sphere needs m >= 2", m=m)
        if ("mom", m) in self._cache:
            return self._cache[("mom", m)]
        if self.is_uniform:
            mom = AngularMoments(m, 1.0 / m, 1.0 / m, 3.0 / (m * (m + 2)))
        else:
            lam_par = self.expect_t(lambda t: t * t, m)
            one_minus = self.expect_t(lambda t: 1 - t * t, m)
            lam_perp = one_minus / (m - 1)
            beta = self.expect_t(lambda t: (1 - t * t) ** 2, m) * 3.0 / ((m - 1) * (m + 1))
            odd = (self.expect_t(lambda t: t, m),
                   self.expect_t(lambda t: t ** 3, m),
                   self.expect_t(lambda t: t * (1 - t * t), m))
            mom = AngularMoments(m, lam_par, lam_perp, beta, odd)
        self._cache[("mom", m)] = mom
        return mom

    def to_dict(self):
        d = {"kind": self.kind}
        for k, v in self.params.items():
            d[k] = list(map(float, v)) if isinstance(v, (list, tuple, np.ndarray)) else v
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d or {"kind": "uniform"})
        kind = d.pop("kind", "uniform")
        return cls(kind, **d)

    def __repr__(self):
        return f"AngularModel({self.kind!r}, {self.params})"


def angular_moments(kappa, m):
    """Moments of the density proportional to exp(kappa theta_1^2) on S^{m-1}."""
    return AngularModel.theta1_exp(kappa).moments(m)


def load_density(config):
    """(RadialDensity, AngularModel, m or None) from a config or recipe dict."""
    if "density" in config:
        inner = dict(config["density"])
        inner.setdefault("m", config.get("m"))
        config = inner
    if "radial" not in config:
        raise DomainError("density config needs a 'radial' entry")
    return (RadialDensity.from_dict(config["radial"]),
            AngularModel.from_dict(config.get("angular")),
            config.get("m"))
