"""Hessian and quartic data of the lifted Fréchet function at N.

For a product measure (radial law nu_m times an even angular law zonal about
e1) the Hessian of F~ = F o exp_N at 0 is diagonal with entries
2(s + (1-s) lambda) where s = E[R cot R] and lambda runs over the angular
second moments. The quartic term reduces to radial integrals of A0, A2 R^2,
A4 R^4 weighted by the angular fourth moments.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .densities import AngularModel
from .errors import ClassificationError, DomainError, NumericalError
from .kernels import h_m
from .quadrature import DEFAULT_TOL, quad
from .taylor import quartic_parts

CLASS_TOL = 1e-8
CLASSES = ("PositiveDefinite", "Rank1PSD", "ZeroHessianQuarticPositive", "ZeroHessianQuarticNegative")
TRACE_TOL = 1e-9


def quad_radial(f, support, tol=DEFAULT_TOL, breakpoints=()):
    a, b = support
    return quad(f, a, b, tol=tol, breakpoints=breakpoints)


def sphere_volume(k):
    """Surface measure of the unit sphere S^k in R^{k+1}."""
    return 2.0 * math.exp((k + 1) / 2 * math.log(math.pi) - gammaln((k + 1) / 2))


def spherical_moment(m, order, weighted=False):
    """Normalized contraction constant of <w, Theta>^order over S^{m-1}.

    Order 2 gives 1/m, order 4 gives 3/(m(m+2)); ``weighted`` multiplies by
    vol(S^{m-1}) to match the unnormalized surface integral.
    """
    if m < 2:
        raise DomainError("need m >= 2", m=m)
    if order == 2:
        c = 1.0 / m
    elif order == 4:
        c = 3.0 / (m * (m + 2))
    else:
        raise DomainError("unsupported moment order", order=order, supported=[2, 4])
    return c * sphere_volume(m - 1) if weighted else c


def _fh_constant(m):
    return math.exp(gammaln(m / 2) - 0.5 * math.log(math.pi) - gammaln((m - 1) / 2))


def funk_hecke(f, m, tol=1e-13):
    """Integral over S^{m-1} of f(<Theta, y>) for a unit y.

    The 1-D weight (1 - t^2)^((m-3)/2) is integrated after t = cos(th),
    which removes the endpoint singularity at m = 2.
    """
    if m < 2:
        raise DomainError("need m >= 2", m=m)
    breaks = [np.pi / 2] + [np.pi / 2 + s * c / math.sqrt(m) for c in (1, 3) for s in (-1, 1)
                            if c / math.sqrt(m) < np.pi / 2]
    val = quad(lambda th: f(np.cos(th)) * np.sin(th) ** (m - 2), 0.0, np.pi, tol=tol, breakpoints=breaks)
    return sphere_volume(m - 1) * _fh_constant(m) * val


def funk_hecke_average(f, m, tol=1e-13):
    """Normalized version: the mean of f(<Theta, y>) under the uniform law."""
    return funk_hecke(f, m, tol) / sphere_volume(m - 1)


@dataclass
class SpectralReport:
    m: int
    hess_eigs: list
    trace: float
    quartic_scalar: float = None
    classification: str = None
    s: float = None
    extras: dict = field(default_factory=dict)

    @property
    def lambda_max(self):
        return max(self.hess_eigs)

    @property
    def lambda_min(self):
        return min(self.hess_eigs)

    def to_dict(self):
        return {
            "m": self.m,
            "hess_eigs": [float(x) for x in self.hess_eigs],
            "trace": float(self.trace),
            "quartic_scalar": None if self.quartic_scalar is None else float(self.quartic_scalar),
            "classification": self.classification,
            "s": None if self.s is None else float(self.s),
            **self.extras,
        }


def rcot(R):
    """R cot R with its value 1 at R = 0."""
    R = np.asarray(R, dtype=float)
    safe = np.where(R == 0, 1.0, R)
    return np.where(R == 0, 1.0, safe / np.tan(safe))


def s_moment(density, m):
    """s = E_nu_m[R cot R]."""
    return density.expect(rcot, m)


def trace_b(density, m):
    """2 E[b_m(R)]: the Hessian trace, independent of the angular law."""
    return 2.0 * density.expect(lambda R: 1.0 + (m - 1) * rcot(R), m)


def hessian_rot(density, m):
    """Rotationally symmetric Hessian: lambda I_m with lambda = 2 E[b_m] / m."""
    lam = trace_b(density, m) / m
    s = s_moment(density, m)
    return SpectralReport(m, [lam] * m, m * lam, s=s, extras={"lambda": lam})


def quartic_rot(density, m):
    """Coefficient of |w|^4 in D^4 F~(0)[w, w, w, w] for uniform angular law."""
    return 24.0 * density.expect(lambda R: h_m(m, R), m)


def hessian_product(radial, angular, m):
    mom = angular.moments(m)
    s = s_moment(radial, m)
    e_par = 2.0 * (s + (1.0 - s) * mom.lambda_par)
    e_perp = 2.0 * (s + (1.0 - s) * mom.lambda_perp)
    eigs = [e_par] + [e_perp] * (m - 1)
    tr = trace_b(radial, m)
    if abs(sum(eigs) - tr) > TRACE_TOL * max(1.0, abs(tr)):
        raise NumericalError("trace identity violated", eig_sum=sum(eigs), trace=tr)
    return SpectralReport(m, eigs, tr, s=s, extras={"moments": mom.to_dict()})


def quartic_on_kernel(radial, angular, m):
    """24 E[A0 + lambda_perp A2 R^2 + beta_perp A4 R^4]: D^4 F~ on e1-perp per |w|^4."""
    mom = angular.moments(m)

    def integrand(R):
        a0, a2r2, a4r4 = quartic_parts(R)
        return a0 + mom.lambda_perp * a2r2 + mom.beta_perp * a4r4

    return 24.0 * radial.expect(integrand, m)


def _inner_profile(R, r, m, nodes=24, panels=48):
    """Average over Theta of d^2 between exp_N(r e) and exp_N(R Theta)."""
    edges = np.linspace(0.0, np.pi, panels + 1)
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * np.diff(edges)
    th = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel() * np.sin(th) ** (m - 2)
    wt = wt / wt.sum()
    R = np.asarray(R, dtype=float)
    arg = np.cos(r) * np.cos(R)[..., None] + np.sin(r) * np.sin(R)[..., None] * np.cos(th)
    return np.arccos(np.clip(arg, -1.0, 1.0)) ** 2 @ wt


def meridian_profile(radial, m, r):
    """Phi_m(r) = F(exp_N(r e)) for a rotationally symmetric measure."""
    if not 0 <= r < np.pi:
        raise DomainError("meridian radius must lie in [0, pi)", r=r)
    if r == 0:
        return radial.expect(lambda R: R * R, m)
    return radial.expect(lambda R: _inner_profile(R, r, m), m)


def lambda_max_check(report):
    return max(report.hess_eigs) < 2.0 - 1e-12


def classify(report, tol=CLASS_TOL):
    eigs = np.asarray(report.hess_eigs, dtype=float)
    if np.any(eigs < -tol):
        raise ClassificationError("indefinite Hessian: not a local minimum candidate",
                                  lambda_min=float(eigs.min()))
    if eigs.min() > tol:
        return "PositiveDefinite"
    positive = int(np.sum(eigs > tol))
    if positive == 1 and len(eigs) > 1:
        return "Rank1PSD"
    if positive == 0:
        q = report.quartic_scalar
        if q is None:
            raise ClassificationError("zero Hessian but no quartic available")
        if q > tol:
            return "ZeroHessianQuarticPositive"
        if q < -tol:
            return "ZeroHessianQuarticNegative"
        raise ClassificationError("zero Hessian and vanishing quartic: order undetermined", quartic=q)
    raise ClassificationError("singular Hessian of rank outside the supported classes", rank=positive)


def spectral_report(radial, angular=None, m=None, tol=CLASS_TOL):
    """Full report: eigenvalues, trace, quartic scalar and classification."""
    if m is None:
        raise DomainError("dimension m is required")
    angular = angular or AngularModel.uniform()
    rep = hessian_product(radial, angular, m)
    try:
        if angular.is_uniform:
            rep.quartic_scalar = quartic_rot(radial, m)
        else:
            rep.quartic_scalar = quartic_on_kernel(radial, angular, m)
            rep.extras["quartic_restricted_to"] = "e1-perp"
    except DomainError as exc:
        # supports reaching R = 0 have no quartic data; only fatal if the Hessian is singular
        rep.extras["quartic_unavailable"] = exc.message
    try:
        rep.classification = classify(rep, tol)
    except ClassificationError as exc:
        rep.extras["classification_error"] = exc.message
    return rep
