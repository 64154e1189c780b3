"""Degree-4 Taylor data of the pulled-back squared distance.

For v = R*theta in T_N S^m the function g(u; v) = d(exp_N u, exp_N v)^2 is
expanded around u = 0.  Along a line u = t*a (``a`` a unit vector) it becomes

    f_a(t) = arccos(cos t cos R + sin t (sin R / R) alpha)^2,  alpha = <a, v>,

with Taylor coefficients C0..C4 that are polynomials in alpha whose
coefficients A3, B3, A4, A2, A0 depend on R only.

The coefficient functions are evaluated in cotangent form (c = cot R), which
is free of the cancellation between powers of 1/sin R present in the
expanded trigonometric form.  Near R = pi/2 the even-order combinations
A0, A2 R^2 and A4 R^4 switch to their Taylor series in t = R - pi/2.
"""
from dataclasses import astuple, dataclass

import numpy as np

from .errors import DomainError
from .geometry import exp_north, distance

R_FLOOR = 1e-3
R_CEILING = 1e-3
W_SWITCH = 0.05

# Taylor coefficients in t of A0, A2 R^2, A4 R^4 at R = pi/2 + t, degrees 0..13.
# Exact values are rational multiples of 1 (even degree) or pi (odd degree);
# the first few are 0, pi/24, 1/3, 5 pi/36 for A0.
_SERIES_A0 = np.array([
    0.0, 0.13089969389957473, 0.3333333333333333, 0.4363323129985824,
    0.4444444444444444, 0.41015237421866746, 0.35555555555555557,
    0.2950437545038033, 0.23703703703703705, 0.1857067262307194,
    0.14259847148736038, 0.10770839010623977, 0.08024370691037358,
    0.059088589903679316,
])
_SERIES_A2R2 = np.array([
    -0.3333333333333333, -1.3089969389957472, -2.3333333333333335,
    -2.792526803190927, -2.7777777777777777, -2.530727415391778,
    -2.1777777777777776, -1.7985202387217758, -1.4402116402116403,
    -1.1256911948048083, -0.862880658436214, -0.6508911199087347,
    -0.4844166533055422, -0.3564123732638176,
])
_SERIES_A4R4 = np.array([
    0.3333333333333333, 1.1780972450961724, 2.0, 2.356194490192345,
    2.3333333333333335, 2.1205750411731104, 1.8222222222222222,
    1.5034764842179724, 1.2031746031746031, 0.9399844685740889,
    0.7202821869488536, 0.5431827298024949, 0.4041729463951686,
    0.29732378336013826,
])

METHODS = ("auto", "closed", "series", "expanded")


@dataclass(frozen=True)
class RadialCoeffs:
    R: float
    a3: float
    b3: float
    a4: float
    a2: float
    a0: float

    @property
    def a2r2(self):
        return self.a2 * self.R ** 2

    @property
    def a4r4(self):
        return self.a4 * self.R ** 4

    def to_dict(self):
        return {"R": self.R, "A3": self.a3, "B3": self.b3, "A4": self.a4, "A2": self.a2, "A0": self.a0}


@dataclass(frozen=True)
class TaylorCoeffs:
    c0: float
    c1: float
    c2: float
    c3: float
    c4: float

    def as_tuple(self):
        return astuple(self)

    def to_dict(self):
        return {f"C{k}": v for k, v in enumerate(self.as_tuple())}

    def __call__(self, t):
        return np.polyval(self.as_tuple()[::-1], t)


def check_radius(R, r_floor=R_FLOOR, r_ceiling=R_CEILING):
    R = np.asarray(R, dtype=float)
    lo, hi = r_floor, np.pi - r_ceiling
    if np.any(~np.isfinite(R)) or np.any(R < lo) or np.any(R > hi):
        bad = R[(R < lo) | (R > hi) | ~np.isfinite(R)] if R.ndim else R
        worst = float(np.ravel(bad)[0])
        endpoint = "0" if worst < np.pi / 2 else "pi"
        raise DomainError(
            f"radius outside the guarded interval [{lo}, {hi}] near the singular endpoint {endpoint}",
            R=worst, endpoint=endpoint, r_floor=r_floor, r_ceiling=r_ceiling,
        )
    return R


def _odd_closed(R):
    c = 1.0 / np.tan(R)
    k = 3 * R * c ** 2 + R - 3 * c
    return k / (3 * R), -k / (3 * R ** 3)


def quartic_closed(R):
    """(A0, A2 R^2, A4 R^4) in cotangent form."""
    c = 1.0 / np.tan(R)
    a0 = -c * (3 * R * c ** 2 + R - 3 * c) / 12
    a2r2 = (9 * R * c ** 3 + 5 * R * c - 9 * c ** 2 - 2) / 6
    a4r4 = -(15 * R * c ** 3 + 9 * R * c - 15 * c ** 2 - 4) / 12
    return a0, a2r2, a4r4


def quartic_series(R):
    """(A0, A2 R^2, A4 R^4) from the truncated series around pi/2."""
    t = np.asarray(R, dtype=float) - np.pi / 2
    return (np.polyval(_SERIES_A0[::-1], t),
            np.polyval(_SERIES_A2R2[::-1], t),
            np.polyval(_SERIES_A4R4[::-1], t))


def coeffs_expanded(R):
    """All five coefficients in the expanded sin/cos/tan form.

    Kept as an independent route for cross-checks; it loses accuracy for
    small R where large powers of 1/sin R cancel.
    """
    R = np.asarray(R, dtype=float)
    s, c, t = np.sin(R), np.cos(R), np.tan(R)
    a3 = -2 / 3 + 1 / s ** 2 - 1 / (R * t ** 5) - 2 * c / (R * s ** 3) + c / (R * s ** 5)
    b3 = 2 / (3 * R ** 2) - 1 / (R ** 2 * s ** 2) + 1 / (R ** 3 * t)
    a4 = (6 * R / t - 15 * R * c / s ** 3 - 11 + 15 / s ** 2) / (12 * R ** 4)
    a2 = (-4 * R / t ** 5 + R * c / s ** 3 + 4 * R * c / s ** 5 - 7 / t ** 6
          + 12 / s ** 2 - 21 / s ** 4 + 7 / s ** 6) / (6 * R ** 2)
    a0 = (-R / (6 * t ** 7) + R * c ** 5 / (4 * s ** 7) - R * c / (12 * s ** 7) - 1 / (4 * t ** 8)
          - 3 / (4 * s ** 4) + 5 / (4 * s ** 6) + 3 * c ** 6 / (4 * s ** 8) - 1 / (2 * s ** 8))
    return a3, b3, a4, a2, a0


def quartic_parts(R, method="auto", r_floor=R_FLOOR, r_ceiling=R_CEILING):
    """Vectorized (A0, A2 R^2, A4 R^4)."""
    R = check_radius(R, r_floor, r_ceiling)
    if method == "closed":
        return quartic_closed(R)
    if method == "series":
        return quartic_series(R)
    if method == "expanded":
        _, _, a4, a2, a0 = coeffs_expanded(R)
        return a0, a2 * R ** 2, a4 * R ** 4
    if method != "auto":
        raise DomainError(f"unknown method {method!r}", choices=METHODS)
    inside = np.abs(R - np.pi / 2) < W_SWITCH
    closed = quartic_closed(np.where(inside, 1.0, R))
    series = quartic_series(np.where(inside, R, np.pi / 2))
    return tuple(np.where(inside, sv, cv) for sv, cv in zip(series, closed))


def radial_coeffs(R, method="auto", r_floor=R_FLOOR, r_ceiling=R_CEILING):
    R = float(check_radius(R, r_floor, r_ceiling))
    if method == "expanded":
        a3, b3, a4, a2, a0 = (float(x) for x in coeffs_expanded(R))
        return RadialCoeffs(R, a3, b3, a4, a2, a0)
    a3, b3 = _odd_closed(R)
    a0, a2r2, a4r4 = (float(x) for x in quartic_parts(R, method, r_floor, r_ceiling))
    return RadialCoeffs(R, float(a3), float(b3), a4r4 / R ** 4, a2r2 / R ** 2, a0)


def taylor_coeffs(R, alpha, method="auto"):
    """C0..C4 of f_a at t = 0, where alpha = <a, v> satisfies |alpha| <= R."""
    rc = radial_coeffs(R, method)
    R = rc.R
    if abs(alpha) > R * (1 + 1e-12):
        raise DomainError("|alpha| = |<a, v>| cannot exceed R = |v|", R=R, alpha=alpha)
    cotR = 1.0 / np.tan(R)
    c2 = R * cotR + alpha ** 2 * (1 / R ** 2 - cotR / R)
    c3 = rc.a3 * alpha + rc.b3 * alpha ** 3
    c4 = rc.a4 * alpha ** 4 + rc.a2 * alpha ** 2 + rc.a0
    return TaylorCoeffs(R ** 2, -2.0 * alpha, float(c2), float(c3), float(c4))


def taylor_coeffs_cosine(R, cosine, method="auto"):
    """C0..C4 with the direction given by cos of the angle between a and v."""
    if abs(cosine) > 1:
        raise DomainError("cosine must lie in [-1, 1]", cosine=cosine)
    return taylor_coeffs(R, R * cosine, method)


def f_line(t, R, alpha):
    """Exact squared distance along the line t*a, alpha = <a, v>."""
    t = np.asarray(t, dtype=float)
    arg = np.cos(t) * np.cos(R) + np.sin(t) * (np.sin(R) / R) * alpha
    return np.arccos(np.clip(arg, -1.0, 1.0)) ** 2


def g_exact(u, v):
    return float(distance(exp_north(u), exp_north(v)) ** 2)


def g_taylor(u, v):
    """Degree-4 Taylor polynomial of g(., v) evaluated at u."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    R = float(np.linalg.norm(v))
    rc = radial_coeffs(R)
    theta = v / R
    nu2 = float(u @ u)
    p = float(u @ theta)
    cotR = 1.0 / np.tan(R)
    quad = R * cotR * nu2 + (1 - R * cotR) * p ** 2
    cubic = rc.a3 * R * p * nu2 + rc.b3 * (R * p) ** 3
    quart = rc.a0 * nu2 ** 2 + rc.a2r2 * nu2 * p ** 2 + rc.a4r4 * p ** 4
    return R ** 2 - 2 * R * p + quad + cubic + quart


def hessian_g(R, theta, w):
    """D^2 g(0; R theta)[w, w]."""
    R = float(check_radius(R))
    w = np.asarray(w, dtype=float)
    rc = R / np.tan(R)
    return float(2 * rc * (w @ w) + 2 * (1 - rc) * (w @ np.asarray(theta)) ** 2)


def cubic_g_diag(R, theta, w):
    """D^3 g(0; R theta)[w, w, w]."""
    rc = radial_coeffs(R)
    w = np.asarray(w, dtype=float)
    p = rc.R * float(w @ np.asarray(theta))
    return 6 * (rc.a3 * p * float(w @ w) + rc.b3 * p ** 3)


def quartic_g_diag(R, theta, w, method="auto"):
    """D^4 g(0; R theta)[w, w, w, w]."""
    a0, a2r2, a4r4 = (float(x) for x in quartic_parts(R, method))
    w = np.asarray(w, dtype=float)
    n2 = float(w @ w)
    p2 = float(w @ np.asarray(theta)) ** 2
    return 24 * (a0 * n2 ** 2 + a2r2 * n2 * p2 + a4r4 * p2 ** 2)


def polarize4(diag, w1, w2, w3, w4):
    """Symmetric 4-linear form recovered from its diagonal ``diag``."""
    ws = [np.asarray(w, dtype=float) for w in (w1, w2, w3, w4)]
    total = 0.0
    for signs in np.ndindex(2, 2, 2, 2):
        eps = [1 - 2 * s for s in signs]
        total += np.prod(eps) * diag(sum(e * w for e, w in zip(eps, ws)))
    return total / (24 * 16)
