"""Hessian kernel b_m, quartic kernel h_m and their critical radii.

b_m(R) = 1 + (m-1) R cot R integrates against a rotationally symmetric radial
law to give the Hessian of the Fréchet function at N; its unique zero R_m in
(pi/2, pi) is the largest support radius that forces a positive Hessian.
h_m combines A0, A2 R^2, A4 R^4 with the spherical moment constants 1/m and
3/(m(m+2)); its first zero S_m past pi/2 marks where the quartic term can
become positive.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, RootError
from .taylor import R_CEILING, quartic_parts

R_BRACKET_TOP = np.pi - 1e-6


@dataclass(frozen=True)
class RootResult:
    value: float
    bracket: tuple
    residual: float
    iterations: int

    def to_dict(self):
        return asdict(self)


def _check_m(m, low=2):
    if int(m) != m or m < low:
        raise DomainError(f"dimension must be an integer >= {low}", m=m)
    return int(m)


def b_m(m, R):
    _check_m(m)
    R = np.asarray(R, dtype=float)
    if np.any((R <= 0) | (R >= np.pi)):
        raise DomainError("b_m is defined on (0, pi)", m=m)
    return 1.0 + (m - 1) * R / np.tan(R)


def h_m(m, R, method="auto"):
    _check_m(m)
    a0, a2r2, a4r4 = quartic_parts(R, method)
    return a0 + a2r2 / m + 3.0 * a4r4 / (m * (m + 2))


def h_2_closed(R):
    R = np.asarray(R, dtype=float)
    s, c = np.sin(R), np.cos(R)
    return (R * c * (3 + 2 * s ** 2) - s * (3 + s ** 2)) / (96 * s ** 3)


def h_3_closed(R):
    R = np.asarray(R, dtype=float)
    return (2.0 / 45.0) * (R / np.tan(R) - 1.0)


def h_m_cot(m, R):
    """h_m as a single rational expression in R and cot R."""
    R = np.asarray(R, dtype=float)
    c = 1.0 / np.tan(R)
    poly = 3 * R * c ** 3 * m - 9 * R * c ** 3 + R * c * m - 7 * R * c - 3 * c ** 2 * m + 9 * c ** 2 + 4
    return -(m - 1) * poly / (12 * m * (m + 2))


def h_m_endpoint_value(m):
    return (1 - m) / (3 * m * (m + 2))


def h_m_endpoint_slope(m):
    return np.pi * (m - 1) * (m - 7) / (24 * m * (m + 2))


def bisect(f, lo, hi, xtol=1e-12, maxiter=200):
    """Bisection on a certified sign-change bracket.

    Iterates until the bracket is below ``xtol`` and then keeps halving until
    the midpoint no longer moves in floating point, so the residual is as
    small as the arithmetic allows.
    """
    flo, fhi = f(lo), f(hi)
    if not np.isfinite(flo) or not np.isfinite(fhi) or np.sign(flo) * np.sign(fhi) > 0:
        raise RootError("no sign change across bracket", lo=lo, hi=hi, f_lo=float(flo), f_hi=float(fhi))
    a, b = lo, hi
    fa = flo
    it = 0
    while it < maxiter:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = f(mid)
        it += 1
        if fm == 0:
            a = b = mid
            break
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    else:
        if b - a > xtol:
            raise RootError("bisection did not converge", lo=a, hi=b, iterations=it)
    x = a if abs(f(a)) <= abs(f(b)) else b
    return RootResult(float(x), (float(lo), float(hi)), float(abs(f(x))), it)


def asymptotic_R_m(m):
    k = m - 1
    return np.pi / 2 + 2 / (np.pi * k) - 8 / (np.pi ** 3 * k ** 2)


def asymptotic_S_m(m):
    return np.pi / 2 + 8 / (np.pi * m)


def find_R_m(m):
    m = _check_m(m)
    f = lambda R: float(b_m(m, R))
    lo, hi = np.pi / 2, R_BRACKET_TOP
    # warm start: a narrow bracket around the asymptotic guess when it is certified
    guess = asymptotic_R_m(m)
    width = 2.0 / (m - 1) ** 2
    while width < np.pi / 2:
        a, b = max(lo, guess - width), min(hi, guess + width)
        if f(a) > 0 > f(b):
            lo, hi = a, b
            break
        width *= 4
    return bisect(f, lo, hi)


def find_S_m(m):
    m = _check_m(m)
    if m < 4:
        raise DomainError("h_m strictly negative on (0, pi) for m = 2, 3: no zero", m=m)
    f = lambda R: float(h_m(m, R))
    step = np.pi / (64 * m)
    top = np.pi - R_CEILING
    a = np.pi / 2
    fa = f(a)
    while a < top:
        b = min(a + step, top)
        if f(b) > 0:
            return bisect(f, a, b)
        a = b
    raise RootError("no sign change of h_m before the guarded endpoint", m=m, f_start=fa)


def h_m_at_R_m_closed(m):
    m = _check_m(m, 4)
    r2 = find_R_m(m).value ** 2
    return -(r2 * (m - 1) ** 2 * (m + 1) - m * (m - 3)) / (4 * r2 * m * (m - 1) ** 2 * (m + 2))


def h_m_blowup_coeff(m):
    """Limit of t^3 h_m(pi - t) as t -> 0."""
    return (np.pi / 4) * (m - 3) * (m - 1) / (m * (m + 2))


def quartic_second_derivative_bound(delta=0.2, npts=4001):
    """Bound on |h_m''| over [pi/2, pi/2 + delta], uniform in m >= 8."""
    R = np.linspace(np.pi / 2, np.pi / 2 + delta, npts)
    dx = R[1] - R[0]
    a0, a2r2, a4r4 = quartic_parts(R)
    d2 = [np.abs(np.gradient(np.gradient(y, dx), dx)) for y in (a0, a2r2, a4r4)]
    # h_m'' = A0'' + (A2R^2)''/m + 3 (A4R^4)''/(m(m+2)); each weight is largest at m = 8
    return float(np.max(d2[0] + d2[1] / 8 + 3 * d2[2] / 80))


def positivity_window(delta=0.2):
    """Window length on which every h_m with m >= 8 is increasing from pi/2.

    The endpoint slope increases in m, so its infimum over m >= 8 is
    h_8'(pi/2) = 7 pi / 1920; with the second-derivative bound M this gives
    eta_tilde = min(delta, h_8'(pi/2) / (2 M)).
    """
    M = quartic_second_derivative_bound(delta)
    return min(delta, h_m_endpoint_slope(8) / (2 * M))


def minimal_admissible_m(epsilon, m_max=100_000):
    """Smallest m with pi/2 < R_m < S_m < pi/2 + epsilon, or None.

    S_m decreases in m, so the first m meeting the bound is found by
    doubling followed by integer bisection.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive", epsilon=epsilon)
    target = np.pi / 2 + epsilon

    def ok(m):
        return find_R_m(m).value < find_S_m(m).value < target

    m = 4
    while not ok(m):
        if m >= m_max:
            return None
        m = min(2 * m, m_max)
    lo = max(4, m // 2)
    if ok(lo):
        return lo
    while m - lo > 1:
        mid = (lo + m) // 2
        if ok(mid):
            m = mid
        else:
            lo = mid
    return m


def kernel_table(m, n):
    """Grid of (R, b_m, h_m) over the guarded interval."""
    R = np.linspace(1e-3, np.pi - R_CEILING, int(n))
    return R, b_m(m, R), h_m(m, R)
