"""Geometry of the unit sphere S^m embedded in R^{m+1}.

The north pole N is the last standard basis vector and the tangent space
T_N S^m is identified with the first m coordinates. All functions accept
arrays with arbitrary leading batch dimensions; the last axis holds
coordinates.
"""
from dataclasses import dataclass

import numpy as np

from .errors import CutLocusError, DomainError

ANTIPODE_TOL = 1e-12


@dataclass(frozen=True)
class PolarTangent:
    """Polar form u = R * theta of a tangent vector at N."""

    R: float
    theta: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.R < np.pi:
            raise DomainError("polar radius must lie in [0, pi)", R=float(self.R))
        if abs(np.linalg.norm(self.theta) - 1.0) > 1e-12:
            raise DomainError("polar direction must be a unit vector")

    def vector(self):
        return self.R * np.asarray(self.theta, dtype=float)


def north_pole(m):
    e = np.zeros(m + 1)
    e[-1] = 1.0
    return e


def to_polar(u):
    u = np.asarray(u, dtype=float)
    R = float(np.linalg.norm(u))
    if R == 0.0:
        theta = np.zeros_like(u)
        theta[0] = 1.0
    else:
        theta = u / R
    return PolarTangent(R, theta)


def _sinc(x):
    # sin(x)/x, with the removable point handled by numpy's normalized sinc
    return np.sinc(x / np.pi)


def exp_north(u):
    """Exponential map at N: cos|u| N + sin|u| u/|u|."""
    u = np.asarray(u, dtype=float)
    r = np.linalg.norm(u, axis=-1, keepdims=True)
    if np.any(r >= np.pi):
        raise CutLocusError("tangent vector reaches the cut locus", norm=float(np.max(r)))
    return np.concatenate([_sinc(r) * u, np.cos(r)], axis=-1)


def log_north(x):
    """Inverse of exp_north; fails within ANTIPODE_TOL of -N."""
    x = np.asarray(x, dtype=float)
    if np.any(x[..., -1] <= -1.0 + ANTIPODE_TOL):
        raise CutLocusError("point is antipodal to the north pole")
    head = x[..., :-1]
    s = np.linalg.norm(head, axis=-1, keepdims=True)
    theta = np.arctan2(s, x[..., -1:])
    scale = np.where(s > 0, theta / np.where(s > 0, s, 1.0), 1.0)
    return scale * head


def distance(x, y):
    """Geodesic distance, equal to arccos of the inner product.

    Evaluated as 2 atan2(|x - y|, |x + y|), which agrees with the clamped
    arccos for unit vectors but keeps full relative accuracy near 0 and pi.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1), np.linalg.norm(x + y, axis=-1))


def exp_at(p, v):
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(r >= np.pi):
        raise CutLocusError("tangent vector reaches the cut locus", norm=float(np.max(r)))
    q = np.cos(r) * p + _sinc(r) * v
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def log_at(p, q):
    """Logarithm at base point p; broadcasts over a batch of targets q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    c = np.sum(p * q, axis=-1, keepdims=True)
    if np.any(c <= -1.0 + ANTIPODE_TOL):
        raise CutLocusError("target is antipodal to the base point")
    v = q - c * p
    # re-project to remove the rounding component along p
    v = v - np.sum(v * p, axis=-1, keepdims=True) * p
    s = np.linalg.norm(v, axis=-1, keepdims=True)
    theta = np.arctan2(s, c)
    scale = np.where(s > 0, theta / np.where(s > 0, s, 1.0), 1.0)
    return scale * v


def volume_weight(R, m):
    """Riemannian volume density (sin R)^(m-1) in geodesic polar coordinates."""
    return np.sin(np.asarray(R, dtype=float)) ** (m - 1)


def jacobian(R, m):
    """J(R) = (sin R / R)^(m-1), with J(0) = 1."""
    return _sinc(np.asarray(R, dtype=float)) ** (m - 1)


def random_unit(rng, m, size=None):
    shape = (m,) if size is None else (size, m)
    z = rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)
