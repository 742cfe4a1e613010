"""Lorentz-space and Poincare-ball primitives.

Points of the hyperboloid model are stored as length ``d + 1`` arrays with
the time coordinate first.  Points of the Poincare ball are described by a
radius in ``[0, 1)`` and a unit direction (plus an angle when ``d == 2``).
All functions are pure; vectorised variants operate on row-stacked arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

# band below 1 in which an arcosh argument is treated as rounding noise
ARCOSH_CLAMP_BAND = 1e-9
HYPERBOLOID_TOL = 1e-9


class GeometryError(ValueError):
    """Raised for inputs that do not describe valid hyperbolic points."""


@dataclass(frozen=True)
class BallPoint:
    """A point of the Poincare ball in radius/direction form."""

    radius: float
    direction: np.ndarray
    angle: Optional[float] = None

    def __post_init__(self):
        direction = np.asarray(self.direction, dtype=float)
        object.__setattr__(self, "direction", direction)
        if not 0.0 <= self.radius < 1.0:
            raise GeometryError(f"radius must lie in [0, 1), got {self.radius!r}")
        if abs(np.linalg.norm(direction) - 1.0) > 1e-12:
            raise GeometryError("direction must be a unit vector")
        if self.angle is not None:
            if direction.shape != (2,):
                raise GeometryError("an angle is only defined in dimension 2")
            expected = (np.cos(self.angle), np.sin(self.angle))
            if not np.allclose(direction, expected, rtol=0.0, atol=1e-12):
                raise GeometryError("angle and direction disagree")

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    @property
    def cartesian(self) -> np.ndarray:
        return self.radius * self.direction

    @classmethod
    def from_cartesian(cls, z) -> "BallPoint":
        z = np.asarray(z, dtype=float)
        radius = float(np.linalg.norm(z))
        if radius == 0.0:
            direction = origin_direction(z.shape[0])
        else:
            direction = z / radius
        angle = None
        if z.shape[0] == 2:
            angle = float(np.arctan2(direction[1], direction[0]) % (2 * np.pi))
            direction = np.array([np.cos(angle), np.sin(angle)])
        return cls(radius, direction, angle)


def origin_direction(d: int) -> np.ndarray:
    """Convention direction ``(1, 0, ..., 0)`` used where none is defined."""
    e = np.zeros(d)
    e[0] = 1.0
    return e


def check_curvature(kappa: float) -> float:
    kappa = float(kappa)
    if not kappa > 0.0 or not np.isfinite(kappa):
        raise GeometryError(f"curvature parameter must be positive, got {kappa!r}")
    return kappa


def lorentz_product(x, y) -> float:
    """Indefinite inner product ``x1*y1 - (x2*y2 + ... + x_{d+1}*y_{d+1})``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise GeometryError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if x.shape[0] < 2:
        raise GeometryError("Lorentz vectors need at least two coordinates")
    return float(x[0] * y[0] - x[1:] @ y[1:])


def lorentz_gram(X, Y=None) -> np.ndarray:
    """Matrix of Lorentz products between the rows of ``X`` and ``Y``."""
    X = np.asarray(X, dtype=float)
    Y = X if Y is None else np.asarray(Y, dtype=float)
    if X.shape[1] != Y.shape[1]:
        raise GeometryError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    return np.outer(X[:, 0], Y[:, 0]) - X[:, 1:] @ Y[:, 1:].T


def is_hyperboloid_point(x, tol: float = HYPERBOLOID_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(x[0] > 0 and abs(lorentz_product(x, x) - 1.0) <= tol * max(1.0, x[0] ** 2))


def _safe_arcosh(g, scale=1.0, checked=True):
    # `scale` is the magnitude of the summands that produced g; the rounding
    # band grows with it because the Lorentz product cancels large terms.
    g = np.asarray(g, dtype=float)
    floor = 1.0 - ARCOSH_CLAMP_BAND * np.maximum(scale, 1.0)
    if checked and np.any(g < floor):
        raise GeometryError(
            f"Lorentz product {float(np.min(g))!r} below 1; inputs are not hyperboloid points"
        )
    return np.arccosh(np.maximum(g, 1.0))


def hyperbolic_distance(x, y, kappa: float = 1.0, checked: bool = True) -> float:
    """Distance ``arcosh(x o y) / sqrt(kappa)`` on the hyperboloid."""
    kappa = check_curvature(kappa)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if checked:
        for p in (x, y):
            if p.ndim != 1 or p.shape[0] < 2 or not is_hyperboloid_point(p):
                raise GeometryError(f"not a hyperboloid point: {p!r}")
    g = lorentz_product(x, y)
    return float(_safe_arcosh(g, abs(x[0] * y[0]), checked) / np.sqrt(kappa))


def pairwise_hyperbolic_distances(X, kappa: float = 1.0, checked: bool = True) -> np.ndarray:
    """All pairwise hyperboloid distances between the rows of ``X``."""
    kappa = check_curvature(kappa)
    X = np.asarray(X, dtype=float)
    G = lorentz_gram(X)
    H = _safe_arcosh(G, np.abs(np.outer(X[:, 0], X[:, 0])), checked) / np.sqrt(kappa)
    np.fill_diagonal(H, 0.0)
    return H


def stereographic_project(x) -> BallPoint:
    """Map a hyperboloid point to the Poincare ball."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise GeometryError("Lorentz vectors need at least two coordinates")
    if not x[0] > 0:
        raise GeometryError("time coordinate must be positive")
    return BallPoint.from_cartesian(x[1:] / (1.0 + x[0]))


def lift_to_hyperboloid(z: BallPoint) -> np.ndarray:
    """Inverse of :func:`stereographic_project`."""
    r = z.radius
    if not 0.0 <= r < 1.0:
        raise GeometryError(f"radius must lie in [0, 1), got {r!r}")
    s = 1.0 - r * r
    return np.concatenate([[(1.0 + r * r) / s], (2.0 * r / s) * z.direction])


def lift_cartesian(Z) -> np.ndarray:
    """Row-wise lift of Cartesian ball coordinates to the hyperboloid."""
    Z = np.asarray(Z, dtype=float)
    sq = np.sum(Z * Z, axis=1)
    if np.any(sq >= 1.0):
        raise GeometryError("ball points must have radius < 1")
    s = 1.0 - sq
    return np.column_stack([(1.0 + sq) / s, (2.0 / s)[:, None] * Z])


def radial_coordinate(x1: float) -> float:
    """Poincare radius ``sqrt((x1 - 1) / (x1 + 1))`` of a hyperboloid point."""
    if not x1 >= 1.0:
        raise GeometryError(f"time coordinate must be >= 1, got {x1!r}")
    return float(np.sqrt((x1 - 1.0) / (x1 + 1.0)))


def poincare_distance(z1: BallPoint, z2: BallPoint, kappa: float = 1.0) -> float:
    """Hyperbolic distance between two ball points.

    Equal to ``hyperbolic_distance(lift(z1), lift(z2), kappa)``, but
    evaluated as ``arcosh(1 + 2|z1 - z2|^2 / ((1 - |z1|^2)(1 - |z2|^2)))``,
    which avoids the cancellation of the Lorentz product far from the origin.
    """
    if z1.dim != z2.dim:
        raise GeometryError(f"dimension mismatch: {z1.dim} vs {z2.dim}")
    Z = np.vstack([z1.cartesian, z2.cartesian])
    return float(pairwise_poincare_distances(Z, kappa)[0, 1])


def pairwise_poincare_distances(Z, kappa: float = 1.0) -> np.ndarray:
    """All pairwise distances between Cartesian ball coordinates (rows of ``Z``)."""
    kappa = check_curvature(kappa)
    Z = np.asarray(Z, dtype=float)
    sq = np.sum(Z * Z, axis=1)
    if np.any(sq >= 1.0):
        raise GeometryError("ball points must have radius < 1")
    diff = sq[:, None] + sq[None, :] - 2.0 * (Z @ Z.T)
    # exact differences for near-coincident pairs
    close = diff < 1e-4 * np.maximum(sq[:, None], sq[None, :]) + 1e-300
    if np.any(close):
        i, j = np.nonzero(close)
        diff[i, j] = np.sum((Z[i] - Z[j]) ** 2, axis=1)
    diff = np.maximum(diff, 0.0)
    s = 1.0 - sq
    H = np.arccosh(1.0 + 2.0 * diff / np.outer(s, s)) / np.sqrt(kappa)
    np.fill_diagonal(H, 0.0)
    return H
