"""Basic affine geometry: planes, segments, rays, circumcircles, projections.

Points and vectors are plain numpy arrays of shape (3,); the small
wrapper classes below only exist where an invariant (unit normal,
distinct endpoints) is worth enforcing at construction time.
"""

from dataclasses import dataclass

import numpy as np

from . import tolerances


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite coordinates")
    return a


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


@dataclass(frozen=True)
class Plane:
    """Plane through ``point`` with unit ``normal``."""

    point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))
        n = as_point(self.normal)
        if abs(np.linalg.norm(n) - 1.0) > tolerances.UNIT_NORM_TOL:
            raise ValueError("plane normal must be unit length")
        object.__setattr__(self, "normal", n)

    def signed_distance(self, p) -> float:
        return float(np.dot(np.asarray(p, dtype=float) - self.point, self.normal))


@dataclass(frozen=True)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_point(self.a)
        b = as_point(self.b)
        if np.array_equal(a, b):
            raise ValueError("segment endpoints must be distinct")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def point_at(self, t: float) -> np.ndarray:
        return self.a + t * (self.b - self.a)


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", as_point(self.origin))
        d = as_point(self.direction)
        if abs(np.linalg.norm(d) - 1.0) > tolerances.UNIT_NORM_TOL:
            raise ValueError("ray direction must be unit length")
        object.__setattr__(self, "direction", d)


def project_to_plane(p, plane: Plane) -> np.ndarray:
    """Orthogonal projection of p onto the plane (idempotent)."""
    p = np.asarray(p, dtype=float)
    return p - plane.signed_distance(p) * plane.normal


def circumcircle3(a, b, c):
    """Circumcenter and circumradius of a triangle in 3-space.

    The center lies in the triangle's affine hull and is equidistant to
    the three vertices.  Raises ValueError for collinear input.
    """
    a = as_point(a)
    b = as_point(b)
    c = as_point(c)
    ab = b - a
    ac = c - a
    n = np.cross(ab, ac)
    n2 = float(np.dot(n, n))
    scale = max(float(np.dot(ab, ab)), float(np.dot(ac, ac)))
    if n2 <= (1e-14 * scale) ** 2:
        raise ValueError("circumcircle3 of collinear points is undefined")
    # Solve for the center as a + x*ab + y*ac with equidistance conditions.
    d2ab = float(np.dot(ab, ab))
    d2ac = float(np.dot(ac, ac))
    dot_abac = float(np.dot(ab, ac))
    det = d2ab * d2ac - dot_abac * dot_abac
    x = 0.5 * (d2ab * d2ac - d2ac * dot_abac) / det
    y = 0.5 * (d2ac * d2ab - d2ab * dot_abac) / det
    center = a + x * ab + y * ac
    radius = float(np.linalg.norm(center - a))
    return center, radius


def segment_plane_intersection(seg: Segment, plane: Plane):
    """Classify a segment against a plane.

    Returns one of
      ("none", None)            no intersection,
      ("point", (t, point))     a single crossing at parameter t in [0, 1],
      ("contained", None)       the segment lies in the plane.
    """
    da = plane.signed_distance(seg.a)
    db = plane.signed_distance(seg.b)
    scale = float(np.linalg.norm(seg.b - seg.a))
    eps = 1e-14 * max(scale, 1.0)
    ina = abs(da) <= eps
    inb = abs(db) <= eps
    if ina and inb:
        return ("contained", None)
    if ina:
        return ("point", (0.0, seg.a.copy()))
    if inb:
        return ("point", (1.0, seg.b.copy()))
    if (da > 0.0) == (db > 0.0):
        return ("none", None)
    t = da / (da - db)
    return ("point", (t, seg.point_at(t)))


def tangent_basis(normal) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis (e1, e2) of the plane orthogonal to
    ``normal``, with e1 x e2 = normal."""
    n = unit(normal)
    # Pick the coordinate axis least aligned with n for stability.
    k = int(np.argmin(np.abs(n)))
    axis = np.zeros(3)
    axis[k] = 1.0
    e1 = unit(np.cross(axis, n))
    e2 = np.cross(n, e1)
    return e1, e2
