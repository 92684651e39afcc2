"""Closed-form sampling-theory constants and bound formulas.

Two derived constants govern the pipeline's audits:

* ``star_ratio_limit``: the largest cell-radius/lfs ratio for which a
  restricted Voronoi cell is guaranteed to be a disk with a star-shaped
  tangent-plane projection.  It is the positive root of t**4 + t**2 - 1.
* ``vertex_ratio_limit``: the largest face-radius/lfs ratio for which a
  Voronoi edge meets the surface in at most one point.  It is the
  positive root of t**4 = 4 (1 - t**2) (1 - sqrt(3) t)**2, computed at
  import by bisection plus Newton polishing rather than hard-coded.

Both limits convert to plain sample-spacing limits through the feature
translation factor eps -> eps / (1 - eps).
"""

import math

from . import tolerances

# Homeomorphism thresholds for the two sampling modes.
HOMEO_EPS_SAMPLE = 0.3245
HOMEO_VORONOI_SAMPLE = 0.4132

# Domain limit of the normal-variation formula.
NORMAL_VARIATION_DOMAIN = math.sqrt(4.0 * math.sqrt(5.0) - 8.0)


def star_ratio_limit() -> float:
    """Positive root of t**4 + t**2 - 1 = 0, about 0.786151."""
    return math.sqrt((math.sqrt(5.0) - 1.0) / 2.0)


def _vertex_ratio_residual(t: float) -> float:
    return t ** 4 - 4.0 * (1.0 - t * t) * (1.0 - math.sqrt(3.0) * t) ** 2


def vertex_ratio_limit() -> float:
    """Positive root of t**4 = 4 (1 - t**2) (1 - sqrt(3) t)**2, about 0.495683.

    Solved numerically at call time; the known decimal expansion is used
    only as a cross-check in the tests.
    """
    lo, hi = 0.4, 1.0 / math.sqrt(3.0)
    flo = _vertex_ratio_residual(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = _vertex_ratio_residual(mid)
        if fmid == 0.0:
            lo = hi = mid
            break
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    # Newton polish; the quartic is well-conditioned near the root.
    for _ in range(8):
        f = _vertex_ratio_residual(t)
        h = 1e-7
        df = (_vertex_ratio_residual(t + h) - _vertex_ratio_residual(t - h)) / (2.0 * h)
        if df == 0.0:
            break
        t -= f / df
    assert abs(_vertex_ratio_residual(t)) < tolerances.VERTEX_RATIO_RESIDUAL
    return t


def eps_sample_cell_limit() -> float:
    """Largest eps so an eps-sample forces all cell ratios below the star limit."""
    x = star_ratio_limit()
    return x / (x + 1.0)


def eps_sample_vertex_limit() -> float:
    """Largest eps so an eps-sample forces all face ratios below the vertex limit."""
    k = vertex_ratio_limit()
    return k / (k + 1.0)


def normal_variation_angle(delta: float) -> float:
    """Upper bound, in degrees, on the angle between surface normals at two
    points whose distance is delta times the lfs at one of them.

    Valid for 0 <= delta < NORMAL_VARIATION_DOMAIN (about 0.971736).
    Monotone increasing in delta.
    """
    if delta < 0.0 or delta >= NORMAL_VARIATION_DOMAIN:
        raise ValueError(
            f"delta={delta!r} outside [0, {NORMAL_VARIATION_DOMAIN:.6f})"
        )
    c = 1.0 - delta * delta / (2.0 * math.sqrt(1.0 - delta * delta))
    c = min(1.0, max(-1.0, c))
    return math.degrees(math.acos(c))


def triangle_tilt_bound(r_over_lfs: float, angle_deg: float) -> float:
    """Bound on sin of the tilt between a surface-inscribed triangle's plane
    and the tangent plane at the vertex with plane angle ``angle_deg``.

    Equals r_over_lfs * max(cot(angle/2), 1) where r is the circumradius.
    """
    if not 0.0 < angle_deg < 180.0:
        raise ValueError(f"plane angle {angle_deg!r} outside (0, 180)")
    if r_over_lfs < 0.0:
        raise ValueError("r_over_lfs must be nonnegative")
    half = math.radians(angle_deg) / 2.0
    return r_over_lfs * max(1.0 / math.tan(half), 1.0)


def feature_translation(eps: float) -> tuple[float, float]:
    """Factors transferring lfs between two points at distance eps*lfs(p).

    Returns (lfs_factor, distance_factor) = (1/(1-eps), eps/(1-eps)):
    lfs(p) <= lfs_factor * lfs(q) and |pq| <= distance_factor * lfs(q).
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps={eps!r} outside [0, 1)")
    return 1.0 / (1.0 - eps), eps / (1.0 - eps)
