"""Implicit surface catalog with normals, local feature size, and covers.

Surfaces are analytic implicit shapes (scalar field S with S < 0 inside,
S > 0 outside), not meshes.  Each shape provides a gradient, a bounding
box, component/Euler metadata, and a local-feature-size oracle that is
either exact (sphere, torus, two-spheres) or a numeric medial-axis
approximation built from equidistance detection on a dense grid.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import tolerances
from .geom import Plane, tangent_basis, unit


class ProjectionError(RuntimeError):
    """Raised when the on-surface Newton projection fails to converge."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


# Numeric lfs oracles are expensive to build; share them per shape+params.
_ORACLE_REGISTRY: dict = {}


@dataclass
class SurfacePoint:
    """A point on a surface with its outward unit normal."""

    position: np.ndarray
    normal: np.ndarray
    ambiguous: bool = False  # set when projection started near the medial axis

    def tangent_plane(self) -> Plane:
        return Plane(self.position, self.normal)

    def tangent_frame(self):
        return tangent_basis(self.normal)


@dataclass
class LfsBallPair:
    """The two open balls of radius lfs(v) tangent to the surface at v."""

    inner: np.ndarray  # center v - lfs * n
    outer: np.ndarray  # center v + lfs * n
    radius: float


class ImplicitSurface:
    """Base class; subclasses implement value/gradient and metadata."""

    name = "implicit"
    analytic_lfs = False

    def value(self, pts):
        raise NotImplementedError

    def gradient(self, pts):
        raise NotImplementedError

    def bbox(self):
        """(lo, hi) corners of a box containing the surface."""
        raise NotImplementedError

    def component_count(self) -> int:
        return 1

    def component_euler(self) -> list[int]:
        """Euler characteristic of each connected component."""
        return [2]

    def component_of(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.zeros(len(pts), dtype=int)

    def dist_factor(self) -> float:
        """Factor f such that dist(x, surface) >= f * |S(x)| everywhere."""
        return 1.0

    def params(self) -> dict:
        return {}

    # -- derived helpers ------------------------------------------------

    def bbox_diag(self) -> float:
        lo, hi = self.bbox()
        return float(np.linalg.norm(hi - lo))

    def on_surface_tol(self) -> float:
        return tolerances.TOL_ON_SURFACE_REL * self.bbox_diag()

    def normal(self, pts):
        g = self.gradient(pts)
        n = np.linalg.norm(g, axis=-1, keepdims=True)
        return g / n

    def lfs(self, pts):
        """Local feature size at on-surface points (vectorized)."""
        return self.lfs_oracle().lfs(pts)

    def lfs_accuracy(self) -> float:
        """Absolute error bound of the lfs values (0 for analytic)."""
        return 0.0 if self.analytic_lfs else self.lfs_oracle().accuracy

    def min_lfs(self) -> float:
        pts = self.dense_cover(self.bbox_diag() / 40.0)
        return float(np.min(self.lfs(pts)))

    def max_lfs(self) -> float:
        pts = self.dense_cover(self.bbox_diag() / 40.0)
        return float(np.max(self.lfs(pts)))

    _oracle_cache = None

    def lfs_oracle(self):
        if self._oracle_cache is None:
            key = (type(self).__name__, tuple(sorted(self.params().items())))
            if key not in _ORACLE_REGISTRY:
                _ORACLE_REGISTRY[key] = NumericLfsOracle(self)
            self._oracle_cache = _ORACLE_REGISTRY[key]
        return self._oracle_cache

    # -- projection -----------------------------------------------------

    def closest_points(self, pts, max_iter=tolerances.MAX_NEWTON_ITER):
        """Project an (N, 3) array onto the surface by Newton on S.

        Follows the gradient flow of S; exact nearest point for distance
        fields, a well-defined surface projection otherwise.
        """
        x = np.atleast_2d(np.asarray(pts, dtype=float)).copy()
        tol = self.on_surface_tol()
        grad_floor = 1e-9
        ambiguous = np.zeros(len(x), dtype=bool)
        for _ in range(max_iter):
            s = self.value(x)
            live = np.abs(s) > tol
            if not np.any(live):
                break
            g = self.gradient(x[live])
            gn2 = np.einsum("ij,ij->i", g, g)
            bad = gn2 < grad_floor**2
            if np.any(bad):
                # Medial-axis start: nudge deterministically and retry.
                idx = np.flatnonzero(live)[bad]
                ambiguous[idx] = True
                x[idx, 0] += 1e-3 * self.bbox_diag()
                continue
            x[live] -= (s[live] / gn2)[:, None] * g
        s = self.value(x)
        if np.any(np.abs(s) > 10.0 * tol):
            k = int(np.argmax(np.abs(s)))
            raise ProjectionError(
                f"surface projection did not converge (|S|={abs(s[k]):.3e})",
                last_iterate=x[k],
            )
        return x, ambiguous

    def closest_point(self, p) -> SurfacePoint:
        x, amb = self.closest_points(np.asarray(p, dtype=float)[None, :])
        pos = x[0]
        return SurfacePoint(pos, self.normal(pos[None, :])[0], bool(amb[0]))

    def surface_point(self, p) -> SurfacePoint:
        """Wrap an already-on-surface point, verifying |S| is small."""
        p = np.asarray(p, dtype=float)
        if abs(float(self.value(p[None, :])[0])) > 10.0 * self.on_surface_tol():
            raise ValueError("point is not on the surface")
        return SurfacePoint(p, self.normal(p[None, :])[0])

    # -- covers and sampling ---------------------------------------------

    def dense_cover(self, h: float, chunk=2_000_000) -> np.ndarray:
        """Point set on the surface such that every surface point is within
        tolerances.COVER_FACTOR * h of the set.

        Grid-shell seeding at spacing h/2, projection, then hash thinning
        back to ~area/(h/2)^2 points.
        """
        if h <= 0.0:
            raise ValueError("cover spacing must be positive")
        g = h / 2.0
        lo, hi = self.bbox()
        lo = lo - h
        hi = hi + h
        ns = np.maximum(2, np.ceil((hi - lo) / g).astype(int) + 1)
        axes = [lo[k] + g * np.arange(ns[k]) for k in range(3)]
        keep_thresh = np.sqrt(3.0) * g / self.dist_factor() * 1.01

        shell = []
        # Chunk over x-slabs to bound memory.
        ny, nz = ns[1], ns[2]
        per_slab = ny * nz
        slab_count = max(1, chunk // max(per_slab, 1))
        yz = np.stack(np.meshgrid(axes[1], axes[2], indexing="ij"), axis=-1).reshape(-1, 2)
        for i0 in range(0, ns[0], slab_count):
            xs = axes[0][i0 : i0 + slab_count]
            p = np.empty((len(xs) * per_slab, 3))
            p[:, 0] = np.repeat(xs, per_slab)
            p[:, 1] = np.tile(yz[:, 0], len(xs))
            p[:, 2] = np.tile(yz[:, 1], len(xs))
            s = self.value(p)
            sel = np.abs(s) <= keep_thresh
            if np.any(sel):
                shell.append(p[sel])
        if not shell:
            raise RuntimeError("dense_cover found no points near the surface")
        seeds = np.concatenate(shell, axis=0)
        projected, _ = self.closest_points(seeds)
        keys = np.floor((projected - lo) / g).astype(np.int64)
        order = np.ravel_multi_index(
            (keys[:, 0], keys[:, 1], keys[:, 2]),
            (keys[:, 0].max() + 1, keys[:, 1].max() + 1, keys[:, 2].max() + 1),
        )
        _, first = np.unique(order, return_index=True)
        return projected[np.sort(first)]

    def sample_points(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n pseudo-random points on the surface (density roughly uniform)."""
        lo, hi = self.bbox()
        out = []
        have = 0
        while have < n:
            cand = rng.uniform(lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo), size=(4 * n, 3))
            s = self.value(cand)
            near = np.abs(s) <= 0.2 * self.bbox_diag() / self.dist_factor()
            cand = cand[near]
            if len(cand) == 0:
                continue
            proj, amb = self.closest_points(cand)
            proj = proj[~amb]
            out.append(proj)
            have += len(proj)
        return np.concatenate(out, axis=0)[:n]


def lfs_balls(surface: ImplicitSurface, sp: SurfacePoint, cover=None) -> LfsBallPair:
    """The two tangent open balls of radius lfs(v) at v; optionally probe
    their emptiness against a dense cover of the surface."""
    r = float(surface.lfs(sp.position[None, :])[0])
    inner = sp.position - r * sp.normal
    outer = sp.position + r * sp.normal
    pair = LfsBallPair(inner, outer, r)
    if cover is not None:
        tree = cKDTree(cover)
        slack = surface.lfs_accuracy() + 2.0 * _cover_spacing_guess(cover)
        for center in (inner, outer):
            d, _ = tree.query(center)
            if d < r - slack:
                raise ValueError(
                    f"lfs ball at {sp.position} is not empty: cover point at "
                    f"distance {d:.6g} < radius {r:.6g}"
                )
    return pair


def unit_rows(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.maximum(n, 1e-300)


def _cover_spacing_guess(cover) -> float:
    tree = cKDTree(cover)
    d, _ = tree.query(cover[: min(len(cover), 200)], k=2)
    return float(np.median(d[:, 1]))


# ---------------------------------------------------------------------------
# Catalog shapes
# ---------------------------------------------------------------------------


class Sphere(ImplicitSurface):
    """Sphere; S is the exact signed distance, lfs is the radius."""

    name = "sphere"
    analytic_lfs = True

    def __init__(self, radius=1.0, center=(0.0, 0.0, 0.0)):
        if radius <= 0:
            raise ValueError("sphere radius must be positive")
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)

    def params(self):
        return {"radius": self.radius, "center": tuple(self.center)}

    def value(self, pts):
        d = np.asarray(pts, dtype=float) - self.center
        return np.linalg.norm(d, axis=-1) - self.radius

    def gradient(self, pts):
        d = np.asarray(pts, dtype=float) - self.center
        n = np.linalg.norm(d, axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            g = d / n
        return np.where(np.isfinite(g), g, 0.0)

    def bbox(self):
        r = np.full(3, self.radius)
        return self.center - r, self.center + r

    def lfs(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.full(len(pts), self.radius)

    def min_lfs(self):
        return self.radius

    def max_lfs(self):
        return self.radius


class Ellipsoid(ImplicitSurface):
    """Axis-aligned ellipsoid; lfs comes from the numeric medial oracle."""

    name = "ellipsoid"
    analytic_lfs = False

    def __init__(self, a=1.3, b=1.0, c=0.8, center=(0.0, 0.0, 0.0)):
        if min(a, b, c) <= 0:
            raise ValueError("ellipsoid semi-axes must be positive")
        self.axes = np.array([a, b, c], dtype=float)
        self.center = np.asarray(center, dtype=float)

    def params(self):
        return {"a": self.axes[0], "b": self.axes[1], "c": self.axes[2]}

    def value(self, pts):
        d = (np.asarray(pts, dtype=float) - self.center) / self.axes
        return np.linalg.norm(d, axis=-1) - 1.0

    def gradient(self, pts):
        d = (np.asarray(pts, dtype=float) - self.center) / self.axes
        q = np.linalg.norm(d, axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            g = d / (q * self.axes)
        return np.where(np.isfinite(g), g, 0.0)

    def bbox(self):
        return self.center - self.axes, self.center + self.axes

    def dist_factor(self):
        return float(np.min(self.axes))


class Torus(ImplicitSurface):
    """Torus around the z axis; S is the exact signed distance.

    With ring radius >= 2 * tube radius the medial axis is the core
    circle plus the z axis, so lfs is exactly the tube radius.
    """

    name = "torus"
    analytic_lfs = True

    def __init__(self, ring_radius=2.0, tube_radius=0.5):
        if tube_radius <= 0 or ring_radius <= 0:
            raise ValueError("torus radii must be positive")
        if ring_radius < 2.0 * tube_radius:
            raise ValueError(
                "torus requires ring_radius >= 2 * tube_radius for the "
                "analytic lfs (= tube radius) to be valid"
            )
        self.ring_radius = float(ring_radius)
        self.tube_radius = float(tube_radius)

    def params(self):
        return {"ring_radius": self.ring_radius, "tube_radius": self.tube_radius}

    def value(self, pts):
        p = np.asarray(pts, dtype=float)
        rho = np.hypot(p[..., 0], p[..., 1])
        return np.hypot(rho - self.ring_radius, p[..., 2]) - self.tube_radius

    def gradient(self, pts):
        p = np.asarray(pts, dtype=float)
        rho = np.hypot(p[..., 0], p[..., 1])
        rho_safe = np.where(rho < 1e-12, 1.0, rho)
        q = np.hypot(rho - self.ring_radius, p[..., 2])
        q_safe = np.where(q < 1e-12, 1.0, q)
        drho = (rho - self.ring_radius) / q_safe
        g = np.empty_like(p)
        g[..., 0] = drho * p[..., 0] / rho_safe
        g[..., 1] = drho * p[..., 1] / rho_safe
        g[..., 2] = p[..., 2] / q_safe
        return g

    def bbox(self):
        s = self.ring_radius + self.tube_radius
        return (
            np.array([-s, -s, -self.tube_radius]),
            np.array([s, s, self.tube_radius]),
        )

    def component_euler(self):
        return [0]

    def lfs(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.full(len(pts), self.tube_radius)

    def min_lfs(self):
        return self.tube_radius

    def max_lfs(self):
        return self.tube_radius


class TwoSpheres(ImplicitSurface):
    """Two disjoint equal spheres along the x axis.

    The half-gap must be at least the radius so that the equidistant
    medial sheet stays at least one radius away and lfs is exactly the
    sphere radius everywhere.
    """

    name = "two_spheres"
    analytic_lfs = True

    def __init__(self, radius=1.0, half_gap=1.0):
        if radius <= 0:
            raise ValueError("sphere radius must be positive")
        if half_gap < radius:
            raise ValueError("half_gap must be >= radius for analytic lfs")
        self.radius = float(radius)
        self.half_gap = float(half_gap)
        d = self.half_gap + self.radius
        self.centers = np.array([[-d, 0.0, 0.0], [d, 0.0, 0.0]])

    def params(self):
        return {"radius": self.radius, "half_gap": self.half_gap}

    def value(self, pts):
        p = np.asarray(pts, dtype=float)
        d0 = np.linalg.norm(p - self.centers[0], axis=-1)
        d1 = np.linalg.norm(p - self.centers[1], axis=-1)
        return np.minimum(d0, d1) - self.radius

    def gradient(self, pts):
        p = np.asarray(pts, dtype=float)
        d0 = np.linalg.norm(p - self.centers[0], axis=-1, keepdims=True)
        d1 = np.linalg.norm(p - self.centers[1], axis=-1, keepdims=True)
        use0 = d0 <= d1
        c = np.where(use0, self.centers[0], self.centers[1])
        d = np.where(use0, d0, d1)
        with np.errstate(invalid="ignore", divide="ignore"):
            g = (p - c) / d
        return np.where(np.isfinite(g), g, 0.0)

    def bbox(self):
        s = self.half_gap + 2.0 * self.radius
        r = self.radius
        return np.array([-s, -r, -r]), np.array([s, r, r])

    def component_count(self):
        return 2

    def component_euler(self):
        return [2, 2]

    def component_of(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return (pts[:, 0] > 0.0).astype(int)

    def lfs(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.full(len(pts), self.radius)

    def min_lfs(self):
        return self.radius

    def max_lfs(self):
        return self.radius


class BlendedSpheres(ImplicitSurface):
    """Smooth union of two overlapping spheres (a peanut).

    The sharpness parameter controls the neck blend; large values give a
    near-C^{1,1} crease, stressing the bound audits.  lfs is numeric.
    """

    name = "blended_spheres"
    analytic_lfs = False

    def __init__(self, radius=1.0, half_offset=0.8, sharpness=4.0):
        if radius <= 0 or half_offset <= 0 or sharpness <= 0:
            raise ValueError("blended sphere parameters must be positive")
        if half_offset >= radius:
            raise ValueError("spheres must overlap (half_offset < radius)")
        self.radius = float(radius)
        self.half_offset = float(half_offset)
        self.sharpness = float(sharpness)
        self.centers = np.array([[-half_offset, 0.0, 0.0], [half_offset, 0.0, 0.0]])

    def params(self):
        return {
            "radius": self.radius,
            "half_offset": self.half_offset,
            "sharpness": self.sharpness,
        }

    def _fields(self, pts):
        p = np.asarray(pts, dtype=float)
        s0 = np.linalg.norm(p - self.centers[0], axis=-1) - self.radius
        s1 = np.linalg.norm(p - self.centers[1], axis=-1) - self.radius
        return p, s0, s1

    def value(self, pts):
        _, s0, s1 = self._fields(pts)
        k = self.sharpness
        m = np.minimum(s0, s1)
        # Stable log-sum-exp smooth minimum; 1-Lipschitz like its inputs.
        return m - np.log(np.exp(-k * (s0 - m)) + np.exp(-k * (s1 - m))) / k

    def gradient(self, pts):
        p, s0, s1 = self._fields(pts)
        k = self.sharpness
        m = np.minimum(s0, s1)
        w0 = np.exp(-k * (s0 - m))
        w1 = np.exp(-k * (s1 - m))
        tot = w0 + w1
        d0 = np.linalg.norm(p - self.centers[0], axis=-1, keepdims=True)
        d1 = np.linalg.norm(p - self.centers[1], axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            g0 = (p - self.centers[0]) / d0
            g1 = (p - self.centers[1]) / d1
        g0 = np.where(np.isfinite(g0), g0, 0.0)
        g1 = np.where(np.isfinite(g1), g1, 0.0)
        return (w0 / tot)[..., None] * g0 + (w1 / tot)[..., None] * g1

    def bbox(self):
        s = self.half_offset + self.radius + 0.2
        r = self.radius + 0.2
        return np.array([-s, -r, -r]), np.array([s, r, r])


# ---------------------------------------------------------------------------
# Numeric lfs oracle
# ---------------------------------------------------------------------------


@dataclass
class NumericLfsOracle:
    """Medial-axis point cloud built by tangent-ball shrinking.

    For every cover point, the tangent ball on each side of the surface
    is shrunk until its interior is empty of cover points; the limiting
    center is equidistant to two surface samples.  Centers are kept only
    when validated by the equidistance criterion (second-nearest sample
    nearly as close as the nearest, in a direction at least
    ``sep_angle_deg`` away).  lfs(x) is the distance from x to the kept
    cloud; ``accuracy`` bounds the discretization error and is verified
    against the analytic shapes in the tests.
    """

    surface: ImplicitSurface
    cover_h: float = 0.0
    sep_angle_deg: float = 60.0
    accuracy: float = field(init=False)
    medial_points: np.ndarray = field(init=False)

    def __post_init__(self):
        surf = self.surface
        diag = surf.bbox_diag()
        if self.cover_h <= 0.0:
            self.cover_h = diag / 80.0
        cover = surf.dense_cover(self.cover_h)
        tree = cKDTree(cover)
        seeds = cover[::3]
        normals = surf.normal(seeds)
        r0 = 0.6 * diag
        conv_tol = 1e-6 * diag
        cos_sep = np.cos(np.radians(self.sep_angle_deg))

        kept = []
        for side in (-1.0, 1.0):
            m = side * normals
            r = np.full(len(seeds), r0)
            witness = np.full((len(seeds), 3), np.nan)
            active = np.ones(len(seeds), dtype=bool)
            for _ in range(25):
                idx = np.flatnonzero(active)
                if len(idx) == 0:
                    break
                c = seeds[idx] + r[idx, None] * m[idx]
                d, j = tree.query(c, workers=-1)
                q = cover[j]
                u = q - seeds[idx]
                un2 = np.einsum("ij,ij->i", u, u)
                denom = 2.0 * np.einsum("ij,ij->i", u, m[idx])
                # Ball already empty (touches only its own point) or the
                # update is numerically tangent: converged.
                emptied = d >= r[idx] - 1e-9 * diag
                usable = (~emptied) & (denom > 1e-12 * diag)
                r_new = np.where(usable, un2 / np.maximum(denom, 1e-300), r[idx])
                shrink = usable & (r_new < r[idx] - conv_tol)
                r[idx] = np.where(shrink, r_new, r[idx])
                witness[idx[shrink]] = q[shrink]
                active[idx] = shrink
            # Validate with the shrink witnesses: the converged ball touches
            # its seed and the witness near-equidistantly; keep the center
            # when the two contact directions are angularly separated and
            # the radius is above the discretization floor.
            done = (r < 0.98 * r0) & np.isfinite(witness[:, 0]) & (r >= 3.0 * self.cover_h)
            if not np.any(done):
                continue
            c = seeds[done] + r[done, None] * m[done]
            d1 = unit_rows(seeds[done] - c)
            d2 = unit_rows(witness[done] - c)
            apart = np.einsum("ij,ij->i", d1, d2) <= cos_sep
            kept.append(c[apart])
        if not kept or sum(len(k) for k in kept) == 0:
            raise RuntimeError("numeric lfs oracle found no medial candidates")
        cand = np.concatenate(kept, axis=0)

        # Deduplicate on a half-spacing grid.
        lo, _ = surf.bbox()
        keys = np.floor((cand - (lo - diag)) / (0.5 * self.cover_h)).astype(np.int64)
        _, first = np.unique(keys, axis=0, return_index=True)
        self.medial_points = cand[np.sort(first)]
        self._medial_tree = cKDTree(self.medial_points)
        self.accuracy = 4.0 * self.cover_h

    def lfs(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        d, _ = self._medial_tree.query(pts, workers=-1)
        return np.maximum(d, 1e-12)


# ---------------------------------------------------------------------------
# Catalog registry
# ---------------------------------------------------------------------------

_CATALOG = {
    "sphere": Sphere,
    "ellipsoid": Ellipsoid,
    "torus": Torus,
    "two_spheres": TwoSpheres,
    "blended_spheres": BlendedSpheres,
}


def catalog_names():
    return sorted(_CATALOG)


def make_surface(name: str, **params) -> ImplicitSurface:
    try:
        cls = _CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown surface {name!r}; available: {', '.join(catalog_names())}"
        ) from None
    return cls(**params)
