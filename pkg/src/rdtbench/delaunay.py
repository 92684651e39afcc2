"""Incremental 3D Delaunay tetrahedralization with exact predicates.

Bowyer-Watson insertion over a tetrahedral soup augmented with ghost
tetrahedra (one per hull face, sharing a symbolic vertex at infinity),
so every face has exactly two incident cells and hull updates need no
special casing.  Cosphericity is resolved by the symbolic perturbation
of the predicates module, keyed to site indices, which makes the result
deterministic for a fixed insertion order.
"""

from dataclasses import dataclass, field

import numpy as np

from .predicates import in_sphere_perturbed_ex, orient3d

GHOST = -1


class DegenerateSiteError(ValueError):
    pass


@dataclass
class SiteSet:
    """Ordered sites with stable indices."""

    positions: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ValueError("sites must be an (n, 3) array")
        if not np.all(np.isfinite(p)):
            raise ValueError("site coordinates must be finite")
        if len(np.unique(p, axis=0)) != len(p):
            raise ValueError("sites must be pairwise distinct")
        self.positions = p

    def __len__(self):
        return len(self.positions)


@dataclass
class DelaunayComplex:
    """Solid tetrahedra plus derived incidence of a Delaunay triangulation."""

    points: np.ndarray
    tets: list  # sorted 4-tuples of site indices
    hull_faces: list  # sorted 3-tuples
    tie_record: list  # sorted 5-tuples whose insphere tie was perturbed
    face_tets: dict = field(repr=False)  # sorted face triple -> tet ids
    faces: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    neighbors: dict = field(default_factory=dict)  # site -> sorted site list

    def __post_init__(self):
        if not self.faces:
            self.faces = sorted(self.face_tets)
        if not self.edges:
            es = set()
            for f in self.faces:
                es.add((f[0], f[1]))
                es.add((f[0], f[2]))
                es.add((f[1], f[2]))
            self.edges = sorted(es)
        if not self.neighbors:
            nb = {}
            for a, b in self.edges:
                nb.setdefault(a, set()).add(b)
                nb.setdefault(b, set()).add(a)
            self.neighbors = {v: sorted(s) for v, s in nb.items()}

    def vertex_count(self):
        return len({v for t in self.tets for v in t})


class _Builder:
    def __init__(self, points: np.ndarray):
        self.pts_arr = points
        self.pts = [tuple(map(float, p)) for p in points]
        self.tets = {}  # tid -> 4-tuple of vertex ids (GHOST allowed)
        self.face_map = {}  # sorted face triple -> list of tids
        self.vert_tet = {}  # vertex -> some solid tid
        self.next_tid = 0
        self.inserted = []  # site ids in insertion order
        self.ties = set()

    # -- low-level soup operations ---------------------------------------

    def _add_tet(self, verts):
        tid = self.next_tid
        self.next_tid += 1
        self.tets[tid] = verts
        for f in _tet_faces(verts):
            self.face_map.setdefault(f, []).append(tid)
        if GHOST not in verts:
            for v in verts:
                self.vert_tet[v] = tid
        return tid

    def _remove_tet(self, tid):
        verts = self.tets.pop(tid)
        for f in _tet_faces(verts):
            lst = self.face_map[f]
            lst.remove(tid)
            if not lst:
                del self.face_map[f]
        return verts

    def _neighbor(self, tid, face):
        for other in self.face_map[face]:
            if other != tid:
                return other
        return None

    # -- predicates -------------------------------------------------------

    def _conflicts(self, tid, p, ip):
        verts = self.tets[tid]
        if GHOST in verts:
            a, b, c = (v for v in verts if v != GHOST)
            o_p = orient3d(self.pts[a], self.pts[b], self.pts[c], p)
            solid = self._neighbor(tid, _skey(a, b, c))
            apex = next(v for v in self.tets[solid] if v not in (a, b, c))
            if o_p == 0:
                # Coplanar with the hull face: inside its circumcircle iff
                # inside the circumsphere of the adjacent solid tet.
                return self._insphere(a, b, c, apex, p, ip)
            o_a = orient3d(self.pts[a], self.pts[b], self.pts[c], self.pts[apex])
            return (o_p > 0) != (o_a > 0)
        t0, t1, t2, t3 = verts
        return self._insphere(t0, t1, t2, t3, p, ip)

    def _insphere(self, a, b, c, d, p, ip):
        sign, tie = in_sphere_perturbed_ex(
            self.pts[a], self.pts[b], self.pts[c], self.pts[d], p,
            a, b, c, d, ip,
        )
        if tie:
            self.ties.add(tuple(sorted((a, b, c, d, ip))))
        return sign == 1

    # -- point location ----------------------------------------------------

    def _locate_seed(self, p, ip):
        arr = self.pts_arr[self.inserted]
        d2 = np.einsum("ij,ij->i", arr - p, arr - p)
        near = self.inserted[int(np.argmin(d2))]
        tid = self.vert_tet.get(near)
        if tid is not None and tid in self.tets:
            tid = self._walk(tid, p)
            if tid is not None and self._conflicts(tid, p, ip):
                return tid
            if tid is not None:
                for f in _tet_faces(self.tets[tid]):
                    nb = self._neighbor(tid, f)
                    if nb is not None and self._conflicts(nb, p, ip):
                        return nb
        # Exact fallback: scan everything (rare).
        for tid in sorted(self.tets):
            if self._conflicts(tid, p, ip):
                return tid
        raise RuntimeError("no conflicting tetrahedron found for insertion")

    def _walk(self, tid, p, max_steps=2000):
        prev = None
        for _ in range(max_steps):
            verts = self.tets.get(tid)
            if verts is None or GHOST in verts:
                return tid
            moved = False
            for k in range(4):
                w = verts[k]
                face = verts[:k] + verts[k + 1 :]
                a, b, c = (self.pts[v] for v in face)
                o_p = orient3d(a, b, c, p)
                if o_p == 0:
                    continue
                o_w = orient3d(a, b, c, self.pts[w])
                if o_p != o_w:
                    nb = self._neighbor(tid, _skey(*face))
                    if nb is None or nb == prev:
                        continue
                    prev, tid = tid, nb
                    moved = True
                    break
            if not moved:
                return tid
        return tid

    # -- insertion ----------------------------------------------------------

    def insert(self, ip):
        p = self.pts[ip]
        seed = self._locate_seed(p, ip)
        cavity = {seed}
        stack = [seed]
        while stack:
            tid = stack.pop()
            for f in _tet_faces(self.tets[tid]):
                nb = self._neighbor(tid, f)
                if nb is None or nb in cavity:
                    continue
                if self._conflicts(nb, p, ip):
                    cavity.add(nb)
                    stack.append(nb)

        boundary = []  # (face triple, outside tid)
        for tid in cavity:
            for f in _tet_faces(self.tets[tid]):
                nb = self._neighbor(tid, f)
                if nb is None or nb not in cavity:
                    boundary.append(f)
        for tid in sorted(cavity):
            self._remove_tet(tid)

        for f in boundary:
            if GHOST in f:
                u, v = (x for x in f if x != GHOST)
                self._add_tet(_canon_ghost(u, v, ip))
            else:
                u, v, w = f
                o = orient3d(self.pts[u], self.pts[v], self.pts[w], p)
                if o == 0:
                    raise RuntimeError(
                        "flat tetrahedron produced during insertion; "
                        "cavity inconsistent"
                    )
                if o < 0:
                    u, v = v, u
                self._add_tet((u, v, w, ip))
        self.inserted.append(ip)


def _tet_faces(verts):
    a, b, c, d = verts
    return (_skey(a, b, c), _skey(a, b, d), _skey(a, c, d), _skey(b, c, d))


def _skey(*vs):
    return tuple(sorted(vs))


def _canon_ghost(a, b, c):
    x, y, z = sorted((a, b, c))
    return (x, y, z, GHOST)


def _collinear(a, b, c) -> bool:
    # Exact test via three orientation checks against off-axis helpers.
    for helper in ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)):
        d = (a[0] + helper[0], a[1] + helper[1], a[2] + helper[2])
        if orient3d(a, b, c, d) != 0:
            return False
    return True


def build_delaunay(sites) -> DelaunayComplex:
    """Delaunay tetrahedralization of a SiteSet or (n, 3) array.

    Deterministic for a fixed site order; cospherical inputs are valid
    and resolved by symbolic perturbation (ties recorded).
    """
    if not isinstance(sites, SiteSet):
        sites = SiteSet(np.asarray(sites, dtype=float))
    pts = sites.positions
    n = len(pts)
    if n < 4:
        raise DegenerateSiteError("need at least 4 sites for a 3D triangulation")

    b = _Builder(pts)

    # Initial simplex: first four affinely independent sites, in input order.
    i0, i1 = 0, 1
    i2 = next(
        (k for k in range(2, n) if not _collinear(b.pts[i0], b.pts[i1], b.pts[k])),
        None,
    )
    if i2 is None:
        raise DegenerateSiteError("all sites are collinear")
    i3 = None
    for k in range(2, n):
        if k == i2:
            continue
        if orient3d(b.pts[i0], b.pts[i1], b.pts[i2], b.pts[k]) != 0:
            i3 = k
            break
    if i3 is None:
        raise DegenerateSiteError(
            "all sites are coplanar; use the plane-curve (2D) pipeline instead"
        )
    v0, v1, v2, v3 = i0, i1, i2, i3
    if orient3d(b.pts[v0], b.pts[v1], b.pts[v2], b.pts[v3]) < 0:
        v0, v1 = v1, v0
    b._add_tet((v0, v1, v2, v3))
    for f in ((v0, v1, v2), (v0, v1, v3), (v0, v2, v3), (v1, v2, v3)):
        b._add_tet(_canon_ghost(*f))
    b.inserted = [v0, v1, v2, v3]

    for k in range(n):
        if k in (i0, i1, i2, i3):
            continue
        b.insert(k)

    tets = sorted(tuple(sorted(t)) for t in b.tets.values() if GHOST not in t)
    hull = sorted(
        tuple(v for v in t if v != GHOST) for t in b.tets.values() if GHOST in t
    )
    face_tets = {}
    for tid, verts in b.tets.items():
        if GHOST in verts:
            continue
        key = tuple(sorted(verts))
        for f in _tet_faces(verts):
            face_tets.setdefault(f, []).append(key)
    face_tets = {f: sorted(ts) for f, ts in sorted(face_tets.items())}
    return DelaunayComplex(
        points=pts,
        tets=tets,
        hull_faces=hull,
        tie_record=sorted(b.ties),
        face_tets=face_tets,
    )


def check_empty_circumspheres(dc: DelaunayComplex) -> list:
    """All (tet, site) violations of the perturbed empty-sphere property.

    Quadratic; intended for tests and small inputs.
    """
    bad = []
    pts = [tuple(map(float, p)) for p in dc.points]
    all_sites = sorted({v for t in dc.tets for v in t})
    for t in dc.tets:
        a, b, c, d = t
        for s in all_sites:
            if s in t:
                continue
            sign, _ = in_sphere_perturbed_ex(
                pts[a], pts[b], pts[c], pts[d], pts[s], a, b, c, d, s
            )
            if sign == 1:
                bad.append((t, s))
    return bad
