"""Exactly decided orientation and insphere predicates.

Each predicate first evaluates a floating-point determinant with a
conservative static error bound; if the magnitude does not clear the
bound, it falls back to exact arithmetic.  Floats are dyadic, so after
scaling every coordinate onto a common power-of-two grid the exact
evaluation runs in plain (arbitrary-precision) integers.

Ties of the insphere test are broken by a deterministic symbolic
perturbation keyed to global site indices: site i is lifted onto the
paraboloid with an infinitesimal weight delta**(rank of i) subtracted,
so lower-indexed sites win ties.  This realizes the usual simulation
of simplicity for cospherical inputs (regular octahedron, cube) and
never returns zero.
"""

# Machine epsilon conventions follow Shewchuk: eps = 2**-53 is half an ulp.
_EPS = 2.0 ** -53
_O3D_BOUND = (7.0 + 56.0 * _EPS) * _EPS
# Conservative coefficient for the 4x4 insphere expansion used here
# (looser than the classical tight bound; failures just take the exact path).
_ISP_BOUND = 512.0 * _EPS


def _to_int_grid(vals):
    """Scale floats onto a common power-of-two grid, exactly, as ints."""
    parts = []
    kmax = 0
    for v in vals:
        num, den = float(v).as_integer_ratio()
        k = den.bit_length() - 1  # den is a power of two for finite floats
        parts.append((num, k))
        if k > kmax:
            kmax = k
    return [num << (kmax - k) for num, k in parts]


def _orient3d_float(a, b, c, d):
    ux, uy, uz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    vx, vy, vz = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    wx, wy, wz = d[0] - a[0], d[1] - a[1], d[2] - a[2]

    vywz = vy * wz
    vzwy = vz * wy
    vzwx = vz * wx
    vxwz = vx * wz
    vxwy = vx * wy
    vywx = vy * wx

    det = ux * (vywz - vzwy) + uy * (vzwx - vxwz) + uz * (vxwy - vywx)
    perm = (
        (abs(vywz) + abs(vzwy)) * abs(ux)
        + (abs(vzwx) + abs(vxwz)) * abs(uy)
        + (abs(vxwy) + abs(vywx)) * abs(uz)
    )
    return det, _O3D_BOUND * perm


def _orient3d_exact(a, b, c, d):
    g = _to_int_grid((a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2], d[0], d[1], d[2]))
    ax, ay, az = g[0:3]
    ux, uy, uz = g[3] - ax, g[4] - ay, g[5] - az
    vx, vy, vz = g[6] - ax, g[7] - ay, g[8] - az
    wx, wy, wz = g[9] - ax, g[10] - ay, g[11] - az
    det = ux * (vy * wz - vz * wy) + uy * (vz * wx - vx * wz) + uz * (vx * wy - vy * wx)
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


def orient3d(a, b, c, d) -> int:
    """Sign of det[[b-a], [c-a], [d-a]].

    +1 when d lies on the positive side of the plane through a, b, c
    (the side the right-handed normal (b-a) x (c-a) points to), -1 on
    the other side, 0 exactly when the four points are coplanar.
    """
    det, bound = _orient3d_float(a, b, c, d)
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return _orient3d_exact(a, b, c, d)


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _det4(m):
    det = 0
    sign = 1
    for c in range(4):
        minor = [[m[r][cc] for cc in range(4) if cc != c] for r in range(1, 4)]
        det += sign * m[0][c] * _det3(minor)
        sign = -sign
    return det


def _det5(m):
    det = 0
    sign = 1
    for c in range(5):
        minor = [[m[r][cc] for cc in range(5) if cc != c] for r in range(1, 5)]
        det += sign * m[0][c] * _det4(minor)
        sign = -sign
    return det


def _insphere_det_float(a, b, c, d, e):
    rows = []
    perm_rows = []
    for p in (a, b, c, d):
        x, y, z = p[0] - e[0], p[1] - e[1], p[2] - e[2]
        w = x * x + y * y + z * z
        rows.append((x, y, z, w))
        perm_rows.append((abs(x), abs(y), abs(z), w))
    det = 0.0
    perm = 0.0
    sign = -1.0  # cofactor expansion along column 3 starts at (-1)**(0+3)
    for r in range(4):
        sub = [rows[i] for i in range(4) if i != r]
        psub = [perm_rows[i] for i in range(4) if i != r]
        m3 = _det3([row[:3] for row in sub])
        p3 = 0.0
        for (i, j, k) in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            p3 += psub[0][i] * psub[1][j] * psub[2][k]
        det += sign * rows[r][3] * m3
        perm += perm_rows[r][3] * p3
        sign = -sign
    return det, _ISP_BOUND * perm


def _insphere_det_exact(a, b, c, d, e):
    g = _to_int_grid(
        (
            a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2],
            d[0], d[1], d[2], e[0], e[1], e[2],
        )
    )
    ex, ey, ez = g[12:15]
    rows = []
    for k in range(4):
        x, y, z = g[3 * k] - ex, g[3 * k + 1] - ey, g[3 * k + 2] - ez
        rows.append((x, y, z, x * x + y * y + z * z))
    det = _det4(rows)
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


def _insphere_raw_sign(a, b, c, d, e) -> int:
    """Exact sign of the 4x4 lifted determinant with rows (p - e, |p - e|^2)."""
    det, bound = _insphere_det_float(a, b, c, d, e)
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return _insphere_det_exact(a, b, c, d, e)


def in_sphere(a, b, c, d, e) -> int:
    """+1 if e lies strictly inside the circumsphere of a, b, c, d,
    -1 if strictly outside, 0 if the five points are cospherical.

    Orientation-independent.  Raises ValueError when a, b, c, d are
    coplanar (no circumsphere).
    """
    o = orient3d(a, b, c, d)
    if o == 0:
        raise ValueError("in_sphere base simplex is degenerate (coplanar points)")
    # With spec-positive orientation, the raw determinant is negative
    # for interior points, hence the minus sign.
    return -o * _insphere_raw_sign(a, b, c, d, e)


def _perm_parity(order) -> int:
    order = list(order)
    parity = 1
    for i in range(len(order)):
        while order[i] != i:
            j = order[i]
            order[i], order[j] = order[j], order[i]
            parity = -parity
    return parity


def _lifted_rows_exact(points):
    flat = [coord for p in points for coord in (p[0], p[1], p[2])]
    g = _to_int_grid(flat)
    rows = []
    for k in range(len(points)):
        x, y, z = g[3 * k], g[3 * k + 1], g[3 * k + 2]
        rows.append([x, y, z, x * x + y * y + z * z, 1])
    return rows


def in_sphere_perturbed(pa, pb, pc, pd, pe, ia, ib, ic, id_, ie) -> int:
    """Insphere sign with symbolic perturbation; never returns 0.

    Points carry global indices; ties (exactly cospherical sets) are
    resolved as if site i had been pushed infinitesimally inside the
    paraboloid by delta**rank(i), lower index = stronger push.  The
    result is +1 when pe is inside the (perturbed) circumsphere of
    pa..pd, -1 otherwise, and is globally consistent: it depends only
    on the point set, not on argument order.
    """
    sign, _ = in_sphere_perturbed_ex(pa, pb, pc, pd, pe, ia, ib, ic, id_, ie)
    return sign


def in_sphere_perturbed_ex(pa, pb, pc, pd, pe, ia, ib, ic, id_, ie):
    """Like in_sphere_perturbed but also reports whether a tie was broken."""
    o = orient3d(pa, pb, pc, pd)
    if o == 0:
        raise ValueError("in_sphere base simplex is degenerate (coplanar points)")
    s = _insphere_raw_sign(pa, pb, pc, pd, pe)
    if s != 0:
        return -o * s, False

    idx = [ia, ib, ic, id_, ie]
    pts = [pa, pb, pc, pd, pe]
    order = sorted(range(5), key=lambda k: idx[k])
    if len({idx[k] for k in order}) != 5:
        raise ValueError("perturbation requires distinct site indices")
    parity = _perm_parity([order.index(k) for k in range(5)])

    rows = _lifted_rows_exact([pts[k] for k in order])
    # det(w) = det0 + sum_r w_r * (-1)^r * minor(r, lift column); det0 = 0
    # here, so the lowest-ranked row with a nonzero minor decides.
    for r in range(5):
        minor = [
            [rows[rr][cc] for cc in range(5) if cc != 3]
            for rr in range(5)
            if rr != r
        ]
        coeff = _det4(minor)
        if coeff != 0:
            sorted_sign = 1 if ((r % 2 == 0) == (coeff > 0)) else -1
            return -o * parity * sorted_sign, True
    raise ValueError("all five points are coplanar; cannot perturb insphere")
