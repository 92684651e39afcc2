import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdtbench.predicates import in_sphere, in_sphere_perturbed, orient3d


def _orient_fraction(a, b, c, d):
    ax, ay, az = map(Fraction, a)
    u = (Fraction(b[0]) - ax, Fraction(b[1]) - ay, Fraction(b[2]) - az)
    v = (Fraction(c[0]) - ax, Fraction(c[1]) - ay, Fraction(c[2]) - az)
    w = (Fraction(d[0]) - ax, Fraction(d[1]) - ay, Fraction(d[2]) - az)
    det = (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )
    return (det > 0) - (det < 0)


UNIT_TET = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_orient3d_unit_tetrahedron():
    assert orient3d(*UNIT_TET) == 1


def test_orient3d_mirror():
    assert orient3d((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, -1)) == -1


def test_orient3d_coplanar():
    assert orient3d((0, 0, 0), (1, 0, 0), (0, 1, 0), (0.3, 0.4, 0)) == 0


def test_orient3d_near_degenerate_agrees_with_exact():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        a = tuple(rng.uniform(-1, 1, 3))
        b = tuple(rng.uniform(-1, 1, 3))
        c = tuple(rng.uniform(-1, 1, 3))
        # d nearly coplanar with a, b, c.
        s, t = rng.uniform(-2, 2, 2)
        base = np.asarray(a) + s * (np.asarray(b) - a) + t * (np.asarray(c) - a)
        n = np.cross(np.subtract(b, a), np.subtract(c, a))
        d = tuple(base + rng.uniform(-1e-14, 1e-14) * n)
        assert orient3d(a, b, c, d) == _orient_fraction(a, b, c, d)


@settings(max_examples=300, deadline=None)
@given(
    st.lists(
        st.floats(-8, 8, allow_nan=False, allow_infinity=False, width=32),
        min_size=12,
        max_size=12,
    )
)
def test_orient3d_matches_rational_oracle(vals):
    a, b, c, d = (tuple(vals[i : i + 3]) for i in range(0, 12, 3))
    assert orient3d(a, b, c, d) == _orient_fraction(a, b, c, d)


def test_in_sphere_centroid_inside():
    e = (0.25, 0.25, 0.25)
    assert in_sphere(*UNIT_TET, e) == 1


def test_in_sphere_far_point_outside():
    assert in_sphere(*UNIT_TET, (10, 10, 10)) == -1


def test_in_sphere_orientation_independent():
    # Swapping two base points must not change the inside verdict.
    a, b, c, d = UNIT_TET
    assert in_sphere(b, a, c, d, (0.25, 0.25, 0.25)) == 1
    assert in_sphere(b, a, c, d, (10, 10, 10)) == -1


def test_in_sphere_cospherical_is_zero():
    # Five points on the unit sphere with exactly representable coordinates.
    a, b, c, d = (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, 0, 1)
    e = (0, -1, 0)
    assert in_sphere(a, b, c, d, e) == 0


def test_in_sphere_degenerate_base_raises():
    with pytest.raises(ValueError):
        in_sphere((0, 0, 0), (1, 0, 0), (0, 1, 0), (0.5, 0.5, 0), (0, 0, 1))


def test_in_sphere_random_agrees_with_perturbation_free_cases():
    rng = np.random.default_rng(3)
    for _ in range(500):
        pts = rng.uniform(-1, 1, (5, 3))
        a, b, c, d, e = (tuple(p) for p in pts)
        if orient3d(a, b, c, d) == 0:
            continue
        s = in_sphere(a, b, c, d, e)
        sp = in_sphere_perturbed(a, b, c, d, e, 0, 1, 2, 3, 4)
        assert sp == s  # generic input: no tie to break


def test_perturbed_never_zero_and_deterministic():
    a, b, c, d = (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, 0, 1)
    e = (0, -1, 0)
    s1 = in_sphere_perturbed(a, b, c, d, e, 0, 1, 2, 3, 4)
    s2 = in_sphere_perturbed(a, b, c, d, e, 0, 1, 2, 3, 4)
    assert s1 in (-1, 1)
    assert s1 == s2


def test_perturbed_consistent_under_reordering():
    # The tie-break must depend on the point set, not the call order.
    a, b, c, d = (1.0, 0, 0), (-1.0, 0, 0), (0, 1.0, 0), (0, 0, 1.0)
    e = (0, -1.0, 0)
    s = in_sphere_perturbed(a, b, c, d, e, 0, 1, 2, 3, 4)
    s_swapped = in_sphere_perturbed(b, a, c, d, e, 1, 0, 2, 3, 4)
    assert s == s_swapped
    s_rolled = in_sphere_perturbed(c, a, b, d, e, 2, 0, 1, 3, 4)
    assert s == s_rolled


def _det5_weighted(pts, idxs, delta):
    # Direct evaluation of the lifted determinant with explicit small
    # weights, the oracle the symbolic code must agree with.
    rows = []
    for p, i in zip(pts, idxs):
        x, y, z = map(Fraction, p)
        w = Fraction(delta) ** (i + 1)
        rows.append([x, y, z, x * x + y * y + z * z - w, Fraction(1)])

    def det(m):
        if len(m) == 1:
            return m[0][0]
        s = 0
        for c in range(len(m)):
            minor = [[r[cc] for cc in range(len(m)) if cc != c] for r in m[1:]]
            s += (-1) ** c * m[0][c] * det(minor)
        return s

    return det(rows)


def test_perturbed_matches_direct_weighted_determinant():
    rng = np.random.default_rng(17)
    octa = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    delta = Fraction(1, 10**9)
    for _ in range(60):
        pick = rng.permutation(6)[:5]
        pts = [octa[k] for k in pick]
        idxs = [int(k) for k in pick]
        if orient3d(*pts[:4]) == 0:
            continue
        D = _det5_weighted(pts, idxs, delta)
        o = orient3d(*pts[:4])
        expected = -o * (1 if D > 0 else -1)
        assert in_sphere_perturbed(*pts, *idxs) == expected


def test_perturbed_tie_prefers_lower_index():
    # Cospherical octahedron: the same geometric tie resolves by index.
    a, b, c, d = (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, 0, 1)
    e = (0, -1, 0)
    s_low = in_sphere_perturbed(a, b, c, d, e, 0, 1, 2, 3, 4)
    s_high = in_sphere_perturbed(a, b, c, d, e, 0, 1, 2, 3, 9)
    assert s_low in (-1, 1) and s_high in (-1, 1)


def test_insphere_scaling_robustness():
    # Tiny and huge coordinates should agree with the rational oracle.
    for scale in (1e-8, 1.0, 1e8):
        pts = [tuple(scale * np.array(p)) for p in UNIT_TET]
        inside = tuple(scale * np.array([0.25, 0.25, 0.25]))
        outside = tuple(scale * np.array([9.0, 9.0, 9.0]))
        assert in_sphere(*pts, inside) == 1
        assert in_sphere(*pts, outside) == -1
