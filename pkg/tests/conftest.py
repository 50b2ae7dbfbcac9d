"""Shared generators and planar-geometry helpers for the test suite."""

import numpy as np
import pytest

from ddestab.fov import _point_segment_distance, convex_hull, hull_margin


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_complex(gen, n, scale=1.0):
    return scale * (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n)))


def random_hermitian(gen, n, scale=1.0):
    a = random_complex(gen, n, scale)
    return 0.5 * (a + a.conj().T)


def random_spd(gen, n, eig_low=0.5, eig_high=3.0):
    """Hermitian matrix with eigenvalues drawn from [eig_low, eig_high]."""
    q, _ = np.linalg.qr(random_complex(gen, n))
    vals = gen.uniform(eig_low, eig_high, size=n)
    return (q * vals[None, :]) @ q.conj().T


def random_unit_vector(gen, n):
    v = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    return v / np.linalg.norm(v)


def random_normal_matrix(gen, n=5, min_gap=0.35):
    """Normal matrix whose spectrum has well-separated hull vertices, so a
    256-direction sweep cannot miss one (narrow normal cones rejected)."""
    while True:
        angles = np.sort(gen.uniform(0.0, 2.0 * np.pi, size=n))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * np.pi]]))
        if np.min(gaps) < min_gap:
            continue
        radii = gen.uniform(0.5, 1.0, size=n)
        spectrum = radii * np.exp(1j * angles)
        hull = convex_hull(spectrum)
        if len(hull) == n and _min_turn_angle(hull) > 0.1:
            break
    q, _ = np.linalg.qr(random_complex(gen, n))
    return (q * spectrum[None, :]) @ q.conj().T, spectrum


def _min_turn_angle(hull):
    h = np.asarray(hull)
    turns = []
    for k in range(len(h)):
        a, b, c = h[k - 1], h[k], h[(k + 1) % len(h)]
        turns.append(abs(np.angle((c - b) / (b - a))))
    return min(turns)


def point_polygon_distance(hull, z):
    """Exact distance from z to a convex hull (0 if inside or on it)."""
    h = np.asarray(hull, dtype=complex)
    if h.size == 1:
        return abs(z - h[0])
    if h.size == 2:
        return _point_segment_distance(z, h[0], h[1])
    if hull_margin(h, z) >= 0.0:
        return 0.0
    return min(_point_segment_distance(z, h[k], h[(k + 1) % len(h)])
               for k in range(len(h)))


def hausdorff_distance(points_a, points_b):
    """Hausdorff distance between the convex hulls of two point sets
    (vertex-based, exact for convex polygons)."""
    ha, hb = convex_hull(points_a), convex_hull(points_b)
    d_ab = max(point_polygon_distance(hb, z) for z in ha)
    d_ba = max(point_polygon_distance(ha, z) for z in hb)
    return max(d_ab, d_ba)


def multiset_distance(xs, ys):
    """Max pairing error between two equally sized complex multisets under
    the optimal assignment."""
    from scipy.optimize import linear_sum_assignment

    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    assert xs.shape == ys.shape
    cost = np.abs(xs[:, None] - ys[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))
