"""Field of values (numerical range) boundary computation and queries.

The boundary of F(M) = { x* M x : ||x|| = 1 } is sampled with the classic
angle sweep: for each direction phi the largest eigenvector x of the
Hermitian part H(phi) = (e^{i phi} M + e^{-i phi} M*) / 2 yields the
boundary point x* M x.  The sampled points are genuine elements of F(M),
so every query built on them (hulls, radii, containment) underestimates
the true set; certificates compensate with the inflation margin
:func:`fov_margin`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidParams, NotPositiveDefinite

DEFAULT_ANGLES = 256


def fov_margin(m) -> float:
    """Inflation margin for containment queries: 1e-7 * (1 + ||M||)."""
    return 1e-7 * (1.0 + linalg.scaled_norm(m))


# ---------------------------------------------------------------------------
# planar hull helpers (complex numbers as points)
# ---------------------------------------------------------------------------

def convex_hull(points) -> np.ndarray:
    """Convex hull of complex points, counterclockwise, degenerate-safe.

    Returns 1 point for a coincident cloud, 2 for a collinear one, else
    the CCW vertex cycle (no vertex repeated).
    """
    pts = np.unique(np.asarray(points, dtype=complex))
    order = np.lexsort((pts.imag, pts.real))
    pts = pts[order]
    if pts.size <= 2:
        return pts

    def cross(o, a, b):
        return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1], dtype=complex)
    if hull.size == 0:  # fully collinear cloud
        return np.array([pts[0], pts[-1]], dtype=complex)
    return hull


def _point_segment_distance(z: complex, a: complex, b: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(z - a)
    t = ((z - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * ab))


def hull_margin(hull, z: complex) -> float:
    """Signed inwards distance from ``z`` to a convex hull.

    Positive means strictly inside by that amount; negative means outside
    (or, for degenerate point/segment hulls, off the carrier set).
    """
    h = np.asarray(hull, dtype=complex)
    if h.size == 0:
        raise InvalidParams("empty hull")
    if h.size == 1:
        return -abs(z - h[0])
    if h.size == 2:
        return -_point_segment_distance(z, h[0], h[1])
    margin = np.inf
    for k in range(h.size):
        a = h[k]
        b = h[(k + 1) % h.size]
        ab = b - a
        length = abs(ab)
        if length == 0.0:
            continue
        # CCW polygon: positive cross product = z on the inner side of edge
        signed = ((ab.real) * (z.imag - a.imag) - (ab.imag) * (z.real - a.real)) / length
        margin = min(margin, signed)
    return float(margin)


def hull_contains(hull, z: complex, tol: float = 0.0) -> bool:
    return hull_margin(hull, z) >= -tol


# ---------------------------------------------------------------------------
# field-of-values boundary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FovBoundary:
    """Sampled boundary of a field of values, ordered by sweep angle.

    ``points[k]`` is the extreme point found in direction ``angles[k]``;
    the polyline is treated as cyclic.
    """

    points: np.ndarray
    angles: np.ndarray
    n_angles: int
    source_dim: int

    def hull(self) -> np.ndarray:
        return convex_hull(self.points)

    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.points)))

    def to_csv(self, path) -> None:
        """Write angle, re, im rows (deterministic %.17g formatting)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("angle,re,im\n")
            for ang, z in zip(self.angles, self.points):
                fh.write(f"{ang:.17g},{z.real:.17g},{z.imag:.17g}\n")


def fov_boundary(m, n_angles: int = DEFAULT_ANGLES) -> FovBoundary:
    """Sample the boundary of F(M) at ``n_angles`` equispaced directions."""
    a = linalg.as_square_matrix(m).astype(complex)
    if n_angles < 8:
        raise InvalidParams("n_angles must be at least 8")
    angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
    points = np.empty(n_angles, dtype=complex)
    for k, phi in enumerate(angles):
        rotated = np.exp(1j * phi) * a
        herm = 0.5 * (rotated + rotated.conj().T)
        dec = linalg.hermitian_eigen(herm)
        x = dec.vectors[:, -1]  # eigenvector of the largest eigenvalue
        points[k] = x.conj() @ (a @ x)
    return FovBoundary(points=points, angles=angles, n_angles=n_angles,
                       source_dim=a.shape[0])


def numerical_radius(m, n_angles: int = DEFAULT_ANGLES) -> float:
    """max |z| over F(M), from the sampled boundary.

    The estimate is refined with the spectral radius (a subset of F(M)),
    which keeps ``numerical_radius >= rho(M)`` even where the angular grid
    straddles the extremal direction, and makes it exact for normal M.
    """
    boundary = fov_boundary(m, n_angles)
    rho = float(np.max(np.abs(linalg.general_eigenvalues(m))))
    return max(boundary.max_modulus(), rho)


def transformed_fov(a, b, p: float, n_angles: int = DEFAULT_ANGLES) -> FovBoundary:
    """Boundary of F(A^{p/2-1} B A^{-p/2}).

    p = 0 and p = 2 reduce to F(A^{-1} B) and F(B A^{-1}) and only need a
    nonsingular A; every other p builds the fractional powers from the
    eigenbasis of a Hermitian positive definite A.
    """
    return fov_boundary(transformed_matrix(a, b, p), n_angles)


def transformed_matrix(a, b, p: float) -> np.ndarray:
    """The similarity-weighted matrix A^{p/2-1} B A^{-p/2}."""
    am = linalg.as_square_matrix(a)
    bm = linalg.as_square_matrix(b)
    if am.shape != bm.shape:
        raise InvalidParams(f"shape mismatch: {am.shape} vs {bm.shape}")
    if p == 0.0:
        return linalg.solver_for(am).solve(bm)
    if p == 2.0:
        return linalg.solver_for(am.T).solve(bm.T).T
    dec = linalg.hermitian_eigen(am)
    floor = linalg.PD_TOL * linalg.scaled_norm(am)
    if np.min(dec.values) <= floor:
        raise NotPositiveDefinite("fractional powers need a positive definite matrix")
    v = dec.vectors
    left = (v * dec.values[None, :] ** (0.5 * p - 1.0)) @ v.conj().T
    right = (v * dec.values[None, :] ** (-0.5 * p)) @ v.conj().T
    return left @ bm @ right


def spectrum_in_fov_check(m, n_angles: int = DEFAULT_ANGLES) -> bool:
    """Self-test: every eigenvalue lies in the hull of the sampled boundary."""
    boundary = fov_boundary(m, n_angles)
    hull = boundary.hull()
    tol = fov_margin(m)
    return all(hull_contains(hull, complex(lam), tol)
               for lam in linalg.general_eigenvalues(m))
