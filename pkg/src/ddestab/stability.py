"""Stability machinery for theta-methods applied to y' = -A y + B y(t - tau).

The one-step map of the method acting on the stacked history
(y_n, ..., y_{n-m}) is the companion matrix W; the method is
(asymptotically) stable iff rho(W) < 1.  The scalar reduction replaces a
mode of the system by the pair (y, mu) with y = -h*lambda < 0 and checks
whether all roots of the stability polynomial

    P(z) = a(z) - y c(z) + y mu b(z),
    a(z) = z^{m+1} - z^m,
    b(z) = theta (u z^2 + (1-u) z) + (1-theta) (u z + (1-u)),
    c(z) = theta z^{m+1} + (1-theta) z^m,

lie strictly inside the unit disk (the region D_y).  The limit
y -> -infinity uses the reduced equation c(z) - mu b(z) = 0.

Membership in D_y is always decided by root computation, never by
point-in-polygon tests against the boundary curve Gamma_y: the curve
self-intersects for larger m and only its innermost loop bounds D_y,
while root-counting is robust for every theta, u, m.

Certificates offered, strongest first:

* ``unconditional_certificate`` -- u = 0, theta > 1/2: if the field of
  values F(A^{p/2-1} B A^{-p/2}) fits in the open unit disk for some p,
  the method is stable for every step size.
* ``step_certificate`` -- theta = 1, u = 0: the regions D_y are nested
  (y1 < y2 < 0 implies D_{y1} subset of D_{y2}), so containment of the
  transformed field of values in D_{-h*lambda_max(A)} certifies stability
  for the given step.
* ``simdiag_analysis`` -- A, B simultaneously diagonalizable: exact
  mode-by-mode verdicts from the eigenvalue pairs.
* ``oracle_stability`` -- brute force: the spectral radius of W itself.
* ``inthout_condition`` -- sampled resolvent criterion
  sup_{Re xi = 0} rho((xi I - A)^{-1} B) < 1 together with
  -1 not in sigma(A^{-1} B); a numerical screen, not a proof.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import fov, linalg
from .errors import (
    ComplexSpectrum,
    InvalidParams,
    NotHermitian,
    NotPositiveDefinite,
    NotSimultaneouslyDiagonalizable,
    Singular,
    UnsupportedScheme,
)

ROOT_TOL = 1e-9
NEG_INF = float("-inf")
DEFAULT_P_GRID = (0.0, 1.0, 2.0)

UNCONDITIONALLY_STABLE = "UnconditionallyStable"
STABLE_FOR_THIS_STEP = "StableForThisStep"
UNCERTIFIED = "Uncertified"
CERTIFIED_UNSTABLE = "CertifiedUnstable"


@dataclass(frozen=True)
class ThetaScheme:
    """Method parameters theta, u plus the delay grid tau = (m - u) h.

    theta in [0, 1] blends the explicit (0) and implicit (1) Euler ends;
    u in [0, 1) offsets the delay from a grid multiple and is resolved by
    linear interpolation.  m >= 3 is required whenever u > 0 (the one-step
    matrix needs three distinct delayed columns); m >= 1 suffices at u = 0.
    """

    theta: float
    u: float
    m: int
    tau: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidParams(f"theta must lie in [0, 1], got {self.theta}")
        if not 0.0 <= self.u < 1.0:
            raise InvalidParams(f"u must lie in [0, 1), got {self.u}")
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParams(f"m must be a positive integer, got {self.m}")
        if self.u > 0.0 and self.m < 3:
            raise InvalidParams("m >= 3 is required when u > 0")
        if not self.tau > 0.0:
            raise InvalidParams(f"tau must be positive, got {self.tau}")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def h(self) -> float:
        """Step size tau / (m - u)."""
        return self.tau / (self.m - self.u)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "u": self.u, "m": self.m,
                "tau": self.tau, "h": self.h}


@dataclass(frozen=True)
class StabilityPolynomial:
    """Coefficients (constant first) of the scalar stability polynomial."""

    coeffs: np.ndarray
    y: float
    mu: complex
    scheme: ThetaScheme

    def roots(self) -> np.ndarray:
        return linalg.poly_roots(self.coeffs)


def _delayed_weights(theta: float, u: float) -> np.ndarray:
    # b(z) coefficients: constant, z, z^2
    return np.array([
        (1.0 - theta) * (1.0 - u),
        theta * (1.0 - u) + (1.0 - theta) * u,
        theta * u,
    ])


def stability_polynomial(scheme: ThetaScheme, y: float, mu: complex) -> StabilityPolynomial:
    """Assemble P(z) = a(z) - y c(z) + y mu b(z), or c(z) - mu b(z) at y = -inf."""
    if not (y < 0.0 or y == NEG_INF):
        raise InvalidParams(f"y must be negative (or -inf), got {y}")
    m, theta, u = scheme.m, scheme.theta, scheme.u
    coeffs = np.zeros(m + 2, dtype=complex)
    b = _delayed_weights(theta, u)
    if math.isinf(y):
        coeffs[m + 1] += theta
        coeffs[m] += 1.0 - theta
        coeffs[:3] -= mu * b
    else:
        coeffs[m + 1] += 1.0 - y * theta
        coeffs[m] += -1.0 - y * (1.0 - theta)
        coeffs[:3] += y * mu * b
    return StabilityPolynomial(coeffs=coeffs, y=y, mu=complex(mu), scheme=scheme)


@dataclass(frozen=True)
class DyMembership:
    """Outcome of a D_y membership test.

    ``margin`` is 1 - max|root|: positive inside, negative outside,
    within ROOT_TOL of zero means marginal (no stability claim either way).
    """

    inside: bool
    margin: float
    max_root_modulus: float

    def __bool__(self) -> bool:
        return self.inside

    @property
    def marginal(self) -> bool:
        return abs(self.margin) <= ROOT_TOL


def in_dy(mu: complex, y: float, scheme: ThetaScheme) -> DyMembership:
    """Does mu belong to the stability region D_y of the scheme?

    Decided by computing all roots of the stability polynomial; true iff
    every root modulus is below 1 - ROOT_TOL.
    """
    poly = stability_polynomial(scheme, y, mu)
    radius = float(np.max(np.abs(poly.roots())))
    return DyMembership(inside=radius < 1.0 - ROOT_TOL,
                        margin=1.0 - radius,
                        max_root_modulus=radius)


# ---------------------------------------------------------------------------
# boundary curve Gamma_y (u = 0)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionBoundary:
    """Samples mu(alpha, y) of the curve Gamma_y, symmetric in alpha."""

    y: float
    alphas: np.ndarray
    mus: np.ndarray
    theta: float
    u: float
    m: int

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("alpha,re,im\n")
            for a, z in zip(self.alphas, self.mus):
                fh.write(f"{a:.17g},{z.real:.17g},{z.imag:.17g}\n")


def gamma_y(scheme: ThetaScheme, y: float, n_samples: int = 512) -> RegionBoundary:
    """Trace mu(alpha, y) = z^m (1 - z + y(1-theta+z theta)) / (y(1-theta+z theta))
    with z = e^{i alpha} on a symmetric alpha grid through 0 (u = 0 only).
    """
    if scheme.u != 0.0:
        raise UnsupportedScheme("Gamma_y is parametrized only for u = 0")
    if not y < 0.0:
        raise InvalidParams(f"y must be negative, got {y}")
    if n_samples < 16:
        raise InvalidParams("n_samples must be at least 16")
    # build the grid from a half axis so alpha -> -alpha symmetry is exact
    half = np.linspace(0.0, np.pi, n_samples // 2 + 1)
    alphas = np.concatenate([-half[:0:-1], half])
    z = np.exp(1j * alphas)
    denom = y * (1.0 - scheme.theta + z * scheme.theta)
    mus = z ** scheme.m * (1.0 - z + denom) / denom
    return RegionBoundary(y=y, alphas=alphas, mus=mus,
                          theta=scheme.theta, u=scheme.u, m=scheme.m)


# ---------------------------------------------------------------------------
# companion matrix and brute-force oracle
# ---------------------------------------------------------------------------

def build_w(a, b, scheme: ThetaScheme) -> np.ndarray:
    """One-step matrix W mapping (y_n, ..., y_{n-m}) to (y_{n+1}, ..., y_{n-m+1}).

    First block row: (I + theta h A)^{-1} applied to
    [I - (1-theta) h A | ... | h B theta u | hB(theta(1-u)+(1-theta)u) | hB(1-theta)(1-u)]
    at the block columns of y_n, y_{n-m+2}, y_{n-m+1} and y_{n-m};
    coinciding columns accumulate.  Rows below shift the history.
    """
    am = linalg.as_square_matrix(a)
    bm = linalg.as_square_matrix(b)
    if am.shape != bm.shape:
        raise InvalidParams(f"A and B shapes differ: {am.shape} vs {bm.shape}")
    n = am.shape[0]
    m, h, theta, u = scheme.m, scheme.h, scheme.theta, scheme.u
    dtype = np.result_type(am, bm, 1.0)
    eye = np.eye(n, dtype=dtype)
    weights = h * _delayed_weights(theta, u)  # columns y_{n-m}, y_{n-m+1}, y_{n-m+2}

    row0 = np.zeros((n, (m + 1) * n), dtype=dtype)
    row0[:, :n] += eye - (1.0 - theta) * h * am
    for k, w in enumerate(weights):
        if w != 0.0:
            col = m - k
            row0[:, col * n:(col + 1) * n] += w * bm

    solver = linalg.solver_for(eye + theta * h * am)
    w_mat = np.zeros(((m + 1) * n, (m + 1) * n), dtype=dtype)
    w_mat[:n, :] = solver.solve(row0)
    for r in range(1, m + 1):
        w_mat[r * n:(r + 1) * n, (r - 1) * n:r * n] = eye
    return w_mat


@dataclass(frozen=True)
class OracleVerdict:
    """Spectral-radius verdict for the one-step matrix W."""

    stable: bool
    spectral_radius: float
    dim: int

    def __bool__(self) -> bool:
        return self.stable

    @property
    def marginal(self) -> bool:
        return abs(self.spectral_radius - 1.0) <= ROOT_TOL

    @property
    def certified_unstable(self) -> bool:
        return self.spectral_radius >= 1.0 + ROOT_TOL


def oracle_stability(a, b, scheme: ThetaScheme) -> OracleVerdict:
    """Brute-force check: build W and test rho(W) < 1 - ROOT_TOL."""
    w_mat = build_w(a, b, scheme)
    radius = float(np.max(np.abs(linalg.general_eigenvalues(w_mat))))
    return OracleVerdict(stable=radius < 1.0 - ROOT_TOL,
                         spectral_radius=radius, dim=w_mat.shape[0])


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Evidence:
    """One recorded check: name, parameter (p value or eigen-pair index),
    margin (sign convention of the check) and an optional note."""

    check: str
    index: object = None
    margin: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {"check": self.check, "index": self.index,
                "margin": self.margin, "note": self.note}


@dataclass(frozen=True)
class StabilityReport:
    verdict: str
    evidence: tuple = field(default_factory=tuple)
    scheme: ThetaScheme | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "evidence": [e.to_dict() for e in self.evidence],
            "scheme": self.scheme.to_dict() if self.scheme else None,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def _spectrum_obstructed(a, b) -> tuple[bool, float]:
    """rho(A^{-1} B): similarity-invariant across every p, so one failed
    spectral check rules the whole p family out."""
    rho = float(np.max(np.abs(linalg.general_eigenvalues(fov.transformed_matrix(a, b, 0.0)))))
    return rho >= 1.0, rho


def unconditional_certificate(a, b, scheme: ThetaScheme,
                              p_grid=DEFAULT_P_GRID,
                              n_angles: int = fov.DEFAULT_ANGLES) -> StabilityReport:
    """Certify stability for every step size (u = 0, theta > 1/2 only).

    Scans the p grid for F(A^{p/2-1} B A^{-p/2}) inside the open unit
    disk, with the numerical radius required to clear 1 by the inflation
    margin.  Outside the scheme hypotheses the verdict is Uncertified with
    the reason recorded (for theta <= 1/2 no mu can ever qualify).
    """
    if scheme.u != 0.0 or scheme.theta <= 0.5:
        reason = ("unconditional region is empty for theta <= 1/2"
                  if scheme.u == 0.0 else "certificate requires u = 0")
        return StabilityReport(UNCERTIFIED, (Evidence("scheme-hypotheses", note=reason),),
                               scheme)
    evidence = []
    obstructed, rho = _spectrum_obstructed(a, b)
    if obstructed:
        evidence.append(Evidence("spectrum-obstruction", margin=1.0 - rho,
                                 note="an eigenvalue of A^{p/2-1} B A^{-p/2} has "
                                      "modulus >= 1 for every p; certificate inapplicable"))
        return StabilityReport(UNCERTIFIED, tuple(evidence), scheme)
    for p in p_grid:
        try:
            t_mat = fov.transformed_matrix(a, b, p)
        except (NotHermitian, NotPositiveDefinite) as exc:
            evidence.append(Evidence("fov-unit-disk", index=p, note=f"skipped: {exc}"))
            continue
        radius = fov.numerical_radius(t_mat, n_angles)
        needed = fov.fov_margin(t_mat)
        evidence.append(Evidence("fov-unit-disk", index=p, margin=1.0 - radius))
        if radius < 1.0 - needed:
            return StabilityReport(UNCONDITIONALLY_STABLE, tuple(evidence), scheme)
    return StabilityReport(UNCERTIFIED, tuple(evidence), scheme)


def step_certificate(a, b, scheme: ThetaScheme,
                     p_grid=DEFAULT_P_GRID,
                     n_angles: int = fov.DEFAULT_ANGLES) -> StabilityReport:
    """Certify stability for this particular step size (theta = 1, u = 0).

    Region nesting collapses the intersection of D_y over y in -h F(A) to
    the single worst parameter y = -h lambda_max(A); each sampled point of
    the transformed field of values must pass in_dy with margin at least
    the inflation margin.
    """
    if scheme.theta != 1.0 or scheme.u != 0.0:
        return StabilityReport(
            UNCERTIFIED,
            (Evidence("scheme-hypotheses",
                      note="step certificate requires theta = 1 and u = 0"),),
            scheme)
    dec = linalg.hermitian_eigen(a)
    floor = linalg.PD_TOL * linalg.scaled_norm(a)
    if np.min(dec.values) <= floor:
        raise NotPositiveDefinite("step certificate needs positive definite A")
    y_worst = -scheme.h * float(dec.values[-1])
    evidence = []
    for p in p_grid:
        try:
            t_mat = fov.transformed_matrix(a, b, p)
        except (NotHermitian, NotPositiveDefinite) as exc:
            evidence.append(Evidence("fov-in-dy", index=p, note=f"skipped: {exc}"))
            continue
        boundary = fov.fov_boundary(t_mat, n_angles)
        needed = fov.fov_margin(t_mat)
        worst = min(in_dy(complex(z), y_worst, scheme).margin for z in boundary.points)
        evidence.append(Evidence("fov-in-dy", index=p, margin=worst,
                                 note=f"y = {y_worst:.6g}"))
        if worst >= needed:
            return StabilityReport(STABLE_FOR_THIS_STEP, tuple(evidence), scheme)
    return StabilityReport(UNCERTIFIED, tuple(evidence), scheme)


def simdiag_pairs(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalue pairs (lambda_i, gamma_i) sharing eigenvectors, sorted by
    descending lambda.  Raises when A's spectrum is not real positive or
    when A's eigenvectors fail to diagonalize B to 1e-8 relative."""
    am = linalg.as_square_matrix(a)
    bm = linalg.as_square_matrix(b)
    if am.shape != bm.shape:
        raise InvalidParams(f"A and B shapes differ: {am.shape} vs {bm.shape}")
    lam, vec = np.linalg.eig(am)
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0 or np.max(np.abs(lam.imag)) > 1e-8 * scale or np.min(lam.real) <= 0.0:
        raise ComplexSpectrum("eigenvalues of A must be real and positive")
    lam = lam.real
    d_b = linalg.solver_for(vec).solve(bm @ vec)
    off = d_b - np.diag(np.diag(d_b))
    b_norm = linalg.scaled_norm(bm)
    if b_norm > 0.0 and linalg.scaled_norm(off) > 1e-8 * b_norm:
        raise NotSimultaneouslyDiagonalizable(
            "eigenvectors of A do not diagonalize B to 1e-8 relative")
    gamma = np.diag(d_b)
    order = np.argsort(-lam)
    return lam[order], gamma[order]


def simdiag_analysis(a, b, scheme: ThetaScheme) -> StabilityReport:
    """Mode-by-mode verdict for simultaneously diagonalizable A, B.

    With mu_i = gamma_i / lambda_i and y_i = -lambda_i h:

    * all |mu_i| < 1, u = 0, theta > 1/2   -> UnconditionallyStable;
    * some Re(mu_i) >= 1, u = 0, theta = 1 -> CertifiedUnstable
      (unstable for every step size);
    * all mu_i in D_{y_i}                  -> StableForThisStep;
    * anything else                        -> Uncertified.
    """
    lam, gamma = simdiag_pairs(a, b)
    mus = gamma / lam
    evidence = []

    if scheme.u == 0.0 and scheme.theta > 0.5:
        worst = 1.0 - float(np.max(np.abs(mus)))
        evidence.append(Evidence("all-mu-in-unit-disk", margin=worst))
        if worst > ROOT_TOL:
            return StabilityReport(UNCONDITIONALLY_STABLE, tuple(evidence), scheme)

    if scheme.u == 0.0 and scheme.theta == 1.0:
        real_parts = mus.real
        if np.max(real_parts) >= 1.0:
            i = int(np.argmax(real_parts))
            evidence.append(Evidence("re-mu-at-least-one", index=i,
                                     margin=float(real_parts[i] - 1.0),
                                     note=f"mu_{i} = {mus[i]:.6g}"))
            return StabilityReport(CERTIFIED_UNSTABLE, tuple(evidence), scheme)

    all_inside = True
    any_marginal = False
    for i, (lam_i, mu_i) in enumerate(zip(lam, mus)):
        res = in_dy(complex(mu_i), -scheme.h * float(lam_i), scheme)
        evidence.append(Evidence("mu-in-dy", index=i, margin=res.margin,
                                 note=f"lambda = {lam_i:.6g}, mu = {mu_i:.6g}"))
        all_inside = all_inside and res.inside
        any_marginal = any_marginal or res.marginal
    if all_inside and not any_marginal:
        return StabilityReport(STABLE_FOR_THIS_STEP, tuple(evidence), scheme)
    return StabilityReport(UNCERTIFIED, tuple(evidence), scheme)


# ---------------------------------------------------------------------------
# sampled resolvent condition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InthoutResult:
    """Sampled resolvent screen along the imaginary axis.

    ``passed`` requires the sampled supremum below 1, the large-omega tail
    bound below 1, and the spectrum of A^{-1} B bounded away from -1.
    A finite sample cannot prove the supremum over the whole axis; treat a
    pass as strong evidence, not a certificate.
    """

    passed: bool
    margin: float
    sup_rho: float
    sup_omega: float
    minus_one_distance: float
    tail_bound: float

    def __bool__(self) -> bool:
        return self.passed


def inthout_condition(a, b, omega_max: float | None = None,
                      n_omega: int = 401) -> InthoutResult:
    """Evaluate sup over sampled xi = i omega of rho((xi I - A)^{-1} B).

    Expects A with spectrum in the open left half-plane (pass the negated,
    negative definite matrix of the delay system).  Samples a symmetric
    log-spaced omega grid plus omega = 0, then verifies the analytic tail
    bound ||B|| / (omega_max - ||A||) < 1 so the unsampled tail cannot
    violate the criterion.
    """
    am = linalg.as_square_matrix(a).astype(complex)
    bm = linalg.as_square_matrix(b).astype(complex)
    if np.max(linalg.general_eigenvalues(am).real) >= 0.0:
        raise InvalidParams("spectrum of A must lie in the open left half-plane")
    norm_a = float(np.linalg.norm(am, 2))
    norm_b = float(np.linalg.norm(bm, 2))
    if omega_max is None:
        omega_max = 1e4 * norm_a
    if omega_max <= norm_a:
        raise InvalidParams("omega_max must exceed ||A|| for the tail bound")
    half = max(1, (n_omega - 1) // 2)
    pos = np.logspace(np.log10(max(1e-8 * norm_a, 1e-300)), np.log10(omega_max), half)
    omegas = np.concatenate([-pos[::-1], [0.0], pos])

    eye = np.eye(am.shape[0], dtype=complex)
    sup_rho, sup_omega = -np.inf, 0.0
    for omega in omegas:
        shifted = 1j * omega * eye - am
        try:
            resolvent_b = linalg.solver_for(shifted).solve(bm)
        except Singular as exc:
            raise Singular(f"xi I - A singular at omega = {omega:.6g}") from exc
        rho = float(np.max(np.abs(linalg.general_eigenvalues(resolvent_b))))
        if rho > sup_rho:
            sup_rho, sup_omega = rho, float(omega)

    eigs = linalg.general_eigenvalues(linalg.solver_for(am).solve(bm))
    minus_one_distance = float(np.min(np.abs(eigs + 1.0)))
    tail_bound = norm_b / (omega_max - norm_a)
    passed = (sup_rho < 1.0 and tail_bound < 1.0
              and minus_one_distance > 1e-9 * (1.0 + float(np.max(np.abs(eigs)))))
    return InthoutResult(passed=passed, margin=1.0 - sup_rho, sup_rho=sup_rho,
                         sup_omega=sup_omega, minus_one_distance=minus_one_distance,
                         tail_bound=tail_bound)
