"""Total variation distance between spherical Gaussians, in closed form.

Conventions used throughout:

    eta = max(sigma1/sigma2, sigma2/sigma1) >= 1   (scale ratio)
    C   = ||mu1 - mu2|| / max(sigma1, sigma2)      (normalized center gap)

For equal scales the optimal separating set is a halfspace and

    TV = 1 - 2 Phi(-C / 2).

For unequal scales the set where the narrower density dominates is a ball;
rescaling to the narrower Gaussian's coordinates turns both of its
probabilities into noncentral chi-square CDFs, so TV is computed exactly
from two noncentral chi-square evaluations.  When additionally the centers
coincide the ball is centered and

    TV = F_d(2 eta^2 log eta / (eta^2 - 1)) - F_d(2 log eta / (eta^2 - 1)),

with F_d the Gamma(d/2, d/2) CDF.  The threshold inversions C0(rho) and
eta0(rho) return the parameter values at which these formulas hit a target
TV level 1 - rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DimensionMismatch, DomainError

# Scale ratios this close to 1 are handled by the equal-sigma limit formula:
# the ball construction divides by eta^2 - 1 and loses all precision here.
_ETA_EQUAL_TOL = 1e-9


@dataclass(frozen=True)
class SphericalGaussian:
    """One component N_d(mu, sigma^2 I_d)."""

    mean: tuple[float, ...]
    sigma: float

    def __post_init__(self) -> None:
        mean = tuple(float(m) for m in self.mean)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "sigma", float(self.sigma))
        if self.sigma <= 0.0 or not math.isfinite(self.sigma):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma!r}")
        if len(mean) < 1:
            raise DomainError("mean must have at least one coordinate")
        if not all(math.isfinite(m) for m in mean):
            raise DomainError("mean coordinates must be finite")

    @property
    def dim(self) -> int:
        return len(self.mean)

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        """Log density at points x of shape (..., dim)."""
        x = np.asarray(x, dtype=float)
        sq = np.sum((x - np.asarray(self.mean)) ** 2, axis=-1)
        d = self.dim
        return -0.5 * sq / self.sigma**2 - d * math.log(self.sigma) - 0.5 * d * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianPairGeometry:
    """Normalized geometry of a pair of spherical Gaussians."""

    center_distance: float
    eta: float
    c_over_max_sigma: float
    c_over_sum_sigma: float


def pair_geometry(p1: SphericalGaussian, p2: SphericalGaussian) -> GaussianPairGeometry:
    """Center distance and the three standard normalizations for a pair."""
    if p1.dim != p2.dim:
        raise DimensionMismatch(f"dimensions differ: {p1.dim} vs {p2.dim}")
    dist = math.dist(p1.mean, p2.mean)
    eta = max(p1.sigma / p2.sigma, p2.sigma / p1.sigma)
    return GaussianPairGeometry(
        center_distance=dist,
        eta=eta,
        c_over_max_sigma=dist / max(p1.sigma, p2.sigma),
        c_over_sum_sigma=dist / (p1.sigma + p2.sigma),
    )


def tv_same_center(eta: float, d: int) -> float:
    """TV between N_d(0, I) and N_d(0, eta^2 I) for eta >= 1.

    Continuous at eta = 1 where the value is 0 (the defining expression is
    0/0 there and is handled as the analytic limit).
    """
    if eta < 1.0:
        raise DomainError(f"tv_same_center requires eta >= 1, got {eta!r}")
    if eta - 1.0 < _ETA_EQUAL_TOL:
        return 0.0
    u = 2.0 * math.log(eta) / (eta * eta - 1.0)
    return specfun.gamma_cdf_fd(eta * eta * u, d) - specfun.gamma_cdf_fd(u, d)


def tv_equal_sigma(c: float) -> float:
    """TV between two spherical Gaussians with common sigma at normalized
    center distance c = ||mu1 - mu2|| / sigma."""
    if c < 0.0:
        raise DomainError(f"tv_equal_sigma requires C >= 0, got {c!r}")
    return 1.0 - 2.0 * specfun.normal_cdf(-0.5 * c)


def tv_exact(p1: SphericalGaussian, p2: SphericalGaussian) -> float:
    """Exact TV(P1, P2) for spherical Gaussians in any dimension.

    Equal sigmas reduce to the halfspace formula; otherwise the dominance
    region of the narrower Gaussian is a ball and both its probabilities are
    noncentral chi-square CDFs.

    The ball construction divides by eta^2 - 1, so for scale ratios within
    about 1e-4 of 1 (yet above the 1e-9 equal-scale switch) with separated
    centers, the noncentrality exceeds what the series evaluates within its
    term cap and NoConvergence is raised rather than returning a degraded
    value.
    """
    if p1.dim != p2.dim:
        raise DimensionMismatch(f"dimensions differ: {p1.dim} vs {p2.dim}")
    d = p1.dim
    # Narrower component first so the dominance ball formula applies as-is.
    narrow, wide = (p1, p2) if p1.sigma <= p2.sigma else (p2, p1)
    eta = wide.sigma / narrow.sigma
    dist = math.dist(p1.mean, p2.mean)

    if eta - 1.0 < _ETA_EQUAL_TOL:
        return tv_equal_sigma(dist / max(p1.sigma, p2.sigma))
    if dist == 0.0:
        return tv_same_center(eta, d)

    c = dist / wide.sigma
    em1 = eta * eta - 1.0
    s = c * c * eta * eta + 2.0 * d * em1 * math.log(eta)
    # In the narrow component's standardized coordinates the ball has
    # radius r1 and center at distance sqrt(lam1) from the origin; for the
    # wide component the same set maps to radius r2 / center sqrt(lam2).
    r1_sq = eta * eta * s / (em1 * em1)
    r2_sq = s / (em1 * em1)
    lam1 = (c * eta / em1) ** 2
    lam2 = (c * eta * eta / em1) ** 2
    tv = specfun.noncentral_chisq_cdf(r1_sq, d, lam1) - specfun.noncentral_chisq_cdf(r2_sq, d, lam2)
    return min(1.0, max(0.0, tv))


def threshold_c0_of_rho(rho: float) -> float:
    """C0(rho) = 2 Phi^{-1}(1 - rho/2): the normalized center distance at
    which equal-sigma Gaussians have TV exactly 1 - rho."""
    if not 0.0 < rho < 1.0:
        raise DomainError(f"threshold_c0_of_rho requires rho in (0,1), got {rho!r}")
    return 2.0 * specfun.normal_quantile(1.0 - 0.5 * rho)


def threshold_eta0_of_rho(rho: float, d: int) -> float:
    """The unique eta >= 1 with tv_same_center(eta, d) = 1 - rho.

    The same-center TV is increasing in eta, so a doubling bracket starting
    at [1 + 1e-9, 2] always captures the root for rho in (0, 1).
    """
    if not 0.0 < rho < 1.0:
        raise DomainError(f"threshold_eta0_of_rho requires rho in (0,1), got {rho!r}")
    target = 1.0 - rho

    def gap(eta: float) -> float:
        return tv_same_center(eta, d) - target

    bracket = specfun.bracket_root(gap, 1.0 + 1e-9, 2.0)
    return specfun.find_root(gap, bracket, tol=1e-12)


def overlap_boundaries_1d(
    p1: SphericalGaussian, p2: SphericalGaussian
) -> tuple[float, float]:
    """Density-equality points of two 1-D Gaussians.

    For unequal sigmas these are the two roots of p1(x) = p2(x); for equal
    sigmas there is a single crossing at the midpoint and the upper boundary
    is reported as +inf.
    """
    if p1.dim != 1 or p2.dim != 1:
        raise DimensionMismatch("overlap_boundaries_1d requires 1-D Gaussians")
    mu1, s1 = p1.mean[0], p1.sigma
    mu2, s2 = p2.mean[0], p2.sigma
    if max(s1 / s2, s2 / s1) - 1.0 < _ETA_EQUAL_TOL:
        return 0.5 * (mu1 + mu2), math.inf
    inv = 1.0 / s1**2 - 1.0 / s2**2
    lin = mu1 / s1**2 - mu2 / s2**2
    rad = math.sqrt((mu1 - mu2) ** 2 / (s1**2 * s2**2) + 2.0 * inv * math.log(s2 / s1))
    x_a = (lin + rad) / inv
    x_b = (lin - rad) / inv
    return (x_a, x_b) if x_a <= x_b else (x_b, x_a)
