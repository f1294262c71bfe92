"""Certificate constants: the initial bounds (c0, eta0), their fixed-point
refinement to (c*, eta*), the hyperplane margin, and the proportion bound.

Given a class M(K, pi_min, pi_max, c), a fit level epsilon with
pi_min > 2 epsilon, and the ambient dimension d:

    c0   = 2 Phi^{-1}(1 - (pi_min - 2 eps) / 2)

    eta0 solves  L(eta) = tv_same_center(eta, d)  where
    L(eta) = 1 - (pi_min - 2 eps)/pi_max
             + (2 (1 - pi_max)/pi_max) Phi(-eta c0 / 2)
    (L decreases from 1 - pi_min + 2 eps, the TV side increases from 0,
    so the root exists and is unique).

The product c0 * eta0 is the minimum separation for any of the guarantees
to hold.  When c exceeds it, the pair (c0, eta0) can be tightened by
iterating the component-TV bound

    UB(c_b, eta_b) = 2 eps / pi_min
                   + (2 (1 - pi_min)/pi_min) Phi(-(c + c/eta_b - c_b)/2)

through c_{t+1} = 2 Phi^{-1}(1/2 + UB_t/2) and tv_same_center(eta_{t+1}, d)
= UB_t.  Both sequences decrease monotonically to the fixed point
(c*, eta*), which parametrizes the final mean / scale-ratio / proportion
bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DomainError,
    InfeasibleEpsilon,
    NoConvergence,
    RefinementInapplicable,
    SeparationTooSmall,
)
from .gaussian_tv import threshold_eta0_of_rho, tv_same_center
from .mixture import ModelClassSpec
from .specfun import bracket_root, find_root, normal_cdf, normal_quantile

_STEP_TOL = 1e-10
_MAX_REFINE_ITER = 1000
_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class StabilityInputs:
    """Class constants plus fit level and dimension, as one bundle."""

    spec: ModelClassSpec
    epsilon: float
    d: int

    def __post_init__(self) -> None:
        if self.epsilon < 0.0 or not math.isfinite(self.epsilon):
            raise DomainError(f"epsilon must be a finite nonnegative real, got {self.epsilon!r}")
        if self.d < 1 or int(self.d) != self.d:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")


@dataclass(frozen=True)
class RefinementTrace:
    """Iterates of the tightening map, ending at the fixed point."""

    iterates: tuple[tuple[float, float, float], ...]  # (c_t, eta_t, UB(c_t, eta_t))
    converged: bool
    c_star: float
    eta_star: float


def solve_c0(pi_min: float, epsilon: float) -> float:
    """Initial mean-shift constant c0 = 2 Phi^{-1}(1 - (pi_min - 2 eps)/2)."""
    gap = pi_min - 2.0 * epsilon
    if gap <= 0.0:
        raise InfeasibleEpsilon(f"need pi_min > 2*epsilon, got pi_min={pi_min}, epsilon={epsilon}")
    if gap >= 1.0:
        return 0.0  # pi_min = 1, eps = 0: the quantile argument is exactly 1/2
    return 2.0 * normal_quantile(1.0 - 0.5 * gap)


def _eta0_gap(spec: ModelClassSpec, epsilon: float, d: int, c0: float):
    gap = spec.pi_min - 2.0 * epsilon
    coeff = 2.0 * (1.0 - spec.pi_max) / spec.pi_max

    def f(eta: float) -> float:
        left = 1.0 - gap / spec.pi_max + coeff * normal_cdf(-0.5 * eta * c0)
        return left - tv_same_center(eta, d)

    return f


def solve_eta0(inputs: StabilityInputs) -> float:
    """Unique eta0 >= 1 equating the decreasing left side with the
    increasing same-center TV; found by bracketed bisection."""
    c0 = solve_c0(inputs.spec.pi_min, inputs.epsilon)
    f = _eta0_gap(inputs.spec, inputs.epsilon, inputs.d, c0)
    bracket = bracket_root(f, 1.0 + 1e-12, 2.0)
    return find_root(f, bracket, tol=1e-12)


def min_separation(inputs: StabilityInputs) -> float:
    """The separation floor c0 * eta0 below which no certificate exists."""
    c0 = solve_c0(inputs.spec.pi_min, inputs.epsilon)
    return c0 * solve_eta0(inputs)


def ub(c_b: float, eta_b: float, inputs: StabilityInputs) -> float:
    """Component-TV upper bound implied by current constants (c_b, eta_b).

    Raises RefinementInapplicable when the pairwise dominance level rho
    exceeds (pi_min - 2 eps) / (1 - pi_min), outside which the bound is
    not valid.
    """
    if c_b < 0.0:
        raise DomainError(f"c_b must be nonnegative, got {c_b!r}")
    if eta_b < 1.0:
        raise DomainError(f"eta_b must be at least 1, got {eta_b!r}")
    pi_min = inputs.spec.pi_min
    eps = inputs.epsilon
    c = inputs.spec.c
    rho = 2.0 * normal_cdf(-0.5 * (c + c / eta_b - c_b))
    if rho > (pi_min - 2.0 * eps) / (1.0 - pi_min):
        raise RefinementInapplicable(
            f"dominance level rho={rho:.6g} exceeds (pi_min-2eps)/(1-pi_min)"
        )
    return 2.0 * eps / pi_min + (1.0 - pi_min) / pi_min * rho


def refine(inputs: StabilityInputs) -> RefinementTrace:
    """Iterate the tightening map from (c0, eta0) down to its fixed point.

    Stops when both coordinates move less than 1e-10 (or at 1000
    iterations), then verifies the fixed-point residuals of the defining
    equations are below 1e-8.

    Raises SeparationTooSmall when c <= c0 * eta0 and NoConvergence if the
    residual check fails.
    """
    spec = inputs.spec
    c0 = solve_c0(spec.pi_min, inputs.epsilon)
    eta0 = solve_eta0(inputs)
    if spec.c <= c0 * eta0:
        raise SeparationTooSmall(
            f"class separation c={spec.c:.6g} is not above the floor c0*eta0={c0 * eta0:.6g}"
        )

    ceiling = 1.0 - spec.pi_min + 2.0 * inputs.epsilon
    c_t, eta_t = c0, eta0
    u_t = ub(c_t, eta_t, inputs)
    iterates = [(c_t, eta_t, u_t)]
    converged = False
    for _ in range(_MAX_REFINE_ITER):
        if not u_t < ceiling:
            raise RefinementInapplicable(
                f"component TV bound {u_t:.6g} does not improve on {ceiling:.6g}"
            )
        if u_t == 0.0:
            # Underflowed bound: (0, 1) is the exact degenerate fixed point.
            c_next, eta_next = 0.0, 1.0
        else:
            c_next = 2.0 * normal_quantile(0.5 + 0.5 * u_t)
            eta_next = threshold_eta0_of_rho(1.0 - u_t, inputs.d)
        if c_next >= c_t or eta_next >= eta_t:
            # The map is strictly decreasing in exact arithmetic, so a
            # non-strict step means double precision is exhausted.
            converged = True
            break
        moved = max(c_t - c_next, eta_t - eta_next)
        c_t, eta_t = c_next, eta_next
        u_t = ub(c_t, eta_t, inputs)
        iterates.append((c_t, eta_t, u_t))
        if moved < _STEP_TOL:
            converged = True
            break

    res_c = abs((1.0 - 2.0 * normal_cdf(-0.5 * c_t)) - u_t)
    res_eta = abs(tv_same_center(eta_t, inputs.d) - u_t)
    if not converged or max(res_c, res_eta) > _RESIDUAL_TOL:
        raise NoConvergence(
            f"refinement residuals ({res_c:.3g}, {res_eta:.3g}) above {_RESIDUAL_TOL}"
        )
    return RefinementTrace(
        iterates=tuple(iterates), converged=True, c_star=c_t, eta_star=eta_t
    )


def margin_C(c: float, c_star: float, eta_star: float) -> float:
    """Hyperplane margin separating two certified component pairs,

        C = sqrt(c^2 / (2 eta*^2) + (c - c*/2)^2 / (2 eta*)
                 - c*^2 (1 + eta*)^2 / (16 eta*^2)) - c*/2.

    Positive whenever c > c* eta* and eta* >= 1; a negative radicand
    signals a precondition violation and raises DomainError.
    """
    if eta_star < 1.0:
        raise DomainError(f"eta_star must be at least 1, got {eta_star!r}")
    e2 = eta_star * eta_star
    radicand = (
        c * c / (2.0 * e2)
        + (c - 0.5 * c_star) ** 2 / (2.0 * eta_star)
        - c_star * c_star * (1.0 + eta_star) ** 2 / (16.0 * e2)
    )
    if radicand < 0.0:
        raise DomainError(f"negative radicand {radicand!r}: margin preconditions violated")
    return math.sqrt(radicand) - 0.5 * c_star


def proportion_bound(inputs: StabilityInputs, c_star: float, eta_star: float) -> float:
    """Bound on |pi_i - pi'_i| for matched components:
    2 eps + (1 - pi_min + pi_max) Phi(-C(c, c*, eta*))."""
    spec = inputs.spec
    margin = margin_C(spec.c, c_star, eta_star)
    return 2.0 * inputs.epsilon + (1.0 - spec.pi_min + spec.pi_max) * normal_cdf(-margin)


def proportion_bound_union(inputs: StabilityInputs, c_star: float, eta_star: float) -> float:
    """K-dependent variant of the proportion bound, carrying the explicit
    union factor K-1 over the other component pairs:
    2 eps + (1 + pi_max - pi_min) (K - 1) Phi(-C(c, c*, eta*)).

    Diagnostic only; the certificate reports :func:`proportion_bound`.
    """
    spec = inputs.spec
    margin = margin_C(spec.c, c_star, eta_star)
    rho = (spec.K - 1) * normal_cdf(-margin)
    return 2.0 * inputs.epsilon + (1.0 + spec.pi_max - spec.pi_min) * rho


def c_single(pi_min: float, epsilon: float, d: int) -> float:
    """Separation above which no single spherical Gaussian can be within
    total variation 2 eps of any mixture in M(K, pi_min, c).

    Returns c0' * eta0' with c0' = 2 Phi^{-1}(1 - (pi_min - eps)/4) and
    eta0' solving

        1 - pi_min + eps + 2 Phi(-eta c0'/2) = tv_same_center(eta, d).
    """
    if epsilon >= pi_min:
        raise InfeasibleEpsilon(f"need epsilon < pi_min, got {epsilon} >= {pi_min}")
    if d < 1 or int(d) != d:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    c0p = 2.0 * normal_quantile(1.0 - 0.25 * (pi_min - epsilon))

    def f(eta: float) -> float:
        left = 1.0 - pi_min + epsilon + 2.0 * normal_cdf(-0.5 * eta * c0p)
        return left - tv_same_center(eta, d)

    bracket = bracket_root(f, 1.0 + 1e-9, 2.0)
    eta0p = find_root(f, bracket, tol=1e-12)
    return c0p * eta0p
