"""Special functions and a bisection root finder.

Everything downstream (TV formulas, certificate constants) reduces to four
scalar primitives:

    normal_cdf(x)            Phi(x), the standard normal CDF
    normal_quantile(p)       Phi^{-1}(p)
    gamma_cdf_fd(x, d)       F_d(x) = P(G <= x) for G ~ Gamma(d/2, d/2),
                             i.e. P(chi2_d <= d*x)
    noncentral_chisq_cdf(x, d, lam)
                             P(||Z + o||^2 <= x) for Z ~ N_d(0, I), ||o||^2 = lam

All four are pure scalar double-precision functions built on ``math`` only;
no third-party dependency.  Accuracy targets: 1e-14 absolute for the normal
CDF, 1e-12 for the gamma CDF, 1e-10 truncation for the noncentral series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, DomainError, NoConvergence

_SQRT2 = math.sqrt(2.0)

# Regularized incomplete gamma: series vs continued fraction split, and
# iteration caps.  Both expansions converge well past double precision
# within these caps for the shape range used here (a up to ~1e6).
_GAMMAINC_EPS = 1e-16
_GAMMAINC_MAX_ITER = 10_000

# Noncentral chi-square Poisson-mixture truncation.
_NCX2_TAIL = 1e-13
_NCX2_MAX_TERMS = 2_000_000


def normal_cdf(x: float) -> float:
    """Standard normal CDF Phi(x).

    Saturates to exactly 0.0 / 1.0 in the far tails (|x| beyond ~38).
    """
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_pdf(x: float) -> float:
    """Standard normal density phi(x)."""
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


# Coefficients of Acklam's rational initial approximation for the normal
# quantile (relative error ~1.15e-9 before polishing).
_ACKLAM_A = (-3.969683028665376e+01, 2.209460984245205e+02,
             -2.759285104469687e+02, 1.383577518672690e+02,
             -3.066479806614716e+01, 2.506628277459239e+00)
_ACKLAM_B = (-5.447609879822406e+01, 1.615858368580409e+02,
             -1.556989798598866e+02, 6.680131188771972e+01,
             -1.328068155288572e+01)
_ACKLAM_C = (-7.784894002430293e-03, -3.223964580411365e-01,
             -2.400758277161838e+00, -2.549732539343734e+00,
             4.374664141464968e+00, 2.938163982698783e+00)
_ACKLAM_D = (7.784695709041462e-03, 3.224671290700398e-01,
             2.445134137142996e+00, 3.754408661907416e+00)


def _acklam(p: float) -> float:
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    p_low, p_high = 0.02425, 1.0 - 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    if p > p_high:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF.

    Rational initial guess polished by one Newton step on ``normal_cdf``,
    which brings the error to the double-precision floor (|Phi(x)-p| well
    below 1e-12 for p away from the subnormal range).

    Raises DomainError for p outside the open interval (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    x = _acklam(p)
    # One Newton step; the residual is evaluated through erfc so the tails
    # do not lose precision to cancellation.
    err = normal_cdf(x) - p
    pdf = normal_pdf(x)
    if pdf > 0.0:
        x -= err / pdf
    return x


def _lower_gamma_reg_series(a: float, x: float) -> float:
    # P(a, x) by the ascending series, for x < a + 1.
    term = 1.0 / a
    total = term
    n = a
    for _ in range(_GAMMAINC_MAX_ITER):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * _GAMMAINC_EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NoConvergence(f"incomplete gamma series stalled at a={a}, x={x}")


def _upper_gamma_reg_cf(a: float, x: float) -> float:
    # Q(a, x) by the Lentz continued fraction, for x >= a + 1.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMAINC_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMAINC_EPS:
            return h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NoConvergence(f"incomplete gamma continued fraction stalled at a={a}, x={x}")


def lower_gamma_reg(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a)."""
    if a <= 0.0:
        raise DomainError(f"shape must be positive, got {a!r}")
    if x < 0.0:
        raise DomainError(f"argument must be nonnegative, got {x!r}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _lower_gamma_reg_series(a, x))
    return min(1.0, max(0.0, 1.0 - _upper_gamma_reg_cf(a, x)))


def gamma_cdf_fd(x: float, d: int) -> float:
    """CDF of the Gamma(d/2, d/2) distribution at x.

    Equals P(chi2_d <= d*x), the law of ||Z||^2 / d for Z ~ N_d(0, I_d).
    For d = 1 this is 2*Phi(sqrt(x)) - 1.

    Raises DomainError for x < 0 or d < 1.
    """
    if d < 1 or int(d) != d:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    if x < 0.0:
        raise DomainError(f"gamma_cdf_fd requires x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    return lower_gamma_reg(0.5 * d, 0.5 * d * x)


def noncentral_chisq_cdf(x: float, d: int, lam: float) -> float:
    """Noncentral chi-square CDF P(||Z + o||^2 <= x) with ||o||^2 = lam.

    Poisson mixture of central chi-square CDFs,

        sum_j  Pois(j; lam/2) * P(chi2_{d+2j} <= x),

    summed outward from the modal Poisson index so that large noncentrality
    does not underflow; truncated once the neglected Poisson weight is below
    1e-13 (total truncation error <= 1e-10 with margin to spare).

    Raises DomainError on negative x or lam, NoConvergence if the term cap
    is exceeded (noncentrality far beyond the intended desk scale).
    """
    if d < 1 or int(d) != d:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    if x < 0.0 or lam < 0.0:
        raise DomainError(f"noncentral_chisq_cdf requires x, lam >= 0, got {x!r}, {lam!r}")
    if x == 0.0:
        return 0.0
    half_lam = 0.5 * lam
    if half_lam == 0.0:
        return gamma_cdf_fd(x / d, d)

    y = 0.5 * x
    j0 = int(half_lam)  # modal Poisson index; summing outward avoids underflow
    log_w0 = -half_lam + j0 * math.log(half_lam) - math.lgamma(j0 + 1.0)
    w0 = math.exp(log_w0)
    a0 = 0.5 * d + j0
    t0 = lower_gamma_reg(a0, y)
    # D(a) = y^(a-1) e^(-y) / Gamma(a) links neighbouring CDF terms:
    #   P(a-1, y) = P(a, y) + D(a),    P(a+1, y) = P(a, y) - D(a+1),
    # with D(a+1) = D(a) * y / a.
    log_d0 = (a0 - 1.0) * math.log(y) - y - math.lgamma(a0)
    d0 = math.exp(log_d0) if log_d0 > -745.0 else 0.0

    total = w0 * t0
    weight_seen = w0

    # Upward sweep j0+1, j0+2, ...; neglected upper tail is geometrically
    # bounded by w * r / (1 - r) once past the Poisson mode.
    w, t = w0, t0
    dd = d0 * y / a0  # D(a0 + 1)
    j = j0
    while True:
        j += 1
        w *= half_lam / j
        t -= dd
        if t < 0.0:
            t = 0.0
        total += w * t
        weight_seen += w
        a = 0.5 * d + j  # shape already advanced to index j
        dd *= y / a
        if j > half_lam:
            r = half_lam / (j + 1.0)
            if w * r / (1.0 - r) < 0.5 * _NCX2_TAIL or w == 0.0:
                break
        if j - j0 > _NCX2_MAX_TERMS:
            raise NoConvergence("noncentral chi-square series exceeded term cap")

    # Downward sweep j0-1, ..., 0 (skippable once the seen weight covers
    # everything but the tolerated tail).
    w, t = w0, t0
    dd = d0  # D(a0)
    a = a0
    for j in range(j0 - 1, -1, -1):
        if weight_seen >= 1.0 - 0.5 * _NCX2_TAIL:
            break
        w *= (j + 1.0) / half_lam
        t += dd
        if t > 1.0:
            t = 1.0
        total += w * t
        weight_seen += w
        a -= 1.0  # shape at index j
        dd *= a / y

    return min(1.0, max(0.0, total))


@dataclass(frozen=True)
class RootBracket:
    """A sign-changing interval for a continuous function.

    Invariants: lo < hi and f_lo, f_hi have opposite signs (one may be zero).
    """

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise BracketError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0.0:
            raise BracketError(
                f"f({self.lo}) = {self.f_lo} and f({self.hi}) = {self.f_hi} do not change sign"
            )


def bracket_root(f: Callable[[float], float], lo: float, hi: float,
                 grow: float = 2.0, max_grow: int = 200) -> RootBracket:
    """Build a RootBracket for f, doubling the upper end until the sign flips.

    The lower end stays fixed; only hi is moved.  Raises BracketError if no
    sign change appears within max_grow expansions.
    """
    f_lo = f(lo)
    x = hi
    for _ in range(max_grow):
        f_x = f(x)
        if f_lo * f_x <= 0.0:
            return RootBracket(lo, x, f_lo, f_x)
        x = lo + (x - lo) * grow
    raise BracketError(f"no sign change found expanding up to {x}")


def find_root(f: Callable[[float], float], bracket: RootBracket,
              tol: float = 1e-12, max_iter: int = 200) -> float:
    """Bisection root of f on a validated bracket.

    Deterministic: shrinks the bracket until its width is <= tol (or until
    bisection can no longer split the interval in double precision).  Raises
    NoConvergence if max_iter halvings leave the width above tol.
    """
    lo, hi = bracket.lo, bracket.hi
    f_lo = bracket.f_lo
    if f_lo == 0.0:
        return lo
    if bracket.f_hi == 0.0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # Interval no longer splittable: converged to machine resolution.
            return mid
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
    raise NoConvergence(f"bisection did not reach width {tol} in {max_iter} iterations")
