"""Gamma function and the two-parameter Mittag-Leffler function on the real line.

The evaluator covers E_{alpha,beta}(z) for alpha in (0, 2], beta > 0 and
|z| <= DOMAIN_BOUND:

* Power series sum_k z^k / Gamma(alpha*k + beta) with Kahan-compensated
  float64 summation for |z| <= Z_SWITCH, and for every alpha > 1 over the
  whole domain (there the terms peak early, so cancellation stays mild,
  while the algebraic expansion misses slowly damped oscillatory root
  contributions -- E_2(-x) = cos(sqrt(x)) is the extreme case).  Alternating
  sums that cancel heavily or outrun the term budget transparently re-run
  in mpmath at a working precision sized from the predicted peak term, so
  the returned double is still correct to ~1e-12.
* z < -Z_SWITCH, alpha <= 1: the algebraic asymptotic series
  -sum_k z^{-k} / Gamma(beta - alpha*k), optimally truncated; its smallest
  term is the error estimate, and whenever that cannot certify ~1e-9 (the
  transitional band alpha -> 1 just past the switch) the evaluation falls
  back to the series.  At alpha = 1 exactly the exponentially small root
  term is added (recovering E_1(z) = e^z).
* z > Z_SWITCH, alpha <= 1: the dominant exponential term
  (1/alpha) z^{(1-beta)/alpha} exp(z^{1/alpha}) plus the same algebraic
  tail.  Results exceeding the float64 range come back as inf.

Convergence policy: a series stops once the next term falls below
1e-16 * (1 + |partial sum|); exhausting the budget raises DomainError rather
than returning an unconverged value.  Guaranteed absolute error for
|z| <= Z_SWITCH is 1e-9 (in practice ~1e-13); for tiny alpha (< ~0.25) with
|z| near Z_SWITCH the series would destroy hundreds of digits, and the
evaluator raises DomainError instead of returning a wrong number.
"""

from __future__ import annotations

import cmath
import math

import mpmath as mp

from .errors import DomainError, PoleError

# Declared evaluation domain for |z|.
DOMAIN_BOUND = 50.0
# Power series / asymptotic expansion switch point.
Z_SWITCH = 10.0
# Term budgets: float64 pass, then the arbitrary-precision fallback.
MAX_TERMS = 500
MAX_TERMS_MP = 20000
# Number of algebraic terms kept in the asymptotic expansions.
ASYMPTOTIC_TERMS = 10
# Escalate to mpmath when max |term| exceeds this multiple of the sum
# (i.e. more than ~2 digits lost to cancellation).
CANCEL_RATIO = 1e2

# math.gamma overflows just past this argument.
_GAMMA_OVERFLOW = 171.62


def gamma_fn(q: float) -> float:
    """Gamma(q) for real q; poles at 0, -1, -2, ... raise ``PoleError``."""
    q = float(q)
    if not math.isfinite(q):
        raise DomainError(f"gamma argument must be finite, got {q}")
    if q <= 0.0 and q == math.floor(q):
        raise PoleError(f"gamma has a pole at {q:g}")
    try:
        return math.gamma(q)
    except OverflowError:
        return math.inf


def _rgamma(x: float) -> float:
    """1/Gamma(x), defined as 0 at the poles and past the overflow point."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if x > _GAMMA_OVERFLOW:
        return 0.0
    return 1.0 / math.gamma(x)


def _series_float(alpha: float, beta: float, z: float):
    """Kahan-summed power series; returns (value, max_abs_term, converged)."""
    log_abs_z = math.log(abs(z))
    total = 0.0
    comp = 0.0
    max_term = 0.0
    prev_abs = math.inf
    for k in range(MAX_TERMS):
        logterm = k * log_abs_z - math.lgamma(alpha * k + beta)
        if logterm > 700.0:
            # term overflows float64; punt to the high-precision path
            return total, math.inf, False
        term = math.exp(logterm)
        if z < 0.0 and (k & 1):
            term = -term
        abs_term = abs(term)
        if abs_term < 1e-16 * (1.0 + abs(total)) and abs_term <= prev_abs:
            return total, max_term, True
        prev_abs = abs_term
        max_term = max(max_term, abs_term)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total, max_term, False


# Hard cap on the number of digits cancellation may destroy before the
# argument is declared out of domain (tiny alpha with |z| near Z_SWITCH).
MAX_CANCEL_DIGITS = 300


def _peak_log10_term(alpha: float, beta: float, z: float) -> float:
    """Predicted log10 of the largest series term, via the digamma inverse.

    The term magnitudes k*log|z| - lgamma(alpha*k + beta) peak where
    psi(alpha*k + beta) = log|z| / alpha; psi^{-1}(y) ~ e^y + 1/2 is accurate
    enough for sizing working precision.
    """
    x_peak = math.exp(math.log(abs(z)) / alpha) + 0.5
    k_peak = max(0.0, (x_peak - beta) / alpha)
    log_term = k_peak * math.log(abs(z)) - math.lgamma(alpha * k_peak + beta)
    return log_term / math.log(10.0)


def _series_mp(alpha: float, beta: float, z: float) -> float:
    """Arbitrary-precision fallback for the power series.

    Working precision is sized from the predicted peak term, since for
    alternating sums the cancelled digits are gone before the result is
    known.  The cap keeps the pathological small-alpha corner (hundreds of
    digits destroyed) an explicit DomainError instead of a long stall.
    """
    if z < 0.0:
        cancel = max(0.0, _peak_log10_term(alpha, beta, z))
        if cancel > MAX_CANCEL_DIGITS:
            raise DomainError(
                f"E_({alpha:g},{beta:g})({z:g}) would cancel ~{cancel:.0f} "
                f"digits, beyond the supported {MAX_CANCEL_DIGITS}"
            )
        dps = int(cancel) + 35
    else:
        dps = 40
    with mp.workdps(dps):
        za, aa, ba = mp.mpf(z), mp.mpf(alpha), mp.mpf(beta)
        total = mp.mpf(0)
        prev_abs = mp.inf
        tol = mp.mpf(10) ** (5 - dps)
        converged = False
        for k in range(MAX_TERMS_MP):
            term = za**k / mp.gamma(aa * k + ba)
            abs_term = abs(term)
            if abs_term < tol * (1 + abs(total)) and abs_term <= prev_abs:
                converged = True
                break
            prev_abs = abs_term
            total += term
        if not converged:
            raise DomainError(
                f"series for E_({alpha:g},{beta:g})({z:g}) did not converge "
                f"within {MAX_TERMS_MP} terms"
            )
        try:
            return float(total)
        except OverflowError:
            return math.copysign(math.inf, total)


def _algebraic_tail(alpha: float, beta: float, z: float):
    """-sum_k z^{-k} / Gamma(beta - alpha*k) for large |z|.

    The expansion is asymptotic, not convergent: summation stops at the
    smallest term (optimal truncation) and never beyond ASYMPTOTIC_TERMS.
    Returns (value, smallest_term): the smallest retained magnitude is the
    standard error estimate of an optimally truncated asymptotic series.
    """
    total = 0.0
    zk = 1.0
    smallest = math.inf
    for k in range(1, ASYMPTOTIC_TERMS + 1):
        zk /= z
        term = -zk * _rgamma(beta - alpha * k)
        magnitude = abs(term)
        if magnitude > smallest and magnitude > 0.0:
            break
        if 0.0 < magnitude < smallest:
            smallest = magnitude
        total += term
    return total, smallest


def _series(alpha: float, beta: float, z: float) -> float:
    """Series evaluation: float64 first, arbitrary precision when needed."""
    value, max_term, converged = _series_float(alpha, beta, z)
    if converged and max_term <= CANCEL_RATIO * (1.0 + abs(value)):
        return value
    return _series_mp(alpha, beta, z)


def _exp_root_term(beta: float, z: float) -> float:
    """Exponentially small root contribution at alpha = 1 exactly.

    Recovers E_{1,1}(z) = e^z on the far negative axis, where the algebraic
    tail alone would return 0 (every Gamma(1 - k) is a pole).
    """
    w = complex(z, 0.0)
    val = w ** (1.0 - beta) * cmath.exp(w)
    return val.real


def mittag_leffler(alpha: float, z: float, beta: float = 1.0) -> float:
    """E_{alpha,beta}(z) = sum_{k>=0} z^k / Gamma(alpha*k + beta).

    The one-parameter function E_alpha is the default beta = 1.  See the
    module docstring for the evaluation strategy and accuracy contract.
    """
    alpha = float(alpha)
    beta = float(beta)
    z = float(z)
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha:g}")
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta:g}")
    if not math.isfinite(z) or abs(z) > DOMAIN_BOUND:
        raise DomainError(f"|z| must be <= {DOMAIN_BOUND:g}, got z = {z:g}")

    if z == 0.0:
        return 1.0 / gamma_fn(beta)

    # For alpha > 1 the series cancellation stays mild over the whole domain
    # (the terms peak around |z|^{1/alpha} << 50 digits), so the series is
    # used everywhere; the asymptotic split only pays off for alpha <= 1.
    if abs(z) <= Z_SWITCH or alpha > 1.0:
        return _series(alpha, beta, z)

    if z > 0.0:
        root = z ** (1.0 / alpha)
        try:
            main = math.exp(root) * z ** ((1.0 - beta) / alpha) / alpha
        except OverflowError:
            return math.inf
        tail, _ = _algebraic_tail(alpha, beta, z)
        return main + tail

    tail, err_estimate = _algebraic_tail(alpha, beta, z)
    if alpha == 1.0:
        return tail + _exp_root_term(beta, z)
    if err_estimate <= 1e-9 * (1.0 + abs(tail)):
        return tail
    # transitional band alpha -> 1 just past the switch: the expansion
    # cannot certify the target accuracy, but series cancellation is mild
    return _series(alpha, beta, z)


def ml_decay(alpha: float, rate: float, t: float) -> float:
    """Decay envelope E_alpha(-rate * t^alpha) used by the stability checks."""
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t:g}")
    return mittag_leffler(alpha, -rate * t**alpha)
