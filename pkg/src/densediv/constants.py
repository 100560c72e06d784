"""Closed-form constants and coefficient formulas for dense-divisor counts.

The central constant is ``C = 1/(1 - e^{-gamma})``: it multiplies ``ln ln x``
in the expected number of distinct prime factors of a member, and scales the
leading coefficient of the member-count asymptotics.  The module also carries
the exponent constants quoted for shifted-prime / twin corollaries and the
plug-in formulas for the leading coefficients of divisor-filtered counts,
plus an empirical estimator that turns an exact count into a measured
coefficient for comparison against those formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import is_prime
from .errors import ConfigurationError, DomainError, EstimateUndefinedError
from .generate import CountQuery

__all__ = [
    "EULER_GAMMA",
    "DENSITY_SCALE",
    "ConstantsBundle",
    "CoeffEstimate",
    "constants_bundle",
    "expected_distinct_factors",
    "leading_coeff_asymptotic",
    "prime_multiple_coeff",
    "semiprime_multiple_coeff",
    "empirical_coeff",
]

#: Euler--Mascheroni constant, stored as a literal (not computed).
EULER_GAMMA = 0.5772156649015329

#: C = 1/(1 - e^{-gamma}) = 2.280291..., the normal-order multiplier for
#: the distinct-prime-factor count on dense-divisor sets.
DENSITY_SCALE = 1.0 / (1.0 - math.exp(-EULER_GAMMA))


@dataclass(frozen=True)
class ConstantsBundle:
    """All quotable constants in one immutable record.

    Attributes
    ----------
    gamma : float
        Euler--Mascheroni constant.
    C : float
        ``1/(1 - e^{-gamma})``.
    C_log2 : float
        ``C * ln 2`` -- exponent of ``ln n`` in the normal order of the
        divisor count on practical numbers.
    exp_shifted_prime : float
        ``(C+1)ln(C+1) - C ln C + 1`` -- exponent for shifted-prime counts.
    exp_twin : float
        ``2 + 4 C ln 2`` -- exponent for twin-style counts.
    exp_shifted_prime_e : float
        Same shape with ``e`` in place of ``C``: ``(e+1)ln(e+1) - e + 1``.
    exp_twin_e : float
        ``2 + 4 e ln 2``.
    e_log2 : float
        ``e * ln 2`` -- upper-bound exponent for the mean divisor count.
    """

    gamma: float
    C: float
    C_log2: float
    exp_shifted_prime: float
    exp_twin: float
    exp_shifted_prime_e: float
    exp_twin_e: float
    e_log2: float


@dataclass(frozen=True)
class CoeffEstimate:
    """Empirical vs. formula leading coefficient for one divisor filter.

    ``c_hat = count * ln(x*t) / x`` is the measured coefficient implied by an
    exact count; ``c_formula`` is the closed-form main term for the same
    (q, t); ``rel_err`` compares the two.
    """

    q: int
    t: Fraction
    x: int
    c_hat: float
    c_formula: float
    rel_err: float


def constants_bundle() -> ConstantsBundle:
    """Build the bundle from ``gamma`` alone; everything else is derived."""
    c = DENSITY_SCALE
    ln2 = math.log(2.0)
    return ConstantsBundle(
        gamma=EULER_GAMMA,
        C=c,
        C_log2=c * ln2,
        exp_shifted_prime=(c + 1.0) * math.log(c + 1.0) - c * math.log(c) + 1.0,
        exp_twin=2.0 + 4.0 * c * ln2,
        exp_shifted_prime_e=(math.e + 1.0) * math.log(math.e + 1.0) - math.e + 1.0,
        exp_twin_e=2.0 + 4.0 * math.e * ln2,
        e_log2=math.e * ln2,
    )


def expected_distinct_factors(x: float, t: float) -> float:
    """Predicted mean number of distinct prime factors over members <= x.

    Returns ``C ln ln x - (C - 1) ln ln t``.  Both double logarithms are
    evaluated exactly as written; ``ln ln t`` is negative for ``t < e`` and
    that is intentional (the prediction is larger for smaller ratio bounds).

    Parameters
    ----------
    x : float
        Upper end of the member range; must be >= 2.
    t : float
        Divisor-ratio bound; must be >= 2.

    Raises
    ------
    DomainError
        If ``x < 2`` or ``t < 2``.
    """
    if x < 2.0:
        raise DomainError(f"x must be >= 2, got {x}")
    if t < 2.0:
        raise DomainError(f"t must be >= 2, got {t}")
    c = DENSITY_SCALE
    return c * math.log(math.log(x)) - (c - 1.0) * math.log(math.log(t))


def leading_coeff_asymptotic(t: float) -> float:
    """Main term ``C (ln t - gamma)`` of the unfiltered count coefficient.

    The neglected correction decays like ``exp(-sqrt(ln t))``; for small t
    (near 2) it is numerically large, so callers compare differences of
    coefficients rather than absolute values whenever possible.
    """
    if t < 2.0:
        raise DomainError(f"t must be >= 2, got {t}")
    return DENSITY_SCALE * (math.log(t) - EULER_GAMMA)


def prime_multiple_coeff(q: int, t: float, c_theta: float) -> float:
    """Main term of the coefficient for members divisible by a prime q.

    Evaluates ``(c_theta + C ln q) / q``, valid in the regime ``q <= t``.

    Raises
    ------
    ConfigurationError
        If q is not prime.
    DomainError
        If q > t (outside the formula's regime).
    """
    if not is_prime(q):
        raise ConfigurationError(f"q must be prime, got {q}")
    if q > t:
        raise DomainError(f"formula requires q <= t, got q={q}, t={t}")
    return (c_theta + DENSITY_SCALE * math.log(q)) / q


def semiprime_multiple_coeff(p: int, q: int, t: float, c_theta: float) -> float:
    """Main term of the coefficient for members divisible by primes p and q.

    Evaluates ``(c_theta + C ln(pq)) / (pq)``, valid for ``p <= q <= t``.
    """
    if not is_prime(p) or not is_prime(q):
        raise ConfigurationError(f"p and q must be prime, got p={p}, q={q}")
    if not (p <= q <= t):
        raise DomainError(
            f"formula requires p <= q <= t, got p={p}, q={q}, t={t}"
        )
    return (c_theta + DENSITY_SCALE * math.log(p * q)) / (p * q)


def empirical_coeff(query: CountQuery, count: int) -> CoeffEstimate:
    """Turn an exact divisor-filtered count into a measured coefficient.

    ``c_hat = count * ln(x*t) / x`` mirrors the asymptotic shape
    ``count ~ c * x / ln(x*t)``.  The reference ``c_formula`` is the q = 1
    main term for q = 1 and the prime-multiple main term for prime q.

    Parameters
    ----------
    query : CountQuery
        Must use a dense family (the coefficient normalization needs t).
    count : int
        Exact count for the query; must be positive.

    Raises
    ------
    DomainError
        If the query's family is not dense.
    EstimateUndefinedError
        If count == 0 (no members -- the estimate is undefined).
    ConfigurationError
        If q is neither 1 nor prime.
    """
    family = query.family
    if family.kind != "dense":
        raise DomainError("empirical coefficients require a dense family")
    if count == 0:
        raise EstimateUndefinedError(
            f"no members <= {query.x} divisible by {query.q}"
        )
    if count < 0:
        raise ConfigurationError(f"count must be >= 0, got {count}")
    t = family.t
    t_float = family.t_num / family.t_den
    c_hat = count * (math.log(query.x) + math.log(t_float)) / query.x
    c_theta = leading_coeff_asymptotic(t_float)
    if query.q == 1:
        c_formula = c_theta
    else:
        c_formula = prime_multiple_coeff(query.q, t_float, c_theta)
    rel_err = abs(c_hat - c_formula) / c_formula
    return CoeffEstimate(
        q=query.q, t=t, x=query.x, c_hat=c_hat, c_formula=c_formula, rel_err=rel_err
    )
