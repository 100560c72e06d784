"""Exact combinatorial identities and convergence checks over member sets.

The strongest correctness oracle in the package: a two-sided counting
argument shows that for every chain-condition family and every real x >= 1,

    sum over members n of  Phi(x/n, theta(n))  =  floor(x)        (partition)

where Phi is the rough-number count -- every integer up to x factors
uniquely as (member) * (rough part).  A shifted variant equates divisor-
filtered sums on both sides.  Both are exact integer equalities at every
finite x, so they validate the enumerator, the threshold arithmetic, and
the rough-count sieve against each other with zero tolerance.

The weighted analogues replace counting with Dirichlet-type weights

    weight(n, s)     = n^{-s} * prod_{p <= theta(n)} (1 - p^{-s})
    log_moment(n, s) = sum_{p <= theta(n)} ln p / (p^s - 1) - ln n

for members n; the weights sum to 1 over the full (infinite) member set,
the weight * log_moment series sums to 0, and the log moment approaches
``ln t - gamma`` for the fixed-ratio family.  Finite truncations of these
series are checked as trends, not equalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import SpfTable, factor_stats, factorize, is_prime, rough_count
from .constants import EULER_GAMMA
from .errors import ConfigurationError, DomainError, SieveRangeError
from .families import ThetaFamily, is_member
from .generate import iter_members

__all__ = [
    "SeriesTerm",
    "CheckResult",
    "series_term",
    "check_partition_identity",
    "check_shifted_partition_identity",
    "weight_series_partial_sum",
    "check_weight_shift",
    "weighted_log_moment_sum",
    "log_moment_gap",
]


@dataclass(frozen=True)
class SeriesTerm:
    """Weight and log moment of a single integer at exponent s.

    ``weight`` is 0 for non-members (the membership indicator multiplies
    the product); ``log_moment`` is evaluated from the definition whether
    or not n is a member.
    """

    n: int
    weight: float
    log_moment: float
    s: float


@dataclass(frozen=True)
class CheckResult:
    """Two sides of one identity check plus the verdict.

    For the exact integer identities ``passed`` means lhs == rhs with zero
    tolerance; for truncated-series checks the result is report-only and
    ``passed`` is always True (the interesting output is ``gap``).
    """

    name: str
    lhs: float
    rhs: float
    gap: float
    passed: bool


def _validate_s(s: float) -> None:
    if s < 1.0:
        raise DomainError(f"series exponent s must be >= 1, got {s}")


def _validate_qs(qs: list[int]) -> None:
    if not qs:
        raise ConfigurationError("qs must be nonempty")
    if any(not is_prime(q) for q in qs):
        raise ConfigurationError(f"every q must be prime, got {qs}")
    if list(qs) != sorted(qs):
        raise ConfigurationError(f"qs must be ascending, got {qs}")


def _prime_weight_arrays(
    s: float, table: SpfTable
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Prefix arrays over the sieved primes for O(1) per-member lookups.

    Returns (primes, prod_pad, mu_pad) where prod_pad[k] is the product of
    ``1 - p^{-s}`` over the first k primes and mu_pad[k] the prefix sum of
    ``ln p / (p^s - 1)`` (index 0 = empty product/sum).
    """
    primes = table.primes
    pf = primes.astype(np.float64)
    ps = pf**s
    prod_pad = np.concatenate(([1.0], np.cumprod(1.0 - 1.0 / ps)))
    mu_pad = np.concatenate(([0.0], np.cumsum(np.log(pf) / (ps - 1.0))))
    return primes, prod_pad, mu_pad


def _member_arrays(
    family: ThetaFamily, limit: int
) -> tuple[np.ndarray, np.ndarray]:
    """(n, threshold_floor) arrays over members n <= limit, ascending in n."""
    ns: list[int] = []
    thrs: list[int] = []
    for rec in iter_members(family, limit):
        ns.append(rec.n)
        thrs.append(family.threshold_floor(rec.n, rec.sigma))
    n_arr = np.asarray(ns, dtype=np.int64)
    thr_arr = np.asarray(thrs, dtype=np.int64)
    order = np.argsort(n_arr, kind="stable")
    return n_arr[order], thr_arr[order]


def _weights(
    n_arr: np.ndarray,
    thr_arr: np.ndarray,
    s: float,
    table: SpfTable,
) -> np.ndarray:
    """Vector of weights for pre-enumerated members."""
    if len(thr_arr) and int(thr_arr.max()) > table.limit:
        raise SieveRangeError(
            f"threshold {int(thr_arr.max())} exceeds sieve limit {table.limit}"
        )
    primes, prod_pad, _ = _prime_weight_arrays(s, table)
    idx = np.searchsorted(primes, thr_arr, side="right")
    return n_arr.astype(np.float64) ** (-s) * prod_pad[idx]


def series_term(
    n: int, family: ThetaFamily, s: float, table: SpfTable
) -> SeriesTerm:
    """Weight and log moment of one integer n.

    Raises
    ------
    DomainError
        If n < 1 or s < 1.
    SieveRangeError
        If theta(n) exceeds the sieve limit.
    """
    _validate_s(s)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    sigma = factor_stats(factorize(n, table)).sigma
    thr = family.threshold_floor(n, sigma)
    if thr > table.limit:
        raise SieveRangeError(
            f"threshold {thr} for n={n} exceeds sieve limit {table.limit}"
        )
    primes, prod_pad, mu_pad = _prime_weight_arrays(s, table)
    idx = int(np.searchsorted(primes, thr, side="right"))
    weight = float(n) ** (-s) * float(prod_pad[idx])
    if not is_member(n, family, table):
        weight = 0.0
    log_moment = float(mu_pad[idx]) - math.log(n)
    return SeriesTerm(n=n, weight=weight, log_moment=log_moment, s=s)


def check_partition_identity(
    family: ThetaFamily, x: int, table: SpfTable
) -> CheckResult:
    """Exact check: member-wise rough counts partition the integers up to x.

    lhs sums ``rough_count(x // n, theta_floor(n))`` over members n <= x;
    rhs is x.  Equality is exact -- any mismatch indicates a bug in the
    enumerator, the thresholds, or the sieve.
    """
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    lhs = 0
    for rec in iter_members(family, x):
        thr = family.threshold_floor(rec.n, rec.sigma)
        lhs += rough_count(x // rec.n, thr, table)
    return CheckResult("partition", lhs, x, abs(lhs - x), lhs == x)


def check_shifted_partition_identity(
    family: ThetaFamily, x: int, qs: list[int], table: SpfTable
) -> CheckResult:
    """Exact check of the divisor-shifted partition identity.

    With primes q_1 <= ... <= q_k (repeats allowed) and Q their product:

        lhs = sum over members n <= x with Q | n of
                rough_count(x // n, theta_floor(n))
        rhs = sum over members n <= x // q_k with theta(n) >= q_k and
                (Q / q_k) | n of rough_count(x // (n q_k), theta_floor(n))

    Both sides count the same multiples, grouped differently; equality is
    exact at every x.
    """
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    _validate_qs(qs)
    q_all = math.prod(qs)
    q_last = qs[-1]
    q_rest = q_all // q_last
    lhs = 0
    for rec in iter_members(family, x):
        if rec.n % q_all == 0:
            thr = family.threshold_floor(rec.n, rec.sigma)
            lhs += rough_count(x // rec.n, thr, table)
    rhs = 0
    if x >= q_last:
        for rec in iter_members(family, x // q_last):
            if rec.n % q_rest != 0:
                continue
            thr = family.threshold_floor(rec.n, rec.sigma)
            if thr >= q_last:
                rhs += rough_count(x // (rec.n * q_last), thr, table)
    return CheckResult("shifted_partition", lhs, rhs, abs(lhs - rhs), lhs == rhs)


def weight_series_partial_sum(
    family: ThetaFamily, s: float, limit: int, table: SpfTable
) -> float:
    """Partial sum of member weights up to the truncation limit.

    The full series sums to exactly 1; the partial sum is nondecreasing in
    the limit and approaches 1 from below (tail roughly proportional to
    1/ln(limit) at s = 1).
    """
    _validate_s(s)
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    n_arr, thr_arr = _member_arrays(family, limit)
    return float(np.sum(_weights(n_arr, thr_arr, s, table)))


def check_weight_shift(
    family: ThetaFamily,
    s: float,
    limit: int,
    qs: list[int],
    table: SpfTable,
) -> CheckResult:
    """Truncated check of the divisor-shift relation for the weight series.

    The infinite identity states: the sum of weights over members divisible
    by q_1*...*q_k equals ``q_k^{-s}`` times the sum over members with
    theta(n) >= q_k divisible by q_1*...*q_{k-1}.  Both sides are truncated
    at the same limit here, so the result is a shrinking gap, not an exact
    equality; ``passed`` is always True (report-only).
    """
    _validate_s(s)
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    _validate_qs(qs)
    q_all = math.prod(qs)
    q_last = qs[-1]
    q_rest = q_all // q_last
    n_arr, thr_arr = _member_arrays(family, limit)
    w = _weights(n_arr, thr_arr, s, table)
    lhs = float(np.sum(w[n_arr % q_all == 0]))
    keep = (thr_arr >= q_last) & (n_arr % q_rest == 0)
    rhs = float(q_last) ** (-s) * float(np.sum(w[keep]))
    return CheckResult("weight_shift", lhs, rhs, abs(lhs - rhs), True)


def weighted_log_moment_sum(
    family: ThetaFamily, s: float, limit: int, table: SpfTable
) -> float:
    """Truncated sum of weight * log_moment over members up to the limit.

    The full series sums to exactly 0; the magnitude of the truncated sum
    shrinks as the limit grows.
    """
    _validate_s(s)
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    n_arr, thr_arr = _member_arrays(family, limit)
    if len(thr_arr) and int(thr_arr.max()) > table.limit:
        raise SieveRangeError(
            f"threshold {int(thr_arr.max())} exceeds sieve limit {table.limit}"
        )
    primes, prod_pad, mu_pad = _prime_weight_arrays(s, table)
    idx = np.searchsorted(primes, thr_arr, side="right")
    weights = n_arr.astype(np.float64) ** (-s) * prod_pad[idx]
    moments = mu_pad[idx] - np.log(n_arr.astype(np.float64))
    return float(np.sum(weights * moments))


def log_moment_gap(n: int, t: Fraction, table: SpfTable) -> float:
    """Distance of the fixed-ratio log moment from its limit ``ln t - gamma``.

    Evaluates ``|mu_n - (ln t - gamma)|`` at s = 1, where
    ``mu_n = sum_{p <= n t} ln p/(p - 1) - ln n``.  The gap shrinks roughly
    like ``exp(-sqrt(ln(n t)))`` as n grows.

    Raises
    ------
    SieveRangeError
        If n*t exceeds the sieve limit.
    """
    t = Fraction(t)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if t < 2:
        raise DomainError(f"t must be >= 2, got {t}")
    thr = n * t.numerator // t.denominator
    if thr > table.limit:
        raise SieveRangeError(f"n*t={thr} exceeds sieve limit {table.limit}")
    primes = table.primes[table.primes <= thr].astype(np.float64)
    mu = float(np.sum(np.log(primes) / (primes - 1.0))) - math.log(n)
    target = math.log(t.numerator / t.denominator) - EULER_GAMMA
    return abs(mu - target)
