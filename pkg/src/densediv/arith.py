"""Integer substrate: smallest-prime-factor table, factorization,
multiplicative statistics, the divisor-ratio bound F, and the exact
rough-number counter.

Everything here is exact integer arithmetic (Python integers do not
overflow); floats appear only in explicitly approximate helpers elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ResourceCapError, SieveRangeError

# Largest divisor list we will materialize (oracle support only).
DIVISOR_CAP = 10**6

# Witness set making Miller-Rabin deterministic for all n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class SpfTable:
    """Smallest-prime-factor table for 2..limit.

    spf[n] is the smallest prime dividing n (0 for n < 2); primes is the
    ascending array of all primes <= limit, derived once at build time.
    """

    limit: int
    spf: np.ndarray
    primes: np.ndarray

    def __post_init__(self) -> None:
        if self.limit < 2:
            raise ConfigurationError(f"table limit must be >= 2, got {self.limit}")


def build_spf_table(limit: int) -> SpfTable:
    """Sieve smallest prime factors for all n <= limit.

    Parameters
    ----------
    limit : int
        Largest n covered; 2 <= limit <= 2**31.
    """
    if not 2 <= limit <= 2**31:
        raise ConfigurationError(f"sieve limit must be in [2, 2^31], got {limit}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    fixed = np.flatnonzero(spf[2:] == np.arange(2, limit + 1, dtype=np.int64))
    primes = (fixed + 2).astype(np.int64)
    return SpfTable(limit=limit, spf=spf, primes=primes)


def primes_up_to(limit: int) -> np.ndarray:
    """Ascending array (int64) of all primes <= limit; empty for limit < 2."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimePowerFactorization:
    """n as an ascending tuple of (prime, exponent) pairs; empty for n = 1."""

    n: int
    factors: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FactorStats:
    """Multiplicative statistics of one integer.

    omega/big_omega count distinct/with-multiplicity prime factors; tau and
    sigma are the divisor count and divisor sum; p_min is math.inf for n = 1.
    """

    omega: int
    big_omega: int
    tau: int
    sigma: int
    p_max: int
    p_min: int | float


def factorize(n: int, table: SpfTable) -> PrimePowerFactorization:
    """Factor n using the smallest-prime-factor table (1 <= n <= limit)."""
    if n < 1:
        raise SieveRangeError(f"n must be positive, got {n}")
    if n > table.limit:
        raise SieveRangeError(f"n={n} exceeds table limit {table.limit}")
    factors: list[tuple[int, int]] = []
    spf = table.spf
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    return PrimePowerFactorization(n=n, factors=tuple(factors))


def factor_stats(f: PrimePowerFactorization) -> FactorStats:
    """Exact omega, big-omega, tau, sigma and extreme prime factors of f.n."""
    omega = len(f.factors)
    big_omega = 0
    tau = 1
    sigma = 1
    for p, e in f.factors:
        big_omega += e
        tau *= e + 1
        sigma *= (p ** (e + 1) - 1) // (p - 1)
    p_max = f.factors[-1][0] if f.factors else 1
    p_min: int | float = f.factors[0][0] if f.factors else math.inf
    return FactorStats(
        omega=omega, big_omega=big_omega, tau=tau, sigma=sigma, p_max=p_max, p_min=p_min
    )


def divisor_ratio_bound(f: PrimePowerFactorization) -> int:
    """The functional F(n) = max over j of p_j^2 * p_{j+1} * ... * p_k, with
    the prime factors listed ascending with multiplicity.

    F(n)/n equals the largest ratio of consecutive divisors of n, so n has
    all divisor ratios <= t exactly when F(n) <= n*t.  F(1) = 1 (empty max).
    """
    best = 1
    suffix = 1
    for p, e in reversed(f.factors):
        for _ in range(e):
            cand = p * p * suffix
            if cand > best:
                best = cand
            suffix *= p
    return best


def rough_count(x, y, table: SpfTable) -> int:
    """Count integers in [1, x] with no prime factor <= y.

    Exactly 1_{x>=1} + #{2 <= n <= x : smallest prime factor of n > y}.
    x and y may be int, Fraction, or float; comparisons are exact through
    floors (the counted quantities are integers).
    """
    X = math.floor(x)
    if X < 1:
        return 0
    if X > table.limit:
        raise SieveRangeError(f"x={x} exceeds table limit {table.limit}")
    Y = math.floor(y) if y > 0 else 0
    if Y < 2:
        return X  # every n >= 2 has smallest prime factor >= 2 > Y; n = 1 counts too
    if Y >= table.limit:
        Y = table.limit  # spf values never exceed limit
    return 1 + int(np.count_nonzero(table.spf[2 : X + 1] > Y))


def divisor_list(f: PrimePowerFactorization, cap: int = DIVISOR_CAP) -> list[int]:
    """All divisors of f.n, ascending (exactly tau entries; capped)."""
    tau = 1
    for _, e in f.factors:
        tau *= e + 1
    if tau > cap:
        raise ResourceCapError(f"tau={tau} exceeds divisor cap {cap}")
    divs = [1]
    for p, e in f.factors:
        pk = 1
        block = []
        for _ in range(e):
            pk *= p
            block.extend(d * pk for d in divs)
        divs.extend(block)
    divs.sort()
    return divs
