"""Integer and prime arithmetic: sieving, Legendre symbols, von Mangoldt
weights, the logarithmic integral, and character sums over primes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .quadrature import adaptive_gauss

SEGMENT_SIZE = 1 << 20


def _simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain sieve, small limits)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def iter_prime_blocks(limit: int, segment: int = SEGMENT_SIZE):
    """Yield int64 arrays of consecutive primes covering [2, limit].

    Segmented sieve of Eratosthenes; memory stays O(segment + sqrt(limit)).
    """
    if limit < 2:
        return
    root = int(math.isqrt(limit))
    base = _simple_sieve(root)
    yield base[base <= limit]
    lo = root + 1
    while lo <= limit:
        hi = min(lo + segment - 1, limit)
        mask = np.ones(hi - lo + 1, dtype=bool)
        for p in base:
            start = ((lo + p - 1) // p) * p
            mask[start - lo:: p] = False
        yield (np.nonzero(mask)[0] + lo).astype(np.int64)
        lo = hi + 1


@dataclass(frozen=True)
class PrimeSet:
    """Primes p <= limit with p = residue_class (mod 4), ascending."""

    limit: int
    residue_class: int
    primes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.primes.size)


def _check_class(v: int) -> int:
    if v not in (1, 3):
        raise DomainError(f"residue class must be 1 or 3, got {v!r}")
    return v


@lru_cache(maxsize=64)
def _sieve_class(X: int, v: int) -> np.ndarray:
    parts = []
    for block in iter_prime_blocks(X):
        sel = block[block % 4 == v]
        if sel.size:
            parts.append(sel)
    if not parts:
        out = np.empty(0, dtype=np.int64)
    else:
        out = np.concatenate(parts)
    out.flags.writeable = False
    return out


def sieve_primes(X: int, v: int) -> PrimeSet:
    """All primes p <= X with p = v (mod 4); v must be 1 or 3."""
    _check_class(v)
    X = int(X)
    if X < 2:
        raise DomainError(f"sieve limit must be >= 2, got {X}")
    return PrimeSet(limit=X, residue_class=v, primes=_sieve_class(X, v))


def prime_count(X: int, v: int) -> int:
    """pi(X; 4, v)."""
    return sieve_primes(X, v).count


def legendre(n: int, p: int) -> int:
    """Legendre symbol (n|p) for odd prime p, by the Jacobi reciprocity ladder."""
    if p < 3 or p % 2 == 0:
        raise DomainError(f"modulus must be an odd prime >= 3, got {p}")
    a = n % p
    m = p
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                sign = -sign
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            sign = -sign
        a %= m
    return sign if m == 1 else 0


def legendre_euler(n: int, p: int) -> int:
    """Legendre symbol by Euler's criterion (test oracle; O(log p) bigint pow)."""
    if p < 3 or p % 2 == 0:
        raise DomainError(f"modulus must be an odd prime >= 3, got {p}")
    r = pow(n % p, (p - 1) // 2, p)
    return r - p if r > 1 else r


@lru_cache(maxsize=16)
def legendre_table(p: int) -> np.ndarray:
    """int8 table t with t[n % p] = (n|p); built from the squares mod p."""
    if p < 3 or p % 2 == 0:
        raise DomainError(f"modulus must be an odd prime >= 3, got {p}")
    tab = np.full(p, -1, dtype=np.int8)
    tab[0] = 0
    res = np.arange(1, p, dtype=np.int64)
    tab[(res * res) % p] = 1
    tab.flags.writeable = False
    return tab


@lru_cache(maxsize=4)
def _trial_primes(limit: int) -> np.ndarray:
    return _simple_sieve(limit)


def von_mangoldt(n: int) -> float:
    """Lambda(n): log q when n = q^k for a prime q, else 0."""
    n = int(n)
    if n < 1:
        raise DomainError(f"von Mangoldt argument must be >= 1, got {n}")
    if n == 1:
        return 0.0
    for q in _trial_primes(max(100, int(math.isqrt(n)) + 1)):
        q = int(q)
        if q * q > n:
            break
        if n % q == 0:
            while n % q == 0:
                n //= q
            return math.log(q) if n == 1 else 0.0
    return math.log(n)  # n itself prime


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit inputs."""
    n = int(n)
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_E = math.e


def li(X: float) -> float:
    """Logarithmic integral int_2^X du/log u, absolute error < 1e-10.

    Adaptive Gauss-Legendre with a forced split at u = e, where the
    integrand's derivative is largest on [2, X].
    """
    X = float(X)
    if X < 2:
        raise DomainError(f"li requires X >= 2, got {X}")
    if X == 2:
        return 0.0

    def f(u):
        return 1.0 / np.log(u)

    splits = (_E,) if X > _E else ()
    return float(np.real(adaptive_gauss(f, 2.0, X, abs_tol=1e-11, split_points=splits)))


def char_sum_over_primes(n: int, X: int, v: int) -> int:
    """S(n) = sum of (n|p) over primes p <= X with p = v (mod 4)."""
    ps = sieve_primes(X, v).primes
    total = 0
    for p in ps:
        total += legendre(n, int(p))
    return total


def char_sum_batched(ns, X: int) -> dict[int, np.ndarray]:
    """S(n) for a block of n values, for both residue classes at once.

    Iterates the prime list once (the prime loop dominates) and accumulates
    per-n via a squares-mod-p table for each p.  Returns {1: S_1, 3: S_3}
    aligned with `ns`.
    """
    ns = np.asarray(ns, dtype=np.int64)
    acc = {1: np.zeros(ns.size, dtype=np.int64), 3: np.zeros(ns.size, dtype=np.int64)}
    for block in iter_prime_blocks(int(X)):
        for p in block[block > 2]:
            p = int(p)
            tab = np.full(p, -1, dtype=np.int8)
            tab[0] = 0
            res = np.arange(1, p, dtype=np.int64)
            tab[(res * res) % p] = 1
            acc[p % 4] += tab[ns % p]
    return acc


def lambda_weighted_sum(n: int, X: int, v: int) -> float:
    """Lambda(n) * S(n); vanishes unless n is a prime power."""
    lam = von_mangoldt(n)
    if lam == 0.0:
        return 0.0
    return lam * char_sum_over_primes(n, X, v)


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n
