"""Integer substrate: sieving, primality, factoring, primitive roots, orders."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
import random

import numba as nb
import numpy as np

from .errors import DomainError

SEGMENT = 1 << 22
N_P_BIT_BUDGET = 512

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def primes_in_range(lo: int, hi: int, base: np.ndarray | None = None) -> np.ndarray:
    """Primes p with lo <= p <= hi, sieved in segments of odd numbers."""
    lo = max(lo, 2)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    if base is None:
        base = _simple_sieve(isqrt(hi))
    odd_base = base[base > 2]
    out = []
    if lo <= 2 <= hi:
        out.append(np.array([2], dtype=np.int64))
    start = lo | 1  # first odd >= lo
    if start < 3:
        start = 3
    while start <= hi:
        stop = min(hi, start + 2 * SEGMENT - 2)
        n = (stop - start) // 2 + 1
        flags = np.ones(n, dtype=bool)
        for p in odd_base:
            p = int(p)
            pp = p * p
            if pp > stop:
                break
            first = max(pp, ((start + p - 1) // p) * p)
            if first % 2 == 0:
                first += p
            if first > stop:
                continue
            flags[(first - start) // 2::p] = False
        seg = start + 2 * np.flatnonzero(flags).astype(np.int64)
        out.append(seg)
        start = stop + 2
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit in ascending order (empty for limit < 2)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    return primes_in_range(2, limit)


def iter_prime_segments(limit: int, segment: int = SEGMENT):
    """Yield ascending arrays of primes covering [2, limit] one segment at a time."""
    base = _simple_sieve(isqrt(limit))
    lo = 2
    while lo <= limit:
        hi = min(limit, lo + 2 * segment)
        yield primes_in_range(lo, hi, base)
        lo = hi + 1


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the base set is exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# --- 64-bit Miller-Rabin for numba loops -------------------------------------

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_MR_BASES = np.array([2, 325, 9375, 28178, 450775, 9780504, 1795265022], dtype=np.uint64)
_TRIAL = np.array([3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47], dtype=np.int64)


@nb.njit(cache=True, inline="always")
def _mulhi(a, b):
    a0 = a & _M32
    a1 = a >> _S32
    b0 = b & _M32
    b1 = b >> _S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> _S32) + (p01 & _M32) + (p10 & _M32)
    return p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)


@nb.njit(cache=True, inline="always")
def _montmul(a, b, n, nneg):
    hi = _mulhi(a, b)
    lo = a * b
    m = lo * nneg
    t = hi + _mulhi(m, n)
    if lo != _ZERO:
        t += _ONE
    if t >= n:
        t -= n
    return t


@nb.njit(cache=True)
def is_prime_u64(n_signed):
    """Deterministic primality for 0 <= n < 2**63 inside numba code."""
    if n_signed < 2:
        return False
    if n_signed % 2 == 0:
        return n_signed == 2
    for p in _TRIAL:
        if n_signed % p == 0:
            return n_signed == p
    if n_signed < 2209:
        return True
    n = np.uint64(n_signed)
    # -n^{-1} mod 2^64 by Newton iteration
    inv = n
    for _ in range(5):
        inv = inv * (np.uint64(2) - n * inv)
    nneg = _ZERO - inv
    r1 = (np.uint64(0xFFFFFFFFFFFFFFFF) % n + _ONE) % n  # R mod n
    r2 = r1
    for _ in range(64):
        r2 = r2 + r2
        if r2 >= n:
            r2 -= n
    one_m = r1
    mone_m = n - r1
    d = n - _ONE
    s = 0
    while d & _ONE == _ZERO:
        d >>= _ONE
        s += 1
    for i in range(_MR_BASES.shape[0]):
        a = _MR_BASES[i] % n
        if a == _ZERO:
            continue
        am = _montmul(a, r2, n, nneg)
        x = one_m
        base = am
        e = d
        while e != _ZERO:
            if e & _ONE:
                x = _montmul(x, base, n, nneg)
            base = _montmul(base, base, n, nneg)
            e >>= _ONE
        if x == one_m or x == mone_m:
            continue
        composite = True
        for _ in range(s - 1):
            x = _montmul(x, x, n, nneg)
            if x == mone_m:
                composite = False
                break
        if composite:
            return False
    return True


# --- factoring ---------------------------------------------------------------

def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g


_TRIAL_LIMIT = 10**6
_trial_primes: np.ndarray | None = None


def factorize(n: int) -> list[int]:
    """Prime factors of n >= 1 with multiplicity, ascending."""
    global _trial_primes
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    factors: list[int] = []
    if _trial_primes is None:
        _trial_primes = _simple_sieve(_TRIAL_LIMIT)
    for p in _trial_primes:
        p = int(p)
        if p * p > n:
            break
        while n % p == 0:
            factors.append(p)
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors.append(m)
            continue
        d = _pollard_brent(m)
        stack.extend((d, m // d))
    return sorted(factors)


# --- primitive roots and orders ----------------------------------------------

@dataclass(frozen=True)
class PrimeModulus:
    q: int
    g: int
    qm1_factors: tuple[int, ...]

    @property
    def distinct_factors(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.qm1_factors)))


@dataclass(frozen=True)
class OrderInfo:
    p: int
    f_p: int
    n_p: int | None = None


def is_generator(g: int, q: int, distinct_factors) -> bool:
    if g % q == 0:
        return False
    return all(pow(g, (q - 1) // r, q) != 1 for r in distinct_factors)


def primitive_root(q: int) -> PrimeModulus:
    """Smallest primitive root of the odd prime q."""
    if q < 3 or q % 2 == 0 or not is_prime(q):
        raise DomainError("modulus not prime")
    fac = tuple(factorize(q - 1))
    distinct = sorted(set(fac))
    g = 2
    while not is_generator(g, q, distinct):
        g += 1
    return PrimeModulus(q, g, fac)


def with_root(modulus: PrimeModulus, g: int) -> PrimeModulus:
    """The same modulus indexed by another primitive root."""
    if not is_generator(g, modulus.q, modulus.distinct_factors):
        raise DomainError(f"{g} is not a primitive root mod {modulus.q}")
    return PrimeModulus(modulus.q, g, modulus.qm1_factors)


def multiplicative_order(p: int, modulus: PrimeModulus, bit_budget: int = N_P_BIT_BUDGET) -> OrderInfo:
    q = modulus.q
    if p % q == 0:
        raise DomainError("p equals q")
    f = q - 1
    for r in modulus.distinct_factors:
        while f % r == 0 and pow(p, f // r, q) == 1:
            f //= r
    n_p = None
    if f >= 2 and f * p.bit_length() <= bit_budget:
        num = (p**f - 1) // (p - 1)
        n_p, rem = divmod(num, q)
        assert rem == 0
    return OrderInfo(p, f, n_p)


@nb.njit(cache=True)
def _power_table(q, g):
    r = np.empty(q - 1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        x = (x * g) % q
        r[k] = x
    return r


def power_table(modulus: PrimeModulus) -> np.ndarray:
    """Array whose entry k-1 is g^k mod q for k = 1..q-1."""
    return _power_table(modulus.q, modulus.g)


def discrete_log_table(modulus: PrimeModulus) -> np.ndarray:
    """dlog[r] = k in [1, q-1] with g^k = r; dlog[0] = 0."""
    r = power_table(modulus)
    dlog = np.zeros(modulus.q, dtype=np.int64)
    dlog[r] = np.arange(1, modulus.q, dtype=np.int64)
    return dlog


def orders_by_residue(modulus: PrimeModulus) -> np.ndarray:
    """ord[r] = multiplicative order of r mod q; ord[0] = 0."""
    dlog = discrete_log_table(modulus)
    order = (modulus.q - 1) // np.gcd(dlog, modulus.q - 1)
    order[0] = 0
    return order
