"""Partial-sum estimates of gamma_q, a scanner for primes q with many primes a*q + 1,
and the greedy sequence of admissible prime offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .ddreal import DD, dd_add
from .errors import DomainError, RefusalError
from .ntheory import is_prime_u64, sieve_primes

MAX_STEPS = 10**8
_EXPONENTS = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61], dtype=np.int64)


@nb.njit(cache=True)
def _int_pow(b, e, cap):
    """b**e, or -1 once the value exceeds cap."""
    r = 1
    for _ in range(e):
        if r > cap // b:
            return -1
        r *= b
    return r


@nb.njit(cache=True)
def _exact_root(n, k):
    """r with r**k == n, or 0."""
    r = int(round(n ** (1.0 / k)))
    for c in (r - 1, r, r + 1):
        if c >= 2 and _int_pow(c, k, n) == n:
            return c
    return 0


@nb.njit(cache=True)
def _prime_power_base(n):
    """p if n = p^a (a >= 1) for a prime p, else 0; for 2 <= n < 2^63."""
    if is_prime_u64(n):
        return n
    for i in range(_EXPONENTS.shape[0]):
        k = _EXPONENTS[i]
        if (1 << k) > n:
            break
        r = _exact_root(n, k)
        if r:
            return _prime_power_base(r)
    return 0


def von_mangoldt(n: int) -> float:
    """Lambda(n): log p when n is a power of the prime p, else 0."""
    if n < 1:
        raise DomainError("von_mangoldt needs n >= 1")
    if n == 1:
        return 0.0
    p = int(_prime_power_base(n))
    return math.log(p) if p else 0.0


@nb.njit(cache=True)
def _chebyshev_kernel(x):
    s_h, s_l = 0.0, 0.0
    for n in range(2, x + 1):
        p = _prime_power_base(n)
        if p:
            s_h, s_l = dd_add(s_h, s_l, math.log(p), 0.0)
    return s_h + s_l


def chebyshev_psi(x: int) -> float:
    """sum_{n <= x} Lambda(n), one n at a time."""
    return float(_chebyshev_kernel(int(x)))


@nb.njit(cache=True)
def _ek_kernel(q, kmax, checkpoints):
    # sum_{k <= kmax} Lambda(1 + kq)/(1 + kq) in double-double, snapshot at checkpoints
    m = checkpoints.shape[0]
    snap_h = np.empty(m)
    snap_l = np.empty(m)
    snap_n = np.empty(m, dtype=np.int64)
    s_h, s_l = 0.0, 0.0
    hits = 0
    c = 0
    for k in range(1, kmax + 1):
        n = 1 + k * q
        p = _prime_power_base(n)
        if p:
            hits += 1
            s_h, s_l = dd_add(s_h, s_l, math.log(p) / n, 0.0)
        while c < m and checkpoints[c] == k:
            snap_h[c] = s_h
            snap_l[c] = s_l
            snap_n[c] = hits
            c += 1
    return snap_h, snap_l, snap_n


@dataclass(frozen=True)
class EkEstimate:
    q: int
    x: int
    estimate: DD
    terms_used: int
    diagnostics: dict = field(default_factory=dict)


def _estimate(q: int, x: int, s: DD) -> DD:
    return DD(x).log() - DD(q).log() / DD(q - 1) - s * DD(q - 1)


def ek_partial_sums(q: int, xs) -> list[EkEstimate]:
    """One pass over n = 1 + kq evaluating the estimator at every cutoff in xs.

    Each estimate is log x - log q/(q-1) - (q-1) sum_{n <= x, n = 1 mod q} Lambda(n)/n,
    and its diagnostics carry the value at x/2.
    """
    xs = [int(x) for x in xs]
    if q < 3 or q % 2 == 0 or not is_prime_u64(q):
        raise DomainError("q must be an odd prime")
    for x in xs:
        if x < 2 * q:
            raise DomainError("ek_partial_sum needs x >= 2q")
        if x // q > MAX_STEPS:
            raise RefusalError(f"x/q = {x // q} exceeds {MAX_STEPS}")
    ks = sorted({(x - 1) // q for x in xs} | {(x // 2 - 1) // q for x in xs})
    kmax = ks[-1]
    if kmax * q + 1 >= 2**63:
        raise RefusalError("n exceeds the 63-bit range")
    cps = np.array(ks, dtype=np.int64)
    sh, sl, sn = _ek_kernel(q, kmax, cps)
    at = {k: (DD(h, lo), int(n)) for k, h, lo, n in zip(ks, sh, sl, sn)}
    out = []
    for x in xs:
        s, n = at[(x - 1) // q]
        s2, _ = at[(x // 2 - 1) // q]
        half = _estimate(q, x // 2, s2)
        out.append(EkEstimate(q, x, _estimate(q, x, s), n, {"estimate_at_half_x": float(half)}))
    return out


def ek_partial_sum(q: int, x: int) -> EkEstimate:
    return ek_partial_sums(q, [x])[0]


# --- scanner -----------------------------------------------------------------

@nb.njit(cache=True)
def _scan_kernel(lo, hi, A):
    m = A // 2
    qs = []
    rows = []
    for q in range(lo | 1, hi + 1, 2):
        if not is_prime_u64(q):
            continue
        row = np.zeros(m, dtype=np.bool_)
        any_hit = False
        for i in range(m):
            a = 2 * (i + 1)
            if is_prime_u64(a * q + 1):
                row[i] = True
                any_hit = True
        qs.append(q)
        rows.append(row)
    out = np.zeros((len(qs), m), dtype=np.bool_)
    for i in range(len(rows)):
        out[i] = rows[i]
    return np.array(qs, dtype=np.int64), out


@dataclass(frozen=True)
class ScanHit:
    q: int
    score: float
    witnesses: tuple[int, ...]


def scan_candidates(q_lo: int, q_hi: int, A: int, min_score: float = 0.0) -> list[ScanHit]:
    """Primes q in [q_lo, q_hi] scored by sum of 1/a over even a <= A with a q + 1 prime."""
    if A < 2:
        raise DomainError("A must be >= 2")
    if q_hi > (2**62) // A:
        raise RefusalError("q_hi * A exceeds 2^62")
    q_lo = max(q_lo, 3)
    if q_hi < q_lo:
        return []
    qs, mask = _scan_kernel(int(q_lo), int(q_hi), int(A))
    evens = np.arange(2, 2 * mask.shape[1] + 1, 2)
    scores = (mask / evens).sum(axis=1) if len(qs) else np.empty(0)
    hits = []
    for q, row, sc in zip(qs, mask, scores):
        if sc >= min_score:
            hits.append(ScanHit(int(q), float(sc), tuple(int(a) for a in evens[row])))
    hits.sort(key=lambda h: (-h.score, h.q))
    return hits


# --- greedy offsets -----------------------------------------------------------

@nb.njit(cache=True)
def _greedy_kernel(count, target, primes):
    nprimes = primes.shape[0]
    rmax = primes[-1]
    seen = np.zeros((nprimes, rmax), dtype=np.bool_)
    filled = np.zeros(nprimes, dtype=np.int64)
    sat_r = np.zeros(nprimes, dtype=np.int64)
    sat_miss = np.zeros(nprimes, dtype=np.int64)
    nsat = 0
    entries = np.zeros(count, dtype=np.int64)
    n = 0
    c = 0
    total = 0.0
    i0 = -1
    while n < count:
        ok = True
        for s in range(nsat):
            if c % sat_r[s] == sat_miss[s]:
                ok = False
                break
        if ok:
            entries[n] = c
            n += 1
            if c > 0:
                total += 1.0 / c
                if i0 < 0 and target > 0 and total > target:
                    i0 = n
            for i in range(nprimes):
                r = primes[i]
                res = c % r
                if not seen[i, res]:
                    seen[i, res] = True
                    filled[i] += 1
                    if filled[i] == r - 1:
                        for t in range(r):
                            if not seen[i, t]:
                                sat_r[nsat] = r
                                sat_miss[nsat] = t
                                nsat += 1
                                break
            if i0 > 0:
                break
        c += 1
    return entries[:n], i0


@dataclass(frozen=True)
class OffsetSequence:
    entries: tuple[int, ...]
    i0: int | None = None
    target_sum: float | None = None

    @property
    def a_i0(self) -> int | None:
        return None if self.i0 is None else self.entries[self.i0 - 1]

    def residues(self, r: int) -> set[int]:
        return {a % r for a in self.entries}


GREEDY_LIMIT = 10**5


def greedy_offsets(count: int | None = None, target_sum: float | None = None) -> OffsetSequence:
    """Greedy admissible offsets a(1) = 0 < a(2) < ...

    With ``target_sum`` the run stops at the first i0 where
    sum_{i=2}^{i0} 1/a(i) exceeds it (capped at GREEDY_LIMIT entries).
    """
    if count is None and target_sum is None:
        raise DomainError("give count or target_sum")
    n = GREEDY_LIMIT if count is None else int(count)
    if n > GREEDY_LIMIT or n < 1:
        raise RefusalError(f"count must be in [1, {GREEDY_LIMIT}]")
    primes = sieve_primes(max(n, 2))
    entries, i0 = _greedy_kernel(n, float(target_sum or 0.0), primes)
    return OffsetSequence(tuple(int(a) for a in entries), None if i0 < 0 else int(i0), target_sum)


def admissible_check(offsets) -> tuple[bool, int | None]:
    """Whether n and a n + 1 (a in offsets) have no fixed prime divisor.

    Returns (True, None) or (False, r) with r the first blocking prime.
    Only primes r <= k + 1 can block k + 1 forms.
    """
    a = np.array(sorted(set(int(v) for v in offsets)), dtype=np.int64)
    if len(a) > 10**4:
        raise RefusalError("at most 10^4 offsets")
    if len(a) and a[0] < 1:
        raise DomainError("offsets must be positive")
    for r in sieve_primes(len(a) + 1):
        r = int(r)
        n = np.arange(r, dtype=np.int64)
        blocked = n == 0
        for ai in a % r:
            blocked |= (ai * n + 1) % r == 0
        if blocked.all():
            return False, r
    return True, None
