"""Count E_q(x) = #{n <= x : q does not divide phi(n)} and its two approximations.

q | phi(n) exactly when q^2 | n or some prime p = 1 (mod q) divides n.  The
sieve only walks primes up to sqrt(x): it divides out every small prime power
from each n, and what remains is 1 or a single prime above sqrt(x) whose
residue mod q is then tested directly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from math import isqrt

import numba as nb
import numpy as np
from scipy import integrate

from .ddreal import DD
from .errors import DomainError, RefusalError
from .lfun import check_odd_prime
from .ntheory import SEGMENT, sieve_primes

COUNT_LIMIT = 10**10


@nb.njit(cache=True)
def _count_segment(lo, hi, q, primes):
    """Number of n in [lo, hi] with q not dividing phi(n)."""
    size = hi - lo + 1
    prod = np.ones(size, dtype=np.int64)
    bad = np.zeros(size, dtype=np.bool_)
    for i in range(primes.shape[0]):
        p = primes[i]
        if p * p > hi:
            break
        start = ((lo + p - 1) // p) * p
        if p % q == 1:
            for m in range(start, hi + 1, p):
                bad[m - lo] = True
            continue
        for m in range(start, hi + 1, p):
            prod[m - lo] *= p
        pk = p * p
        while pk <= hi:
            if p == q:
                s = ((lo + pk - 1) // pk) * pk
                for m in range(s, hi + 1, pk):
                    bad[m - lo] = True
                break
            s = ((lo + pk - 1) // pk) * pk
            for m in range(s, hi + 1, pk):
                prod[m - lo] *= p
            pk *= p
    count = 0
    qq = q * q
    for k in range(size):
        if bad[k]:
            continue
        n = lo + k
        if n % qq == 0:  # q above sqrt(hi)
            continue
        rem = n // prod[k]
        if rem > 1 and rem % q == 1:
            continue
        count += 1
    return count


def count_eq(q: int, x: int, limit: int = COUNT_LIMIT) -> int:
    """E_q(x) by a segmented sieve; refuses x above ``limit``."""
    check_odd_prime(q)
    if x < 1:
        raise DomainError("count_eq needs x >= 1")
    if x > limit:
        raise RefusalError(f"x = {x} exceeds the census limit {limit}")
    primes = sieve_primes(isqrt(x) + 1)
    total = 0
    lo = 1
    while lo <= x:
        hi = min(x, lo + SEGMENT - 1)
        total += int(_count_segment(lo, hi, q, primes))
        lo = hi + 1
    return total


def _e0_value(q: int, e0: float | None) -> float:
    if e0 is not None:
        return float(e0)
    from .constants import e0 as e0_fn

    return float(e0_fn(q))


def landau(q: int, x: float, e0: float | None = None) -> DD:
    """e_0(q) x / (log x)^(1/(q-1))."""
    check_odd_prime(q)
    if x < 2:
        raise DomainError("landau needs x >= 2")
    a = 1.0 / (q - 1)
    return DD(_e0_value(q, e0) * x / math.log(x) ** a)


def log_integral_power(a: float, x: float) -> float:
    """integral_2^x dt/(log t)^a, substituting t = x e^(-v)."""
    if x <= 2:
        return 0.0
    L = math.log(x)
    top = L - math.log(2.0)
    f = lambda v: math.exp(-v) * (L - v) ** (-a)  # noqa: E731
    # split so the near-endpoint region (small log t) gets its own panel
    cuts = [0.0, min(top, 1.0), min(top, 10.0), min(top, 40.0), top]
    total = 0.0
    for u, w in zip(cuts, cuts[1:]):
        if w > u:
            val, _ = integrate.quad(f, u, w, epsabs=0.0, epsrel=1e-13, limit=200)
            total += val
    return x * total


def ramanujan(q: int, x: float, e0: float | None = None) -> DD:
    """e_0(q) * integral_2^x dt/(log t)^(1/(q-1))."""
    check_odd_prime(q)
    if x < 2:
        raise DomainError("ramanujan needs x >= 2")
    return DD(_e0_value(q, e0) * log_integral_power(1.0 / (q - 1), x))


class Verdict(enum.Enum):
    RAMANUJAN_CLOSER = "RamanujanCloser"
    LANDAU_CLOSER = "LandauCloser"
    TIE = "Tie"


@dataclass(frozen=True)
class CensusResult:
    q: int
    x: int
    count: int
    landau: DD
    ramanujan: DD
    verdict: Verdict

    @property
    def landau_error(self) -> float:
        return abs(self.count - float(self.landau))

    @property
    def ramanujan_error(self) -> float:
        return abs(self.count - float(self.ramanujan))


def verdict_of(count: int, land: float, ram: float) -> Verdict:
    dl = abs(count - land)
    dr = abs(count - ram)
    if dr < dl:
        return Verdict.RAMANUJAN_CLOSER
    if dl < dr:
        return Verdict.LANDAU_CLOSER
    return Verdict.TIE


def compare(q: int, x: int, e0: float | None = None) -> CensusResult:
    """Census count against both approximations; the closer one wins strictly."""
    check_odd_prime(q)
    if x < 3:
        raise DomainError("compare needs x >= 3")
    e = _e0_value(q, e0)
    n = count_eq(q, x)
    land = landau(q, x, e)
    ram = ramanujan(q, x, e)
    return CensusResult(q, x, n, land, ram, verdict_of(n, float(land), float(ram)))
