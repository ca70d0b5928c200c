"""S(q), the Euler product C(q, s), e_0(q), the ratio (q-1) e_1/e_0 and a Mertens check.

Only primes p != q with f_p = ord_q(p) >= 2 enter S and C.  The orders come
from a discrete-log table mod q, so each prime costs one lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ddreal import DD
from .errors import DomainError
from .lfun import EKResult, check_odd_prime, euler_kronecker, residue_alpha
from .ntheory import PrimeModulus, iter_prime_segments, orders_by_residue, primitive_root, with_root
from .specfun import euler_gamma, log_gamma

CONTRIBUTION_FLOOR = 1e-30


def default_pmax(q: int) -> int:
    return max(10**6, 100 * q)


def _modulus(q: int, root: int | None) -> PrimeModulus:
    check_odd_prime(q)
    m = primitive_root(q)
    return m if root is None else with_root(m, root)


def _nonsplit_primes(modulus: PrimeModulus, pmax: int, primes: np.ndarray | None = None):
    """Yield (p, f_p) arrays for primes p <= pmax, p != q, f_p >= 2, segment by segment.

    ``primes`` may supply a presieved ascending array reaching at least pmax.
    """
    if pmax < 2:
        raise DomainError("pmax must be >= 2")
    q = modulus.q
    order = orders_by_residue(modulus)
    if primes is not None:
        segments = [primes[: np.searchsorted(primes, pmax, side="right")]]
    else:
        segments = iter_prime_segments(pmax)
    for seg in segments:
        f = order[seg % q]
        keep = f >= 2  # f = 0 marks p = q
        yield seg[keep], f[keep]


def _progression_tail(q: int, pmax: int) -> float:
    """Bound for sum over p = 2kq - 1 > pmax of log p/(p^2 - 1).

    With u = 2kq the summand is log u'/(u(u-2)) <= log u/(u-2)^2, decreasing,
    so the sum is below (1/2q) * integral_U^inf log u/(u-2)^2 du, U = 2q*floor(pmax/2q).
    """
    k0 = pmax // (2 * q)
    U = max(2.0 * q * k0, 4.0)
    integral = math.log(U) / (U - 2) + 0.5 * math.log(U / (U - 2))
    return integral / (2 * q)


def _cube_tail(pmax: int) -> float:
    # sum_{n > P} log n/(n^3 - 1) <= (log P + 1)/P^2 for P >= 3
    P = max(pmax, 3)
    return (math.log(P) + 1) / P**2


@dataclass(frozen=True)
class SqResult:
    q: int
    value: DD
    pmax: int
    tail_bound: float
    primes: np.ndarray = field(repr=False)
    orders: np.ndarray = field(repr=False)
    terms: np.ndarray = field(repr=False)

    @property
    def contributions(self) -> list[tuple[int, int, float]]:
        """(p, f_p, log p/(p^f_p - 1)) for every term above the floor."""
        return list(zip(self.primes.tolist(), self.orders.tolist(), self.terms.tolist()))


def _terms_s(p: np.ndarray, f: np.ndarray) -> np.ndarray:
    lp = np.log(p.astype(np.float64))
    e = f * lp
    with np.errstate(over="ignore"):
        t = lp / np.expm1(e)
    # far out the exact term is log p * p^-f to well below 1e-50 relative
    big = f * np.log2(p.astype(np.float64)) > 200
    t[big] = lp[big] * np.exp(-e[big])
    return t


def s_of_q(q: int, pmax: int | None = None, root: int | None = None, primes: np.ndarray | None = None) -> SqResult:
    """S(q) = sum_{p != q, f_p >= 2} log p/(p^f_p - 1) over p <= pmax, with a tail bound."""
    modulus = _modulus(q, root)
    pmax = default_pmax(q) if pmax is None else int(pmax)
    ps, fs, ts = [], [], []
    total = []
    for p, f in _nonsplit_primes(modulus, pmax, primes):
        t = _terms_s(p, f)
        total.append(math.fsum(t))
        keep = t > CONTRIBUTION_FLOOR
        ps.append(p[keep])
        fs.append(f[keep])
        ts.append(t[keep])
    value = math.fsum(total)
    tail = _progression_tail(q, pmax) + _cube_tail(pmax)
    cat = lambda xs, dt: np.concatenate(xs) if xs else np.empty(0, dtype=dt)  # noqa: E731
    return SqResult(q, DD(value), pmax, tail, cat(ps, np.int64), cat(fs, np.int64), cat(ts, np.float64))


@dataclass(frozen=True)
class CResult:
    q: int
    s: float
    log_value: DD
    value: DD
    pmax: int
    log_tail_bound: float


def log_c_of_s(q: int, s: float = 1.0, pmax: int | None = None, root: int | None = None) -> CResult:
    """log C(q, s) = sum (q-1)/f_p log(1 - p^(-s f_p)), accumulated in log space."""
    modulus = _modulus(q, root)
    pmax = default_pmax(q) if pmax is None else int(pmax)
    parts = []
    for p, f in _nonsplit_primes(modulus, pmax):
        lp = np.log(p.astype(np.float64))
        parts.append(math.fsum(((q - 1) / f) * np.log1p(-np.exp(-s * f * lp))))
    logc = math.fsum(parts)
    # -log(1 - y) <= 1.01 y for y <= 1e-2; f = 2 progression plus everything with f >= 3
    k0 = max(pmax // (2 * q), 1)
    U = 2.0 * q * k0
    tail2 = (q - 1) / 2 * 1.01 / (2 * q) * 0.5 * math.log(U / (U - 2)) if U > 2 else math.inf
    tail3 = (q - 1) / 3 * 1.01 / (2 * (pmax - 1) ** 2)
    if s < 1:
        # crude: the omitted terms grow by at most pmax^(f (1-s))
        tail2 *= float(pmax) ** (2 * (1 - s))
        tail3 *= float(pmax) ** (3 * (1 - s))
    return CResult(q, s, DD(logc), DD(logc).exp(), pmax, tail2 + tail3)


def c_of_q(q: int, pmax: int | None = None, root: int | None = None) -> CResult:
    """C(q) = C(q, 1)."""
    return log_c_of_s(q, 1.0, pmax, root)


def log_c_derivative(q: int, h: float = 1e-6, pmax: int | None = None) -> float:
    """Centered difference of log C(q, s) at s = 1; should equal (q-1) S(q)."""
    up = log_c_of_s(q, 1.0 + h, pmax).log_value
    dn = log_c_of_s(q, 1.0 - h, pmax).log_value
    return float((up - dn) / (2 * h))


@dataclass(frozen=True)
class CoefficientSet:
    q: int
    c_q1: DD
    alpha: DD
    log_alpha: DD
    e0: DD
    ratio: DD
    gamma_q: DD
    s_q: DD
    diagnostics: dict = field(default_factory=dict)


def _log_e0(q: int, log_c: DD, log_alpha: DD) -> DD:
    num = (DD(1) - DD(1) / DD(q * q)).log()
    lg = log_gamma(Fraction(q - 2, q - 1))
    inner = log_c + (DD(1) - DD(1) / DD(q)).log() + log_alpha
    return num - lg - inner / DD(q - 1)


def e0(q: int, pmax: int | None = None, ek: EKResult | None = None) -> DD:
    """e_0(q) = (1 - q^-2) / (Gamma((q-2)/(q-1)) (C(q)(1 - 1/q) alpha)^(1/(q-1)))."""
    check_odd_prime(q)
    ek = ek or euler_kronecker(q)
    residue_alpha(ek.lvalues)  # sign and imaginary-part checks
    c = c_of_q(q, pmax)
    return _log_e0(q, c.log_value, ek.lvalues.log_alpha).exp()


def ratio_from_parts(q: int, s_q: DD, gamma_q: DD) -> DD:
    """(q-1) e_1/e_0 = 1 - gamma + (3-q) log q/((q-1)^2 (q+1)) + S(q) + gamma_q/(q-1)."""
    lq = DD(q).log()
    mid = lq * (3 - q) / DD((q - 1) ** 2 * (q + 1))
    return DD(1) - euler_gamma() + mid + s_q + gamma_q / DD(q - 1)


def e1_ratio(q: int, pmax: int | None = None, ek: EKResult | None = None) -> DD:
    check_odd_prime(q)
    ek = ek or euler_kronecker(q)
    return ratio_from_parts(q, s_of_q(q, pmax).value, ek.value)


def coefficients(q: int, pmax: int | None = None, precision: str = "high") -> CoefficientSet:
    """All per-q constants from one gamma_q pipeline run and one prime scan each."""
    check_odd_prime(q)
    ek = euler_kronecker(q, precision=precision)
    alpha = residue_alpha(ek.lvalues)
    sq = s_of_q(q, pmax)
    c = c_of_q(q, pmax)
    log_e0 = _log_e0(q, c.log_value, ek.lvalues.log_alpha)
    diag = dict(ek.diagnostics)
    diag.update(
        pmax=sq.pmax,
        s_tail_bound=sq.tail_bound,
        log_c_tail_bound=c.log_tail_bound,
        gamma_q_error_estimate=ek.error_estimate,
    )
    return CoefficientSet(
        q=q,
        c_q1=c.value,
        alpha=alpha,
        log_alpha=ek.lvalues.log_alpha,
        e0=log_e0.exp(),
        ratio=ratio_from_parts(q, sq.value, ek.value),
        gamma_q=ek.value,
        s_q=sq.value,
        diagnostics=diag,
    )


@dataclass(frozen=True)
class MertensResult:
    q: int
    x: int
    lhs: float
    rhs: float
    ratio: float


def mertens_check(q: int, x: int, pmax: int | None = None) -> MertensResult:
    """prod_{p <= x, p = 1 mod q} (1 - 1/p) against its asymptotic form."""
    check_odd_prime(q)
    if x < 2 * q:
        raise DomainError("mertens_check needs x >= 2q")
    parts = []
    for seg in iter_prime_segments(x):
        p = seg[seg % q == 1].astype(np.float64)
        parts.append(math.fsum(np.log1p(-1.0 / p)))
    log_lhs = math.fsum(parts)
    ek = euler_kronecker(q)
    residue_alpha(ek.lvalues)
    log_c = float(c_of_q(q, pmax).log_value)
    log_rhs = (
        math.log(q) - float(euler_gamma()) - math.log(q - 1)
        - float(ek.lvalues.log_alpha) - log_c - math.log(math.log(x))
    ) / (q - 1)
    return MertensResult(q, x, math.exp(log_lhs), math.exp(log_rhs), math.exp(log_lhs - log_rhs))
