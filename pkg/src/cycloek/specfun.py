"""Euler's constant, digamma and the log-sum T(y) at rationals, real Gamma.

Both ``psi(r/q)`` and ``T(r/q)`` are evaluated by pushing the argument up by
``SHIFT`` with the exact recurrences

    psi(y) = psi(y + N) - sum_{m<N} 1/(m + y)
    T(y)   = sum_{m<N} log(m + y)/(m + y) + G(y + N) - gamma_1

and finishing with the Euler-Maclaurin asymptotic series of psi and of the
regularised sum ``G(z) = lim_M [sum_{m<=M} log(m+z)/(m+z) - log(M+z)^2/2]``
(the generalised Stieltjes constant gamma_1(z)).  With ``SHIFT = 16`` and 12
Bernoulli terms the truncation error is below 1e-26.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numba as nb
import numpy as np
import sympy

from .ddreal import (
    DD,
    EULER_GAMMA,
    HALF_LOG_2PI,
    STIELTJES1,
    dd_add,
    dd_add_d,
    dd_div,
    dd_from_fraction,
    dd_log,
    dd_mul,
    dd_mul_d,
    dd_sub,
)
from .errors import DomainError

SHIFT = 16
N_BERNOULLI = 12

# Coefficients in the variable w = 1/z^2:
#   psi:   log z - 1/(2z) - sum PSI_C[k] w^(k+1),       PSI_C[k] = B_{2k+2}/(2k+2)
#   G:     -L^2/2 + L/(2z) + L sum PSI_C[k] w^(k+1) - sum G_C[k] w^(k+1),
#          G_C[k] = B_{2k+2} H_{2k+1}/(2k+2)
#   lgamma: (z-1/2)log z - z + log(2pi)/2 + sum LG_C[k] z^(-2k-1)


def _harmonic(n: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def _coeffs():
    psi_c, g_c, lg_c = [], [], []
    for k in range(1, N_BERNOULLI + 1):
        b = Fraction(sympy.bernoulli(2 * k))
        psi_c.append(dd_from_fraction(b / (2 * k)))
        g_c.append(dd_from_fraction(b * _harmonic(2 * k - 1) / (2 * k)))
        lg_c.append(dd_from_fraction(b / (2 * k * (2 * k - 1))))
    return np.array(psi_c), np.array(g_c), np.array(lg_c)


PSI_C, G_C, LG_C = _coeffs()

_EG_H, _EG_L = EULER_GAMMA
_G1_H, _G1_L = STIELTJES1


def euler_gamma() -> DD:
    """Euler's constant 0.5772156649015328606065120900824..."""
    return DD(*EULER_GAMMA)


@nb.njit(cache=True)
def _psi_t_at(r, q, lq_h, lq_l, tab_h, tab_l, use_tab):
    """(psi(r/q), T(r/q)) as four floats; logs from the integer table if use_tab."""
    qf = float(q)
    ps_h, ps_l = 0.0, 0.0
    g_h, g_l = 0.0, 0.0
    for m in range(SHIFT):
        n = m * q + r
        inv_h, inv_l = dd_div(qf, 0.0, float(n), 0.0)  # 1/(m + y)
        ps_h, ps_l = dd_sub(ps_h, ps_l, inv_h, inv_l)
        if use_tab:
            lh, ll = dd_sub(tab_h[n], tab_l[n], lq_h, lq_l)
        else:
            yh, yl = dd_div(float(n), 0.0, qf, 0.0)
            lh, ll = dd_log(yh, yl)
        fh, fl = dd_mul(lh, ll, inv_h, inv_l)
        g_h, g_l = dd_add(g_h, g_l, fh, fl)
    n = SHIFT * q + r
    iz_h, iz_l = dd_div(qf, 0.0, float(n), 0.0)  # 1/z
    if use_tab:
        lh, ll = dd_sub(tab_h[n], tab_l[n], lq_h, lq_l)
    else:
        zh, zl = dd_div(float(n), 0.0, qf, 0.0)
        lh, ll = dd_log(zh, zl)
    w_h, w_l = dd_mul(iz_h, iz_l, iz_h, iz_l)
    # Horner sums sum_k c_k w^(k+1)
    a_h, a_l = 0.0, 0.0
    b_h, b_l = 0.0, 0.0
    for k in range(N_BERNOULLI - 1, -1, -1):
        a_h, a_l = dd_add(a_h, a_l, PSI_C[k, 0], PSI_C[k, 1])
        a_h, a_l = dd_mul(a_h, a_l, w_h, w_l)
        b_h, b_l = dd_add(b_h, b_l, G_C[k, 0], G_C[k, 1])
        b_h, b_l = dd_mul(b_h, b_l, w_h, w_l)
    half_iz_h, half_iz_l = 0.5 * iz_h, 0.5 * iz_l
    # psi(z) = L - 1/(2z) - A
    t_h, t_l = dd_sub(lh, ll, half_iz_h, half_iz_l)
    t_h, t_l = dd_sub(t_h, t_l, a_h, a_l)
    ps_h, ps_l = dd_add(ps_h, ps_l, t_h, t_l)
    # G(z) = -L^2/2 + L/(2z) + L*A - B
    l2_h, l2_l = dd_mul(lh, ll, lh, ll)
    u_h, u_l = dd_add(half_iz_h, half_iz_l, a_h, a_l)
    u_h, u_l = dd_mul(u_h, u_l, lh, ll)
    u_h, u_l = dd_sub(u_h, u_l, 0.5 * l2_h, 0.5 * l2_l)
    u_h, u_l = dd_sub(u_h, u_l, b_h, b_l)
    g_h, g_l = dd_add(g_h, g_l, u_h, u_l)
    if r == q:
        t_h, t_l = 0.0, 0.0
    else:
        t_h, t_l = dd_sub(g_h, g_l, _G1_H, _G1_L)
    return ps_h, ps_l, t_h, t_l


_EMPTY = np.zeros(1)


def _check_rational(r: int, q: int) -> None:
    if q < 1 or r < 1 or r > q:
        raise DomainError(f"argument r/q = {r}/{q} outside (0, 1]")


def digamma(r: int, q: int) -> DD:
    """psi(r/q) for 1 <= r <= q, absolute error below 1e-25."""
    _check_rational(r, q)
    ph, pl, _, _ = _psi_t_at(r, q, 0.0, 0.0, _EMPTY, _EMPTY, False)
    return DD(ph, pl)


def t_sum(r: int, q: int) -> DD:
    """T(r/q) = sum_{m>=0} [log(m+y)/(m+y) - log(m+1)/(m+1)], y = r/q."""
    _check_rational(r, q)
    _, _, th, tl = _psi_t_at(r, q, 0.0, 0.0, _EMPTY, _EMPTY, False)
    return DD(th, tl)


# --- integer log table ---------------------------------------------------------

LOG_TABLE_CAP = 1 << 22


@nb.njit(cache=True)
def _fill_log_table(limit, primes, prime_logs_h, prime_logs_l):
    spf = np.zeros(limit + 1, dtype=np.int32)
    for i in range(primes.shape[0]):
        p = primes[i]
        if p * p > limit:
            break
        for m in range(p * p, limit + 1, p):
            if spf[m] == 0:
                spf[m] = p
    idx = np.zeros(limit + 1, dtype=np.int64)
    for i in range(primes.shape[0]):
        idx[primes[i]] = i
    th = np.zeros(limit + 1)
    tl = np.zeros(limit + 1)
    for n in range(2, limit + 1):
        p = spf[n]
        if p == 0:
            th[n] = prime_logs_h[idx[n]]
            tl[n] = prime_logs_l[idx[n]]
        else:
            th[n], tl[n] = dd_add(th[p], tl[p], th[n // p], tl[n // p])
    return th, tl


@nb.njit(cache=True)
def _prime_logs(primes):
    h = np.empty(primes.shape[0])
    lo = np.empty(primes.shape[0])
    for i in range(primes.shape[0]):
        h[i], lo[i] = dd_log(float(primes[i]), 0.0)
    return h, lo


_log_table: tuple[np.ndarray, np.ndarray] | None = None


def integer_log_table(limit: int) -> tuple[np.ndarray, np.ndarray]:
    """DD logs of 0..limit (entries 0 and 1 are zero); grown and cached."""
    global _log_table
    if _log_table is not None and _log_table[0].shape[0] > limit:
        return _log_table
    from .ntheory import sieve_primes

    size = max(limit, 2 * (0 if _log_table is None else _log_table[0].shape[0]), 1 << 16)
    size = min(size, max(limit, LOG_TABLE_CAP))
    primes = sieve_primes(size)
    ph, pl = _prime_logs(primes)
    _log_table = _fill_log_table(size, primes, ph, pl)
    return _log_table


@nb.njit(cache=True)
def _tables_kernel(q, g, tab_h, tab_l, use_tab):
    n = q - 1
    psi_h = np.empty(n)
    psi_l = np.empty(n)
    t_h = np.empty(n)
    t_l = np.empty(n)
    r_vec = np.empty(n, dtype=np.int64)
    if use_tab:
        lq_h, lq_l = tab_h[q], tab_l[q]
    else:
        lq_h, lq_l = 0.0, 0.0
    r = 1
    for k in range(n):
        r = (r * g) % q
        r_vec[k] = r
        psi_h[k], psi_l[k], t_h[k], t_l[k] = _psi_t_at(r, q, lq_h, lq_l, tab_h, tab_l, use_tab)
    return r_vec, psi_h, psi_l, t_h, t_l


def psi_t_tables(q: int, g: int, use_table: bool | None = None):
    """psi(r_k/q), T(r_k/q) for r_k = g^k mod q, k = 1..q-1 (DD hi/lo arrays)."""
    need = (SHIFT + 1) * q
    if use_table is None:
        use_table = need <= LOG_TABLE_CAP
    if use_table:
        tab_h, tab_l = integer_log_table(need)
    else:
        tab_h = tab_l = _EMPTY
    return _tables_kernel(q, g, tab_h, tab_l, use_table)


@nb.njit(cache=True)
def _psi_t_fast_kernel(q, g):
    # binary64 variant for the reduced-precision path
    n = q - 1
    psi = np.empty(n)
    tv = np.empty(n)
    g1 = _G1_H
    r = 1
    for k in range(n):
        r = (r * g) % q
        y = r / q
        ps = 0.0
        gs = 0.0
        for m in range(SHIFT):
            u = m + y
            ps -= 1.0 / u
            gs += np.log(u) / u
        z = SHIFT + y
        L = np.log(z)
        w = 1.0 / (z * z)
        a = 0.0
        b = 0.0
        for j in range(N_BERNOULLI - 1, -1, -1):
            a = (a + PSI_C[j, 0]) * w
            b = (b + G_C[j, 0]) * w
        psi[k] = ps + L - 0.5 / z - a
        tv[k] = 0.0 if r == q else gs - 0.5 * L * L + L * (0.5 / z + a) - b - g1
    return psi, tv


# --- Gamma --------------------------------------------------------------------

def _to_dd(x) -> DD:
    if isinstance(x, DD):
        return x
    if isinstance(x, Fraction):
        return DD(*dd_from_fraction(x))
    return DD.coerce(x)


def log_gamma(x) -> DD:
    """log Gamma(x) for real x > 0."""
    x = _to_dd(x)
    if x.hi <= 0:
        raise DomainError("gamma_real needs x > 0")
    shift = DD(0.0)
    z = x
    while z.hi < 20.0:
        shift = shift + z.log()
        z = z + 1
    lz = z.log()
    iz = DD(1.0) / z
    w = iz * iz
    s = DD(0.0)
    for k in range(N_BERNOULLI - 1, -1, -1):
        s = (s + DD(*LG_C[k])) * w
    s = s * z  # series starts at z^-1
    val = (z - 0.5) * lz - z + DD(*HALF_LOG_2PI) + s
    return val - shift


def gamma_real(x) -> DD:
    """Gamma(x) for real x > 0, relative error below 1e-20."""
    return log_gamma(x).exp()
