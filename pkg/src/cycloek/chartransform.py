"""Character tables in primitive-root order and arbitrary-length DD transforms.

For a prime q with primitive root g, write r_k = g^k mod q.  Every character
mod q is chi_1^j with chi_1(g) = exp(2 pi i/(q-1)), so

    sum_r chi_1^j(r) F(r/q) = sum_{k=1}^{q-1} exp(2 pi i jk/(q-1)) F(r_k/q),

which is a length-(q-1) discrete Fourier transform with positive exponent.
The transform runs in double-double via Bluestein's chirp-z reduction to a
radix-2 FFT, so any length costs O(N log N).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numba as nb
import numpy as np

from .ddreal import DDArray, DDComplexArray, dd_add, dd_cos_sin_frac, dd_mul, dd_sub
from .errors import DomainError, RefusalError
from .ntheory import PrimeModulus
from .specfun import _psi_t_fast_kernel, psi_t_tables

DIRECT_LIMIT = 10**5


@dataclass(frozen=True)
class CharTable:
    """psi(r_k/q) and T(r_k/q) for k = 1..q-1 (array index k-1)."""

    modulus: PrimeModulus
    r: np.ndarray
    psi_vec: DDArray
    t_vec: DDArray
    precision: str = "high"


@dataclass(frozen=True)
class SpectrumPair:
    psi_hat: DDComplexArray
    t_hat: DDComplexArray


def build_tables(modulus: PrimeModulus, precision: str = "high") -> CharTable:
    q, g = modulus.q, modulus.g
    if precision == "fast":
        psi, tv = _psi_t_fast_kernel(q, g)
        r = np.empty(q - 1, dtype=np.int64)
        _fill_powers(r, q, g)
        return CharTable(modulus, r, DDArray.from_float(psi), DDArray.from_float(tv), "fast")
    r, ph, pl, th, tl = psi_t_tables(q, g)
    return CharTable(modulus, r, DDArray(ph, pl), DDArray(th, tl), "high")


@nb.njit(cache=True)
def _fill_powers(out, q, g):
    x = 1
    for k in range(q - 1):
        x = (x * g) % q
        out[k] = x


# --- DD complex kernels --------------------------------------------------------

@nb.njit(cache=True, inline="always")
def _cmul(ar, arl, ai, ail, br, brl, bi, bil):
    p1h, p1l = dd_mul(ar, arl, br, brl)
    p2h, p2l = dd_mul(ai, ail, bi, bil)
    p3h, p3l = dd_mul(ar, arl, bi, bil)
    p4h, p4l = dd_mul(ai, ail, br, brl)
    rh, rl = dd_sub(p1h, p1l, p2h, p2l)
    ih, il = dd_add(p3h, p3l, p4h, p4l)
    return rh, rl, ih, il


@nb.njit(cache=True)
def _twiddles(length):
    # exp(-2 pi i k/length), k < length/2
    half = length // 2
    th = np.empty((4, max(half, 1)))
    for k in range(half):
        ch, cl, sh, sl = dd_cos_sin_frac(k, length)
        th[0, k] = ch
        th[1, k] = cl
        th[2, k] = -sh
        th[3, k] = -sl
    return th


@nb.njit(cache=True)
def _fft_pow2(x, tw, inverse):
    """In-place radix-2 FFT of the 4 x L DD complex array x.

    Forward uses exp(-2 pi i jk/L); inverse uses exp(+2 pi i jk/L) without
    the 1/L factor.
    """
    n = x.shape[1]
    # bit reversal
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            for c in range(4):
                tmp = x[c, i]
                x[c, i] = x[c, j]
                x[c, j] = tmp
    sgn = -1.0 if inverse else 1.0
    size = 2
    while size <= n:
        half = size // 2
        step = n // size
        for start in range(0, n, size):
            for k in range(half):
                t = k * step
                wr, wrl = tw[0, t], tw[1, t]
                wi, wil = sgn * tw[2, t], sgn * tw[3, t]
                a = start + k
                b = a + half
                pr, prl, pi, pil = _cmul(x[0, b], x[1, b], x[2, b], x[3, b], wr, wrl, wi, wil)
                ur, url = x[0, a], x[1, a]
                ui, uil = x[2, a], x[3, a]
                x[0, a], x[1, a] = dd_add(ur, url, pr, prl)
                x[2, a], x[3, a] = dd_add(ui, uil, pi, pil)
                x[0, b], x[1, b] = dd_sub(ur, url, pr, prl)
                x[2, b], x[3, b] = dd_sub(ui, uil, pi, pil)
        size *= 2


@nb.njit(cache=True)
def _chirp(n):
    # exp(i pi m^2/n) = exp(2 pi i (m^2 mod 2n)/(2n))
    c = np.empty((4, n))
    two_n = 2 * n
    for m in range(n):
        e = (m * m) % two_n
        ch, cl, sh, sl = dd_cos_sin_frac(e, two_n)
        c[0, m] = ch
        c[1, m] = cl
        c[2, m] = sh
        c[3, m] = sl
    return c


@nb.njit(cache=True)
def _chirp_filter(chirp, length, tw):
    n = chirp.shape[1]
    b = np.zeros((4, length))
    for m in range(n):
        b[0, m] = chirp[0, m]
        b[1, m] = chirp[1, m]
        b[2, m] = -chirp[2, m]
        b[3, m] = -chirp[3, m]
        if m > 0:
            for c in range(4):
                b[c, length - m] = b[c, m]
    _fft_pow2(b, tw, False)
    return b


@nb.njit(cache=True)
def _bluestein(v, chirp, filt, tw):
    n = v.shape[1]
    length = filt.shape[1]
    a = np.zeros((4, length))
    for k in range(n):
        a[0, k], a[1, k], a[2, k], a[3, k] = _cmul(
            v[0, k], v[1, k], v[2, k], v[3, k], chirp[0, k], chirp[1, k], chirp[2, k], chirp[3, k]
        )
    _fft_pow2(a, tw, False)
    for k in range(length):
        a[0, k], a[1, k], a[2, k], a[3, k] = _cmul(
            a[0, k], a[1, k], a[2, k], a[3, k], filt[0, k], filt[1, k], filt[2, k], filt[3, k]
        )
    _fft_pow2(a, tw, True)
    scale = 1.0 / length  # exact: length is a power of two
    out = np.empty((4, n))
    for j in range(n):
        out[0, j], out[1, j], out[2, j], out[3, j] = _cmul(
            a[0, j] * scale, a[1, j] * scale, a[2, j] * scale, a[3, j] * scale,
            chirp[0, j], chirp[1, j], chirp[2, j], chirp[3, j],
        )
    return out


@lru_cache(maxsize=4)
def _twiddle_table(length: int) -> np.ndarray:
    return _twiddles(length)


@lru_cache(maxsize=2)
def _bluestein_plan(n: int):
    length = 1
    while length < 2 * n - 1:
        length *= 2
    tw = _twiddle_table(length)
    chirp = _chirp(n)
    filt = _chirp_filter(chirp, length, tw)
    return chirp, filt, tw


def _as_dd_complex(v) -> DDComplexArray:
    if isinstance(v, DDComplexArray):
        return v
    if isinstance(v, DDArray):
        return DDComplexArray.from_real(v)
    return DDComplexArray.from_complex(v)


def _stack(v: DDComplexArray) -> np.ndarray:
    return np.ascontiguousarray(np.stack([v.re_hi, v.re_lo, v.im_hi, v.im_lo]).astype(np.float64))


def _unstack(x: np.ndarray) -> DDComplexArray:
    return DDComplexArray(x[0].copy(), x[1].copy(), x[2].copy(), x[3].copy())


def dft(v, precision: str = "high") -> DDComplexArray:
    """X_j = sum_k v_k exp(+2 pi i jk/N) for any N >= 1 in O(N log N).

    ``v`` may be a DDComplexArray, DDArray or anything numpy converts to a
    complex vector.  ``precision="fast"`` uses numpy's binary64 FFT.
    """
    v = _as_dd_complex(v)
    n = len(v)
    if n == 0:
        raise DomainError("dft of an empty vector")
    if precision == "fast":
        z = v.to_complex()
        return DDComplexArray.from_complex(np.fft.ifft(z) * n)
    x = _stack(v)
    if n & (n - 1) == 0:
        if n > 1:
            _fft_pow2(x, _twiddle_table(n), True)
        return _unstack(x)
    chirp, filt, tw = _bluestein_plan(n)
    return _unstack(_bluestein(x, chirp, filt, tw))


@nb.njit(cache=True)
def _direct_kernel(x):
    n = x.shape[1]
    w = np.empty((4, n))
    for k in range(n):
        w[0, k], w[1, k], w[2, k], w[3, k] = dd_cos_sin_frac(k, n)
    out = np.empty((4, n))
    for j in range(n):
        rh, rl, ih, il = 0.0, 0.0, 0.0, 0.0
        idx = 0
        for k in range(n):
            pr, prl, pi, pil = _cmul(x[0, k], x[1, k], x[2, k], x[3, k], w[0, idx], w[1, idx], w[2, idx], w[3, idx])
            rh, rl = dd_add(rh, rl, pr, prl)
            ih, il = dd_add(ih, il, pi, pil)
            idx += j
            if idx >= n:
                idx -= n
        out[0, j], out[1, j], out[2, j], out[3, j] = rh, rl, ih, il
    return out


def dft_direct(v) -> DDComplexArray:
    """The same transform by its O(N^2) definition; refuses N > 1e5."""
    v = _as_dd_complex(v)
    n = len(v)
    if n == 0:
        raise DomainError("dft of an empty vector")
    if n > DIRECT_LIMIT:
        raise RefusalError(f"dft_direct refuses N = {n} > {DIRECT_LIMIT}")
    return _unstack(_direct_kernel(_stack(v)))


def transform_input(vec: DDArray) -> DDArray:
    """Reindex a k = 1..q-1 table so position k mod (q-1) holds entry k."""
    return DDArray(np.roll(vec.hi, 1), np.roll(vec.lo, 1))


@nb.njit(cache=True)
def _split_spectrum(x):
    # x = FFT(a + i b) with a, b real: A_j = (X_j + conj X_{-j})/2, B_j = (X_j - conj X_{-j})/(2i)
    n = x.shape[1]
    a = np.empty((4, n))
    b = np.empty((4, n))
    for j in range(n):
        k = (n - j) % n
        a[0, j], a[1, j] = dd_add(x[0, j], x[1, j], x[0, k], x[1, k])
        a[2, j], a[3, j] = dd_sub(x[2, j], x[3, j], x[2, k], x[3, k])
        b[0, j], b[1, j] = dd_add(x[2, j], x[3, j], x[2, k], x[3, k])
        b[2, j], b[3, j] = dd_sub(x[0, k], x[1, k], x[0, j], x[1, j])
    for c in range(4):
        for j in range(n):
            a[c, j] *= 0.5
            b[c, j] *= 0.5
    return a, b


def spectrum(table: CharTable, transform=None) -> SpectrumPair:
    """Character sums of both tables, entry j for chi_1^j.

    By default both real tables ride in one complex transform as psi + i T.
    """
    psi = transform_input(table.psi_vec)
    tv = transform_input(table.t_vec)
    if transform is not None:
        return SpectrumPair(transform(psi), transform(tv))
    packed = DDComplexArray(psi.hi, psi.lo, tv.hi, tv.lo)
    x = _stack(dft(packed, table.precision))
    a, b = _split_spectrum(x)
    return SpectrumPair(_unstack(a), _unstack(b))
