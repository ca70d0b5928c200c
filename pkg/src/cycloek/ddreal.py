"""Double-double ("DD") arithmetic.

A DD value is an unevaluated sum ``hi + lo`` of two binary64 numbers with
``|lo| <= ulp(hi)/2``, giving roughly 106 bits of mantissa.  The kernels
below are plain numba functions operating on ``(hi, lo)`` tuples so that
the vectorised table/transform loops and the scalar :class:`DD` wrapper
share one implementation.

None of these kernels may be compiled with ``fastmath``: the error-free
transforms rely on strict IEEE evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
import math

import numba as nb
import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1

_jit = nb.njit(cache=True, inline="always")


@_jit
def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@_jit
def quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


@_jit
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@_jit
def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@_jit
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


@_jit
def dd_sub(ah, al, bh, bl):
    return dd_add(ah, al, -bh, -bl)


@_jit
def dd_add_d(ah, al, b):
    s, e = two_sum(ah, b)
    e += al
    return quick_two_sum(s, e)


@_jit
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e += ah * bl + al * bh
    return quick_two_sum(p, e)


@_jit
def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e += al * b
    return quick_two_sum(p, e)


@_jit
def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = dd_mul_d(bh, bl, q1)
    rh, rl = dd_sub(ah, al, ph, pl)
    q2 = rh / bh
    ph, pl = dd_mul_d(bh, bl, q2)
    rh, rl = dd_sub(rh, rl, ph, pl)
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add_d(q1, q2, q3)


@_jit
def dd_sqr(ah, al):
    p, e = two_prod(ah, ah)
    e += 2.0 * ah * al
    return quick_two_sum(p, e)


@_jit
def dd_sqrt(ah, al):
    if ah <= 0.0:
        return 0.0, 0.0
    s = math.sqrt(ah)
    sh, sl = two_prod(s, s)
    rh, rl = dd_sub(ah, al, sh, sl)
    return quick_two_sum(s, rh / (2.0 * s))


# Constants as (hi, lo) pairs.
PI = (3.141592653589793, 1.2246467991473532e-16)
TWO_PI = (6.283185307179586, 2.4492935982947064e-16)
LN2 = (0.6931471805599453, 2.3190468138462996e-17)
EULER_GAMMA = (0.5772156649015329, -4.942915152430645e-18)
STIELTJES1 = (-0.07281584548367673, 2.851266173998682e-18)
HALF_LOG_2PI = (0.9189385332046728, -3.8782941580672414e-17)

_PI_H, _PI_L = PI
_TWO_PI_H, _TWO_PI_L = TWO_PI
_LN2_H, _LN2_L = LN2

# 1/k! for the exp Taylor series, as DD.
_INV_FACT = np.array(
    [[float(Fraction(1, math.factorial(k))),
      float(Fraction(1, math.factorial(k)) - Fraction(float(Fraction(1, math.factorial(k)))))]
     for k in range(40)]
)


@nb.njit(cache=True)
def dd_exp(ah, al):
    if ah > 709.0:
        return np.inf, 0.0
    if ah < -745.0:
        return 0.0, 0.0
    k = math.floor(ah / _LN2_H + 0.5)
    th, tl = dd_mul_d(_LN2_H, _LN2_L, k)
    rh, rl = dd_sub(ah, al, th, tl)
    # r in [-ln2/2, ln2/2]; scale down by 2**10 then square back up
    rh *= 1.0 / 1024.0
    rl *= 1.0 / 1024.0
    # Horner for exp(r) - 1
    sh, sl = _INV_FACT[11, 0], _INV_FACT[11, 1]
    for i in range(10, 0, -1):
        sh, sl = dd_mul(sh, sl, rh, rl)
        sh, sl = dd_add(sh, sl, _INV_FACT[i, 0], _INV_FACT[i, 1])
    sh, sl = dd_mul(sh, sl, rh, rl)
    # (1+s)^2 - 1 = 2s + s^2 keeps the small quantity accurate
    for _ in range(10):
        qh, ql = dd_sqr(sh, sl)
        sh, sl = dd_add(2.0 * sh, 2.0 * sl, qh, ql)
    sh, sl = dd_add_d(sh, sl, 1.0)
    return math.ldexp(sh, int(k)), math.ldexp(sl, int(k))


@nb.njit(cache=True)
def dd_log(ah, al):
    if ah <= 0.0:
        return np.nan, np.nan
    y = math.log(ah)
    # one Newton step on exp(y) = a
    eh, el = dd_exp(-y, 0.0)
    th, tl = dd_mul(ah, al, eh, el)
    th, tl = dd_add_d(th, tl, -1.0)
    return dd_add_d(th, tl, y)


@nb.njit(cache=True)
def _sincos_taylor(xh, xl):
    # |x| <= pi/4
    x2h, x2l = dd_sqr(xh, xl)
    # sin(x)/x and cos(x) via Horner in x^2, 15 terms each
    sh, sl = 0.0, 0.0
    ch, cl = 0.0, 0.0
    for n in range(15, -1, -1):
        sh, sl = dd_mul(sh, sl, x2h, x2l)
        ch, cl = dd_mul(ch, cl, x2h, x2l)
        sign = -1.0 if n % 2 else 1.0
        sh, sl = dd_add(sh, sl, sign * _INV_FACT[2 * n + 1, 0], sign * _INV_FACT[2 * n + 1, 1])
        ch, cl = dd_add(ch, cl, sign * _INV_FACT[2 * n, 0], sign * _INV_FACT[2 * n, 1])
    sh, sl = dd_mul(sh, sl, xh, xl)
    return ch, cl, sh, sl


@nb.njit(cache=True)
def dd_cos_sin_frac(num, den):
    """cos and sin of 2*pi*num/den for integers den > 0, as DD pairs.

    The octant reduction is done in exact integer arithmetic.
    """
    n = num % den
    # scale to eighths: position in [0, 8*den)
    e8 = 8 * n
    octant = e8 // den
    # remainder angle fraction t = (e8 - octant*den) / (8*den) in [0, 1/8)
    rem = e8 - octant * den
    # work on angle 2*pi*t', t' in [0, 1/8]
    if octant % 2 == 1:
        rem = den - rem
    # x = 2*pi*rem/(8*den) = pi*rem/(4*den)
    xh, xl = dd_mul_d(_PI_H, _PI_L, float(rem))
    xh, xl = dd_div(xh, xl, 4.0 * den, 0.0)
    ch, cl, sh, sl = _sincos_taylor(xh, xl)
    # map back: angle = octant*pi/4 +/- x
    o = octant
    if o == 0:
        return ch, cl, sh, sl
    elif o == 1:
        return sh, sl, ch, cl
    elif o == 2:
        return -sh, -sl, ch, cl
    elif o == 3:
        return -ch, -cl, sh, sl
    elif o == 4:
        return -ch, -cl, -sh, -sl
    elif o == 5:
        return -sh, -sl, -ch, -cl
    elif o == 6:
        return sh, sl, -ch, -cl
    else:
        return ch, cl, -sh, -sl


def dd_from_fraction(fr: Fraction) -> tuple[float, float]:
    hi = float(fr)
    if not math.isfinite(hi):
        return hi, 0.0
    return hi, float(fr - Fraction(hi))


class DD:
    """Scalar double-double real.

    Supports ``+ - * /``, comparisons, :meth:`exp`, :meth:`log`,
    :meth:`sqrt` and lossless decimal round-tripping at 32 significant
    digits.  Mixed arithmetic with ``int``/``float`` promotes the other
    operand exactly when it is representable.
    """

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float = 0.0, lo: float = 0.0):
        hi = float(hi)
        lo = float(lo)
        if lo != 0.0 and math.isfinite(hi):
            hi, lo = quick_two_sum(hi, lo) if abs(hi) >= abs(lo) else two_sum(hi, lo)
        self.hi = hi
        self.lo = lo

    @classmethod
    def coerce(cls, x) -> "DD":
        if isinstance(x, DD):
            return x
        if isinstance(x, int):
            return cls(*dd_from_fraction(Fraction(x)))
        if isinstance(x, Fraction):
            return cls(*dd_from_fraction(x))
        if isinstance(x, (float, np.floating)):
            return cls(float(x))
        if isinstance(x, tuple) and len(x) == 2:
            return cls(*x)
        raise TypeError(f"cannot convert {type(x).__name__} to DD")

    @classmethod
    def from_string(cls, s: str) -> "DD":
        with localcontext() as ctx:
            ctx.prec = 60
            d = Decimal(s)
            hi = float(d)
            lo = float(d - Decimal(hi))
        return cls(hi, lo)

    def to_string(self, digits: int = 32) -> str:
        with localcontext() as ctx:
            ctx.prec = digits
            d = +(Decimal(self.hi) + Decimal(self.lo))
        return format(d, "e") if d != 0 and (abs(d) < Decimal("1e-5") or abs(d) >= Decimal("1e16")) else format(d, "f")

    @property
    def pair(self) -> tuple[float, float]:
        return self.hi, self.lo

    def __float__(self) -> float:
        return self.hi

    def __repr__(self) -> str:
        return f"DD('{self.to_string()}')"

    def __str__(self) -> str:
        return self.to_string()

    def __add__(self, other):
        o = DD.coerce(other)
        return DD(*dd_add(self.hi, self.lo, o.hi, o.lo))

    __radd__ = __add__

    def __sub__(self, other):
        o = DD.coerce(other)
        return DD(*dd_sub(self.hi, self.lo, o.hi, o.lo))

    def __rsub__(self, other):
        return DD.coerce(other) - self

    def __mul__(self, other):
        o = DD.coerce(other)
        return DD(*dd_mul(self.hi, self.lo, o.hi, o.lo))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = DD.coerce(other)
        if o.hi == 0.0:
            raise ZeroDivisionError("DD division by zero")
        return DD(*dd_div(self.hi, self.lo, o.hi, o.lo))

    def __rtruediv__(self, other):
        return DD.coerce(other) / self

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.hi < 0 or (self.hi == 0 and self.lo < 0) else self

    def _cmp(self, other) -> int:
        o = DD.coerce(other)
        if self.hi != o.hi:
            return -1 if self.hi < o.hi else 1
        if self.lo != o.lo:
            return -1 if self.lo < o.lo else 1
        return 0

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash((self.hi, self.lo))

    def exp(self) -> "DD":
        return DD(*dd_exp(self.hi, self.lo))

    def log(self) -> "DD":
        if self.hi <= 0:
            raise ValueError("log of non-positive DD")
        return DD(*dd_log(self.hi, self.lo))

    def sqrt(self) -> "DD":
        if self.hi < 0:
            raise ValueError("sqrt of negative DD")
        return DD(*dd_sqrt(self.hi, self.lo))

    def __pow__(self, e):
        if isinstance(e, int):
            result = DD(1.0)
            base = self if e >= 0 else DD(1.0) / self
            n = abs(e)
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        return (self.log() * DD.coerce(e)).exp()


def dd_pi() -> DD:
    return DD(*PI)


@dataclass(frozen=True)
class DDArray:
    """Vector of DD reals stored as parallel ``hi``/``lo`` float arrays."""

    hi: np.ndarray
    lo: np.ndarray

    @classmethod
    def from_float(cls, x) -> "DDArray":
        x = np.asarray(x, dtype=np.float64)
        return cls(x.copy(), np.zeros_like(x))

    def __len__(self) -> int:
        return self.hi.shape[0]

    def __getitem__(self, i) -> DD:
        return DD(self.hi[i], self.lo[i])

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo


@dataclass(frozen=True)
class DDComplexArray:
    """Vector of DD complex numbers as four parallel float arrays."""

    re_hi: np.ndarray
    re_lo: np.ndarray
    im_hi: np.ndarray
    im_lo: np.ndarray

    @classmethod
    def from_complex(cls, z) -> "DDComplexArray":
        z = np.asarray(z, dtype=np.complex128)
        zero = np.zeros(z.shape[0])
        return cls(z.real.copy(), zero, z.imag.copy(), zero.copy())

    @classmethod
    def from_real(cls, x: DDArray) -> "DDComplexArray":
        zero = np.zeros_like(x.hi)
        return cls(x.hi.copy(), x.lo.copy(), zero, zero.copy())

    def __len__(self) -> int:
        return self.re_hi.shape[0]

    def __getitem__(self, j) -> tuple[DD, DD]:
        return DD(self.re_hi[j], self.re_lo[j]), DD(self.im_hi[j], self.im_lo[j])

    @property
    def real(self) -> DDArray:
        return DDArray(self.re_hi, self.re_lo)

    @property
    def imag(self) -> DDArray:
        return DDArray(self.im_hi, self.im_lo)

    def to_complex(self) -> np.ndarray:
        return (self.re_hi + self.re_lo) + 1j * (self.im_hi + self.im_lo)
