"""L(1, chi), L'(1, chi) for every non-principal chi mod q, the residue and gamma_q.

With psi_hat and t_hat the character sums of psi(r/q) and T(r/q),

    L(1, chi)  = -psi_hat / q
    L'(1, chi) = -(log q) L(1, chi) - t_hat / q

so L'/L = t_hat/psi_hat - log q, and gamma_q = gamma + Re sum_j L'/L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .chartransform import CharTable, build_tables, spectrum
from .ddreal import (
    DD,
    DDComplexArray,
    dd_add,
    dd_div,
    dd_log,
    dd_mul,
    dd_sub,
)
from .errors import DomainError, PrecisionError, RefusalError
from .ntheory import PrimeModulus, is_prime, primitive_root
from .specfun import euler_gamma

HIGH_PRECISION_LIMIT = 2 * 10**6
VANISHING_THRESHOLD = 1e-12
IMAG_THRESHOLD = 1e-10


@dataclass(frozen=True)
class LValueSet:
    """Entry j-1 of L / Lp belongs to chi_1^j, j = 1..q-2."""

    q: int
    L: DDComplexArray
    Lp: DDComplexArray
    log_alpha: DD
    alpha: DD
    alpha_im_residual: float
    gamma_q: DD
    im_residual: float
    min_abs_L: float


@dataclass(frozen=True)
class EKResult:
    q: int
    value: DD
    lvalues: LValueSet
    precision: str
    error_estimate: float
    diagnostics: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


@nb.njit(cache=True)
def _lvalue_kernel(ph, th, q, lq_h, lq_l):
    n = ph.shape[1]  # q - 1
    m = n - 1
    L = np.empty((4, m))
    Lp = np.empty((4, m))
    qf = float(q)
    for j in range(1, n):
        lr_h, lr_l = dd_div(-ph[0, j], -ph[1, j], qf, 0.0)
        li_h, li_l = dd_div(-ph[2, j], -ph[3, j], qf, 0.0)
        tr_h, tr_l = dd_div(th[0, j], th[1, j], qf, 0.0)
        ti_h, ti_l = dd_div(th[2, j], th[3, j], qf, 0.0)
        a_h, a_l = dd_mul(lq_h, lq_l, lr_h, lr_l)
        b_h, b_l = dd_mul(lq_h, lq_l, li_h, li_l)
        pr_h, pr_l = dd_add(a_h, a_l, tr_h, tr_l)
        pi_h, pi_l = dd_add(b_h, b_l, ti_h, ti_l)
        k = j - 1
        L[0, k], L[1, k], L[2, k], L[3, k] = lr_h, lr_l, li_h, li_l
        Lp[0, k], Lp[1, k], Lp[2, k], Lp[3, k] = -pr_h, -pr_l, -pi_h, -pi_l

    # sum of t_hat/psi_hat over conjugate pairs (j, n - j) as 2 Re, middle once
    s_h, s_l = 0.0, 0.0
    im_sum = 0.0
    log_h, log_l = 0.0, 0.0
    arg_sum = 0.0
    min_abs = np.inf
    for j in range(1, n):
        pr_h, pr_l, pi_h, pi_l = ph[0, j], ph[1, j], ph[2, j], ph[3, j]
        tr_h, tr_l, ti_h, ti_l = th[0, j], th[1, j], th[2, j], th[3, j]
        n2_h, n2_l = dd_mul(pr_h, pr_l, pr_h, pr_l)
        x_h, x_l = dd_mul(pi_h, pi_l, pi_h, pi_l)
        n2_h, n2_l = dd_add(n2_h, n2_l, x_h, x_l)
        a_h, a_l = dd_mul(tr_h, tr_l, pr_h, pr_l)
        b_h, b_l = dd_mul(ti_h, ti_l, pi_h, pi_l)
        re_h, re_l = dd_add(a_h, a_l, b_h, b_l)
        re_h, re_l = dd_div(re_h, re_l, n2_h, n2_l)
        im = (ti_h * pr_h - tr_h * pi_h) / n2_h
        im_sum += im
        if 2 * j < n:
            s_h, s_l = dd_add(s_h, s_l, 2.0 * re_h, 2.0 * re_l)
        elif 2 * j == n:
            s_h, s_l = dd_add(s_h, s_l, re_h, re_l)
        # log |L_j| = log|psi_hat_j|^2 / 2 - log q
        lg_h, lg_l = dd_log(n2_h, n2_l)
        lg_h, lg_l = 0.5 * lg_h, 0.5 * lg_l
        lg_h, lg_l = dd_sub(lg_h, lg_l, lq_h, lq_l)
        log_h, log_l = dd_add(log_h, log_l, lg_h, lg_l)
        arg_sum += math.atan2(-pi_h, -pr_h)
        a = math.sqrt(n2_h) / qf
        if a < min_abs:
            min_abs = a
    return L, Lp, s_h, s_l, im_sum, log_h, log_l, arg_sum, min_abs


def _stack(z: DDComplexArray) -> np.ndarray:
    return np.ascontiguousarray(np.stack([z.re_hi, z.re_lo, z.im_hi, z.im_lo]))


def l_values(modulus: PrimeModulus, table: CharTable, transform=None) -> LValueSet:
    """All non-principal L(1, chi), L'(1, chi) and the derived gamma_q and residue."""
    q = modulus.q
    if table.modulus.q != q:
        raise DomainError("table built for a different modulus")
    pair = spectrum(table, transform)
    lq = DD(q).log()
    L, Lp, s_h, s_l, im_sum, log_h, log_l, arg_sum, min_abs = _lvalue_kernel(
        _stack(pair.psi_hat), _stack(pair.t_hat), q, lq.hi, lq.lo
    )
    if min_abs < VANISHING_THRESHOLD:
        raise PrecisionError("numerical L-value vanishing")
    gamma_q = euler_gamma() + DD(s_h, s_l) - lq * (q - 2)
    log_alpha = DD(log_h, log_l)
    # the product of conjugate pairs is real; the only phase left is the quadratic one
    cos_arg = math.cos(arg_sum)
    alpha_im = abs(math.sin(arg_sum))
    if cos_arg <= 0:
        alpha = DD(-math.inf)
    else:
        alpha = log_alpha.exp() if log_alpha.hi < 700 else DD(math.inf)
    return LValueSet(
        q=q,
        L=DDComplexArray(*L),
        Lp=DDComplexArray(*Lp),
        log_alpha=log_alpha,
        alpha=alpha,
        alpha_im_residual=alpha_im,
        gamma_q=gamma_q,
        im_residual=abs(im_sum),
        min_abs_L=float(min_abs),
    )


def residue_alpha(lset: LValueSet) -> DD:
    """Real part of prod_j L(1, chi_1^j); the residue of the Dedekind zeta at 1."""
    if lset.alpha.hi <= 0:
        raise PrecisionError("residue sign violation")
    if lset.alpha_im_residual > IMAG_THRESHOLD:
        raise PrecisionError(f"residue imaginary residual {lset.alpha_im_residual:.3e}")
    return lset.alpha


def check_odd_prime(q: int) -> None:
    if q < 3 or q % 2 == 0 or not is_prime(q):
        raise DomainError("q must be an odd prime")


def euler_kronecker(
    q: int,
    precision: str = "high",
    transform=None,
    root: int | None = None,
    size_limit: int = HIGH_PRECISION_LIMIT,
) -> EKResult:
    """gamma_q for the q-th cyclotomic field.

    ``transform`` overrides the Fourier transform (e.g. ``dft_direct``);
    ``root`` selects a primitive root other than the smallest.
    """
    check_odd_prime(q)
    if precision not in ("high", "fast"):
        raise DomainError(f"unknown precision mode {precision!r}")
    if precision == "high" and q > size_limit:
        raise RefusalError(f"q = {q} exceeds the high-precision limit {size_limit}; use precision='fast'")
    modulus = primitive_root(q)
    if root is not None:
        from .ntheory import with_root

        modulus = with_root(modulus, root)
    table = build_tables(modulus, precision)
    lset = l_values(modulus, table, transform)
    value = lset.gamma_q
    if lset.im_residual > IMAG_THRESHOLD * (1 + abs(float(value))):
        raise PrecisionError(f"imaginary part of sum L'/L is {lset.im_residual:.3e}")
    # rounding in tables and transform, amplified by 1/|L|
    eps = 2.0**-53 if precision == "fast" else 2.0**-104
    err = eps * (q - 1) * math.log2(q) / lset.min_abs_L
    diagnostics = {
        "g": modulus.g,
        "im_residual": lset.im_residual,
        "alpha_im_residual": lset.alpha_im_residual,
        "min_abs_L": lset.min_abs_L,
        "log_alpha": float(lset.log_alpha),
    }
    return EKResult(q, value, lset, precision, err, diagnostics)


__all__ = [
    "LValueSet",
    "EKResult",
    "l_values",
    "residue_alpha",
    "euler_kronecker",
    "check_odd_prime",
]
