import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cycloek.chartransform import build_tables, dft, dft_direct, spectrum
from cycloek.ddreal import DDComplexArray
from cycloek.errors import DomainError, RefusalError
from cycloek.ntheory import primitive_root


def random_dd(rng, n):
    re = rng.standard_normal(n)
    im = rng.standard_normal(n)
    return DDComplexArray(re, re * rng.uniform(-1e-16, 1e-16, n), im, im * rng.uniform(-1e-16, 1e-16, n))


def dd_err(a, b):
    d = np.hypot((a.re_hi - b.re_hi) + (a.re_lo - b.re_lo), (a.im_hi - b.im_hi) + (a.im_lo - b.im_lo))
    return d.max() / np.abs(b.to_complex()).max()


def test_small_examples():
    x = dft(np.full(6, 2.5 + 0j)).to_complex()
    assert abs(x[0] - 15) < 1e-30
    assert np.all(np.abs(x[1:]) < 1e-30)
    assert dft([3.0, 5.0]).to_complex().tolist() == [8, -2]
    assert dft_direct([3.0, 5.0]).to_complex().tolist() == [8, -2]
    assert dft([1 + 2j]).to_complex().tolist() == [1 + 2j]
    assert dft_direct([1 + 2j]).to_complex().tolist() == [1 + 2j]


def test_sign_convention():
    # X_1 of a unit impulse at k = 1 is exp(+2 pi i/N)
    n = 10
    v = np.zeros(n, dtype=complex)
    v[1] = 1
    x = dft(v)
    re, im = x[1]
    assert abs(mp.mpf(re.hi) + mp.mpf(re.lo) - mp.cos(2 * mp.pi / n)) < 1e-30
    assert abs(mp.mpf(im.hi) + mp.mpf(im.lo) - mp.sin(2 * mp.pi / n)) < 1e-30


def test_errors():
    with pytest.raises(DomainError):
        dft([])
    with pytest.raises(DomainError):
        dft_direct([])
    with pytest.raises(RefusalError):
        dft_direct(np.zeros(10**5 + 1))


@pytest.mark.parametrize("n", [2, 4, 6, 10, 12, 16, 18, 96, 358, 1008])
def test_against_direct(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        v = random_dd(rng, n)
        assert dd_err(dft(v), dft_direct(v)) < 1e-22


def test_n358_at_1e24():
    rng = np.random.default_rng(358)
    v = random_dd(rng, 358)
    assert dd_err(dft(v), dft_direct(v)) < 1e-24


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=700), st.integers(min_value=0, max_value=2**32 - 1))
def test_parseval_and_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    v = random_dd(rng, n)
    x = dft(v)
    lhs = mp.fsum(mp.mpf(a) ** 2 for a in np.concatenate([x.re_hi, x.im_hi]))
    rhs = n * mp.fsum(mp.mpf(a) ** 2 for a in np.concatenate([v.re_hi, v.im_hi]))
    # hi parts only, so binary64 accuracy on the squared sums
    assert abs(lhs / rhs - 1) < 1e-13
    real = DDComplexArray(v.re_hi, v.re_lo, np.zeros(n), np.zeros(n))
    y = dft(real)
    j = np.arange(1, n)
    assert np.all(np.abs(y.re_hi[j] - y.re_hi[n - j]) <= 1e-13 * np.abs(y.re_hi).max())
    assert np.all(np.abs(y.im_hi[j] + y.im_hi[n - j]) <= 1e-13 * np.abs(y.im_hi).max() + 1e-300)


def test_parseval_dd():
    rng = np.random.default_rng(5)
    n = 1008
    v = random_dd(rng, n)
    x = dft(v)
    sq = lambda h, lo: mp.fsum((mp.mpf(a) + mp.mpf(b)) ** 2 for a, b in zip(h, lo))  # noqa: E731
    lhs = sq(x.re_hi, x.re_lo) + sq(x.im_hi, x.im_lo)
    rhs = n * (sq(v.re_hi, v.re_lo) + sq(v.im_hi, v.im_lo))
    assert abs(lhs / rhs - 1) < 1e-20


def test_fast_path_close():
    rng = np.random.default_rng(9)
    v = random_dd(rng, 358)
    assert dd_err(dft(v, "fast"), dft(v)) < 1e-13


def test_build_tables():
    t = build_tables(primitive_root(3))
    assert t.r.tolist() == [2, 1]
    assert abs(t.psi_vec[0].hi - float(mp.digamma(mp.mpf(2) / 3))) < 1e-15
    assert abs(t.psi_vec[1].hi - float(mp.digamma(mp.mpf(1) / 3))) < 1e-15
    t7 = build_tables(primitive_root(7))
    assert t7.r.tolist() == [3, 2, 6, 4, 5, 1]
    # r = 1 sits last; T(1/7) = gamma_1(1/7) - gamma_1
    assert abs(t7.t_vec[5].hi - float(mp.stieltjes(1, mp.mpf(1) / 7) - mp.stieltjes(1))) < 1e-13
    t = build_tables(primitive_root(1009))
    assert np.array_equal(np.sort(t.r), np.arange(1, 1009))


def test_packed_spectrum_matches_separate_transforms():
    t = build_tables(primitive_root(359))
    a = spectrum(t)
    b = spectrum(t, transform=dft_direct)
    assert dd_err(a.psi_hat, b.psi_hat) < 1e-26
    assert dd_err(a.t_hat, b.t_hat) < 1e-26
    # entry 0 is the plain sum of the inputs
    assert abs(a.psi_hat.re_hi[0] - np.sum(t.psi_vec.hi)) < 1e-9
