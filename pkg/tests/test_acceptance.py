"""Acceptance criteria, one PASS/FAIL line each.

Criteria that cannot be met as stated are asserted literally and carried as
strict xfails; the printed line says FAIL with the measured numbers.
"""

import io
import math

import numpy as np
import pytest

from cycloek.census import count_eq
from cycloek.chartransform import dft, dft_direct
from cycloek.cli import main
from cycloek.constants import e1_ratio, log_c_derivative, mertens_check, s_of_q
from cycloek.ddreal import DDComplexArray
from cycloek.ekscan import ek_partial_sums, greedy_offsets, scan_candidates
from cycloek.lfun import euler_kronecker
from cycloek.ntheory import sieve_primes

from oracles import GAMMA_3, phi_table
from table1_data import TABLE

pytestmark = pytest.mark.acceptance

# the reference table's S(q) column matches sums over p <= 5e5
TABLE_PMAX = 500000


def line(report, tag, ok, detail):
    report(f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
    return ok


def table_rows(*extra):
    buf = io.StringIO()
    assert main(["table", "149", "--format", "csv", "--places", "12", *extra], out=buf) == 0
    rows = buf.getvalue().splitlines()
    return [tuple(float(v) for v in r.split(",")) for r in rows[1:]]


def table_deviation(rows):
    worst = (0.0, None, None)
    for got, ref in zip(rows, TABLE):
        assert int(got[0]) == ref[0]
        for col, name in ((1, "S"), (3, "gamma_q"), (5, "ratio")):
            d = abs(got[col] - ref[col])
            if d > worst[0]:
                worst = (d, ref[0], name)
    return worst


def test_c1_table_reproduction(report):
    rows = table_rows("--pmax", str(TABLE_PMAX))
    worst, q, col = table_deviation(rows)
    ok = len(rows) == 34 and worst <= 1e-6
    line(report, "C1 table 149 (pmax=5e5)", ok, f"{len(rows)} rows, max |dev| {worst:.2e} ({col}, q={q})")
    assert ok


@pytest.mark.xfail(strict=True, reason="reference S(q) is truncated at p <= 5e5; converged S(3) is 1.8e-6 higher")
def test_c1_table_at_default_pmax(report):
    rows = table_rows()
    bad = []
    for got, ref in zip(rows, TABLE):
        for col, name in ((1, "S"), (3, "gamma_q"), (5, "ratio")):
            d = abs(got[col] - ref[col])
            if d > 1e-6:
                bad.append(f"q={ref[0]} {name} {d:.1e}")
    ok = len(rows) == 34 and not bad
    line(report, "C1 table 149 (default pmax=1e6)", ok, "all rows within 1e-6" if ok else "; ".join(bad))
    assert ok


def test_c2_gamma3(report):
    r = euler_kronecker(3)
    s = r.value.to_string(32)
    digits = 0
    for a, b in zip(s, GAMMA_3):
        if a != b:
            break
        digits += a.isdigit()
    err = abs(float(r.value - type(r.value).from_string(GAMMA_3)))
    ok = err / 0.9454972808716807 < 1e-15
    line(report, "C2 gamma_3", ok, f"{s} ({digits} matching digits, rel err {err:.1e})")
    assert ok


def test_c3_crossover(report):
    above = []
    below = []
    for q in (int(p) for p in sieve_primes(149)[1:]):
        r = float(e1_ratio(q))
        (above if r > 0.5 else below).append((q, r))
    ok = all(q <= 67 for q, _ in above) and all(q >= 71 for q, _ in below)
    r67 = dict(above).get(67, float("nan"))
    r71 = dict(below).get(71, float("nan"))
    line(report, "C3 ratio > 1/2 exactly for q <= 67", ok, f"ratio(67)={r67:.6f} ratio(71)={r71:.6f}")
    assert ok


@pytest.fixture(scope="module")
def sweep():
    qs = [int(p) for p in sieve_primes(30000)[1:]]
    return np.array(qs), np.array([float(euler_kronecker(q).value) / math.log(q) for q in qs])


@pytest.mark.slow
def test_c4_upper_bound_and_max(report, sweep):
    qs, r = sweep
    i = int(np.argmax(r))
    ok = r.max() <= 1.627 and qs[i] == 19 and abs(r[i] - 1.6269) < 5e-5
    line(report, "C4a gamma_q <= 1.627 log q, max at 19", ok, f"{len(qs)} primes, max {r[i]:.6f} at q={qs[i]}")
    assert ok


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="gamma_q/log q at q = 17183 is 0.314557, below 0.315")
def test_c4_lower_bound_and_min(report, sweep):
    qs, r = sweep
    i = int(np.argmin(r))
    below = qs[r < 0.315].tolist()
    ok = not below and qs[i] == 17183 and abs(r[i] - 0.3157) < 5e-5
    line(report, "C4b gamma_q >= 0.315 log q, min 0.3157 at 17183", ok,
         f"min {r[i]:.6f} at q={qs[i]}; below 0.315: {below}")
    assert ok


@pytest.mark.slow
def test_c5_s_bounds(report):
    primes = sieve_primes(10**7)
    worst_qs = 0.0
    worst_rel = 0.0
    fails = []
    for q in (int(p) for p in primes[primes <= 10**5]):
        if q < 5:
            continue
        r = s_of_q(q, primes=primes)
        upper = float(r.value) + r.tail_bound
        worst_qs = max(worst_qs, q * upper)
        rel = upper / ((math.log(q) + 1) / (2 * q))
        worst_rel = max(worst_rel, rel)
        if q * upper > 45 or rel > 1:
            fails.append(q)
    mers = {q: q * float(s_of_q(q).value) for q in (3, 7, 31, 127, 8191)}
    ok = not fails and all(v > math.log(2) for v in mers.values())
    line(report, "C5 S(q) bounds to 1e5", ok,
         f"max qS {worst_qs:.4f}, max S/bound {worst_rel:.4f}, min Mersenne qS {min(mers.values()):.4f}")
    assert ok


def test_c6_greedy(report):
    first = list(greedy_offsets(count=10).entries)
    s = greedy_offsets(target_sum=2.0)
    ok = first == [0, 2, 6, 8, 12, 18, 20, 26, 30, 32] and s.i0 == 2089 and s.a_i0 == 18932
    line(report, "C6 greedy offsets", ok, f"{first}, i0={s.i0}, a(i0)={s.a_i0}")
    assert ok


@pytest.mark.slow
def test_c7_negative_estimate(report):
    q = 964477901
    ests = ek_partial_sums(q, [10**6 * q, 3 * 10**6 * q, 10**7 * q])
    vals = [float(e.estimate) for e in ests]
    ok = all(-0.23 <= v <= -0.13 for v in vals)
    line(report, "C7 estimator band [-0.23, -0.13]", ok, ", ".join(f"{v:.5f}" for v in vals))
    assert ok


def test_c8_scanner(report):
    hits = scan_candidates(964477000, 964478000, 60, 0.0)
    hit = next((h for h in hits if h.q == 964477901), None)
    need = {2, 6, 8, 12, 18, 20, 26, 30, 36, 56}
    ok = hit is not None and need <= set(hit.witnesses)
    line(report, "C8 scanner witness", ok,
         f"q=964477901 rank {hits.index(hit) + 1 if hit else None}, witnesses {hit.witnesses if hit else None}")
    assert ok


@pytest.mark.slow
def test_c9_property_suites(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for n in (2, 4, 6, 10, 12, 16, 18, 96, 358, 1008, 17182):
        for _ in range(50 if n <= 1008 else 1):
            re, im = rng.standard_normal(n), rng.standard_normal(n)
            v = DDComplexArray(re, re * rng.uniform(-1e-16, 1e-16, n), im, im * rng.uniform(-1e-16, 1e-16, n))
            a, b = dft(v), dft_direct(v)
            d = np.hypot((a.re_hi - b.re_hi) + (a.re_lo - b.re_lo), (a.im_hi - b.im_hi) + (a.im_lo - b.im_lo))
            worst = max(worst, d.max() / np.abs(b.to_complex()).max())
    dft_ok = worst < 1e-22

    phi = phi_table(10**5)
    census_ok = all(
        count_eq(q, x) == int(np.sum(phi[1 : x + 1] % q != 0))
        for q in (3, 5, 7, 11, 13)
        for x in (10, 1000, 54321, 10**5)
    )
    fd = {q: log_c_derivative(q) / ((q - 1) * float(s_of_q(q).value)) - 1 for q in (3, 5, 7, 11)}
    fd_ok = all(abs(v) < 1e-4 for v in fd.values())
    mert = {q: mertens_check(q, 10**8).ratio for q in (3, 5)}
    mert_ok = all(abs(v - 1) < 0.05 for v in mert.values())
    ok = dft_ok and census_ok and fd_ok and mert_ok
    line(report, "C9 property suites", ok,
         f"dft rel {worst:.1e}; census {'ok' if census_ok else 'MISMATCH'}; "
         f"fd max {max(abs(v) for v in fd.values()):.1e}; mertens {mert[3]:.6f}, {mert[5]:.6f}")
    assert ok
