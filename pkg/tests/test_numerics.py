"""Substrate tests: log-domain scalars, harmonic engines, big-index floors.

Expected values are either trivial arithmetic or frozen from independent
oracles (direct summation, mpmath extended precision) computed inside the
test functions themselves.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from amseq.numerics import (
    EULER_GAMMA,
    NEG_INF,
    ConstructionError,
    DegenerateCancellation,
    HarmonicEngine,
    LogReal,
    PowerSumEngine,
    Q,
    default_harmonic,
    float_ratio,
    floor_exp,
    floor_int_times_float,
    harmonic_fraction,
    log_add,
    log_of_index,
    log_ratio,
    log_sub,
    sum_inverse_range,
)


# ----------------------------------------------------------------------------
# log_add / log_sub
# ----------------------------------------------------------------------------

def test_log_add_identity():
    assert log_add(0.0, NEG_INF) == 0.0
    assert log_add(NEG_INF, 0.0) == 0.0
    assert log_add(NEG_INF, NEG_INF) == NEG_INF


def test_log_add_doubling():
    assert log_add(math.log(2.0), math.log(2.0)) == pytest.approx(math.log(4.0), rel=1e-15)


def test_log_add_no_underflow():
    # adding 1e-300 to 1 must not collapse to exactly log(1)
    a, b = 0.0, math.log(1e-300)
    out = log_add(a, b)
    with mpmath.workdps(350):
        oracle = float(mpmath.log(1 + mpmath.exp(mpmath.mpf(b))))
    assert out == pytest.approx(oracle, rel=1e-12)
    assert out > 0.0


def test_log_add_random_pairs_match_linear_reference():
    # 1e4 pairs spanning 600 orders of magnitude; compare in linear domain
    # wherever the linear sum is representable.
    rng = np.random.default_rng(42)
    logs = rng.uniform(-690.0, 690.0, size=(10_000, 2))
    for a, b in logs:
        s = log_add(a, b)
        lin = math.exp(a) + math.exp(b)
        if 0.0 < lin < math.inf:
            assert s == pytest.approx(math.log(lin), abs=1e-12, rel=1e-12)


def test_log_add_relative_error_bound():
    # per-operation relative error on the linear value <= 4 eps at O(1)
    # log magnitudes; at larger magnitudes the stored log itself is only
    # good to ~eps*|log|, so assert ulp-level accuracy of the log value.
    rng = np.random.default_rng(7)
    eps = np.finfo(float).eps
    for a, b in rng.uniform(-1.0, 1.0, size=(1_000, 2)):
        s = log_add(a, b)
        with mpmath.workdps(40):
            exact = mpmath.log(mpmath.exp(mpmath.mpf(a)) + mpmath.exp(mpmath.mpf(b)))
            rel = abs(mpmath.exp(mpmath.mpf(s) - exact) - 1)
        assert float(rel) <= 4 * eps
    for a, b in rng.uniform(-600.0, 600.0, size=(1_000, 2)):
        s = log_add(a, b)
        with mpmath.workdps(60):
            exact = float(mpmath.log(mpmath.exp(mpmath.mpf(a)) + mpmath.exp(mpmath.mpf(b))))
        assert abs(s - exact) <= 4 * eps * (1.0 + abs(a - b) + abs(s))


def test_log_sub_basic_and_guard():
    assert log_sub(math.log(3.0), math.log(1.0)) == pytest.approx(math.log(2.0), rel=1e-15)
    assert log_sub(1.25, NEG_INF) == 1.25
    with pytest.raises(ValueError):
        log_sub(0.0, 1.0)
    with pytest.raises(DegenerateCancellation):
        log_sub(1.0, 1.0)
    with pytest.raises(DegenerateCancellation):
        log_sub(1.0 + 1e-15, 1.0)


# ----------------------------------------------------------------------------
# big-int log helpers
# ----------------------------------------------------------------------------

def test_log_of_index_big():
    n = 10 ** 400 + 12345
    with mpmath.workdps(50):
        oracle = float(mpmath.log(mpmath.mpf(n)))
    assert log_of_index(n) == pytest.approx(oracle, rel=1e-15)


def test_log_ratio_close_big_ints():
    n = 10 ** 120
    for d in (1, 17, 10 ** 60):
        got = log_ratio(n + d, n)
        with mpmath.workdps(200):
            oracle = float(mpmath.log(mpmath.mpf(n + d) / n))
        assert got == pytest.approx(oracle, rel=1e-13)
        assert log_ratio(n, n + d) == pytest.approx(-oracle, rel=1e-13)


def test_log_ratio_huge_ratio_overflow_path():
    a, b = 10 ** 500, 7
    assert log_ratio(a, b) == pytest.approx(math.log(10) * 500 - math.log(7), rel=1e-12)


def test_float_ratio():
    assert float_ratio(1, 3) == pytest.approx(1 / 3, rel=1e-16)
    assert float_ratio(10 ** 400, 3) == math.inf


# ----------------------------------------------------------------------------
# LogReal
# ----------------------------------------------------------------------------

def test_logreal_arithmetic_and_order():
    two = LogReal.from_linear(2.0)
    three = LogReal.from_linear(3.0)
    assert (two * three).linear == pytest.approx(6.0, rel=1e-15)
    assert (three / two).linear == pytest.approx(1.5, rel=1e-15)
    assert (two + three).linear == pytest.approx(5.0, rel=1e-15)
    assert (three - two).linear == pytest.approx(1.0, rel=1e-14)
    assert (two ** 0.5).linear == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert two < three and three >= two and two == LogReal.from_linear(2.0)
    z = LogReal.zero()
    assert (z * three).is_zero and (three + z) == three and (three - z) == three
    with pytest.raises(ZeroDivisionError):
        three / z


def test_logreal_huge_product_no_overflow():
    big = LogReal(700.0)
    assert (big * big * big).log_value == pytest.approx(2100.0)
    assert (big * big).linear == math.inf  # only the linear view saturates


# ----------------------------------------------------------------------------
# floors
# ----------------------------------------------------------------------------

def test_floor_exp_small():
    assert floor_exp(1.0) == (2, False)          # floor(e) = 2
    n, _ = floor_exp(4.0, factor=11)             # floor(e^4 * 11) = 600
    assert n == 600


def test_floor_exp_big_and_guard():
    n, _ = floor_exp(810.0)
    assert len(str(n)) == 352  # e^810 ~ 10^351.78
    with pytest.raises(ConstructionError):
        floor_exp(4.0e6)


def test_floor_exp_ambiguity_flag():
    n, amb = floor_exp(0.0)  # e^0 = 1 exactly: fractional part 0 -> ambiguous
    assert n == 1 and amb


def test_floor_int_times_float():
    assert floor_int_times_float(4, 25 / 12) == 8
    assert floor_int_times_float(10 ** 50, 0.5) == 5 * 10 ** 49


# ----------------------------------------------------------------------------
# HarmonicEngine
# ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def engine() -> HarmonicEngine:
    return default_harmonic()


def test_harmonic_small_exact(engine):
    assert engine.harmonic(1) == 1.0
    assert engine.harmonic(4) == pytest.approx(25 / 12, rel=1e-15)
    with pytest.raises(ValueError):
        engine.harmonic(0)


def test_harmonic_exact_vs_direct_summation(engine):
    for n in (10, 997, 12345):
        assert engine.harmonic(n) == pytest.approx(
            math.fsum(1.0 / j for j in range(1, n + 1)), rel=1e-14
        )


def test_harmonic_crossover_agreement(engine):
    # asymptotic and exact sides agree to < 1e-12 relative at the crossover
    n = engine.exact_limit
    assert abs(engine.asymptotic(n) - engine.exact(n)) / engine.exact(n) < 1e-12


def test_harmonic_big_index_against_mpmath(engine):
    n = 10 ** 12
    with mpmath.workdps(40):
        oracle = float(mpmath.harmonic(n))
    assert engine.harmonic(n) == pytest.approx(oracle, rel=1e-14)


def test_harmonic_eq1_bounds_sampled(engine):
    # 1/n + log n < H_n < 1 + log n for n > 1
    for n in (2, 3, 10, 10 ** 4, 10 ** 6, 10 ** 9, 10 ** 40):
        h = engine.harmonic(n)
        ln = log_of_index(n)
        assert 1.0 / n + ln < h < 1.0 + ln


def test_harmonic_diff_trivial_and_exact(engine):
    assert engine.harmonic_diff(5, 5) == 0.0
    assert engine.harmonic_diff(4, 2) == pytest.approx(7 / 12, rel=1e-15)
    with pytest.raises(ValueError):
        engine.harmonic_diff(2, 4)


def test_harmonic_diff_no_cancellation(engine):
    # adjacent indices at the top of the exact range and beyond
    for n in (10 ** 6, 10 ** 9, 10 ** 15):
        d = engine.harmonic_diff(n, n - 1)
        assert d == pytest.approx(1.0 / n, rel=1e-9)


def test_harmonic_diff_eq2_bounds(engine):
    # log((n+1)/(m+1)) < H_n - H_m < log(n/m) for n > m, including big pairs
    pairs = [(4, 2), (10 ** 6, 10 ** 3), (10 ** 9, 10 ** 6),
             (10 ** 40, 10 ** 39), (10 ** 40 + 7, 10 ** 40)]
    for n, m in pairs:
        d = engine.harmonic_diff(n, m)
        # strict in exact arithmetic; allow ulp slack where the gap between
        # the two bounds falls below double resolution (huge m)
        ulp = 4e-16 * max(1.0, abs(d))
        assert log_ratio(n + 1, m + 1) - ulp <= d <= log_ratio(n, m) + ulp
    # strictness is resolvable at moderate scale
    n, m = 10 ** 6, 10 ** 3
    assert log_ratio(n + 1, m + 1) < engine.harmonic_diff(n, m) < log_ratio(n, m)


def test_harmonic_diff_matches_exact_rational(engine):
    d = engine.harmonic_diff(10 ** 4, 137)
    oracle = float(sum_inverse_range(138, 10 ** 4))
    assert d == pytest.approx(oracle, rel=1e-13)


def test_harmonic_cache_roundtrip(tmp_path):
    e1 = HarmonicEngine(exact_limit=2048, cache_dir=str(tmp_path))
    e2 = HarmonicEngine(exact_limit=2048, cache_dir=str(tmp_path))
    assert e1.exact(2048) == e2.exact(2048)
    assert (tmp_path / "harmonic_2048.npy").exists()


# ----------------------------------------------------------------------------
# PowerSumEngine
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("p", [0.5, 1 / 3, 2 / 3, 2.0])
def test_power_sum_exact_head(p):
    eng = PowerSumEngine(p, exact_limit=4096)
    for k in (1, 2, 100, 4096):
        oracle = math.fsum(i ** (-p) for i in range(1, k + 1))
        assert eng.prefix(k) == pytest.approx(oracle, rel=1e-13)


@pytest.mark.parametrize("p", [0.5, 2 / 3, 2.0])
def test_power_sum_crossover(p):
    eng = PowerSumEngine(p, exact_limit=65536)
    k = eng.exact_limit
    assert eng.asymptotic(k) == pytest.approx(eng.exact(k), rel=1e-12)


def test_power_sum_rejects_p_one():
    with pytest.raises(ValueError):
        PowerSumEngine(1.0)


# ----------------------------------------------------------------------------
# exact rationals
# ----------------------------------------------------------------------------

def test_harmonic_fraction():
    assert harmonic_fraction(4) == Q(25, 12)
    assert sum_inverse_range(3, 4) == Q(7, 12)
    assert float(harmonic_fraction(1000)) == pytest.approx(
        default_harmonic().harmonic(1000), rel=1e-14
    )
