"""Tests for the plateau weights, transforms, and direct smoothed sums."""

import decimal
import math
from math import fsum

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from mordell.calibration import load_calibration
from mordell.counts import Window, count_exact, is_primitive
from mordell.errors import InternalConsistencyError, PreconditionError
from mordell.smooth import (
    PlateauBump,
    QuadratureSpec,
    bump_fourier,
    bump_fourier_many,
    default_w1,
    default_w2,
    m32_parts,
    minorant_w1,
    minorant_w2,
    smoothed_count_direct,
    smoothed_count_primitive,
    volume_term,
)
from mordell.smooth import _direct_sum


def test_bump_validation():
    with pytest.raises(PreconditionError):
        PlateauBump(2.0, 0.5, 0.35, 2.8)
    with pytest.raises(PreconditionError):
        PlateauBump(0.5, 2.0, 0.6, 2.8)


def test_bump_plateau_and_support():
    w = default_w1()
    assert w.value(0.5) == 1.0
    assert w.value(1.3) == 1.0
    assert w.value(2.0) == 1.0
    assert w.value(0.35) == 0.0
    assert w.value(2.8) == 0.0
    assert w.value(-3.0) == 0.0
    assert 0.0 < w.value(0.42) < 1.0
    assert 0.0 < w.value(2.5) < 1.0


def test_bump_transition_monotone_and_continuous():
    w = default_w1()
    rising = [w.value(t) for t in np.linspace(0.35, 0.5, 200)]
    assert all(a <= b for a, b in zip(rising, rising[1:]))
    falling = [w.value(t) for t in np.linspace(2.0, 2.8, 200)]
    assert all(a >= b for a, b in zip(falling, falling[1:]))
    # junctions are flat to all orders; nearby values must hug 0 and 1
    h = 1e-3
    assert w.value(w.s0 + h) < 1e-60
    assert w.value(w.p0 - h) >= 1 - 1e-12
    assert w.value(w.p1 + h) >= 1 - 1e-12
    assert w.value(w.s1 - h) < 1e-60


def test_bump_even_symmetry():
    w = default_w2()
    assert w.is_even
    for t in np.linspace(0.0, 2.2, 57):
        assert w.value(t) == w.value(-t)
    assert not default_w1().is_even


@given(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
def test_bump_values_matches_scalar(t):
    w = default_w1()
    arr = w.values(np.array([t]))
    # np.exp and math.exp may differ in the last ulp
    assert arr[0] == pytest.approx(w.value(t), rel=5e-16, abs=5e-324)


def _quad_oracle(w, f):
    pts = [w.s0, w.p0, w.p1, w.s1]
    val, err = quad(f, w.s0, w.s1, points=pts, limit=200, epsabs=1e-12)
    assert err < 1e-8
    return val


def test_transform_at_zero_is_mass():
    # oracle first: adaptive quadrature of the bump itself
    for w in (default_w1(), default_w2(), minorant_w1(), minorant_w2()):
        mass = _quad_oracle(w, w.value)
        got = bump_fourier(w, 0.0)
        assert got.imag == pytest.approx(0.0, abs=1e-13)
        assert got.real == pytest.approx(mass, abs=2e-8)


@pytest.mark.parametrize("xi", [0.3, 1.7, 5.0])
def test_transform_matches_adaptive_quadrature(xi):
    w = default_w1()
    re = _quad_oracle(w, lambda t: w.value(t) * math.cos(2 * math.pi * xi * t))
    im = _quad_oracle(w, lambda t: -w.value(t) * math.sin(2 * math.pi * xi * t))
    got = bump_fourier(w, xi)
    assert got.real == pytest.approx(re, abs=2e-8)
    assert got.imag == pytest.approx(im, abs=2e-8)


def test_transform_conjugate_symmetry():
    w = default_w1()
    xis = np.array([0.4, 1.1, 3.7, 9.2])
    plus = bump_fourier_many(w, xis)
    minus = bump_fourier_many(w, -xis)
    assert np.allclose(minus, np.conj(plus), atol=1e-13)
    # an even bump has a real transform
    ev = np.abs(bump_fourier_many(default_w2(), xis).imag)
    assert ev.max() < 1e-13


def test_transform_decay_regression():
    pins = load_calibration()
    w2 = default_w2()
    mass = 3.0
    xis = np.linspace(0.5, 30, 60)
    vals = np.abs(bump_fourier_many(w2, xis, QuadratureSpec(target_abs_tol=1e-13)))
    live = vals > 1e-9 * mass
    scaled = float(np.max((vals * (1 + xis) ** 10)[live]) / mass)
    # coarser grid than the calibration sweep, so at most the pinned max
    assert scaled <= pins["w2hat_decay_c10"] * 1.02
    assert scaled >= pins["w2hat_decay_c10"] * 0.05
    cut = pins["w2hat_cut_xi_1e12"]
    tail = np.abs(bump_fourier_many(w2, cut - 0.25 * np.arange(8)))
    assert (tail < 1e-12 * mass).all()


def test_m32_parts_against_decimal():
    decimal.getcontext().prec = 50
    for m in [1, 2, 3, 7, 99, 100, 101, 999, 1000, 123456, 999983, 10**6]:
        r, frac = m32_parts(m)
        exact = decimal.Decimal(m**3).sqrt()
        err = abs(decimal.Decimal(r) + decimal.Decimal(frac) - exact)
        assert float(err) < 1e-11, m


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=80)
def test_m32_parts_property(m):
    r, frac = m32_parts(m)
    assert r == math.isqrt(m**3)
    assert 0.0 <= frac < 1.0
    decimal.getcontext().prec = 50
    exact = decimal.Decimal(m**3).sqrt()
    assert float(abs(decimal.Decimal(r) + decimal.Decimal(frac) - exact)) < 1e-11


def test_m32_exact_squares():
    for k in (1, 2, 3, 10, 31, 980):
        r, frac = m32_parts(k * k)
        assert (r, frac) == (k**3, 0.0)


def _brute_weighted(N, X, w1, w2):
    M = N ** (2 / 3)
    Z = N / X
    tot = []
    for m in range(1, math.ceil(w1.s1 * M) + 2):
        a = w1.value(m / M)
        if a == 0:
            continue
        m32 = m**1.5
        lo = max(1, math.floor(m32 + w2.s0 / Z) - 2)
        hi = math.ceil(m32 + w2.s1 / Z) + 2
        for n in range(lo, hi + 1):
            b = w2.value(Z * (n - m32))
            if b:
                tot.append(a * b)
    return fsum(tot)


@pytest.mark.parametrize("N,X", [(300, 150), (500, 300), (1000, 100), (10000, 1000)])
def test_direct_sum_against_brute(N, X):
    win = Window(N, X)
    got = smoothed_count_direct(win, default_w1(), default_w2())
    want = _brute_weighted(N, X, default_w1(), default_w2())
    assert got == pytest.approx(want, rel=1e-9)


def test_direct_sum_preconditions():
    with pytest.raises(PreconditionError):
        smoothed_count_direct(Window(1000, 0), default_w1(), default_w2())
    with pytest.raises(PreconditionError):
        _direct_sum(100.0, float("inf"), default_w1(), default_w2())
    # plateau straddling 1 with parameter past the ceiling
    bad = PlateauBump(0.7, 1.5, 0.5, 2.0)
    with pytest.raises(PreconditionError):
        smoothed_count_direct(Window(1000, 100), bad, default_w2())
    # same shape but plateau off 1: no ceiling applies
    off = PlateauBump(1.15, 1.45, 1.05, 1.55)
    smoothed_count_direct(Window(1000, 100), off, default_w2())


def test_volume_term_value():
    win = Window(10**4, 10**3)
    w1, w2 = default_w1(), default_w2()
    m1 = _quad_oracle(w1, w1.value)
    m2 = _quad_oracle(w2, w2.value)
    want = win.X * win.M / win.N * m1 * m2
    assert volume_term(win, w1, w2) == pytest.approx(want, rel=1e-10)


def _brute_primitive(N, X, w1, w2):
    M = N ** (2 / 3)
    Z = N / X
    tot = []
    for m in range(1, math.ceil(w1.s1 * M) + 2):
        a = w1.value(m / M)
        if a == 0:
            continue
        m32 = m**1.5
        lo = max(1, math.floor(m32 + w2.s0 / Z) - 2)
        hi = math.ceil(m32 + w2.s1 / Z) + 2
        for n in range(lo, hi + 1):
            if not is_primitive(m, n):
                continue
            b = w2.value(Z * (n - m32))
            if b:
                tot.append(a * b)
    return fsum(tot)


@pytest.mark.parametrize("N,X", [(500, 300), (1000, 150)])
def test_primitive_against_brute(N, X, spf):
    win = Window(N, X)
    got = smoothed_count_primitive(win, default_w1(), default_w2(), spf)
    want = _brute_primitive(N, X, default_w1(), default_w2())
    assert got == pytest.approx(want, rel=1e-9)
    assert got <= smoothed_count_direct(win, default_w1(), default_w2()) + 1e-9


def test_minorant_below_exact_count():
    for N, X in [(2000, 500), (10000, 1000)]:
        win = Window(N, X)
        sm = smoothed_count_direct(win, minorant_w1(), minorant_w2())
        assert sm <= count_exact(win)[0]
