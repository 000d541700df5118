"""Plateau weights, their Fourier transforms, and direct smoothed counts.

A PlateauBump is the standard C-infinity mollifier profile: exactly 1 on
[p0, p1], exactly 0 outside (s0, s1), glued with exp(-1/x) transitions.
The two weights the counting functions use are frozen here as
default_w1 / default_w2, and a strictly-inside minorant pair is provided
for the sandwich comparisons.

The direct smoothed count is a plain double sum over the support.  It
is the oracle everything in the oscillatory module is eventually tested
against, so it is kept deliberately simple: exact integer m^3, a
corrected square root for m^(3/2), fsum over per-m partials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import fsum, isqrt

import numpy as np

from .arith import SpfTable, factorize
from .counts import Window
from .errors import AccuracyError, InternalConsistencyError, PreconditionError

_ETA_LIMIT = (2.0 / 9.0) ** (1.0 / 3.0)  # plateau parameter ceiling, about 0.6057


def _glue(u: float) -> float:
    """Smoothstep on (0,1): exp(-1/u) / (exp(-1/u) + exp(-1/(1-u)))."""
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    a = math.exp(-1.0 / u)
    b = math.exp(-1.0 / (1.0 - u))
    return a / (a + b)


@dataclass(frozen=True)
class PlateauBump:
    """C-infinity bump: 1 on [p0, p1], 0 outside (s0, s1)."""

    p0: float
    p1: float
    s0: float
    s1: float

    def __post_init__(self):
        if not (self.s0 < self.p0 < self.p1 < self.s1):
            raise PreconditionError(
                f"need s0 < p0 < p1 < s1, got {self.s0}, {self.p0}, {self.p1}, {self.s1}"
            )

    def value(self, t: float) -> float:
        if t <= self.s0 or t >= self.s1:
            return 0.0
        if self.p0 <= t <= self.p1:
            return 1.0
        if t < self.p0:
            return _glue((t - self.s0) / (self.p0 - self.s0))
        return _glue((self.s1 - t) / (self.s1 - self.p1))

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t)
        out[(self.p0 <= t) & (t <= self.p1)] = 1.0
        rise = (self.s0 < t) & (t < self.p0)
        fall = (self.p1 < t) & (t < self.s1)
        for sel, u in (
            (rise, (t[rise] - self.s0) / (self.p0 - self.s0)),
            (fall, (self.s1 - t[fall]) / (self.s1 - self.p1)),
        ):
            if sel.any():
                a = np.exp(-1.0 / u)
                b = np.exp(-1.0 / (1.0 - u))
                out[sel] = a / (a + b)
        return out

    @property
    def is_even(self) -> bool:
        return self.p0 == -self.p1 and self.s0 == -self.s1


def default_w1() -> PlateauBump:
    """Weight in the m-variable: plateau [0.5, 2], support [0.35, 2.8].

    The plateau parameter 0.5 sits safely under the (2/9)^(1/3) ceiling
    required for the m-localization argument.
    """
    return PlateauBump(0.5, 2.0, 0.35, 2.8)


def default_w2() -> PlateauBump:
    """Weight in the n-variable: plateau [-1, 1], support [-2, 2], even."""
    return PlateauBump(-1.0, 1.0, -2.0, 2.0)


def minorant_w1() -> PlateauBump:
    """Strictly-inside companion for the lower-bound sandwich."""
    return PlateauBump(1.15, 1.45, 1.05, 1.55)


def minorant_w2() -> PlateauBump:
    return PlateauBump(-0.1, 0.1, -0.2, 0.2)


@dataclass(frozen=True)
class QuadratureSpec:
    rule: str = "gauss-legendre-32"
    panels: int = 8
    target_abs_tol: float = 1e-12


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _gl_panels(a: float, b: float, panels: int):
    """Nodes and weights of a composite 32-point rule on [a, b]."""
    edges = np.linspace(a, b, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return x, w


def bump_fourier(
    w: PlateauBump, xi: float, q: QuadratureSpec | None = None
) -> complex:
    """hat w(xi) = integral of w(t) e(-xi t) dt, panel-doubled to tolerance."""
    return bump_fourier_many(w, np.array([xi]), q)[0]


def bump_fourier_many(
    w: PlateauBump, xis: np.ndarray, q: QuadratureSpec | None = None
) -> np.ndarray:
    """Vectorized bump_fourier over an array of frequencies."""
    q = q or QuadratureSpec()
    xis = np.asarray(xis, dtype=np.float64)
    out = np.empty(xis.shape, dtype=np.complex128)
    # chunk the frequency axis so the node matrix stays small
    step = 256
    for i in range(0, max(xis.size, 1), step):
        blk = xis[i : i + step]
        if blk.size:
            out[i : i + step] = _transform_block(w, blk, q)
    return out


def _transform_block(w: PlateauBump, xis: np.ndarray, q: QuadratureSpec) -> np.ndarray:
    span = w.s1 - w.s0
    xmax = float(np.max(np.abs(xis)))
    panels = max(q.panels, int(math.ceil(xmax * span / 4.0)))
    prev = None
    for _ in range(12):
        x, wt = _gl_panels(w.s0, w.s1, panels)
        vals = w.values(x) * wt
        cur = np.zeros(xis.shape, dtype=np.complex128)
        for j in range(0, x.size, 65536):  # bound the phase-matrix size
            sl = slice(j, j + 65536)
            cur += np.exp(-2j * np.pi * np.outer(xis, x[sl])) @ vals[sl]
        if prev is not None and np.max(np.abs(cur - prev)) < q.target_abs_tol:
            return cur
        prev = cur
        panels *= 2
    raise AccuracyError(
        f"bump transform failed to reach {q.target_abs_tol} by panel doubling"
    )


def m32_parts(m: int) -> tuple[int, float]:
    """(r, frac) with m^(3/2) = r + frac, r = isqrt(m^3), 0 <= frac < 1.

    The fractional part comes from the binomial series of
    sqrt(r^2 + f) - r at large r and from a direct square root below the
    series' comfort zone; absolute error stays under 1e-11 for m up to
    about 10^6 (window scales N up to 10^9).
    """
    if m < 1:
        raise PreconditionError("m must be positive")
    m3 = m**3
    r = isqrt(m3)
    f = m3 - r * r  # 0 <= f <= 2r
    if r >= 1000:
        t = f / (2.0 * r)
        frac = t - t * t / (2.0 * r) + t**3 / (2.0 * r * r) - 5.0 * t**4 / (8.0 * r**3)
    else:
        frac = math.sqrt(r * r + f) - r
    return r, frac


def _direct_sum(M: float, Z: float, w1: PlateauBump, w2: PlateauBump) -> float:
    """sum over m, n >= 1 of w1(m/M) w2(Z(n - m^(3/2)))."""
    if not (Z > 0) or math.isinf(Z):
        raise PreconditionError("direct smoothed sum needs finite positive Z = N/X")
    m_lo = max(1, math.ceil(w1.s0 * M))
    m_hi = math.floor(w1.s1 * M)
    parts = []
    lo_off = w2.s0 / Z
    hi_off = w2.s1 / Z
    for m in range(m_lo, m_hi + 1):
        w1m = w1.value(m / M)
        if w1m == 0.0:
            continue
        r, frac = m32_parts(m)
        n_lo = max(1, math.ceil(r + (frac + lo_off)))
        n_hi = math.floor(r + (frac + hi_off))
        if n_hi < n_lo:
            continue
        acc = 0.0
        for n in range(n_lo, n_hi + 1):
            acc += w2.value(Z * ((n - r) - frac))
        if acc:
            parts.append(w1m * acc)
    return fsum(parts)


def _check_eta(w1: PlateauBump) -> None:
    # the localization condition only binds when the plateau straddles 1
    if w1.p0 < 1.0 < w1.p1:
        eta = max(w1.p0, 1.0 / w1.p1)
        if eta >= _ETA_LIMIT:
            raise PreconditionError(
                f"w1 plateau parameter {eta:.4f} >= (2/9)^(1/3) = {_ETA_LIMIT:.4f}"
            )


def smoothed_count_direct(win: Window, w1: PlateauBump, w2: PlateauBump) -> float:
    """The smoothed count by its defining double sum (this is the oracle
    for the whole dual pipeline)."""
    if win.X < 1:
        raise PreconditionError("smoothed count needs X >= 1")
    _check_eta(w1)
    return _direct_sum(win.M, win.Z, w1, w2)


def volume_term(
    win: Window,
    w1: PlateauBump,
    w2: PlateauBump,
    q: QuadratureSpec | None = None,
) -> float:
    """(XM/N) * hat w1(0) * hat w2(0): the expected main term."""
    if win.X < 1:
        raise PreconditionError("volume term needs X >= 1")
    m1 = bump_fourier(w1, 0.0, q).real
    m2 = bump_fourier(w2, 0.0, q).real
    return (win.X * win.M / win.N) * m1 * m2


def _square_divisors(m: int, table: SpfTable | None) -> list[int]:
    """All d >= 1 with d^2 | m."""
    core = 1
    for p, a in factorize(m, table).factors:
        core *= p ** (a // 2)
    divs = [1]
    for p, a in factorize(core, table).factors:
        divs = [d * p**e for d in divs for e in range(a + 1)]
    return sorted(divs)


def smoothed_count_primitive(
    win: Window,
    w1: PlateauBump,
    w2: PlateauBump,
    table: SpfTable | None = None,
) -> float:
    """Smoothed count restricted to primitive pairs, two ways.

    Path one inserts the divisor-condition Moebius coefficient directly
    into the double sum; path two is the exact rescaling identity
    sum over d of mu(d) times the direct sum at (M/d^2, Z d^3).  They
    must agree to 1e-6 relative; the first value is returned.
    """
    if win.X < 1:
        raise PreconditionError("smoothed count needs X >= 1")
    _check_eta(w1)
    M, Z = win.M, win.Z

    m_lo = max(1, math.ceil(w1.s0 * M))
    m_hi = math.floor(w1.s1 * M)
    lo_off = w2.s0 / Z
    hi_off = w2.s1 / Z
    parts = []
    for m in range(m_lo, m_hi + 1):
        w1m = w1.value(m / M)
        if w1m == 0.0:
            continue
        sq_divs = _square_divisors(m, table)
        r, frac = m32_parts(m)
        n_lo = max(1, math.ceil(r + (frac + lo_off)))
        n_hi = math.floor(r + (frac + hi_off))
        acc = 0.0
        for n in range(n_lo, n_hi + 1):
            coef = 0
            for d in sq_divs:
                if d == 1 or n % d**3 == 0:
                    coef += factorize(d, table).mobius
            if coef:
                acc += coef * w2.value(Z * ((n - r) - frac))
        if acc:
            parts.append(w1m * acc)
    direct_path = fsum(parts)

    mob_parts = []
    d = 1
    while w1.s1 * M / (d * d) >= 1.0:
        mu = factorize(d, table).mobius
        if mu != 0:
            mob_parts.append(mu * _direct_sum(M / (d * d), Z * d**3, w1, w2))
        d += 1
    mobius_path = fsum(mob_parts)

    scale = max(1.0, abs(direct_path))
    if abs(direct_path - mobius_path) > 1e-6 * scale:
        raise InternalConsistencyError(
            f"primitive smoothed count paths disagree: {direct_path!r} vs {mobius_path!r}"
        )
    return direct_path
