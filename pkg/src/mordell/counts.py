"""Exact lattice-point counters.

T-count: pairs (m, n) with N <= n <= 2N and |n^2 - m^3| <= X, by
iterating m over its forced range and counting n in an isqrt-delimited
interval.  No floating point touches any membership decision: m^3 near
4N^2 exceeds double precision long before N reaches 10^8.

Also here: the primitive (Moebius-filtered) count, the quadric counter
U(A,B,C,D) with its analytic bound, and the parametric family generator
that supplies known near-cube points for tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import isqrt
from typing import NamedTuple

import numpy as np

from .arith import SpfTable, factorize
from .errors import PreconditionError


def icbrt(n: int) -> int:
    """Integer cube root of n >= 0: the largest r with r^3 <= n."""
    if n < 0:
        raise PreconditionError("icbrt requires n >= 0")
    if n == 0:
        return 0
    r = int(round(n ** (1.0 / 3.0)))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


@dataclass(frozen=True)
class Window:
    """Counting window: n ranges over [N, 2N], the discriminant over [-X, X].

    The standing assumption N >= 2*sqrt(X) is enforced exactly as
    N^2 >= 4X; below it the m-range is no longer localized near N^(2/3)
    and none of the smoothed machinery applies.
    """

    N: int
    X: int

    def __post_init__(self):
        if self.N < 1:
            raise PreconditionError(f"N must be a positive integer, got {self.N}")
        if self.X < 0:
            raise PreconditionError(f"X must be nonnegative, got {self.X}")
        if self.N * self.N < 4 * self.X:
            raise PreconditionError(
                f"window requires N >= 2*sqrt(X): N={self.N}, X={self.X}"
            )

    @property
    def M(self) -> float:
        return float(np.cbrt(float(self.N) * float(self.N)))

    @property
    def Z(self) -> float:
        return math.inf if self.X == 0 else self.N / self.X


@dataclass(frozen=True)
class LatticePoint:
    m: int
    n: int
    b: int  # n^2 - m^3

    def __post_init__(self):
        if self.n * self.n - self.m**3 != self.b:
            raise PreconditionError("inconsistent lattice point")


def _count_window(n_lo: int, n_hi: int, X: int, collect: bool = False):
    """Count pairs with n_lo <= n <= n_hi, |n^2 - m^3| <= X, m >= 1."""
    if n_hi < n_lo or n_hi < 1:
        return (0, [] if collect else None)
    n_lo = max(n_lo, 1)
    lo_m3 = n_lo * n_lo - X
    hi_m3 = n_hi * n_hi + X
    m_lo = 1 if lo_m3 <= 1 else icbrt(lo_m3 - 1) + 1
    m_hi = icbrt(hi_m3)
    count = 0
    points: list[LatticePoint] | None = [] if collect else None
    for m in range(m_lo, m_hi + 1):
        m3 = m**3
        a = m3 - X
        lo = n_lo if a <= n_lo * n_lo else isqrt(a - 1) + 1
        hi = min(n_hi, isqrt(m3 + X))
        if hi >= lo:
            count += hi - lo + 1
            if collect:
                for n in range(lo, hi + 1):
                    points.append(LatticePoint(m, n, n * n - m3))
    return count, points


def count_exact(win: Window, collect: bool = False):
    """The exact count over the window, optionally with the points.

    Points come back ordered by (m, n) ascending.
    """
    return _count_window(win.N, 2 * win.N, win.X, collect)


def is_primitive(m: int, n: int) -> bool:
    """No d >= 2 divides the pair as d^2 | m, d^3 | n."""
    if m < 1 or n < 1:
        raise PreconditionError("primitivity needs m, n >= 1")
    d = 2
    while d * d <= m and d**3 <= n:
        if m % (d * d) == 0 and n % d**3 == 0:
            return False
        d += 1
    return True


def count_primitive(win: Window, table: SpfTable | None = None) -> int:
    """Moebius-filtered count: pairs where d^2 | m and d^3 | n force d = 1.

    Inclusion-exclusion over d with the window scaled exactly: the inner
    count for d runs over ceil(N/d^3) <= n' <= floor(2N/d^3) with
    discriminant bound floor(X/d^6).  These integer windows make the
    identity exact (substituting m = d^2 m', n = d^3 n' divides the
    discriminant by d^6 on the nose).
    """
    N, X = win.N, win.X
    total = 0
    d = 1
    while d**3 <= 2 * N:
        mu = factorize(d, table).mobius
        if mu != 0:
            d3 = d**3
            n_lo = (N + d3 - 1) // d3
            n_hi = (2 * N) // d3
            sub, _ = _count_window(n_lo, n_hi, X // d**6)
            total += mu * sub
        d += 1
    return total


def count_quadric(A: int, B: int, C: int, D: float) -> int:
    """#{(a,b,c): 1 <= |a| <= A, |b| <= B, |c| <= C, |b^2 - ac| <= D}.

    For fixed (a, b) the admissible c fill one interval; integer endpoints
    are found from float division and then corrected by exact integer
    comparison, so the count is exact for any real D >= 0.
    """
    if A < 1 or B < 1 or C < 1:
        raise PreconditionError("A, B, C must be positive")
    if D < 0:
        raise PreconditionError("D must be nonnegative")
    a = np.arange(1, A + 1, dtype=np.int64)[:, None]
    b2 = (np.arange(-B, B + 1, dtype=np.int64) ** 2)[None, :]
    lo = np.ceil((b2 - D) / a).astype(np.int64)
    hi = np.floor((b2 + D) / a).astype(np.int64)
    # one-step corrections against exact integer arithmetic
    lo = np.where(b2 - a * (lo - 1) <= D, lo - 1, lo)
    lo = np.where(b2 - a * lo > D, lo + 1, lo)
    hi = np.where(b2 - a * (hi + 1) >= -D, hi + 1, hi)
    hi = np.where(b2 - a * hi < -D, hi - 1, hi)
    lo = np.maximum(lo, -C)
    hi = np.minimum(hi, C)
    cnt = np.maximum(hi - lo + 1, 0)
    # a < 0 mirrors through (a, b, c) -> (-a, b, -c)
    return 2 * int(cnt.sum())


class Lemma2Bound(NamedTuple):
    value: float
    hypothesis_ok: bool


def lemma2_bound(
    A: int, B: int, C: int, D: float, eps: float = 0.01, constant: float = 1.0
) -> Lemma2Bound:
    """The analytic domination bound constant*(A(1+sqrt(D)) + B(1+D)(AC)^eps).

    The hypothesis D <= min(B^2, AC) is reported, not enforced; the bound
    value is returned either way so sweeps can log violations.
    """
    if eps <= 0 or constant <= 0:
        raise PreconditionError("eps and constant must be positive")
    ok = D <= min(B * B, A * C)
    value = constant * (A * (1.0 + math.sqrt(D)) + B * (1.0 + D) * (A * C) ** eps)
    return Lemma2Bound(value=value, hypothesis_ok=ok)


def quadric_domination_scan(
    Amax: int, Bmax: int, Cmax: int, eps: float = 0.1, constant: float = 1.0
) -> float:
    """Worst count/bound ratio over every cap triple up to the maxima.

    |b^2 - ac| is integer-valued, so sweeping integer D from 0 to
    min(Bmax^2, Amax*Cmax) is exhaustive in D as well.  The counts for
    all (A, B, C) at once come from a folded 3-axis cumulative sum;
    only triples satisfying the hypothesis D <= min(B^2, AC) contribute.
    """
    if Amax < 1 or Bmax < 1 or Cmax < 1:
        raise PreconditionError("cap maxima must be positive")
    a = np.arange(1, Amax + 1, dtype=np.int64)[:, None, None]
    b = np.arange(-Bmax, Bmax + 1, dtype=np.int64)[None, :, None]
    c = np.arange(-Cmax, Cmax + 1, dtype=np.int64)[None, None, :]
    v = np.abs(b * b - a * c)
    # fold each cell to (a-1, |b|, |c|) and presort by v
    fa, fb, fc = np.broadcast_arrays(a - 1, np.abs(b), np.abs(c))
    fold = ((fa * (Bmax + 1) + fb) * (Cmax + 1) + fc).ravel()
    order = np.argsort(v.ravel(), kind="stable")
    v_sorted = v.ravel()[order]
    fold_sorted = fold[order]
    d_top = min(Bmax * Bmax, Amax * Cmax)
    starts = np.searchsorted(v_sorted, np.arange(d_top + 2))

    A_ = np.arange(1, Amax + 1, dtype=np.float64)[:, None, None]
    B_ = np.arange(1, Bmax + 1, dtype=np.float64)[None, :, None]
    C_ = np.arange(1, Cmax + 1, dtype=np.float64)[None, None, :]
    ac_eps = (A_ * C_) ** eps
    hyp_top = np.minimum(B_ * B_, A_ * C_)

    F = np.zeros((Amax, Bmax + 1, Cmax + 1), dtype=np.int64)
    worst = 0.0
    for D in range(d_top + 1):
        seg = fold_sorted[starts[D] : starts[D + 1]]
        if seg.size:
            F.ravel()[:] += np.bincount(seg, minlength=F.size)
        cum = F.cumsum(0).cumsum(1).cumsum(2)
        U = 2.0 * cum[:, 1:, 1:]
        bound = constant * (A_ * (1.0 + math.sqrt(D)) + B_ * (1.0 + D) * ac_eps)
        ok = D <= hyp_top
        if ok.any():
            worst = max(worst, float((U / bound)[np.broadcast_to(ok, U.shape)].max()))
    return worst


def davenport_points(t_min: int, t_max: int) -> list[LatticePoint]:
    """The parametric family m = t^2 + 1, n = t^3 + 3t/2 for even t.

    Odd t give half-integer n and are skipped.  Each point satisfies
    n^2 = m^3 - (3u^2 + 1) with t = 2u, so the discriminant grows like
    (3/4) t^2 while m^3 is of size t^6.
    """
    out = []
    for t in range(t_min, t_max + 1):
        if t % 2:
            continue
        u = t // 2
        m = 4 * u * u + 1
        n = 8 * u**3 + 3 * u
        out.append(LatticePoint(m, n, n * n - m**3))
    return out
