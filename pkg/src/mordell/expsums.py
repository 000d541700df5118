"""Exponential sum families attached to cubic point counting.

The central object is the complete sum s_sum(D, l): a cubic phase
evaluated over the roots of 4x^2 = D (mod 3l).  Everything else is a
weighted partial sum of it or a close relative: the cumulative f-series
over l <= Y, the squarefree g-series at square values D = d^2,
completed Salie-type sums, and cubic Gauss sums with their partial sums
over the modulus.

Cumulative series report SeriesCheckpoint records: the running value
and term count at each requested cutoff, combined with compensated
summation so a checkpoint equals the independently summed prefix.

All phases are reduced as exact integers modulo the phase denominator
before any float enters, so term values are good to machine precision
regardless of how large the numerators grew.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from math import fsum, gcd
from typing import NamedTuple

import numpy as np

from .arith import (
    SpfTable,
    factorize,
    mod_inverse,
    quad_roots,
    quad_roots_factored,
)
from .errors import BudgetError, InternalConsistencyError, PreconditionError

_TWO_PI = 2.0 * math.pi

# brute-force enumeration guard (elements of a numpy arange)
_BRUTE_LIMIT = 1 << 24

# naive per-modulus partial sums stop here; the batch sweep goes further
_PATTERSON_NAIVE_LIMIT = 100_000
_PATTERSON_SWEEP_LIMIT = 200_000


def _e(num: int, den: int) -> complex:
    """exp(2*pi*i*num/den) for integers 0 <= num < den."""
    return complex(math.cos(_TWO_PI * num / den), math.sin(_TWO_PI * num / den))


@dataclass(frozen=True)
class SeriesCheckpoint:
    """Running state of a cumulative series at cutoff Y: the partial-sum
    value through index Y and the count of structurally nonzero terms."""

    Y: int
    value: complex
    terms: int


def _checkpoint_grid(Y: int, checkpoints) -> list[int]:
    """Normalize a checkpoint request: sorted, deduplicated, inside [1, Y]."""
    if Y < 1:
        raise PreconditionError(f"cutoff must be >= 1, got {Y}")
    if checkpoints is None:
        return [int(Y)]
    cps = sorted({int(c) for c in checkpoints})
    if not cps:
        raise PreconditionError("checkpoint list is empty")
    if cps[0] < 1 or cps[-1] > Y:
        raise PreconditionError(f"checkpoints must lie in [1, {Y}], got {cps}")
    return cps


# ---------------------------------------------------------------------------
# complete sums over roots of 4x^2 = D (mod 3l)


def s_sum(D: int, l: int, table: SpfTable | None = None) -> complex:
    """Complete sum over x mod 3l with 4x^2 = D (mod 3l) of
    e((4x^3 - 3Dx)/27l^2).

    The phase is well defined: shifting a root by 3l changes the
    numerator by a multiple of 27l^2.  Roots pair as x <-> 3l - x with
    conjugate phases, so the value is real up to rounding.
    """
    if l < 1:
        raise PreconditionError(f"l must be >= 1, got {l}")
    q = 3 * l
    den = 27 * l * l
    rs = quad_roots(D, q, table, coeff=4)
    total = 0j
    for x in rs:
        total += _e((4 * x**3 - 3 * D * x) % den, den)
    return total


def s_sum_bruteforce(D: int, l: int) -> complex:
    """Independent evaluation of s_sum by full enumeration of x mod 3l."""
    if l < 1:
        raise PreconditionError(f"l must be >= 1, got {l}")
    q = 3 * l
    if q > _BRUTE_LIMIT:
        raise BudgetError(f"brute force enumeration over {q} residues refused")
    den = 27 * l * l
    xs = np.arange(q, dtype=np.int64)
    roots = xs[(4 * xs * xs - D) % q == 0]
    if roots.size == 0:
        return 0j
    num = (4 * roots**3 - 3 * D * roots) % den
    ang = (_TWO_PI / den) * num
    return complex(np.cos(ang).sum(), np.sin(ang).sum())


def shift_well_defined(l_max: int, d_max: int, table: SpfTable | None = None) -> bool:
    """Exact integer check that the s_sum phase numerator mod 27l^2 does
    not move when a root is shifted by multiples of 3l.  Exhaustive over
    l <= l_max, |D| <= d_max, every root, shifts t in {-1, 1, 2}."""
    if l_max < 1 or d_max < 0:
        raise PreconditionError("need l_max >= 1 and d_max >= 0")
    for l in range(1, l_max + 1):
        q = 3 * l
        den = 27 * l * l
        fac = factorize(q, table).factors
        for D in range(-d_max, d_max + 1):
            for x in quad_roots_factored(D, q, fac, coeff=4):
                base = (4 * x**3 - 3 * D * x) % den
                for t in (-1, 1, 2):
                    y = x + q * t
                    if (4 * y**3 - 3 * D * y) % den != base:
                        return False
    return True


# ---------------------------------------------------------------------------
# f-series: sum over l <= Y of s_sum(D, l) / sqrt(l)


def f_series(
    D: int,
    Y: int,
    checkpoints=None,
    table: SpfTable | None = None,
) -> list[SeriesCheckpoint]:
    """Cumulative partial sums F(D; y) = sum_{l <= y} s_sum(D, l)/sqrt(l),
    recorded at each requested checkpoint y (default: just at Y).

    Terms arrive in ascending l; each checkpoint value is an exact
    compensated sum of the whole prefix, and `terms` counts the l whose
    root set was nonempty.  The imaginary part is kept so callers can
    check it vanishes instead of trusting that it does.
    """
    cps = _checkpoint_grid(Y, checkpoints)
    parts_re: list[float] = []
    parts_im: list[float] = []
    terms = 0
    out: list[SeriesCheckpoint] = []
    k = 0
    for l in range(1, cps[-1] + 1):
        q = 3 * l
        den = 27 * l * l
        fac = factorize(q, table).factors
        rs = quad_roots_factored(D, q, fac, coeff=4)
        if rs.roots:
            terms += 1
            tre = 0.0
            tim = 0.0
            for x in rs:
                z = _e((4 * x**3 - 3 * D * x) % den, den)
                tre += z.real
                tim += z.imag
            wl = 1.0 / math.sqrt(l)
            parts_re.append(wl * tre)
            parts_im.append(wl * tim)
        if k < len(cps) and cps[k] == l:
            out.append(
                SeriesCheckpoint(Y=l, value=complex(fsum(parts_re), fsum(parts_im)), terms=terms)
            )
            k += 1
    return out


def f_series_multi(
    D_values, Y: int, table: SpfTable | None = None
) -> dict[int, complex]:
    """Final values F(D; Y) for several D sharing one pass over l (one
    factorization of 3l per l, reused across all D)."""
    if Y < 1:
        raise PreconditionError(f"Y must be >= 1, got {Y}")
    dvals = list(dict.fromkeys(int(D) for D in D_values))
    re_parts: dict[int, list[float]] = {D: [] for D in dvals}
    im_parts: dict[int, list[float]] = {D: [] for D in dvals}
    for l in range(1, Y + 1):
        q = 3 * l
        den = 27 * l * l
        fac = factorize(q, table).factors
        wl = 1.0 / math.sqrt(l)
        for D in dvals:
            rs = quad_roots_factored(D, q, fac, coeff=4)
            if not rs.roots:
                continue
            tre = 0.0
            tim = 0.0
            for x in rs:
                z = _e((4 * x**3 - 3 * D * x) % den, den)
                tre += z.real
                tim += z.imag
            re_parts[D].append(wl * tre)
            im_parts[D].append(wl * tim)
    return {D: complex(fsum(re_parts[D]), fsum(im_parts[D])) for D in dvals}


@dataclass(frozen=True)
class FSweep:
    """F(D; Y) on the integer window d_min..d_max (inclusive)."""

    d_min: int
    d_max: int
    Y: int
    values: np.ndarray  # float64, index i holds F(d_min + i; Y)

    def value(self, D: int) -> float:
        if not (self.d_min <= D <= self.d_max):
            raise PreconditionError(f"D={D} outside sweep window")
        return float(self.values[D - self.d_min])


def f_sweep(d_min: int, d_max: int, Y: int, flush: int = 4_000_000) -> FSweep:
    """F(D; Y) for every integer D in [d_min, d_max] in one vectorized pass.

    Never solves a congruence: for each l it enumerates x mod 3l, and the
    D hit by x are the arithmetic progression 4x^2 + 3l*j inside the
    window.  Scatter-adds are buffered and flushed through bincount.
    Complexity is about (window length + 3l) work per l.

    Root-finding free, so this is an independent cross-check of
    f_series_multi as well as the histogram engine.
    """
    if not (d_min <= d_max):
        raise PreconditionError("need d_min <= d_max")
    if Y < 1:
        raise PreconditionError(f"Y must be >= 1, got {Y}")
    n = d_max - d_min + 1
    # int64 phase arithmetic: |c0 - 9*l*x*j| stays below 2^62 for these sizes
    if Y > 400_000 or max(abs(d_min), abs(d_max)) > 10**6:
        raise BudgetError("sweep window exceeds the int64 phase guard")
    acc = np.zeros(n, dtype=np.float64)
    idx_buf: list[np.ndarray] = []
    val_buf: list[np.ndarray] = []
    buffered = 0

    def _flush():
        nonlocal buffered
        if buffered:
            idx = np.concatenate(idx_buf)
            val = np.concatenate(val_buf)
            acc_part = np.bincount(idx, weights=val, minlength=n)
            acc[:] += acc_part
            idx_buf.clear()
            val_buf.clear()
            buffered = 0

    for l in range(1, Y + 1):
        q = 3 * l
        den = 27 * l * l
        xs = np.arange(q, dtype=np.int64)
        d0 = 4 * xs * xs % q
        c0 = (4 * xs**3 - 3 * xs * d0) % den
        # j range so that d0 + q*j lands in [d_min, d_max]
        j_lo = -((d0 - d_min) // q)
        j_hi = (d_max - d0) // q
        cnt = j_hi - j_lo + 1
        keep = cnt > 0
        if not keep.all():
            xs, d0, c0, j_lo, cnt = (a[keep] for a in (xs, d0, c0, j_lo, cnt))
        total = int(cnt.sum())
        if total == 0:
            continue
        offs = np.cumsum(cnt) - cnt
        j = np.arange(total, dtype=np.int64) - np.repeat(offs, cnt) + np.repeat(j_lo, cnt)
        xr = np.repeat(xs, cnt)
        num = (np.repeat(c0, cnt) - 9 * l * xr * j) % den
        dd = np.repeat(d0, cnt) + q * j
        w = 1.0 / math.sqrt(l)
        idx_buf.append(dd - d_min)
        val_buf.append(np.cos((_TWO_PI / den) * num) * w)
        buffered += total
        if buffered >= flush:
            _flush()
    _flush()
    return FSweep(d_min=d_min, d_max=d_max, Y=Y, values=acc)


def f0_main_term(Y: int) -> float:
    """Main term of F(0; Y): the exact partial sums
    sum_{g <= Y} g^(-1/2) + sum_{g <= Y, g even} g^(-1/2).

    Equals 3*sqrt(Y) + zeta(1/2)*(1 + 1/sqrt(2)) + O(Y^(-1/2)).
    """
    if Y < 1:
        raise PreconditionError(f"Y must be >= 1, got {Y}")
    g = np.arange(1, Y + 1, dtype=np.float64)
    all_part = fsum(1.0 / np.sqrt(g))
    even_part = fsum(1.0 / np.sqrt(g[1::2]))
    return all_part + even_part


def square_filter_mask(d_min: int, d_max: int) -> np.ndarray:
    """Boolean mask over the window selecting D that are neither perfect
    squares nor congruent to 2 mod 3 (the degenerate classes for the
    f-series histogram)."""
    ds = np.arange(d_min, d_max + 1, dtype=np.int64)
    mask = ds % 3 != 2
    r = np.sqrt(np.maximum(ds, 0).astype(np.float64)).astype(np.int64)
    for shift in (-1, 0, 1):
        rr = r + shift
        sq = (ds >= 0) & (rr >= 0) & (rr * rr == ds)
        mask &= ~sq
    return mask


# ---------------------------------------------------------------------------
# fixed-range histograms


@dataclass(frozen=True)
class HistogramSpec:
    """Fixed-range histogram layout.  counts covers only in-range samples;
    strays below/above the range are tallied separately on the filled
    copy, never folded into the edge bins."""

    range: tuple[float, float]
    bins: int
    counts: np.ndarray | None = None
    below: int = 0
    above: int = 0

    def __post_init__(self):
        lo, hi = self.range
        if not (lo < hi):
            raise PreconditionError(f"histogram range needs lo < hi, got {self.range}")
        if self.bins < 1:
            raise PreconditionError(f"bins must be >= 1, got {self.bins}")

    @property
    def edges(self) -> np.ndarray:
        lo, hi = self.range
        return np.linspace(lo, hi, self.bins + 1)


class SampleStats(NamedTuple):
    """Extrema and mean of the admitted sample set."""

    min: float
    max: float
    mean: float
    count: int


def fill_histogram(samples, spec: HistogramSpec) -> tuple[HistogramSpec, SampleStats]:
    """Bin samples into the fixed layout of spec.

    Returns the filled copy and the sample statistics.  In-range counts
    sum to count - below - above; the extrema and mean always cover the
    whole sample set.
    """
    v = np.asarray(samples, dtype=np.float64)
    if v.size == 0:
        raise PreconditionError("cannot histogram an empty sample set")
    lo, hi = spec.range
    counts, _ = np.histogram(v, bins=spec.bins, range=(lo, hi))
    filled = replace(
        spec,
        counts=counts,
        below=int((v < lo).sum()),
        above=int((v > hi).sum()),
    )
    return filled, SampleStats(float(v.min()), float(v.max()), float(v.mean()), int(v.size))


def f_histogram(
    d_range: tuple[int, int],
    Y: int,
    spec: HistogramSpec,
    table: SpfTable | None = None,
) -> tuple[HistogramSpec, SampleStats]:
    """Histogram of F(D; Y) over the integer window d_range = (d_min, d_max),
    excluding perfect squares and D = 2 (mod 3).

    The sweep engine underneath never factors or solves congruences, so
    `table` is accepted only for call-shape uniformity with the other
    series operations.
    """
    d_min, d_max = d_range
    sweep = f_sweep(d_min, d_max, Y)
    mask = square_filter_mask(d_min, d_max)
    vals = sweep.values[mask]
    if vals.size == 0:
        raise PreconditionError("window admits no D after exclusions")
    return fill_histogram(vals, spec)


# ---------------------------------------------------------------------------
# g-series at square values D = d^2, squarefree moduli


def g_sum(d: int, Y: int, table: SpfTable | None = None) -> complex:
    """G(d^2; Y): over squarefree l <= Y coprime to 2d, the roots of
    x^2 = d^2 (mod l) weighted by e((x^3 - 3 d^2 x)/l^2) / sqrt(l)."""
    if d == 0 or Y < 1:
        raise PreconditionError("need d != 0 and Y >= 1")
    parts_re: list[float] = []
    parts_im: list[float] = []
    for l in range(1, Y + 1):
        f = factorize(l, table)
        if not f.squarefree or gcd(l, 2 * abs(d)) != 1:
            continue
        den = l * l
        rs = quad_roots_factored(d * d, l, f.factors, coeff=1)
        tre = 0.0
        tim = 0.0
        for x in rs:
            z = _e((x**3 - 3 * d * d * x) % den, den)
            tre += z.real
            tim += z.imag
        wl = 1.0 / math.sqrt(l)
        parts_re.append(wl * tre)
        parts_im.append(wl * tim)
    return complex(fsum(parts_re), fsum(parts_im))


def g_sum_factored(d: int, Y: int, table: SpfTable | None = None) -> complex:
    """Same series as g_sum via the coprime-splitting identity: for
    squarefree l = l1*l2 the root contribution equals
    e(2 d^3 (inv(l1^2) mod l2^2)/l2^2 - 2 d^3 (inv(l2^2) mod l1^2)/l1^2),
    summed over ordered factorizations.  Independent path, no square
    roots mod primes at all; verified against g_sum before returning.
    """
    if d == 0 or Y < 1:
        raise PreconditionError("need d != 0 and Y >= 1")
    parts_re: list[float] = []
    parts_im: list[float] = []
    for l in range(1, Y + 1):
        f = factorize(l, table)
        if not f.squarefree or gcd(l, 2 * abs(d)) != 1:
            continue
        den = l * l
        tre = 0.0
        tim = 0.0
        npf = len(f.factors)
        for bits in range(1 << npf):
            l1 = 1
            for i in range(npf):
                if bits >> i & 1:
                    l1 *= f.factors[i][0]
            l2 = l // l1
            m1, m2 = l1 * l1, l2 * l2
            a = 2 * d**3 * mod_inverse(m1, m2) % m2 if m2 > 1 else 0
            b = 2 * d**3 * mod_inverse(m2, m1) % m1 if m1 > 1 else 0
            z = _e((a * m1 - b * m2) % den, den)
            tre += z.real
            tim += z.imag
        wl = 1.0 / math.sqrt(l)
        parts_re.append(wl * tre)
        parts_im.append(wl * tim)
    value = complex(fsum(parts_re), fsum(parts_im))
    direct = g_sum(d, Y, table)
    if abs(value - direct) > 1e-9:
        raise InternalConsistencyError(
            f"factorization identity disagrees with direct roots at d={d}, Y={Y}: "
            f"|diff|={abs(value - direct):.3e}"
        )
    return value


def g_conjectural_rhs(
    d: int, Y: int, variant: str = "plain", table: SpfTable | None = None
) -> float:
    """Candidate closed forms the g-series is compared against.

    variant="plain":   2 * sum of l^(-1/2) over the same squarefree l
    variant="cosine":  sum of 2*cos(4 pi d^3 / l^2) / sqrt(l)
    """
    if variant not in ("plain", "cosine"):
        raise PreconditionError(f"unknown variant {variant!r}")
    if d == 0 or Y < 1:
        raise PreconditionError("need d != 0 and Y >= 1")
    parts = []
    for l in range(1, Y + 1):
        f = factorize(l, table)
        if not f.squarefree or gcd(l, 2 * abs(d)) != 1:
            continue
        if variant == "plain":
            parts.append(2.0 / math.sqrt(l))
        else:
            num = 2 * d**3 % (l * l)
            parts.append(2.0 * math.cos(_TWO_PI * num / (l * l)) / math.sqrt(l))
    return fsum(parts)


# ---------------------------------------------------------------------------
# completed Salie-type sums


def completed_salie_check(beta: int, q: int) -> complex:
    """Sum over alpha mod q^2 with gcd(alpha, q) = 1 of
    e(beta * alpha^(-2) / q^2).

    Requires odd q with gcd(2*beta, q) = 1.  Under that hypothesis the
    sum vanishes identically for q >= 3; q = 1 degenerates to the single
    term 1.  Callers check the vanishing, this function just computes.
    """
    if q < 1 or q % 2 == 0:
        raise PreconditionError(f"q must be a positive odd integer, got {q}")
    if gcd(2 * beta, q) != 1:
        raise PreconditionError(f"need gcd(2*beta, q) = 1, got beta={beta}, q={q}")
    q2 = q * q
    if q2 > _BRUTE_LIMIT:
        raise BudgetError(f"completed sum over {q2} residues refused")
    total = 0j
    for a in range(1, q2 + 1):
        if gcd(a, q) != 1:
            continue
        inv = mod_inverse(a, q2)
        total += _e(beta * inv * inv % q2, q2)
    return total


def salie_sweep(q_max: int = 99) -> float:
    """Largest |completed sum| over odd q in [3, q_max] and beta in a
    reduced residue system mod q.  The vanishing identity says every one
    of these is zero; the return value is the worst deviation seen.

    Shares the inverse-square table across beta for each q, so the sweep
    runs in seconds where per-pair calls would take minutes.
    """
    if q_max < 3:
        raise PreconditionError(f"q_max must be >= 3, got {q_max}")
    worst = 0.0
    for q in range(3, q_max + 1, 2):
        q2 = q * q
        invsq = np.array(
            [pow(a, -1, q2) ** 2 % q2 for a in range(1, q2 + 1) if gcd(a, q) == 1],
            dtype=np.int64,
        )
        for beta in range(1, q):
            if gcd(beta, q) != 1:
                continue
            ang = (_TWO_PI / q2) * (beta * invsq % q2)
            dev = abs(complex(np.cos(ang).sum(), np.sin(ang).sum()))
            worst = max(worst, dev)
    return worst


# ---------------------------------------------------------------------------
# cubic Gauss sums H(A, c) and partial sums P(A; X)


def cubic_gauss_h(A: int, c: int) -> complex:
    """H(A, c) = sum over x mod c of e(A x^3 / c), phases reduced as exact
    integers mod c.  Real up to rounding by the pairing x <-> -x."""
    if c < 1:
        raise PreconditionError(f"c must be >= 1, got {c}")
    if c > _BRUTE_LIMIT:
        raise BudgetError(f"cubic Gauss sum with modulus {c} refused")
    xs = np.arange(c, dtype=np.int64)
    t = (xs * xs % c) * xs % c
    u = (A % c) * t % c
    ang = (_TWO_PI / c) * u
    return complex(np.cos(ang).sum(), np.sin(ang).sum())


def patterson_p(
    A: int,
    X: int,
    checkpoints=None,
    table: SpfTable | None = None,
) -> list[SeriesCheckpoint]:
    """Cumulative partial sums P(A; x) = sum_{c <= x} H(A, c), recorded at
    each requested checkpoint x (default: just at X).

    Naive per-modulus evaluation, budgeted at X <= 1e5; the batch mode
    patterson_sweep covers wide A sweeps and larger X.  `terms` counts
    the moduli whose Gauss sum was nonzero at working precision.  The
    modulus table is accepted for call-shape uniformity only.
    """
    if A == 0:
        raise PreconditionError("A must be nonzero")
    if X > _PATTERSON_NAIVE_LIMIT:
        raise BudgetError(
            f"naive partial sums stop at X = {_PATTERSON_NAIVE_LIMIT}; "
            "use patterson_sweep"
        )
    cps = _checkpoint_grid(X, checkpoints)
    parts_re: list[float] = []
    parts_im: list[float] = []
    terms = 0
    out: list[SeriesCheckpoint] = []
    k = 0
    for c in range(1, cps[-1] + 1):
        h = cubic_gauss_h(A, c)
        parts_re.append(h.real)
        parts_im.append(h.imag)
        if abs(h) > 1e-9:
            terms += 1
        if k < len(cps) and cps[k] == c:
            out.append(
                SeriesCheckpoint(Y=c, value=complex(fsum(parts_re), fsum(parts_im)), terms=terms)
            )
            k += 1
    return out


def _h_spectrum(c: int, freqs: np.ndarray) -> np.ndarray:
    """H(A, c) for the distinct frequencies A = freqs (mod c), via the
    cube-representation counts r3.  Cost model picks direct evaluation at
    the requested frequencies when they are few, a full transform when a
    whole sweep needs this modulus."""
    r3 = h_residue_counts(c)
    support = np.flatnonzero(r3)
    k = freqs.size
    s = support.size
    if k * s <= 4.0 * c * max(1.0, math.log2(c)):
        vals = r3[support].astype(np.float64)
        out = np.empty(k, dtype=np.complex128)
        block = max(1, (1 << 21) // max(s, 1))
        for i in range(0, k, block):
            num = freqs[i : i + block, None] * support[None, :] % c
            out[i : i + block] = (vals * np.exp((2j * math.pi / c) * num)).sum(axis=1)
        return out
    # fft convention is e(-xt/c); r3 is real, so conjugation recovers H
    return np.conjugate(np.fft.fft(r3.astype(np.float64))[freqs])


def patterson_sweep(A_values, X: int) -> np.ndarray:
    """P(A; X) for a whole array of A in one pass over the moduli.

    For each c the residue counts r3[t] = #{x mod c : x^3 = t} are formed
    once and serve every A through _h_spectrum.  Kahan-compensated
    accumulation keeps the c-sum rounding-stable.
    """
    if X < 1:
        raise PreconditionError(f"X must be >= 1, got {X}")
    A = np.asarray(list(A_values), dtype=np.int64)
    if A.size == 0:
        return np.zeros(0, dtype=np.complex128)
    if np.any(A == 0):
        raise PreconditionError("A values must be nonzero")
    if X > _PATTERSON_SWEEP_LIMIT:
        raise BudgetError(f"sweep range X > {_PATTERSON_SWEEP_LIMIT} refused")
    acc = np.zeros(A.size, dtype=np.complex128)
    comp = np.zeros(A.size, dtype=np.complex128)  # Kahan compensation
    for c in range(1, X + 1):
        uniq, inv = np.unique(A % c, return_inverse=True)
        h = _h_spectrum(c, uniq)[inv]
        y = h - comp
        s = acc + y
        comp = (s - acc) - y
        acc = s
    return acc


def h_residue_counts(c: int) -> np.ndarray:
    """r3[t] = #{x mod c : x^3 = t (mod c)}; exposed for tests."""
    xs = np.arange(c, dtype=np.int64)
    t = (xs * xs % c) * xs % c
    return np.bincount(t, minlength=c)
