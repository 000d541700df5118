"""Oscillatory integrals and the dual sums that rebuild the smoothed count.

Three layers live here.  osc_integral_numeric / osc_integral_asymptotic
evaluate the single oscillatory integral with phase -l x^(3/2) + k x,
by phase-dense quadrature and by its stationary-phase main term.  The
weight transform on the square-root scale (w1_transform, with a fast
FFT-backed interpolation table) supplies the envelope for the reindexed
sums.  dual_sum then evaluates the dual series in three forms that must
agree: a (k, l) sum of stationary-phase terms, its Poisson-in-k
reindexing over (k0, r, l), and the same terms grouped by the discriminant
D = 4 k0^2 - 3 l r.  reconstruct_smoothed closes the loop against the
direct double sum.

Phase hygiene: every rational phase is reduced mod 1 in exact integer
arithmetic, and the quadrature carries its phase in double-double, so
values stay trustworthy at phases of 1e9 cycles.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import fsum
from typing import Callable, NamedTuple

import numpy as np

from ._kernels import HAVE_NUMBA, TWO_PI, kl_inner_sum, osc_gl_sum
from .calibration import load_calibration
from .counts import Window
from .errors import (
    AccuracyError,
    BudgetError,
    InternalConsistencyError,
    PreconditionError,
)
from .smooth import (
    PlateauBump,
    QuadratureSpec,
    bump_fourier,
    bump_fourier_many,
    default_w1,
    default_w2,
    m32_parts,
    smoothed_count_direct,
    volume_term,
)
from .smooth import _GL_NODES, _GL_WEIGHTS

C_STATIONARY = 2.0 * math.sqrt(2.0) / 3.0
EIGHTH_TURN = (1.0 - 1.0j) / math.sqrt(2.0)  # exactly e(-1/8)

_OSC_CYCLE_BUDGET = 10**9  # |l| M^(3/2) cap for the numeric integral
_KL_TERM_CAP = 2_000_000  # k^3 must stay within int64 for the phase mod
_ENVELOPE_EPS = 1e-12
_SPLIT = 134217729.0

DUAL_FORMS = ("kl-form", "k0r-form", "D-form")


@dataclass(frozen=True)
class OscIntegralResult:
    value: complex
    method: str  # "numeric-quadrature" or "stationary-phase"
    est_error: float
    stationary_inside: bool


@dataclass(frozen=True)
class DualSumResult:
    value: complex
    truncation: tuple  # (l_max, tail_bound)
    form: str


class PoissonCheck(NamedTuple):
    series: float
    direct: float
    rel_dev: float


# ---------------------------------------------------------------------------
# double-double helpers (python side, used to prepare kernel arguments)


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ca = _SPLIT * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLIT * b
    bhi = cb - (cb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def _quick_two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    return s, b - (s - a)


def _dd_m32(M: float) -> tuple[float, float]:
    """M^(3/2) as a double-double, via a refined square root."""
    s = math.sqrt(M)
    ph, pl = _two_prod(s, s)
    e = ((M - ph) - pl) / (2.0 * s)
    h, low = _two_prod(M, s)
    return _quick_two_sum(h, low + M * e)


# ---------------------------------------------------------------------------
# numeric oscillatory integral


def _v_two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLIT * b
    bhi = cb - (cb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def _v_renorm(h, low):
    s = h + low
    return s, low - (s - h)


def _osc_numpy(a, h, panels, ah, al, bh, bl, w1):
    """Pure-numpy mirror of the compiled quadrature kernel.

    Nodes are built in double-double from the panel index, exactly as in
    the compiled path, so both give the same phase accuracy.
    """
    parts_re, parts_im = [], []
    chunk = 2048  # panels per block
    half_nodes = 0.5 * _GL_NODES
    for pc in range(0, panels, chunk):
        pcnt = min(chunk, panels - pc)
        base = (np.arange(pc, pc + pcnt, dtype=np.float64) + 0.5)[:, None]
        qh = base + half_nodes[None, :]
        ql = half_nodes[None, :] - (qh - base)
        qh, ql = qh.ravel(), ql.ravel()
        th, tl = _v_two_prod(qh, np.full_like(qh, h))
        tl += ql * h
        th, tl = _v_renorm(th, tl)
        s = a + th
        e = th - (s - a)
        th, tl = _v_renorm(s, tl + e)
        w = w1.values(th)
        keep = w > 0.0
        if not keep.any():
            continue
        th, tl, w = th[keep], tl[keep], w[keep]
        wt = np.broadcast_to(0.5 * h * _GL_WEIGHTS, (pcnt, 32)).ravel()[keep]
        r = np.sqrt(th)
        ph, pl = _v_two_prod(r, r)
        e = ((th - ph) - pl + tl) / (2.0 * r)
        t3h, t3l = _v_two_prod(th, r)
        t3l += th * e + tl * r
        t3h, t3l = _v_renorm(t3h, t3l)
        xh, xl = _v_two_prod(np.full_like(t3h, ah), t3h)
        xl += ah * t3l + al * t3h
        xh, xl = _v_renorm(xh, xl)
        yh, yl = _v_two_prod(np.full_like(th, bh), th)
        yl += bh * tl + bl * th
        yh, yl = _v_renorm(yh, yl)
        fh = yh - xh
        fe = (yh - (fh + xh)) + (yl - xl)
        fh, fl = _v_renorm(fh, fe)
        frac = (fh - np.floor(fh)) + fl
        ang = TWO_PI * frac
        coef = w * wt
        parts_re.append(float(coef @ np.cos(ang)))
        parts_im.append(float(coef @ np.sin(ang)))
    return fsum(parts_re), fsum(parts_im)


def _osc_quadrature(w1, panels, ah, al, bh, bl):
    a = max(w1.s0, 0.0)
    h = (w1.s1 - a) / panels
    if HAVE_NUMBA:
        re, im = osc_gl_sum(
            a, h, panels, ah, al, bh, bl,
            w1.p0, w1.p1, w1.s0, w1.s1, _GL_NODES, _GL_WEIGHTS,
        )
    else:
        re, im = _osc_numpy(a, h, panels, ah, al, bh, bl, w1)
    return complex(re, im)


def osc_integral_numeric(
    k: int, l: int, M: float, w1: PlateauBump | None = None
) -> OscIntegralResult:
    """Quadrature value of the integral of w1(x/M) e(-l x^(3/2) + k x).

    Panel density tracks the worst local phase derivative at no fewer
    than 20 nodes per oscillation; est_error is a half-density self-check.
    """
    w1 = w1 or default_w1()
    k = int(k)
    l = int(l)
    if l == 0:
        raise PreconditionError("l must be nonzero")
    if not (M >= 4):
        raise PreconditionError(f"need M >= 4, got {M}")
    M = float(M)
    m32 = M * math.sqrt(M)
    if abs(l) * m32 > _OSC_CYCLE_BUDGET * (1 + 1e-9):
        raise BudgetError(
            f"|l| M^(3/2) = {abs(l) * m32:.3g} exceeds the 1e9 oscillation budget"
        )
    m32h, m32l = _dd_m32(M)
    lf = float(l)
    ah, al = _two_prod(lf, m32h)
    ah, al = _quick_two_sum(ah, al + lf * m32l)
    bh, bl = _two_prod(float(k), M)

    # cycles across the support, from the endpoint phase derivatives
    def dphi(t):
        return bh - 1.5 * ah * math.sqrt(t)

    a = max(w1.s0, 0.0)
    span = w1.s1 - a
    cyc = max(abs(dphi(a)), abs(dphi(w1.s1))) * span
    nodes_target = max(320, int(math.ceil(20.0 * cyc)) + 32)
    panels = (nodes_target + 31) // 32

    val = M * _osc_quadrature(w1, panels, ah, al, bh, bl)
    half = M * _osc_quadrature(w1, max(1, (panels + 1) // 2), ah, al, bh, bl)
    est = abs(val - half)

    t0 = 4.0 * k * k / (9.0 * l * l * M)
    inside = (k > 0) == (l > 0) and w1.s0 < t0 < w1.s1
    return OscIntegralResult(val, "numeric-quadrature", est, inside)


def osc_integral_asymptotic(
    k: int, l: int, M: float, w1: PlateauBump | None = None
) -> OscIntegralResult:
    """Stationary-phase main term of the same integral.

    The phase 4k^3/27l^2 is reduced mod 1 in exact integer arithmetic.
    A stationary point outside the support returns 0 with the flag down.
    """
    w1 = w1 or default_w1()
    k = int(k)
    l = int(l)
    if l == 0:
        raise PreconditionError("l must be nonzero")
    if not (M >= 4):
        raise PreconditionError(f"need M >= 4, got {M}")
    pins = load_calibration()
    cprime = pins.get("osc_err_coeff", 10.0)
    est = cprime * abs(l) ** -1.5 * M**-1.25

    t0 = 4.0 * k * k / (9.0 * l * l * M)
    if (k > 0) != (l > 0) or not (w1.s0 < t0 < w1.s1):
        return OscIntegralResult(0j, "stationary-phase", 0.0, False)
    q = 27 * l * l
    num = (4 * k**3) % q
    ang = TWO_PI * (num / q)
    rot = EIGHTH_TURN if l > 0 else EIGHTH_TURN.conjugate()
    amp = C_STATIONARY * math.sqrt(abs(k)) / abs(l) * w1.value(t0)
    val = amp * rot * complex(math.cos(ang), math.sin(ang))
    return OscIntegralResult(val, "stationary-phase", est, True)


# ---------------------------------------------------------------------------
# the weight transform on the square-root scale


def _profile_transform(profile: Callable, a: float, b: float, xis, q=None):
    """integral of profile(t) e(-xi t) over [a, b], panel-doubled, batched."""
    q = q or QuadratureSpec()
    xis = np.asarray(xis, dtype=np.float64)
    out = np.empty(xis.shape, dtype=np.complex128)
    for i in range(0, max(xis.size, 1), 256):
        blk = xis[i : i + 256]
        if blk.size:
            out[i : i + 256] = _profile_block(profile, a, b, blk, q)
    return out


def _profile_block(profile, a, b, xis, q):
    span = b - a
    panels = max(q.panels, int(math.ceil(float(np.max(np.abs(xis))) * span / 4.0)))
    prev = None
    for _ in range(12):
        edges = np.linspace(a, b, panels + 1)
        mid = (edges[:-1] + edges[1:]) / 2.0
        half = (edges[1:] - edges[:-1]) / 2.0
        x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        wt = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        vals = profile(x) * wt
        cur = np.zeros(xis.shape, dtype=np.complex128)
        for j in range(0, x.size, 65536):
            sl = slice(j, j + 65536)
            cur += np.exp(-2j * np.pi * np.outer(xis, x[sl])) @ vals[sl]
        if prev is not None and np.max(np.abs(cur - prev)) < q.target_abs_tol:
            return cur
        prev = cur
        panels *= 2
    raise AccuracyError(
        f"profile transform failed to reach {q.target_abs_tol} by panel doubling"
    )


def _sqrt_scale_profile(w1: PlateauBump):
    def profile(t):
        return np.sqrt(t) * w1.values(t * t)

    return profile


def w1_transform(
    y: float, w1: PlateauBump | None = None, q: QuadratureSpec | None = None
) -> complex:
    """W1(y): integral over t >= 0 of t^(1/2) w1(t^2) e(-y t)."""
    w1 = w1 or default_w1()
    if w1.s1 <= 0:
        return 0j
    a = math.sqrt(max(w1.s0, 0.0))
    b = math.sqrt(w1.s1)
    return complex(_profile_transform(_sqrt_scale_profile(w1), a, b, [y], q)[0])


class _W1Table:
    """Hermite-interpolated table of W1 on a uniform grid in [0, y_max].

    Built from one long FFT of the densely sampled profile (the trapezoid
    rule converges superalgebraically for a smooth compactly supported
    integrand, and the sampling rate keeps aliases below 1e-13).
    Negative arguments use W1(-y) = conj(W1(y)).
    """

    __slots__ = ("step", "y_max", "y_cut", "re", "im", "dre", "dim", "mass")

    def __init__(self, w1: PlateauBump, step: float = 1.0 / 512):
        if w1.s1 <= 0 or w1.s0 < 0:
            raise PreconditionError("table needs a weight supported in t >= 0")
        a = math.sqrt(w1.s0)
        b = math.sqrt(w1.s1)
        delta = 1.0 / 4096.0
        n_samp = int(math.ceil((b - a) / delta)) + 1
        t = a + delta * np.arange(n_samp)
        f = np.sqrt(t) * w1.values(t * t)
        n_fft = 1 << int(math.ceil(math.log2(1.0 / (delta * step))))
        step = 1.0 / (delta * n_fft)  # realized grid spacing
        spec = np.fft.fft(f, n_fft)
        spec_d = np.fft.fft(t * f, n_fft)

        mass = float(np.abs(spec[0]) * delta)
        m_probe = n_fft // 2
        y_grid = step * np.arange(m_probe)
        vals = delta * np.exp(-2j * np.pi * y_grid * a) * spec[:m_probe]
        below = np.abs(vals) < _ENVELOPE_EPS * mass
        # cut where the envelope stays below threshold across a span of 2
        need = max(8, int(round(2.0 / step)))
        csum = np.cumsum(below.astype(np.int64))
        wins = csum[need - 1 :].copy()
        wins[1:] -= csum[: m_probe - need]
        hits = np.flatnonzero(wins == need)
        if hits.size == 0:
            raise AccuracyError("transform envelope never fell below 1e-12 of mass")
        cut_idx = int(hits[0])
        keep = min(m_probe, cut_idx + need + int(2.0 / step))
        self.step = step
        self.y_cut = step * cut_idx
        self.y_max = step * (keep - 1)
        self.mass = mass
        v = vals[:keep]
        dv = (
            -2j
            * np.pi
            * delta
            * np.exp(-2j * np.pi * step * np.arange(keep) * a)
            * spec_d[:keep]
        )
        self.re = np.ascontiguousarray(v.real)
        self.im = np.ascontiguousarray(v.imag)
        self.dre = np.ascontiguousarray(dv.real)
        self.dim = np.ascontiguousarray(dv.imag)

    def eval_many(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(re, im) of W1 at each y; zero beyond the tabulated range."""
        ay = np.abs(y)
        inside = ay < self.y_max
        pos = np.where(inside, ay / self.step, 0.0)
        idx = pos.astype(np.int64)
        np.minimum(idx, len(self.re) - 2, out=idx)
        u = pos - idx
        u2 = u * u
        h00 = 1.0 + u2 * (2.0 * u - 3.0)
        h01 = u2 * (3.0 - 2.0 * u)
        h10 = u * (u - 1.0) * (u - 1.0) * self.step
        h11 = u2 * (u - 1.0) * self.step
        re = h00 * self.re[idx] + h01 * self.re[idx + 1]
        re += h10 * self.dre[idx] + h11 * self.dre[idx + 1]
        im = h00 * self.im[idx] + h01 * self.im[idx + 1]
        im += h10 * self.dim[idx] + h11 * self.dim[idx + 1]
        re = np.where(inside, re, 0.0)
        im = np.where(inside, im, 0.0)
        return re, np.where(y < 0, -im, im)


_W1_TABLES: dict = {}


def _w1_table(w1: PlateauBump) -> _W1Table:
    tab = _W1_TABLES.get(w1)
    if tab is None:
        tab = _W1Table(w1)
        _verify_table(tab, w1)
        _W1_TABLES[w1] = tab
    return tab


def _verify_table(tab: _W1Table, w1: PlateauBump) -> None:
    ys = np.linspace(0.3, min(tab.y_cut, 30.0), 9)
    want = _profile_transform(
        _sqrt_scale_profile(w1), math.sqrt(w1.s0), math.sqrt(w1.s1), ys
    )
    re, im = tab.eval_many(ys)
    err = np.max(np.abs(re + 1j * im - want))
    if err > 5e-9 * max(1.0, tab.mass):
        raise InternalConsistencyError(
            f"transform table disagrees with direct quadrature by {err:.3g}"
        )


# ---------------------------------------------------------------------------
# dual sums


def _w2hat_weights(w2: PlateauBump, Z: float) -> np.ndarray:
    """hat w2(l/Z) for l = 1..l_max, cut where the values stay below
    1e-12 of the mass across a span of 2 in the transform variable
    (8 consecutive points on the 0.25-step calibration grid)."""
    mass = bump_fourier(w2, 0.0).real
    need = max(8, int(math.ceil(2.0 * Z)))
    vals: list[float] = []
    run = 0
    l = 1
    while True:
        block = np.arange(l, l + 512)
        wb = bump_fourier_many(w2, block / Z).real
        for v in wb:
            if abs(v) < _ENVELOPE_EPS * mass:
                run += 1
                if run == need:
                    cut = len(vals) - (need - 1)
                    return np.array(vals[:cut])
            else:
                run = 0
            vals.append(float(v))
        l += 512
        if l > 2_000_000:
            raise BudgetError("l-sum envelope cut not reached below l = 2e6")


def _expand_ranges(lo: np.ndarray, hi: np.ndarray):
    """Flatten the integer ranges [lo_i, hi_i] into (owner_index, value)."""
    cnt = hi - lo + 1
    np.maximum(cnt, 0, out=cnt)
    keep = cnt > 0
    lo, cnt = lo[keep], cnt[keep]
    owners = np.repeat(np.nonzero(keep)[0], cnt)
    total = int(cnt.sum())
    offs = np.cumsum(cnt) - cnt
    vals = np.arange(total, dtype=np.int64) - np.repeat(offs, cnt) + np.repeat(lo, cnt)
    return owners, vals


def _kl_numpy(k_lo, k_hi, q, l, M, w1):
    parts_re, parts_im = [], []
    for c0 in range(k_lo, k_hi + 1, 1 << 19):
        k = np.arange(c0, min(c0 + (1 << 19), k_hi + 1), dtype=np.int64)
        kf = k.astype(np.float64)
        w = w1.values(4.0 * kf * kf / (9.0 * M * l * l))
        keep = w > 0.0
        if not keep.any():
            continue
        k, kf, w = k[keep], kf[keep], w[keep]
        ph = (4 * (k * k * k % q)) % q
        ang = TWO_PI * (ph.astype(np.float64) / q)
        coef = np.sqrt(kf) / l * w
        parts_re.append(float(coef @ np.cos(ang)))
        parts_im.append(float(coef @ np.sin(ang)))
    return fsum(parts_re), fsum(parts_im)


def _dual_pre(win: Window, w1: PlateauBump, w2: PlateauBump) -> None:
    if win.X < 1:
        raise PreconditionError("dual sum needs X >= 1")
    if win.Z < 1:
        raise PreconditionError(f"dual sum needs Z = N/X >= 1, got {win.Z:.4g}")
    if not w2.is_even:
        raise PreconditionError("dual sum needs an even w2 (real transform)")


def _l_tail_bound(l_max: int, Z: float, M: float, w1, w2h0: float) -> float:
    """Envelope budget for the dropped l > l_max, any of the three forms.

    Each |A_l| is at most (number of k terms) x (peak sqrt(k)/l), which is
    b0 sqrt(l); the transform factor is bounded by the frozen power-10
    decay pin.  The sum over the dropped range is taken numerically with
    an integral-comparison remainder.
    """
    c10 = load_calibration().get("w2hat_decay_c10", 1e6)
    rootM = math.sqrt(M)
    b0 = 1.5 * rootM * (math.sqrt(w1.s1) - math.sqrt(max(w1.s0, 0.0)))
    b0 *= math.sqrt(1.5 * rootM * math.sqrt(w1.s1))
    width = int(min(100 * Z, 2_000_000))
    ls = np.arange(l_max + 1, l_max + 1 + width, dtype=np.float64)
    partial = float(np.sum(np.sqrt(ls) * (1.0 + ls / Z) ** -10))
    xi_end = (l_max + width) / Z
    rest = Z**1.5 * xi_end**-8.5 / 8.5
    return c10 * w2h0 * b0 * (partial + rest) / Z


def dual_sum(
    win: Window,
    w1: PlateauBump | None = None,
    w2: PlateauBump | None = None,
    form: str = "kl-form",
    tol: float = 1e-6,
    threads: int = 1,
) -> DualSumResult:
    """The dual series T_S'' in one of its three equivalent forms.

    kl-form sums stationary-phase main terms over (k, l); k0r-form is its
    exact Poisson reindexing over (k0, r, l); D-form groups the k0r terms
    by D = 4k0^2 - 3lr, pairing each D with a complete quadratic-root sum.
    l is truncated where 8 consecutive transform values drop below 1e-12
    of the mass, r and D where the envelope of the square-root-scale
    transform does the same.
    """
    w1 = w1 or default_w1()
    w2 = w2 or default_w2()
    if form not in DUAL_FORMS:
        raise PreconditionError(f"unknown form {form!r}; expected one of {DUAL_FORMS}")
    if not (tol > 0):
        raise PreconditionError("tol must be positive")
    _dual_pre(win, w1, w2)
    M, Z = win.M, win.Z
    w2h = _w2hat_weights(w2, Z)
    l_max = len(w2h)
    w2h0 = bump_fourier(w2, 0.0).real

    if form == "kl-form":
        per_l = _kl_per_l(M, w1)
        prefac = 1.0 / Z
        tail_r = 0.0
    else:
        tab = _w1_table(w1)
        rootM = math.sqrt(M)
        if form == "k0r-form":
            per_l = _k0r_per_l(rootM, tab)
        else:
            per_l = _d_per_l(rootM, tab)
        prefac = math.sqrt(3.0) * M**0.75 / (2.0 * math.sqrt(2.0) * Z)
        # dropped |y| beyond the cut: per k0 and side, a power-8 envelope
        # sum starting at the cut, stepping by sqrt(M)/2 per unit r
        c8 = load_calibration().get("w1t_decay_c8", 1e8)
        ycut1 = 1.0 + tab.y_cut
        step_y = rootM / 2.0
        side = c8 * tab.mass * ycut1**-8 * (1.0 + ycut1 / (7.0 * step_y))
        wsum = fsum(
            abs(w2h[l - 1]) * 6.0 * math.sqrt(l) for l in range(1, l_max + 1)
        )
        tail_r = prefac * side * wsum

    def worker(l):
        return per_l(l)

    ls = range(1, l_max + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(worker, ls))
    else:
        parts = [worker(l) for l in ls]

    # deterministic ascending-l reduction
    if form == "kl-form":
        re = fsum(w2h[l - 1] * p[0] for l, p in zip(ls, parts))
        im = fsum(w2h[l - 1] * p[1] for l, p in zip(ls, parts))
    else:
        re = fsum(w2h[l - 1] / math.sqrt(l) * p[0] for l, p in zip(ls, parts))
        im = fsum(w2h[l - 1] / math.sqrt(l) * p[1] for l, p in zip(ls, parts))
    value = prefac * complex(re, im)

    # declared envelope budgets for what was dropped
    tail = _l_tail_bound(l_max, Z, M, w1, w2h0) + tail_r
    if tail > tol * max(1.0, abs(value)):
        raise AccuracyError(
            f"envelope tails {tail:.3g} exceed the requested tolerance"
        )
    return DualSumResult(value, (l_max, tail), form)


def _kl_per_l(M: float, w1: PlateauBump):
    s0 = max(w1.s0, 0.0)

    def per_l(l):
        k_lo = max(1, int(math.floor(1.5 * l * math.sqrt(s0 * M))))
        k_hi = int(math.ceil(1.5 * l * math.sqrt(w1.s1 * M)))
        if k_hi > _KL_TERM_CAP:
            raise BudgetError(
                f"kl-form needs k up to {k_hi} at l={l}, beyond the int64 phase cap"
            )
        q = 27 * l * l
        if HAVE_NUMBA:
            return kl_inner_sum(k_lo, k_hi, q, l, M, w1.p0, w1.p1, w1.s0, w1.s1)
        return _kl_numpy(k_lo, k_hi, q, l, M, w1)

    return per_l


def _k0r_per_l(rootM: float, tab: _W1Table):
    def per_l(l):
        q = 27 * l * l
        three_l = 3 * l
        # |3lr - 4k0^2| <= R keeps the transform argument inside the cut
        R = tab.y_cut * 6.0 * l / rootM
        k0 = np.arange(three_l, dtype=np.int64)
        fk2 = 4 * k0 * k0
        r_lo = np.ceil((fk2 - R) / three_l).astype(np.int64)
        r_hi = np.floor((fk2 + R) / three_l).astype(np.int64)
        owners, r = _expand_ranges(r_lo, r_hi)
        k0v = k0[owners]
        num = (-8 * k0v**3 + 9 * l * r * k0v) % q
        ang = TWO_PI * (num.astype(np.float64) / q)
        y = (three_l * r - 4 * k0v * k0v).astype(np.float64) * (rootM / (6.0 * l))
        wre, wim = tab.eval_many(y)
        cos, sin = np.cos(ang), np.sin(ang)
        return float(cos @ wre - sin @ wim), float(cos @ wim + sin @ wre)

    return per_l


def _d_per_l(rootM: float, tab: _W1Table):
    def per_l(l):
        q = 27 * l * l
        three_l = 3 * l
        R = tab.y_cut * 6.0 * l / rootM
        Dmax = int(math.floor(R))
        x = np.arange(three_l, dtype=np.int64)
        d0 = (4 * x * x) % three_l
        j_lo = np.ceil((-Dmax - d0) / three_l).astype(np.int64)
        j_hi = np.floor((Dmax - d0) / three_l).astype(np.int64)
        owners, j = _expand_ranges(j_lo, j_hi)
        xv = x[owners]
        c0 = (4 * xv**3 - 3 * d0[owners] * xv) % q
        num = (c0 - 9 * l * xv * j) % q
        D = d0[owners] + three_l * j
        ang = TWO_PI * (num.astype(np.float64) / q)
        y = -D.astype(np.float64) * (rootM / (6.0 * l))
        wre, wim = tab.eval_many(y)
        cos, sin = np.cos(ang), np.sin(ang)
        return float(cos @ wre - sin @ wim), float(cos @ wim + sin @ wre)

    return per_l


# ---------------------------------------------------------------------------
# reconstruction


def _m32_frac_vec(m: np.ndarray) -> np.ndarray:
    """Fractional parts of m^(3/2) for an integer array (values < 2^17)."""
    m3 = m.astype(np.float64) ** 3
    if (m3 >= 2**52).any():
        return np.array([m32_parts(int(v))[1] for v in m])
    r = np.floor(np.sqrt(m3))
    r = np.where(r * r > m3, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= m3, r + 1, r)
    f = m3 - r * r
    small = r < 1000
    t = f / (2.0 * r)
    frac = t - t * t / (2.0 * r) + t**3 / (2.0 * r * r) - 5.0 * t**4 / (8.0 * r**3)
    return np.where(small, np.sqrt(r * r + f) - r, frac)


def _poisson_series(win: Window, w1: PlateauBump, w2: PlateauBump) -> float:
    """The n-sum replaced by its truncated transform series, summed over m."""
    M, Z = win.M, win.Z
    w2h = _w2hat_weights(w2, Z)
    w2h0 = bump_fourier(w2, 0.0).real
    m_lo = max(1, int(math.ceil(w1.s0 * M)))
    m_hi = int(math.floor(w1.s1 * M))
    m = np.arange(m_lo, m_hi + 1, dtype=np.int64)
    w1m = w1.values(m.astype(np.float64) / M)
    keep = w1m > 0.0
    m, w1m = m[keep], w1m[keep]
    frac = _m32_frac_vec(m)
    parts = [w2h0 * float(np.sum(w1m))]
    for l in range(1, len(w2h) + 1):
        c = np.cos(TWO_PI * ((l * frac) % 1.0))
        parts.append(2.0 * w2h[l - 1] * float(w1m @ c))
    return fsum(parts) / Z


def poisson_checkpoint(
    win: Window, w1: PlateauBump | None = None, w2: PlateauBump | None = None
) -> PoissonCheck:
    """Truncated transform series against the direct double sum."""
    w1 = w1 or default_w1()
    w2 = w2 or default_w2()
    _dual_pre(win, w1, w2)
    series = _poisson_series(win, w1, w2)
    direct = smoothed_count_direct(win, w1, w2)
    return PoissonCheck(series, direct, abs(series - direct) / max(1.0, abs(direct)))


def reconstruct_smoothed(
    win: Window,
    w1: PlateauBump | None = None,
    w2: PlateauBump | None = None,
    tol: float = 1e-6,
) -> tuple[float, float, float]:
    """(reconstructed, direct, residual) for the full dual pipeline.

    reconstructed = volume + 2c Re(e(-1/8) T_S''); the intermediate
    transform-series identity is evaluated as a guard before the dual
    sum is trusted.
    """
    w1 = w1 or default_w1()
    w2 = w2 or default_w2()
    _dual_pre(win, w1, w2)
    direct = smoothed_count_direct(win, w1, w2)
    series = _poisson_series(win, w1, w2)
    if abs(series - direct) / max(1.0, abs(direct)) > max(1e-3, 100 * tol):
        raise InternalConsistencyError(
            f"transform-series identity off: {series!r} vs direct {direct!r}"
        )
    dual = dual_sum(win, w1, w2, form="kl-form", tol=tol)
    vol = volume_term(win, w1, w2)
    reconstructed = vol + 2.0 * C_STATIONARY * (EIGHTH_TURN * dual.value).real
    return reconstructed, direct, abs(reconstructed - direct)
