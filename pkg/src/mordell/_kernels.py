"""Compiled inner loops for the oscillatory quadrature and dual sums.

Everything here is optional: HAVE_NUMBA reports whether the compiled
paths are available, and callers fall back to numpy mirrors when not.
Phases are carried in double-double so that integrals with 1e9
oscillations keep absolute phase error near 1e-22 cycles.  The nodes
themselves are built in double-double from the panel index, because a
node rounded to plain float64 already shifts the phase by |phi'| * eps,
which is 1e-7 cycles at the largest budgets.  fastmath stays off: the
error-free transforms rely on IEEE rounding.
"""

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


TWO_PI = 6.283185307179586
_SPLIT = 134217729.0  # 2^27 + 1, Veltkamp splitter


@njit(cache=True, fastmath=False)
def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLIT * b
    bhi = cb - (cb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


@njit(cache=True, fastmath=False)
def _glue_scalar(u):
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    a = math.exp(-1.0 / u)
    b = math.exp(-1.0 / (1.0 - u))
    return a / (a + b)


@njit(cache=True, fastmath=False)
def _bump_scalar(t, p0, p1, s0, s1):
    if t <= s0 or t >= s1:
        return 0.0
    if p0 <= t <= p1:
        return 1.0
    if t < p0:
        return _glue_scalar((t - s0) / (p0 - s0))
    return _glue_scalar((s1 - t) / (s1 - p1))


@njit(cache=True, fastmath=False)
def osc_gl_sum(a, h, panels, ah, al, bh, bl, p0, p1, s0, s1, nodes, weights):
    """Composite GL sum of w(t) e(b t - a t^(3/2)) over panels of width h.

    (ah, al) and (bh, bl) are the double-double phase coefficients.
    Returns the unscaled (re, im) pair; the caller applies the outer M.
    """
    acc_re = 0.0
    comp_re = 0.0
    acc_im = 0.0
    comp_im = 0.0
    half_h = 0.5 * h
    n = nodes.shape[0]
    for p in range(panels):
        base = p + 0.5
        for i in range(n):
            # q = base + nodes[i]/2, exact as a double-double
            y = 0.5 * nodes[i]
            qh = base + y
            ql = y - (qh - base)
            # t = a + q h
            th, tl = _two_prod(qh, h)
            tl += ql * h
            s = th + tl
            tl = tl - (s - th)
            th = s
            s = a + th
            e = th - (s - a)
            th = s
            tl += e
            s = th + tl
            tl = tl - (s - th)
            th = s
            w = _bump_scalar(th, p0, p1, s0, s1)
            if w <= 0.0:
                continue
            # sqrt(t) as a double-double via one refinement step
            r = math.sqrt(th)
            ph, pl = _two_prod(r, r)
            re = ((th - ph) - pl + tl) / (2.0 * r)
            # t^(3/2) = t * sqrt(t)
            t3h, t3l = _two_prod(th, r)
            t3l += th * re + tl * r
            s = t3h + t3l
            t3l = t3l - (s - t3h)
            t3h = s
            # alpha t^(3/2)
            xh, xl = _two_prod(ah, t3h)
            xl += ah * t3l + al * t3h
            s = xh + xl
            xl = xl - (s - xh)
            xh = s
            # beta t
            yh, yl = _two_prod(bh, th)
            yl += bh * tl + bl * th
            s = yh + yl
            yl = yl - (s - yh)
            yh = s
            # phase = beta t - alpha t^(3/2)
            fh = yh - xh
            fe = (yh - (fh + xh)) + (yl - xl)
            s = fh + fe
            fe = fe - (s - fh)
            fh = s
            frac = (fh - math.floor(fh)) + fe
            ang = TWO_PI * frac
            wt = w * half_h * weights[i]
            v = wt * math.cos(ang) - comp_re
            s = acc_re + v
            comp_re = (s - acc_re) - v
            acc_re = s
            v = wt * math.sin(ang) - comp_im
            s = acc_im + v
            comp_im = (s - acc_im) - v
            acc_im = s
    return acc_re, acc_im


@njit(cache=True, fastmath=False)
def kl_inner_sum(k_lo, k_hi, q, l, M, p0, p1, s0, s1):
    """Sum of (sqrt(k)/l) w1(4k^2/(9Ml^2)) e(4k^3/27l^2) for k in [k_lo, k_hi].

    The phase numerator is reduced mod q = 27 l^2 in exact int64 steps;
    k_hi must stay at or below 2e6 so k^3 fits.
    """
    acc_re = 0.0
    comp_re = 0.0
    acc_im = 0.0
    comp_im = 0.0
    denom = 9.0 * M * l * l
    inv_l = 1.0 / l
    for k in range(k_lo, k_hi + 1):
        kf = float(k)
        w = _bump_scalar(4.0 * kf * kf / denom, p0, p1, s0, s1)
        if w <= 0.0:
            continue
        ph = (4 * (k * k * k % q)) % q
        ang = TWO_PI * (ph / q)
        coef = math.sqrt(kf) * inv_l * w
        v = coef * math.cos(ang) - comp_re
        s = acc_re + v
        comp_re = (s - acc_re) - v
        acc_re = s
        v = coef * math.sin(ang) - comp_im
        s = acc_im + v
        comp_im = (s - acc_im) - v
        acc_im = s
    return acc_re, acc_im
