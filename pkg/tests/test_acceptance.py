"""End-to-end release gate: one test per shipped guarantee.

Every test prints a single verdict line (visible with -s, or in the
failure report) carrying the measured quantity, the threshold, and the
wall time, then asserts the whole clause including the runtime budget.
Budgets assume a warm numba disk cache and one otherwise idle core.
"""

import math
import time

import numpy as np

from mordell import cli
from mordell.calibration import load_calibration
from mordell.counts import (
    Window,
    count_quadric,
    lemma2_bound,
    quadric_domination_scan,
)
from mordell.expsums import (
    f0_main_term,
    f_series,
    f_sweep,
    g_sum,
    g_sum_factored,
    patterson_p,
    patterson_sweep,
    s_sum,
    s_sum_bruteforce,
    salie_sweep,
    shift_well_defined,
    square_filter_mask,
)
from mordell.oscillatory import (
    C_STATIONARY,
    DUAL_FORMS,
    EIGHTH_TURN,
    dual_sum,
    osc_integral_asymptotic,
    osc_integral_numeric,
    poisson_checkpoint,
    reconstruct_smoothed,
)
from mordell.smooth import (
    default_w1,
    default_w2,
    smoothed_count_direct,
    volume_term,
)

PINS = load_calibration()


def _verdict(tag: str, ok: bool, detail: str) -> None:
    print(f"acceptance {tag}: {'PASS' if ok else 'FAIL'} | {detail}")


# frozen expected values for F(D; 1e5) on the ten-class check deck;
# tolerance 0.05 except the smallest entry, which gets 0.005
SERIES_TABLE = {
    -5: (31.6, 0.05),
    -3: (9.7, 0.05),
    -2: (-2.2, 0.05),
    0: (958.1, 0.05),
    1: (654.8, 0.05),
    3: (9.3, 0.05),
    4: (1940.2, 0.05),
    6: (0.578, 0.005),
    7: (22.5, 0.05),
    9: (650.5, 0.05),
}


def test_01_series_table(capsys):
    t0 = time.monotonic()
    code = cli.main(
        ["fdy", "--D-list", "-5,-3,-2,0,1,3,4,6,7,9", "--Y", "100000"]
    )
    dt = time.monotonic() - t0
    out = capsys.readouterr().out
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    got = {int(r[0]): float(r[2]) for r in rows}
    worst_frac, worst_D = max(
        (abs(got[D] - v) / tol, D) for D, (v, tol) in SERIES_TABLE.items()
    )
    ok = (
        code == 0
        and set(got) == set(SERIES_TABLE)
        and worst_frac <= 1.0
        and dt < 120.0
    )
    _verdict(
        "01 series table",
        ok,
        f"worst deviation {worst_frac:.3f}x tolerance at D={worst_D}, {dt:.1f}s",
    )
    assert ok


def test_02_histogram_range():
    # the full window; any subwindow inherits these extrema bounds, and
    # the full sweep itself finishes inside the subset's time budget
    t0 = time.monotonic()
    sweep = f_sweep(-45000, 45000, 10_000)
    vals = sweep.values[square_filter_mask(-45000, 45000)]
    dt = time.monotonic() - t0
    vmin, vmax = float(vals.min()), float(vals.max())
    centered = vals - vals.mean()
    skew = float((centered**3).mean() / (centered**2).mean() ** 1.5)
    ok = vmin > -15.4 and vmax < 61.2 and skew > 0.0 and dt < 300.0
    _verdict(
        "02 histogram range",
        ok,
        f"range [{vmin:.4f}, {vmax:.4f}], skew {skew:+.3f}, {dt:.1f}s",
    )
    assert ok


def test_03_cubic_ratio_range():
    X = 10_000
    norm = float(X) ** (4.0 / 3.0)
    lo, hi = -0.29, 1.32
    t0 = time.monotonic()
    batch = patterson_sweep(np.arange(1, 6001), X).real / norm
    dt_batch = time.monotonic() - t0
    t0 = time.monotonic()
    naive = np.array(
        [patterson_p(A, X)[-1].value.real / norm for A in range(1, 301)]
    )
    dt_naive = time.monotonic() - t0
    ok = (
        lo < batch.min()
        and batch.max() < hi
        and lo < naive.min()
        and naive.max() < hi
        and dt_naive < 600.0
    )
    _verdict(
        "03 cubic ratio range",
        ok,
        f"batch [{batch.min():.4f}, {batch.max():.4f}] in {dt_batch:.1f}s, "
        f"naive [{naive.min():.4f}, {naive.max():.4f}] in {dt_naive:.0f}s",
    )
    assert ok


def test_04_oracle_equivalence(spf):
    t0 = time.monotonic()
    worst_s = max(
        abs(s_sum(D, l, spf) - s_sum_bruteforce(D, l))
        for l in range(1, 501)
        for D in range(-50, 51)
    )
    worst_g = max(
        abs(g_sum(d, Y, spf) - g_sum_factored(d, Y, spf))
        for d in range(1, 11)
        for Y in (1, 40, 400, 2000)
    )
    dt = time.monotonic() - t0
    ok = worst_s < 1e-9 and worst_g < 1e-9 and dt < 60.0
    _verdict(
        "04 oracle equivalence",
        ok,
        f"max |s diff| {worst_s:.3e}, max |g diff| {worst_g:.3e}, {dt:.1f}s",
    )
    assert ok


def test_05_identity_suite(spf):
    t0 = time.monotonic()
    worst = salie_sweep(99)
    shifts_ok = shift_well_defined(300, 30, spf)
    dt = time.monotonic() - t0
    ok = worst < 1e-8 and shifts_ok and dt < 120.0
    _verdict(
        "05 identity suite",
        ok,
        f"max |completed check| {worst:.3e}, shifts {'exact' if shifts_ok else 'BROKEN'}, {dt:.1f}s",
    )
    assert ok


def test_06_dual_pipeline():
    w1, w2 = default_w1(), default_w2()
    t0 = time.monotonic()
    worst_poisson = 0.0
    worst_gap_frac = 0.0
    worst_resid_frac = 0.0
    for N, X in ((100_000, 10_000), (1_000_000, 10_000), (1_000_000, 100_000)):
        win = Window(N, X)
        pc = poisson_checkpoint(win)
        worst_poisson = max(worst_poisson, pc.rel_dev)
        res = {f: dual_sum(win, form=f) for f in DUAL_FORMS}
        scale = max(abs(r.value) for r in res.values())
        for i, fa in enumerate(DUAL_FORMS):
            for fb in DUAL_FORMS[i + 1 :]:
                gap = (
                    abs(res[fa].value - res[fb].value)
                    - res[fa].truncation[1]
                    - res[fb].truncation[1]
                )
                worst_gap_frac = max(worst_gap_frac, gap / (1e-6 * scale))
        t_kl = res["kl-form"]
        if (N, X) == (100_000, 10_000):
            # one window exercises the single-call reconstruction path
            _, direct, residual = reconstruct_smoothed(win)
        else:
            direct = pc.direct
            recon = (
                volume_term(win, w1, w2)
                + 2.0 * C_STATIONARY * (EIGHTH_TURN * t_kl.value).real
            )
            residual = abs(recon - direct)
        allowance = (
            max(1.0, 5.0 * math.sqrt(X) / N)
            + 2.0 * C_STATIONARY * t_kl.truncation[1]
        )
        worst_resid_frac = max(worst_resid_frac, residual / allowance)
    dt = time.monotonic() - t0
    ok = (
        worst_poisson < 1e-6
        and worst_gap_frac <= 1.0
        and worst_resid_frac <= 1.0
        and dt < 600.0
    )
    _verdict(
        "06 dual pipeline",
        ok,
        f"poisson dev {worst_poisson:.2e}, form gap {worst_gap_frac:.3f}x budget, "
        f"residual {worst_resid_frac:.3f}x allowance, {dt:.0f}s",
    )
    assert ok


def test_07_growth_property():
    cap = PINS["theorem2_C"]
    w1, w2 = default_w1(), default_w2()
    t0 = time.monotonic()
    worst = 0.0
    ratio_devs = []
    for N in (10**4, 10**5, 10**6):
        ratio_last = None
        for X in np.geomspace(N ** (2 / 3), N**1.2, 6):
            win = Window(N, float(X))
            ts = smoothed_count_direct(win, w1, w2)
            vol = volume_term(win, w1, w2)
            worst = max(
                worst, abs(ts - vol) / (N ** (1 / 3 + 0.05) + X**0.5 * N**0.05)
            )
            ratio_last = ts / vol
        ratio_devs.append(abs(ratio_last - 1.0))
    dt = time.monotonic() - t0
    ok = worst <= cap and max(ratio_devs) < 0.05 and dt < 600.0
    _verdict(
        "07 growth property",
        ok,
        f"max normalized deviation {worst:.4f} vs cap {cap:.4f}, "
        f"worst end ratio off by {max(ratio_devs):.4f}, {dt:.1f}s",
    )
    assert ok


def test_08_zero_class_main_term(spf):
    C = PINS["f1_zero_C"]
    t0 = time.monotonic()
    cps = f_series(0, 100_000, checkpoints=(1000, 10_000, 100_000), table=spf)
    devs = []
    for cp in cps:
        envelope = C * cp.Y ** (5.0 / 18.0 + 0.05)
        devs.append(abs(cp.value.real - f0_main_term(cp.Y)) / envelope)
    anchor = f0_main_term(100_000)
    dt = time.monotonic() - t0
    envelope_ok = max(devs) <= 1.0
    # anchor pinned at 948.7 +/- 0.1; the exact partial sums settle near
    # 3*sqrt(Y) + zeta(1/2)*(1 + 2**-0.5), about 2.5 below that pin, so
    # this clause records the discrepancy rather than hiding it
    anchor_ok = abs(anchor - 948.7) <= 0.1
    ok = envelope_ok and anchor_ok and dt < 120.0
    _verdict(
        "08 zero class main term",
        ok,
        f"envelope {max(devs):.3f}x budget, f0(1e5) = {anchor:.4f} "
        f"vs pinned 948.7 +/- 0.1, {dt:.1f}s",
    )
    assert ok


def test_09_oscillatory_agreement():
    t0 = time.monotonic()
    worst = 0.0
    # archived quadrature values for the grid rows whose direct
    # integration costs minutes to hours per point (scripts/calibrate.py,
    # osc-heavy suite); only the closed-form side is recomputed live.
    # each quadrature carries its own declared uncertainty, and only the
    # gap beyond it is charged: at the node-budget ceiling the quadrature
    # floor exceeds the normalization unit, so a raw ratio there would
    # measure the integrator, not the closed form
    for rec in PINS["osc_frozen"]:
        M, l, k = rec["M"], rec["l"], rec["k"]
        num = complex(rec["re"], rec["im"])
        asym = osc_integral_asymptotic(k, l, M)
        assert asym.stationary_inside
        gap = max(0.0, abs(num - asym.value) - rec["est_error"])
        worst = max(worst, gap / (abs(l) ** -1.5 * M**-1.25))
    # live quadrature on the affordable slice, quarter steps across the
    # band; the two leftmost land outside the support and must be quiet
    # under the same normalization
    M = 1e4
    for l in (1, 2):
        for rho in np.arange(0.5, 2.01, 0.25):
            k = int(round(rho * l * math.sqrt(M)))
            num = osc_integral_numeric(k, l, M)
            asym = osc_integral_asymptotic(k, l, M).value
            gap = max(0.0, abs(num.value - asym) - num.est_error)
            worst = max(worst, gap / (l**-1.5 * M**-1.25))
    scale = abs(osc_integral_asymptotic(125, 1, M).value)
    quiet = max(
        abs(osc_integral_numeric(-100, 1, M).value),
        abs(osc_integral_numeric(25, 1, M).value),
    )
    dt = time.monotonic() - t0
    ok = worst <= 10.0 and quiet < 1e-8 * scale and dt < 300.0
    _verdict(
        "09 oscillatory agreement",
        ok,
        f"max |num - asym| beyond declared error {worst:.3f} vs 10, "
        f"off-band peak {quiet / scale:.2e} of scale, {dt:.0f}s",
    )
    assert ok


def test_10_quadric_domination():
    eps = PINS["lemma2_eps"]
    constant = PINS["lemma2_coeff"]
    t0 = time.monotonic()
    worst = quadric_domination_scan(64, 64, 64, eps=eps, constant=constant)
    dt = time.monotonic() - t0
    spot = lemma2_bound(10, 12, 9, 80.0, eps=eps, constant=constant)
    spot_ok = spot.hypothesis_ok and count_quadric(10, 12, 9, 80.0) <= spot.value
    ok = worst <= 1.0 and spot_ok and dt < 300.0
    _verdict(
        "10 quadric domination",
        ok,
        f"worst count/bound ratio {worst:.4f}, spot witness "
        f"{'holds' if spot_ok else 'FAILS'}, {dt:.1f}s",
    )
    assert ok
