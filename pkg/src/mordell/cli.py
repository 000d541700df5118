"""Command line front end: counting runs, series sweeps, dual-sum
evaluation, and the verification suites.

Every run follows the same shape: parse, validate all parameters against
the target operation's preconditions, compute, emit.  When the output
goes to a file, a sibling RunManifest JSON records the echoed config,
library version, wall time, and the hash of the calibration fixture, so
a results file stays traceable to the inputs that produced it.

Determinism: there is no randomness anywhere, sweeps are merged in
parameter order regardless of thread count, and floats are printed with
a fixed 12-significant-digit rule.  The same config gives byte-identical
output files.

Exit codes: 0 success, 1 precondition, 2 budget, 3 internal consistency,
4 accuracy.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .arith import build_spf
from .calibration import calibration_sha256, load_calibration
from .counts import Window, count_exact, count_primitive, is_primitive
from .errors import (
    BudgetError,
    InternalConsistencyError,
    MordellError,
    PreconditionError,
)
from .expsums import (
    HistogramSpec,
    _checkpoint_grid,
    f_series,
    f_sweep,
    fill_histogram,
    g_conjectural_rhs,
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
from .oscillatory import DUAL_FORMS, dual_sum, poisson_checkpoint, reconstruct_smoothed
from .smooth import (
    default_w1,
    default_w2,
    minorant_w1,
    minorant_w2,
    smoothed_count_direct,
    smoothed_count_primitive,
    volume_term,
)

VERIFY_SUITES = ("arith", "dual", "salie", "gidentity", "theorem2", "all")


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one CLI run."""

    command: str
    parameters: dict
    output_path: str | None
    format: str
    threads: int
    reproducible: bool = True


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written next to every output file."""

    config: dict
    version: str
    wall_time_s: float
    calibration_sha256: str


# ---------------------------------------------------------------------------
# parsing and emission plumbing


class _Parser(argparse.ArgumentParser):
    # argparse's default error path calls sys.exit(2); route through the
    # shared error ladder instead so bad flags exit with the precondition code
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # values like "-5,-3" or "-200..200" are data, not flags
        self._negative_number_matcher = re.compile(r"^-\d[\d.,-]*$")

    def error(self, message):
        raise PreconditionError(message)


def _parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if not m:
        raise PreconditionError(f"bad range {text!r}; expected a..b")
    a, b = int(m.group(1)), int(m.group(2))
    if a > b:
        raise PreconditionError(f"empty range {text!r}")
    return a, b


def _parse_int_list(text: str) -> list[int]:
    try:
        vals = [int(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise PreconditionError(f"bad integer list {text!r}") from None
    if not vals:
        raise PreconditionError(f"empty integer list {text!r}")
    return vals


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _json_safe(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def _emit(cfg: RunConfig, header: list[str], rows, extra: dict, t0: float) -> None:
    """Write the result table plus, for file outputs, the manifest."""
    if cfg.format == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        doc = {"columns": header, "rows": [[_json_safe(v) for v in row] for row in rows]}
        for k, v in extra.items():
            doc[k] = _json_safe(v)
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if cfg.output_path:
        out = Path(cfg.output_path)
        out.write_text(text)
        manifest = RunManifest(
            config=asdict(cfg),
            version=__version__,
            wall_time_s=time.perf_counter() - t0,
            calibration_sha256=calibration_sha256(),
        )
        Path(str(out) + ".manifest.json").write_text(
            json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n"
        )
    else:
        sys.stdout.write(text)
    if cfg.format == "csv" and extra:
        for k in sorted(extra):
            print(f"# {k} = {_fmt(_json_safe(extra[k]))}", file=sys.stderr)


def _ordered_map(fn, items, threads: int):
    """Map preserving item order; the pool size never changes the result."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_count(args) -> int:
    win = Window(args.N, args.X)
    cfg = _config(args, "count", N=args.N, X=args.X,
                  primitive=args.primitive, collect=args.collect)
    t0 = time.perf_counter()
    if args.collect:
        _, pts = count_exact(win, collect=True)
        if args.primitive:
            pts = [p for p in pts if is_primitive(p.m, p.n)]
        rows = [(p.m, p.n, p.b) for p in pts]
        _emit(cfg, ["m", "n", "b"], rows, {"count": len(rows)}, t0)
    else:
        if args.primitive:
            c = count_primitive(win)
        else:
            c, _ = count_exact(win)
        _emit(cfg, ["N", "X", "count"], [(args.N, args.X, c)], {}, t0)
    return 0


def _cmd_smooth(args) -> int:
    win = Window(args.N, args.X)
    if args.X < 1:
        raise PreconditionError("smoothed counts need X >= 1")
    w1 = minorant_w1() if args.minorant else default_w1()
    w2 = minorant_w2() if args.minorant else default_w2()
    cfg = _config(args, "smooth", N=args.N, X=args.X,
                  primitive=args.primitive, minorant=args.minorant)
    t0 = time.perf_counter()
    if args.primitive:
        t = smoothed_count_primitive(win, w1, w2)
    else:
        t = smoothed_count_direct(win, w1, w2)
    vol = volume_term(win, w1, w2)
    rows = [(args.N, args.X, win.M, win.Z, t, vol, t / vol)]
    _emit(cfg, ["N", "X", "M", "Z", "T", "volume", "ratio"], rows, {}, t0)
    return 0


def _cmd_fdy(args) -> int:
    if (args.D_list is None) == (args.D_range is None):
        raise PreconditionError("provide exactly one of --D-list / --D-range")
    if args.Y < 1:
        raise PreconditionError(f"Y must be >= 1, got {args.Y}")
    cps = _parse_int_list(args.checkpoints) if args.checkpoints else None
    _checkpoint_grid(args.Y, cps)
    if args.histogram is not None:
        if args.D_range is None:
            raise PreconditionError("--histogram needs --D-range")
        if args.histogram < 1:
            raise PreconditionError("--histogram needs at least one bin")
        if cps is not None:
            raise PreconditionError("--histogram and --checkpoints are exclusive")
    hist_range = None
    if args.hist_range is not None:
        lo, hi = (float(p) for p in args.hist_range.split(",", 1))
        if not lo < hi:
            raise PreconditionError("--hist-range needs lo < hi")
        hist_range = (lo, hi)

    if args.D_list is not None:
        dvals = _parse_int_list(args.D_list)
    else:
        a, b = _parse_range(args.D_range)
        dvals = list(range(a, b + 1))
    cfg = _config(args, "fdy", D=dvals if len(dvals) <= 64 else args.D_range,
                  Y=args.Y, checkpoints=cps, histogram=args.histogram)
    t0 = time.perf_counter()

    if args.histogram is not None:
        a, b = dvals[0], dvals[-1]
        sweep = f_sweep(a, b, args.Y)
        vals = sweep.values[square_filter_mask(a, b)]
        if vals.size == 0:
            raise PreconditionError("window admits no D after exclusions")
        if hist_range is None:
            lo, hi = float(vals.min()), float(vals.max())
            if not lo < hi:
                lo, hi = lo - 0.5, hi + 0.5
            hist_range = (lo, hi)
        filled, stats = fill_histogram(vals, HistogramSpec(range=hist_range, bins=args.histogram))
        edges = filled.edges
        rows = [(edges[i], edges[i + 1], int(filled.counts[i])) for i in range(filled.bins)]
        extra = {
            "min": stats.min, "max": stats.max, "mean": stats.mean,
            "admitted": stats.count, "below": filled.below, "above": filled.above,
        }
        _emit(cfg, ["bin_lo", "bin_hi", "count"], rows, extra, t0)
        return 0

    table = build_spf(max(3 * args.Y, 2))
    recs = _ordered_map(lambda D: f_series(D, args.Y, cps, table), dvals, args.threads)
    rows = []
    for D, rec in zip(dvals, recs):
        for r in rec:
            rows.append((D, r.Y, r.value.real, r.value.imag, r.terms))
    _emit(cfg, ["D", "Y", "F_re", "F_im", "terms"], rows, {}, t0)
    return 0


def _cmd_gdy(args) -> int:
    if args.d == 0 or args.Y < 1:
        raise PreconditionError("need d != 0 and Y >= 1")
    if args.variant not in ("plain", "cosine"):
        raise PreconditionError(f"unknown variant {args.variant!r}")
    cfg = _config(args, "gdy", d=args.d, Y=args.Y, variant=args.variant)
    t0 = time.perf_counter()
    table = build_spf(max(args.Y, 2))
    g = g_sum(args.d, args.Y, table)
    rhs = g_conjectural_rhs(args.d, args.Y, args.variant, table)
    rows = [(args.d, args.Y, g.real, g.imag, rhs, g.real / rhs)]
    _emit(cfg, ["d", "Y", "G_re", "G_im", "rhs", "ratio"], rows, {}, t0)
    return 0


def _cmd_pax(args) -> int:
    a, b = _parse_range(args.A_range)
    if a <= 0 <= b:
        raise PreconditionError("A range must not contain 0")
    if args.X < 1:
        raise PreconditionError(f"X must be >= 1, got {args.X}")
    if not args.batch and args.X > 100_000:
        raise BudgetError("naive mode stops at X = 100000; pass --batch")
    avals = list(range(a, b + 1))
    cfg = _config(args, "pax", A_range=args.A_range, X=args.X, batch=args.batch)
    t0 = time.perf_counter()
    scale = float(args.X) ** (4.0 / 3.0)
    if args.batch:
        if args.threads > 1:
            step = (len(avals) + args.threads - 1) // args.threads
            blocks = [avals[i : i + step] for i in range(0, len(avals), step)]
            parts = _ordered_map(lambda blk: patterson_sweep(blk, args.X), blocks, args.threads)
            vals = np.concatenate(parts)
        else:
            vals = patterson_sweep(avals, args.X)
    else:
        vals = _ordered_map(lambda A: patterson_p(A, args.X)[-1].value, avals, args.threads)
    rows = [(A, v.real, v.imag, v.real / scale) for A, v in zip(avals, vals)]
    _emit(cfg, ["A", "P_re", "P_im", "ratio"], rows, {}, t0)
    return 0


def _cmd_dual(args) -> int:
    win = Window(args.N, args.X)
    if args.form != "all" and args.form not in DUAL_FORMS:
        raise PreconditionError(f"unknown form {args.form!r}")
    if not (args.tol > 0):
        raise PreconditionError("tol must be positive")
    forms = list(DUAL_FORMS) if args.form == "all" else [args.form]
    cfg = _config(args, "dual", N=args.N, X=args.X, form=args.form, tol=args.tol)
    t0 = time.perf_counter()
    rows = []
    for f in forms:
        r = dual_sum(win, form=f, tol=args.tol, threads=args.threads)
        l_max, tail = r.truncation
        rows.append((f, r.value.real, r.value.imag, l_max, tail))
    _emit(cfg, ["form", "T_re", "T_im", "l_max", "tail"], rows, {}, t0)
    return 0


# ---------------------------------------------------------------------------
# verification suites


def _suite_arith() -> list[tuple[str, bool, str]]:
    table = build_spf(1501)
    worst = 0.0
    for l in range(1, 501):
        for D in range(-50, 51):
            worst = max(worst, abs(s_sum(D, l, table) - s_sum_bruteforce(D, l)))
    return [("s_sum_vs_bruteforce", worst < 1e-9,
             f"max |diff| {worst:.3e} over l <= 500, |D| <= 50")]


def _suite_gidentity() -> list[tuple[str, bool, str]]:
    table = build_spf(100_000)
    worst = 0.0
    for d in range(1, 11):
        direct = g_sum(d, 2000, table)
        factored = g_sum_factored(d, 2000, table)
        worst = max(worst, abs(direct - factored))
    checks = [("g_sum_vs_factored", worst < 1e-9,
               f"max |diff| {worst:.3e} over d <= 10, Y = 2000")]
    ratio = g_sum(1, 100_000, table).real / g_conjectural_rhs(1, 100_000, "plain", table)
    checks.append(("g_ratio_soft", 0.5 < ratio < 1.5,
                   f"G(1;1e5) / (2 sum l^-1/2) = {ratio:.6f}"))
    return checks


def _suite_salie() -> list[tuple[str, bool, str]]:
    worst = salie_sweep(99)
    table = build_spf(901)
    ok = shift_well_defined(300, 30, table)
    return [
        ("salie_vanishing", worst < 1e-8, f"max |sum| {worst:.3e} over odd q <= 99"),
        ("shift_well_defined", ok, "phase invariant under x -> x + 3l t, l <= 300, |D| <= 30"),
    ]


def _suite_theorem2() -> list[tuple[str, bool, str]]:
    pins = load_calibration()
    cap = pins["theorem2_C"]
    w1, w2 = default_w1(), default_w2()
    worst = 0.0
    checks = []
    for N in (10**4, 10**5, 10**6):
        ratio_last = None
        for X in np.geomspace(N ** (2 / 3), N**1.2, 6):
            win = Window(N, float(X))
            ts = smoothed_count_direct(win, w1, w2)
            vol = volume_term(win, w1, w2)
            worst = max(worst, abs(ts - vol) / (N ** (1 / 3 + 0.05) + X**0.5 * N**0.05))
            ratio_last = ts / vol
        checks.append((f"volume_ratio_N{N}", abs(ratio_last - 1.0) < 0.05,
                       f"T/volume = {ratio_last:.6f} at X = N^1.2"))
    checks.insert(0, ("growth_constant", worst <= cap,
                      f"max normalized deviation {worst:.6f} <= pinned {cap:.6f}"))
    return checks


def _suite_dual(N: int, X: int) -> list[tuple[str, bool, str]]:
    win = Window(N, X)
    checks = []
    pc = poisson_checkpoint(win)
    checks.append(("poisson_in_n", pc.rel_dev < 1e-6,
                   f"relative deviation {pc.rel_dev:.3e}"))
    results = {f: dual_sum(win, form=f) for f in DUAL_FORMS}
    vals = [results[f].value for f in DUAL_FORMS]
    tails = [results[f].truncation[1] for f in DUAL_FORMS]
    scale = max(max(abs(v) for v in vals), 1e-300)
    dev = max(
        abs(vals[i] - vals[j]) - tails[i] - tails[j]
        for i in range(3)
        for j in range(i + 1, 3)
    )
    checks.append(("dual_forms_agree", dev < 1e-6 * scale,
                   f"max pairwise |diff| beyond tails {max(dev, 0.0):.3e} vs scale {scale:.3e}"))
    recon, direct, residual = reconstruct_smoothed(win)
    allowance = max(1.0, 5.0 * math.sqrt(win.X) / win.N) + 10.0 * results["kl-form"].truncation[1]
    checks.append(("reconstruction", residual <= allowance,
                   f"|T - reconstructed| = {residual:.6f} <= {allowance:.6f}"))
    return checks


def _cmd_verify(args) -> int:
    if args.suite not in VERIFY_SUITES:
        raise PreconditionError(f"unknown suite {args.suite!r}")
    win_args = (args.N or 100_000, args.X or 10_000)
    Window(*win_args)
    cfg = _config(args, "verify", suite=args.suite, N=win_args[0], X=win_args[1])
    t0 = time.perf_counter()
    suites = {
        "arith": _suite_arith,
        "dual": lambda: _suite_dual(*win_args),
        "salie": _suite_salie,
        "gidentity": _suite_gidentity,
        "theorem2": _suite_theorem2,
    }
    names = list(suites) if args.suite == "all" else [args.suite]
    rows = []
    n_fail = 0
    for name in names:
        for check, ok, detail in suites[name]():
            rows.append((name, check, "pass" if ok else "fail", detail))
            n_fail += 0 if ok else 1
            print(f"{'PASS' if ok else 'FAIL'} {name}/{check}: {detail}", file=sys.stderr)
    _emit(cfg, ["suite", "check", "status", "detail"], rows,
          {"failures": n_fail, "passed": n_fail == 0}, t0)
    if n_fail:
        raise InternalConsistencyError(f"{n_fail} verification check(s) failed")
    return 0


# ---------------------------------------------------------------------------
# wiring


def _config(args, command: str, **params) -> RunConfig:
    return RunConfig(
        command=command,
        parameters=params,
        output_path=args.out,
        format=args.format,
        threads=args.threads,
        reproducible=True,
    )


def _common(format_default: str = "csv") -> _Parser:
    # fresh parser per subcommand: argparse parents share action objects,
    # so a per-subcommand default tweak would leak into the siblings
    c = _Parser(add_help=False)
    c.add_argument("--out", default=None, help="output file (default: stdout)")
    c.add_argument("--format", choices=("csv", "json"), default=format_default)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--seedless", action="store_true",
                   help="reserved; rejected (nothing here uses randomness)")
    return c


def _build_parser() -> _Parser:
    top = _Parser(prog="mordell", description=__doc__.split("\n\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[_common()], help="exact window counts")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--primitive", action="store_true")
    p.add_argument("--collect", action="store_true")
    p.set_defaults(handler=_cmd_count)

    p = sub.add_parser("smooth", parents=[_common()], help="smoothed window counts")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--primitive", action="store_true")
    p.add_argument("--minorant", action="store_true")
    p.set_defaults(handler=_cmd_smooth)

    p = sub.add_parser("fdy", parents=[_common()], help="cumulative F(D;Y) series")
    p.add_argument("--D-list", dest="D_list", default=None)
    p.add_argument("--D-range", dest="D_range", default=None)
    p.add_argument("--Y", type=int, required=True)
    p.add_argument("--checkpoints", default=None)
    p.add_argument("--histogram", type=int, default=None, metavar="BINS")
    p.add_argument("--hist-range", dest="hist_range", default=None, metavar="LO,HI")
    p.set_defaults(handler=_cmd_fdy)

    p = sub.add_parser("gdy", parents=[_common()], help="squarefree G(d^2;Y) series")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--Y", type=int, required=True)
    p.add_argument("--variant", choices=("plain", "cosine"), default="plain")
    p.set_defaults(handler=_cmd_gdy)

    p = sub.add_parser("pax", parents=[_common()], help="Patterson partial sums P(A;X)")
    p.add_argument("--A-range", dest="A_range", required=True)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--batch", action="store_true")
    p.set_defaults(handler=_cmd_pax)

    p = sub.add_parser("dual", parents=[_common()], help="oscillatory dual sums")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--form", default="kl-form",
                   choices=tuple(DUAL_FORMS) + ("all",))
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(handler=_cmd_dual)

    p = sub.add_parser("verify", parents=[_common("json")], help="invariant suites")
    p.add_argument("--suite", required=True, choices=VERIFY_SUITES)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--X", type=int, default=None)
    p.set_defaults(handler=_cmd_verify)

    return top


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.seedless:
            raise PreconditionError(
                "--seedless is reserved: no operation consumes randomness"
            )
        if args.threads < 1:
            raise PreconditionError(f"--threads must be >= 1, got {args.threads}")
        return args.handler(args)
    except MordellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
