"""End-to-end checks of the command line front end.

These run main() in process so exit codes and output can be asserted
without subprocess overhead; one test goes through the real interpreter
entry point as a packaging check.
"""

import json
import subprocess
import sys

import pytest

import mordell.cli as cli
from mordell.calibration import calibration_sha256
from mordell.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(csv_text):
    lines = [ln for ln in csv_text.strip().splitlines() if ln]
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


# ---------------------------------------------------------------------------
# count


def test_count_trivial_family(capsys):
    code, out, _ = run(["count", "--N", "1000", "--X", "0"], capsys)
    assert code == 0
    _, rows = rows_of(out)
    assert rows == [["1000", "0", "3"]]


def test_count_collect_davenport(capsys):
    code, out, _ = run(["count", "--N", "10", "--X", "4", "--collect"], capsys)
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["m", "n", "b"]
    assert ["5", "11", "-4"] in rows


def test_count_window_guard(capsys):
    code, _, err = run(["count", "--N", "10", "--X", "1000"], capsys)
    assert code == 1
    assert "error:" in err


def test_count_primitive_subset(capsys):
    _, out_all, _ = run(["count", "--N", "200", "--X", "50"], capsys)
    _, out_prim, _ = run(["count", "--N", "200", "--X", "50", "--primitive"], capsys)
    total = int(rows_of(out_all)[1][0][2])
    prim = int(rows_of(out_prim)[1][0][2])
    assert 0 <= prim <= total


# ---------------------------------------------------------------------------
# fdy


def test_fdy_vanishing_class(capsys):
    code, out, _ = run(["fdy", "--D-list", "2", "--Y", "100"], capsys)
    assert code == 0
    _, rows = rows_of(out)
    assert rows == [["2", "100", "0", "0", "0"]]


def test_fdy_selector_exclusivity(capsys):
    code, _, err = run(
        ["fdy", "--D-list", "1", "--D-range", "0..5", "--Y", "10"], capsys
    )
    assert code == 1
    code, _, err = run(["fdy", "--Y", "10"], capsys)
    assert code == 1


def test_fdy_checkpoints_cumulative(capsys):
    code, out, _ = run(
        ["fdy", "--D-list", "-5", "--Y", "200", "--checkpoints", "50,200"], capsys
    )
    assert code == 0
    _, rows = rows_of(out)
    assert [r[1] for r in rows] == ["50", "200"]
    assert int(rows[0][4]) <= int(rows[1][4])


def test_fdy_negative_list_accepted(capsys):
    # leading-dash values must parse as data, not flags
    code, out, _ = run(["fdy", "--D-list", "-5,-3,1", "--Y", "50"], capsys)
    assert code == 0
    _, rows = rows_of(out)
    assert [r[0] for r in rows] == ["-5", "-3", "1"]


def test_fdy_histogram_counts_partition(capsys):
    code, out, _ = run(
        ["fdy", "--D-range", "-60..60", "--Y", "200", "--histogram", "8",
         "--format", "json"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    binned = sum(r[2] for r in doc["rows"])
    assert binned + doc["below"] + doc["above"] == doc["admitted"]
    assert doc["min"] <= doc["mean"] <= doc["max"]


def test_fdy_histogram_explicit_range(capsys):
    code, out, _ = run(
        ["fdy", "--D-range", "-20..20", "--Y", "100", "--histogram", "4",
         "--hist-range", "-1,1", "--format", "json"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 4
    assert doc["below"] + doc["above"] > 0


def test_fdy_histogram_needs_range(capsys):
    code, _, _ = run(["fdy", "--D-list", "1", "--Y", "50", "--histogram", "5"], capsys)
    assert code == 1


# ---------------------------------------------------------------------------
# pax


def test_pax_unit_example(capsys):
    code, out, _ = run(["pax", "--A-range", "1..1", "--X", "2"], capsys)
    assert code == 0
    _, rows = rows_of(out)
    assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-12)


def test_pax_zero_in_range_rejected(capsys):
    code, _, _ = run(["pax", "--A-range", "-2..2", "--X", "100"], capsys)
    assert code == 1


def test_pax_naive_budget(capsys):
    code, _, err = run(["pax", "--A-range", "1..1", "--X", "100001"], capsys)
    assert code == 2
    assert "--batch" in err


def test_pax_batch_matches_naive(capsys):
    _, out_n, _ = run(["pax", "--A-range", "3..5", "--X", "300"], capsys)
    _, out_b, _ = run(["pax", "--A-range", "3..5", "--X", "300", "--batch"], capsys)
    for rn, rb in zip(rows_of(out_n)[1], rows_of(out_b)[1]):
        assert float(rn[1]) == pytest.approx(float(rb[1]), abs=1e-9)
        assert float(rn[2]) == pytest.approx(float(rb[2]), abs=1e-9)


# ---------------------------------------------------------------------------
# gdy and dual


def test_gdy_ratio_column(capsys):
    code, out, _ = run(["gdy", "--d", "1", "--Y", "50"], capsys)
    assert code == 0
    _, rows = rows_of(out)
    # columns carry 12 significant digits, so compare at that precision
    g_re, rhs, ratio = (float(rows[0][i]) for i in (2, 4, 5))
    assert ratio == pytest.approx(g_re / rhs, rel=1e-10)
    code, _, _ = run(["gdy", "--d", "0", "--Y", "50"], capsys)
    assert code == 1


def test_dual_small_window(capsys):
    code, out, _ = run(
        ["dual", "--N", "2000", "--X", "100", "--tol", "0.001"], capsys
    )
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["form", "T_re", "T_im", "l_max", "tail"]
    assert rows[0][0] == "kl-form"
    assert int(rows[0][3]) >= 1
    assert float(rows[0][4]) >= 0.0


def test_dual_rejects_unknown_form(capsys):
    code, _, _ = run(["dual", "--N", "2000", "--X", "100", "--form", "xyz"], capsys)
    assert code == 1


# ---------------------------------------------------------------------------
# verify


def test_verify_salie_passes(capsys):
    code, out, err = run(["verify", "--suite", "salie"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True and doc["failures"] == 0
    assert all(r[2] == "pass" for r in doc["rows"])
    assert "PASS salie/" in err


def test_verify_gidentity_passes(capsys):
    code, out, _ = run(["verify", "--suite", "gidentity"], capsys)
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_failure_exits_consistency_code(capsys, monkeypatch):
    monkeypatch.setattr(
        cli, "_suite_salie", lambda: [("stub", False, "forced failure")]
    )
    code, out, err = run(["verify", "--suite", "salie"], capsys)
    assert code == 3
    assert json.loads(out)["passed"] is False
    assert "FAIL salie/stub" in err


def test_verify_rejects_unknown_suite(capsys):
    code, _, _ = run(["verify", "--suite", "nope"], capsys)
    assert code == 1


# ---------------------------------------------------------------------------
# plumbing: flags, files, determinism


def test_seedless_rejected(capsys):
    code, _, err = run(["count", "--N", "50", "--X", "5", "--seedless"], capsys)
    assert code == 1
    assert "reserved" in err


def test_threads_must_be_positive(capsys):
    code, _, _ = run(["count", "--N", "50", "--X", "5", "--threads", "0"], capsys)
    assert code == 1


def test_unknown_subcommand(capsys):
    code, _, _ = run(["frobnicate"], capsys)
    assert code == 1


def test_output_file_and_manifest(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, _, _ = run(
        ["fdy", "--D-list", "3", "--Y", "100", "--out", str(out)], capsys
    )
    assert code == 0
    assert out.exists()
    manifest = json.loads((tmp_path / "f.csv.manifest.json").read_text())
    assert manifest["config"]["command"] == "fdy"
    assert manifest["calibration_sha256"] == calibration_sha256()
    assert manifest["config"]["reproducible"] is True


def test_reruns_and_threads_byte_identical(tmp_path, capsys):
    argv = ["fdy", "--D-list", "-5,1,3", "--Y", "300"]
    paths = [tmp_path / n for n in ("a.csv", "b.csv", "c.csv")]
    run(argv + ["--out", str(paths[0])], capsys)
    run(argv + ["--out", str(paths[1])], capsys)
    run(argv + ["--out", str(paths[2]), "--threads", "3"], capsys)
    blobs = [p.read_bytes() for p in paths]
    assert blobs[0] == blobs[1] == blobs[2]


def test_json_format_structure(capsys):
    code, out, _ = run(
        ["count", "--N", "1000", "--X", "0", "--format", "json"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["N", "X", "count"]
    assert doc["rows"] == [[1000, 0, 3]]


def test_smooth_row_shape(capsys):
    code, out, _ = run(["smooth", "--N", "3000", "--X", "200"], capsys)
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["N", "X", "M", "Z", "T", "volume", "ratio"]
    t, vol, ratio = (float(rows[0][i]) for i in (4, 5, 6))
    assert ratio == pytest.approx(t / vol, rel=1e-10)


def test_module_entrypoint():
    proc = subprocess.run(
        [sys.executable, "-m", "mordell.cli", "count", "--N", "1000", "--X", "0"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "1000,0,3"
