import csv
import io
import json
import subprocess
import sys

import pytest

from ratext.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    meta = dict(item.split("=", 1) for item in lines[0][2:].split())
    rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    return meta, rows[0], rows[1:]


HO = ("--family", "ho", "--omega", "2")
MORSE = ("--family", "morse", "--a", "5", "--b", "1")


def test_extend_ho(capsys):
    code, out, _ = run(capsys, "extend", *HO, "--n", "2")
    assert code == 0
    meta, header, rows = parse_csv(out)
    assert header == ["x", "V", "V_ext"]
    assert meta["family"] == "ho" and meta["n"] == "2"
    assert float(meta["extra_level"]) == -6.0
    assert len(rows) == 1024
    x, v, ve = map(float, rows[512])
    ref = x * x - 1 + 8 * (2 * x * x - 1) / (2 * x * x + 1) ** 2 - 2
    assert ve == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_extend_morse_header_lists_extra_level(capsys):
    code, out, _ = run(capsys, "extend", *MORSE, "--n", "2")
    assert code == 0
    meta, _, _ = parse_csv(out)
    assert float(meta["extra_level"]) == -39.0


def test_extend_odd_ho_is_singular(capsys):
    code, _, err = run(capsys, "extend", *HO, "--n", "1")
    assert code == 3
    assert "KLH branch" in err


def test_extend_erkc_boundary_rejected(capsys):
    # a = (n+1)/2
    code, _, _ = run(capsys, "extend", "--family", "erkc", "--a", "1.5", "--gamma", "2", "--n", "2")
    assert code == 2


def test_extend_erkc_inside_case_i_accepted(capsys):
    # 1 < 1.5 < 2: inside the strict regime for n = 1
    code, _, _ = run(capsys, "extend", "--family", "erkc", "--a", "1.5", "--gamma", "2", "--n", "1")
    assert code == 0


def test_missing_family_parameter(capsys):
    code, _, err = run(capsys, "extend", "--family", "morse", "--a", "5", "--n", "2")
    assert code == 2 and "--b" in err


def test_invalid_parameter_range(capsys):
    code, _, _ = run(capsys, "extend", "--family", "ho", "--omega", "-1", "--n", "2")
    assert code == 2


def test_spectrum_ho(capsys):
    code, out, _ = run(capsys, "spectrum", *HO, "--n", "2", "--kmax", "2")
    assert code == 0
    meta, header, rows = parse_csv(out)
    assert header == ["label", "analytic_energy", "numerov_energy", "abs_diff"]
    assert [r[0] for r in rows] == ["-", "0", "1", "2"]
    assert [float(r[1]) for r in rows] == [-6.0, 0.0, 2.0, 4.0]
    assert all(float(r[3]) < 1e-5 for r in rows)


def test_spectrum_strict_has_no_extra_row(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "erkc", "--a", "1.6", "--gamma", "2", "--n", "1")
    assert code == 0
    meta, _, rows = parse_csv(out)
    assert "-" not in [r[0] for r in rows]
    assert meta["strict"] == "true"


def test_spectrum_morse_level_count(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "morse", "--a", "3.7", "--b", "1", "--n", "2")
    assert code == 0
    _, _, rows = parse_csv(out)
    physical = [r for r in rows if r[0] != "-"]
    assert len(physical) == 4


def test_eigenstate_ho(capsys):
    code, out, _ = run(capsys, "eigenstate", *HO, "--n", "2", "--level", "0")
    assert code == 0
    meta, header, rows = parse_csv(out)
    assert header == ["x", "psi_unnormalized", "psi_normalized"]
    assert float(meta["energy"]) == 0.0


def test_eigenstate_morse_extra_is_nodeless(capsys):
    code, out, _ = run(capsys, "eigenstate", *MORSE, "--n", "2", "--level", "-")
    assert code == 0
    _, _, rows = parse_csv(out)
    assert all(float(r[2]) >= 0 for r in rows)


def test_eigenstate_extra_missing_in_strict_case(capsys):
    code, _, _ = run(
        capsys, "eigenstate", "--family", "erkc", "--a", "1.6", "--gamma", "2", "--n", "1", "--level", "-"
    )
    assert code == 4


def test_eigenstate_bad_level(capsys):
    code, _, _ = run(capsys, "eigenstate", *HO, "--n", "2", "--level", "x")
    assert code == 2


def test_verify_negative_case(capsys):
    code, out, err = run(capsys, "verify", *HO, "--n", "1", "--non-conforming")
    assert code == 0
    assert "expected-fail" in err
    meta, _, rows = parse_csv(out)
    assert rows[0][1] == "regularity" and rows[0][2] == "fail"


def test_verify_erkc_case_ii(capsys):
    code, out, _ = run(capsys, "verify", "--family", "erkc", "--a", "4", "--gamma", "2", "--n", "2", "--kmax", "3")
    assert code == 0
    _, _, rows = parse_csv(out)
    assert all(r[2] == "pass" for r in rows)


def test_verify_failure_exit_code(capsys):
    code, _, _ = run(capsys, "verify", *MORSE, "--n", "1")
    assert code == 1


def test_verify_tree_format(capsys):
    code, out, _ = run(capsys, "verify", *HO, "--n", "2", "--kmax", "1", "--format", "tree")
    assert code == 0
    body = json.loads(out)
    assert body["overall"] == "pass"
    assert body["cases"][0]["checks"][0]["name"] == "regularity"


def test_verify_matrix_default(capsys):
    code, out, _ = run(capsys, "verify", "--matrix", "default")
    assert code == 0
    meta, _, _ = parse_csv(out)
    assert meta["overall"] == "pass"


def test_output_bit_stable(capsys):
    _, first, _ = run(capsys, "extend", *MORSE, "--n", "2")
    _, second, _ = run(capsys, "extend", *MORSE, "--n", "2")
    assert first == second
    assert "\r" not in first


def test_out_file(tmp_path, capsys):
    target = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "extend", *HO, "--n", "2", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("# family=ho")
    assert [p.name for p in tmp_path.iterdir()] == ["curve.csv"]


def test_error_writes_nothing(tmp_path, capsys):
    target = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "extend", *HO, "--n", "1", "--out", str(target))
    assert code == 3
    assert list(tmp_path.iterdir()) == []


def test_grid_points_env(monkeypatch, capsys):
    monkeypatch.setenv("RATEXT_GRID_POINTS", "128")
    _, out, _ = run(capsys, "extend", *HO, "--n", "2")
    assert len(parse_csv(out)[2]) == 128
    monkeypatch.setenv("RATEXT_GRID_POINTS", "many")
    code, _, _ = run(capsys, "extend", *HO, "--n", "2")
    assert code == 2


def test_grid_points_flag_minimum():
    with pytest.raises(SystemExit) as info:
        main(["extend", *HO, "--n", "2", "--grid-points", "10"])
    assert info.value.code == 2


def test_grid_overrides(capsys):
    _, out, _ = run(capsys, "extend", *HO, "--n", "2", "--grid-lo", "-1", "--grid-hi", "1", "--grid-points", "64")
    rows = parse_csv(out)[2]
    assert float(rows[0][0]) == -1.0 and float(rows[-1][0]) == 1.0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ratext", "extend", *HO, "--n", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 3
