import csv
import io
import math
import subprocess
import sys

import pytest

from tfqkd import cli
from tfqkd.concentration import BoundModel
from tfqkd.mc_validator import CoverageReport
from tfqkd.cli import COMPARE_COLUMNS, FLUCT_COLUMNS, SCAN_COLUMNS, ScanSpec, UsageError, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_scan_columns_and_grid(capsys):
    code, out, _ = run(["scan", "--start", "0", "--end", "10", "--step", "5"], capsys)
    assert code == 0
    data = rows(out)
    assert tuple(data[0]) == SCAN_COLUMNS
    assert [float(r["loss_db"]) for r in data] == [0.0, 5.0, 10.0]
    assert math.isinf(float(data[0]["plob_bound"]))
    assert float(data[1]["key_rate"]) > 0


def test_single_point_scan(capsys):
    code, out, _ = run(["scan", "--start", "30", "--end", "30"], capsys)
    assert code == 0 and len(rows(out)) == 1


def test_scan_is_byte_identical(tmp_path):
    paths = [tmp_path / f"run{i}.csv" for i in range(2)]
    for jobs, path in zip((1, 2), paths):
        assert main(["scan", "--end", "20", "--step", "4", "--jobs", str(jobs),
                     "--set", "N=1e13", "-o", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_fluct_scan(capsys):
    code, out, _ = run(["fluct", "--delta-mu", "0.1", "--start", "20", "--end", "40",
                        "--step", "10", "--set", "N=1e15"], capsys)
    assert code == 0
    data = rows(out)
    assert tuple(data[0]) == FLUCT_COLUMNS
    assert all(float(r["mu_Z_c"]) > 0 for r in data)


def test_fluct_delta_from_config(tmp_path, capsys):
    cfg = tmp_path / "f.cfg"
    cfg.write_text("delta_mu = 0.3\nN = 1e15\n")
    _, a, _ = run(["fluct", "--config", str(cfg), "--start", "30", "--end", "30"], capsys)
    _, b, _ = run(["fluct", "--config", str(cfg), "--delta-mu", "0",
                   "--start", "30", "--end", "30"], capsys)
    assert float(rows(a)[0]["key_rate"]) < float(rows(b)[0]["key_rate"])


def test_compare_ordering(capsys):
    code, out, _ = run(["compare", "--set", "N=1e14", "--start", "10", "--end", "60",
                        "--step", "10"], capsys)
    assert code == 0
    data = rows(out)
    assert tuple(data[0]) == COMPARE_COLUMNS
    for r in data:
        h, m, i = (float(r[c]) for c in COMPARE_COLUMNS[3:])
        if min(h, m, i) > 0:
            assert i >= m and i >= h


def test_point_diagnostics(capsys):
    code, out, _ = run(["point", "--loss", "40"], capsys)
    assert code == 0
    keys = dict(line.split(" = ", 1) for line in out.splitlines())
    assert keys["status"] == "ok"
    assert "Y11_up" in keys and "plob_bound" in keys and "fallbacks" in keys


def test_validate_exit_codes_and_determinism(tmp_path, capsys):
    args = ["validate", "--model", "hoeffding", "--trials", "2000", "--seed", "4"]
    code, first, _ = run(args, capsys)
    assert code == 0 and "PASS" in first
    _, second, _ = run(args, capsys)
    assert first == second
    report, table = tmp_path / "r.txt", tmp_path / "r.csv"
    assert main(args + ["--report", str(report), "--csv", str(table)]) == 0
    assert report.read_text() == first
    assert rows(table.read_text())[0]["passed"] == "true"


def test_validate_failure_exits_1(monkeypatch, capsys):
    def broken(model, n, p, eps, trials, seed, workers=1):
        return CoverageReport(BoundModel.parse(model), n, p, trials, seed, eps,
                              violations_upper=trials // 2)

    monkeypatch.setattr(cli, "bernoulli_coverage", broken)
    code, out, _ = run(["validate", "--trials", "2000"], capsys)
    assert code == 1 and "FAIL" in out


@pytest.mark.parametrize("argv", [
    ["scan", "--start", "10", "--end", "5"],
    ["scan", "--step", "0"],
    ["scan", "--set", "bogus=1"],
    ["scan", "--set", "P_Z=2"],
    ["scan", "--config", "/nonexistent/file.cfg"],
    ["validate", "--trials", "10"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("tfqkd ")


def test_config_error_reports_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("N = 1e12\nP_d = 1e-7\nmu_Z = fast\n")
    code, _, err = run(["scan", "--config", str(cfg)], capsys)
    assert code == 2 and "line 3" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["scan", "--model", "nope"])
    assert info.value.code == 2


def test_scan_spec_endpoints():
    assert ScanSpec(0, 1, 0.1).losses()[-1] == pytest.approx(1.0)
    assert len(ScanSpec(0, 80, 1).losses()) == 81
    with pytest.raises(UsageError):
        ScanSpec(-1, 5, 1)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tfqkd", "scan", "--start", "30", "--end", "30"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("loss_db,")
