import csv
import io
import json
import math

import pytest

from toto import cli

SOLVE_SQRT3 = ["solve", "--gamma", "1.7320508", "--u1", "0.0002", "--u2", "6.5"]


def run(capsys, argv):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_human_output(capsys):
    code, out, _ = run(capsys, SOLVE_SQRT3)
    assert code == 0
    assert "optimal: T2- 1.3888" in out
    for label in ("T1+", "T2+", "T4+", "T2-", "T4-"):
        assert label in out


def test_solve_matches_column_three(capsys):
    code, out, _ = run(capsys, ["solve", "--gamma", "8", "--u1", "0.0002", "--u2", "1"])
    assert code == 0
    label, time = out.splitlines()[-1].split()[1:]
    assert label == "T3+" and float(time) == pytest.approx(7.3863, abs=1e-3)
    rows = {line.split()[-4]: float(line.split()[-1]) for line in out.splitlines()[2:-1]}
    assert rows == pytest.approx({"T1+": 8.0159, "T3+": 7.3863, "T5+": 9.5568, "T3-": 9.7758, "T5-": 9.5735}, abs=1e-3)


def test_solve_json_round_trip(capsys):
    code, out, _ = run(capsys, [*SOLVE_SQRT3, "--json"])
    assert code == 0
    report = json.loads(out)
    assert cli.dumps(report) + "\n" == out
    assert sum(c["optimal"] for c in report["candidates"]) == 1
    assert report["optimal"] == "T2-"
    best = next(c for c in report["candidates"] if c["optimal"])
    assert best["total_time"] == pytest.approx(1.3888, abs=1e-3)
    assert best["switch_count"] == 2 and best["word"] == "YXY"
    assert report["validation"]["passed"]


def test_solve_physical_input_in_seconds(capsys):
    # omega0 = 2, gamma = sqrt(3), u1 = 0.0002, u2 = 6.5
    w0 = 2.0
    argv = ["solve", "--omega0", "2", "--omegaf", str(w0 / 3), "--omega1", str(w0 * math.sqrt(0.0002)), "--omega2", str(w0 * math.sqrt(6.5))]
    code, out, _ = run(capsys, [*argv, "--json", "--seconds"])
    assert code == 0
    report = json.loads(out)
    assert report["time_unit"] == "seconds"
    best = next(c for c in report["candidates"] if c["optimal"])
    assert best["total_time"] == pytest.approx(1.3888 / w0, abs=1e-3)


def test_seconds_needs_physical_input(capsys):
    code, _, err = run(capsys, [*SOLVE_SQRT3, "--seconds"])
    assert code == cli.EXIT_INVALID and "physical" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--gamma", "0.5", "--u1", "0.1", "--u2", "2"],
        ["solve", "--gamma", "2", "--u1", "0.1", "--u2", "2"],
        ["solve", "--gamma", "2", "--u1", "0.01"],
    ],
)
def test_invalid_problem_exit_code(capsys, argv):
    code, _, err = run(capsys, argv)
    assert code == 2
    assert err.startswith("error:")


def test_table_cells(capsys):
    code, out, _ = run(capsys, ["table"])
    assert code == 0
    rows = {line.split()[0]: line.split()[1:] for line in out.splitlines()[1:]}
    assert rows["T8+"][3] == "7.0651"
    assert rows["T5+"][3] == "-" and rows["T5-"][3] == "-"
    assert rows["T4-"][3] == "4.5458*"
    assert [r for r in rows if r in ("T1+", "T2-", "T3+", "T4-")]


def test_table_tolerance_reports_deviation(capsys):
    code, out, _ = run(capsys, ["table", "--tolerance", "1"])
    assert code == 0
    assert "max deviation from published values" in out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_csv(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, ["simulate", "--gamma", "8", "--u1", "0.0002", "--u2", "4", "--out", str(path)])
    assert code == 0
    rows = read_csv(path)
    assert list(rows[0]) == ["t", "x1", "x2", "u", "z1", "z2", "z3"]
    first = {k: float(v) for k, v in rows[0].items()}
    assert (first["t"], first["x1"], first["x2"]) == (0.0, 1.0, 0.0)
    assert (first["z1"], first["z2"], first["z3"]) == (1.0, 1.0, 0.0)
    last = rows[-1]
    assert abs(float(last["x1"]) - 8.0) < 1e-6 and abs(float(last["x2"])) < 1e-6
    assert float(last["t"]) == pytest.approx(4.5458, abs=1e-3)
    for r in rows:
        z1, z2, z3 = float(r["z1"]), float(r["z2"]), float(r["z3"])
        assert abs(z1 * z2 - z3 * z3 / 4 - 1) <= 1e-9 * max(1.0, z1 * z2)
    times = [float(r["t"]) for r in rows]
    assert times == sorted(times)


def test_simulate_to_stdout(capsys):
    code, out, _ = run(capsys, ["simulate", "--gamma", "1.7320508", "--u1", "0.0002", "--u2", "1", "--samples-per-segment", "5"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    # 1 initial row, 5 per segment, and one duplicated switching row
    assert len(rows) == 1 + 2 * 5 + 1


def test_simulate_unwritable_path(capsys, tmp_path):
    bad = tmp_path / "missing" / "traj.csv"
    code, _, err = run(capsys, ["simulate", "--gamma", "8", "--u1", "0.0002", "--u2", "4", "--out", str(bad)])
    assert code == 4 and "error" in err


def test_sweep_rows(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("TOTO_THREADS", "1")
    path = tmp_path / "sweep.csv"
    argv = ["sweep", "--gamma-range", "1.7320508:8:2", "--u2-range", "0.5:6.5:2", "--out", str(path)]
    code, _, _ = run(capsys, argv)
    assert code == 0
    assert path.read_text().splitlines()[0] == cli.SWEEP_HEADER
    rows = read_csv(path)
    assert [(float(r["gamma"]), float(r["u2"])) for r in rows] == [(1.7320508, 0.5), (1.7320508, 6.5), (8.0, 0.5), (8.0, 6.5)]
    by_key = {(float(r["gamma"]), float(r["u2"])): r for r in rows}
    row = by_key[(1.7320508, 6.5)]
    assert row["status"] == "ok" and row["switch_count"] == "2"
    assert float(row["total_time"]) == pytest.approx(1.3888, abs=1e-3)
    assert by_key[(1.7320508, 0.5)]["status"] == "invalid"
    assert by_key[(8.0, 0.5)]["status"] == "invalid"


def test_sweep_switch_count_at_gamma_eight(capsys):
    code, out, _ = run(capsys, ["sweep", "--gamma-range", "8:8:1", "--u2-range", "1:1:1"])
    assert code == 0
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert row["switch_count"] == "3" and row["optimal_family"] == "OddStartsWithX"


def test_sweep_is_order_independent_of_workers(capsys, monkeypatch):
    argv = ["sweep", "--gamma-range", "2:3:2", "--u2-range", "1:3:2", "--u1", "0.001"]
    monkeypatch.setenv("TOTO_THREADS", "1")
    _, serial, _ = run(capsys, argv)
    monkeypatch.setenv("TOTO_THREADS", "2")
    _, parallel, _ = run(capsys, argv)
    assert serial == parallel


def test_bad_range_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--gamma-range", "1:2", "--u2-range", "1:2:2"])
    assert exc.value.code == 2


def test_canonical_rounds_and_nulls():
    assert cli.canonical({"a": [1.23456789012345, math.inf], "b": 3}) == {"a": [1.234567890, None], "b": 3}
