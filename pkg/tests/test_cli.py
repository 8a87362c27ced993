import csv
import io
import json

import pytest

from vglag.cli import main
from vglag.timeseries import SimulationConfig, simulate_pair


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def write_series(path, values, header="value"):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for v in values:
            fh.write(f"{v!r}\n" if isinstance(v, float) else f"{v}\n")
    return str(path)


@pytest.fixture
def pair_files(tmp_path):
    a, b = simulate_pair(SimulationConfig(noise_a_sd=0, noise_b_sd=0, true_lag=2))
    return (
        write_series(tmp_path / "a.csv", a.values.tolist()),
        write_series(tmp_path / "b.csv", b.values.tolist()),
    )


def test_estimate_identical(tmp_path):
    f = write_series(tmp_path / "x.csv", [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])
    code, out, _ = run(["estimate", "--ref", f, "--moving", f, "--lags", "0..5"])
    assert code == 0
    assert out.splitlines()[0] == "best_lag=0 distance=0.0"


def test_estimate_recovers_lag_and_writes_curve(pair_files, tmp_path):
    curve = tmp_path / "curve.csv"
    code, out, _ = run(
        ["estimate", "--ref", pair_files[0], "--moving", pair_files[1], "--out", str(curve)]
    )
    assert code == 0 and out.startswith("best_lag=2 ")
    rows = list(csv.reader(curve.open()))
    assert rows[0] == ["lag", "distance"] and len(rows) == 22
    assert float(rows[3][1]) == 0.0


def test_estimate_json_matches_csv(pair_files, tmp_path):
    c, j = tmp_path / "c.csv", tmp_path / "c.json"
    base = ["estimate", "--ref", pair_files[0], "--moving", pair_files[1]]
    assert run(base + ["--out", str(c)])[0] == 0
    assert run(base + ["--out", str(j), "--format", "json"])[0] == 0
    from_csv = [(int(r["lag"]), float(r["distance"])) for r in csv.DictReader(c.open())]
    from_json = [(p["lag"], p["distance"]) for p in json.load(j.open())["curve"]]
    assert from_csv == from_json


def test_estimate_missing_needs_impute(tmp_path):
    f = write_series(tmp_path / "m.csv", [1, 2, "NA", 4, 5, 3, 2, 8])
    code, _, err = run(["estimate", "--ref", f, "--moving", f, "--lags", "0..3"])
    assert code == 1
    assert "--impute" in err
    code, out, _ = run(
        ["estimate", "--ref", f, "--moving", f, "--lags", "0..3", "--impute", "locf"]
    )
    assert code == 0 and out.startswith("best_lag=0")


def test_estimate_missing_file_is_io_error(tmp_path):
    code, _, err = run(["estimate", "--ref", str(tmp_path / "nope.csv"), "--moving", "x"])
    assert code == 2 and "I/O" in err


def test_bad_lag_spec_is_validation_error(pair_files):
    code, _, err = run(
        ["estimate", "--ref", pair_files[0], "--moving", pair_files[1], "--lags", "5..1"]
    )
    assert code == 1


def test_sweep_731(tmp_path):
    a, b = simulate_pair(SimulationConfig(n=731, seed=3))
    fa = write_series(tmp_path / "a.csv", a.values.tolist())
    fb = write_series(tmp_path / "b.csv", b.values.tolist())
    hist, trace = tmp_path / "h.csv", tmp_path / "t.csv"
    code, out, _ = run(
        [
            "sweep",
            "--ref",
            fa,
            "--moving",
            fb,
            "--window",
            "100",
            "--out",
            str(hist),
            "--trace",
            str(trace),
        ]
    )
    assert code == 0
    counts = {int(r["lag"]): int(r["count"]) for r in csv.DictReader(hist.open())}
    assert sum(counts.values()) == 631
    assert len(list(csv.DictReader(trace.open()))) == 631
    assert "windows=631" in out


def test_sweep_full_window_single_row(tmp_path):
    f = write_series(tmp_path / "x.csv", [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])
    trace = tmp_path / "t.csv"
    code, _, _ = run(
        [
            "sweep",
            "--ref",
            f,
            "--moving",
            f,
            "--window",
            "8",
            "--lags",
            "0..3",
            "--include-last",
            "--trace",
            str(trace),
        ]
    )
    assert code == 0
    assert trace.read_text().splitlines() == ["window_start,best_lag", "1,0"]


def test_sweep_window_too_small(pair_files):
    code, _, err = run(
        ["sweep", "--ref", pair_files[0], "--moving", pair_files[1], "--window", "20"]
    )
    assert code == 1 and "window" in err


def test_simulate_table_rows_and_determinism():
    argv = ["simulate", "--table", "T1", "--replicates", "5", "--seed", "7"]
    code, out, _ = run(argv)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    assert {r["seed"] for r in rows} == {"7"}
    assert run(argv)[1] == out


def test_simulate_json_matches_csv():
    argv = ["simulate", "--table", "T1", "--replicates", "3", "--seed", "1"]
    csv_rows = list(csv.DictReader(io.StringIO(run(argv)[1])))
    payload = json.loads(run(argv + ["--format", "json"])[1])
    assert [(r["row"], int(r["lag"]), float(r["percent_correct"])) for r in csv_rows] == [
        (p["row"], c["lag"], c["percent_correct"]) for p in payload for c in p["results"]
    ]


def test_simulate_out_prints_human_table(tmp_path):
    dest = tmp_path / "r.csv"
    code, out, _ = run(
        ["simulate", "--table", "T1", "--replicates", "2", "--seed", "3", "--out", str(dest)]
    )
    assert code == 0
    assert "seed=3" in out and "n=25" in out
    assert len(dest.read_text().splitlines()) == 9


def test_simulate_unknown_table():
    code, _, err = run(["simulate", "--table", "T9"])
    assert code == 1
    assert "T1, T2, T3, T4, T5" in err


def test_simulate_custom_zero_noise():
    code, out, _ = run(
        ["simulate", "--noise-a", "0", "--noise-b", "0", "--replicates", "1", "--true-lags", "3,7"]
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["lag"], r["percent_correct"]) for r in rows] == [("3", "100.0"), ("7", "100.0")]


def test_impute_locf(tmp_path):
    f = write_series(tmp_path / "g.csv", [1, "NA", "NA", 4, "NA", 6])
    code, out, _ = run(["impute", f, "--impute", "locf"])
    assert code == 0
    assert out.splitlines() == ["value", "1", "1.0", "1.0", "4", "4.0", "6"]


def test_impute_mean_to_file(tmp_path):
    f = write_series(tmp_path / "g.csv", [1, "NA", 3])
    dest = tmp_path / "o.csv"
    assert run(["impute", f, "--impute", "mean", "--out", str(dest)])[0] == 0
    assert dest.read_text().splitlines()[2] == "2.0"


def test_impute_all_missing(tmp_path):
    f = write_series(tmp_path / "g.csv", ["NA", "NA", ""])
    code, _, err = run(["impute", f])
    assert code == 1 and "missing" in err


def test_generate_round_trip(tmp_path):
    dest = tmp_path / "pair.csv"
    assert (
        run(["generate", "--n", "60", "--true-lag", "4", "--seed", "2", "--out", str(dest)])[0] == 0
    )
    code, out, _ = run(
        [
            "estimate",
            "--ref",
            str(dest),
            "--moving",
            str(dest),
            "--ref-column",
            "ts_a",
            "--moving-column",
            "ts_b",
        ]
    )
    assert code == 0 and out.startswith("best_lag=4")


def test_argparse_errors_use_validation_code():
    code, _, _ = run(["sweep", "--ref", "a.csv"])
    assert code == 1
