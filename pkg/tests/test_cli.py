import numpy as np
import pytest

from sidelink_alloc.cli import load_config, main


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        """
[scenario]
num_vehicles = 4
num_subframes = 6
slots_per_subframe = 2
seed = 5

[run]
trials = 6
algorithms = ["graph", "greedy", "random", "unconstrained"]
vehicle_counts = [2, 4, 6]
"""
    )
    return path


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0], [ln.split(",") for ln in lines[1:]]


def test_solve_example(tmp_path, capsys):
    f = tmp_path / "ex.txt"
    f.write_text("2 2 2\n5 1 2 9\n3 3 4 0\n")
    assert main(["solve", str(f), "--oracle"]) == 0
    out = capsys.readouterr().out
    assert "mapping: 0->3 1->0" in out
    assert "value: 12" in out
    assert "feasible: yes" in out
    assert "oracle_value: 12" in out


def test_solve_infeasible(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("3 2 1\n1 2\n3 4\n5 6\n")
    assert main(["solve", str(f)]) == 3
    assert "infeasible: more vehicles than subframes" in capsys.readouterr().err


@pytest.mark.parametrize("content", ["", "2 2\n1 2\n", "1 1 1\n-1\n"])
def test_solve_malformed(tmp_path, content):
    f = tmp_path / "m.txt"
    f.write_text(content)
    assert main(["solve", str(f)]) == 2


def test_solve_oracle_cap(tmp_path):
    f = tmp_path / "big.txt"
    f.write_text("3 3 1\n1 2 3\n4 5 6\n7 8 9\n")
    assert main(["solve", str(f), "--oracle", "--oracle-cap", "5"]) == 4


def test_load_config_rejects_unknown_keys(tmp_path):
    for body in ("[scenario]\nnum_vehicle = 3\n", "[run]\ntrail = 3\n", "[extra]\nx = 1\n", "not toml ="):
        path = tmp_path / "c.toml"
        path.write_text(body)
        with pytest.raises(ValueError):
            load_config(path)


def test_simulate_unknown_key_exit(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text("[scenario]\nmean_db = 3\n")
    assert main(["simulate", "--config", str(path), "--out-dir", str(tmp_path)]) == 2


def test_load_config_values(small_config):
    cfg = load_config(small_config)
    assert cfg.scenario.num_vehicles == 4 and cfg.trials == 6
    assert cfg.vehicle_counts == (2, 4, 6)


def test_simulate_writes_fig4(small_config, tmp_path):
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(small_config), "--out-dir", str(out)]) == 0
    header, rows = read_rows(out / "fig4.csv")
    assert header == "algorithm,highest,worst,mean,std,unit"
    assert len(rows) == 8
    assert {r[5] for r in rows} == {"Mbit/s", "bit/s/Hz"}
    for r in rows:
        highest, worst, mean, std = map(float, r[1:5])
        assert worst <= mean <= highest and std >= 0
    assert b"\r\n" not in (out / "fig4.csv").read_bytes()


def test_simulate_default_row_count(tmp_path):
    assert main(["simulate", "--trials", "2", "--out-dir", str(tmp_path)]) == 0
    _, rows = read_rows(tmp_path / "fig4.csv")
    assert len(rows) == 4 * 2


def test_simulate_flags_override(small_config, tmp_path):
    assert main([
        "simulate", "--config", str(small_config), "--algorithms", "graph,exhaustive",
        "--vehicles", "3", "--trials", "2", "--out-dir", str(tmp_path),
    ]) == 0
    _, rows = read_rows(tmp_path / "fig4.csv")
    by = {(r[0], r[5]): r for r in rows}
    assert by[("graph", "Mbit/s")][1:5] == by[("exhaustive", "Mbit/s")][1:5]


def test_simulate_oracle_cap_exit(tmp_path):
    assert main(["simulate", "--algorithms", "exhaustive", "--trials", "1", "--out-dir", str(tmp_path)]) == 4


def test_simulate_bad_flags_exit(tmp_path):
    assert main(["simulate", "--vehicles", "200", "--out-dir", str(tmp_path)]) == 2
    assert main(["simulate", "--algorithms", "psychic", "--out-dir", str(tmp_path)]) == 2


def test_simulate_beta_audit(small_config, tmp_path):
    assert main(["simulate", "--config", str(small_config), "--beta", "0.001", "--out-dir", str(tmp_path)]) == 0
    header, rows = read_rows(tmp_path / "smooth_audit.csv")
    assert header == "trial,max_gap_bits_s,bound_bits_s,within_bound"
    assert len(rows) == 6 and all(r[3] == "1" for r in rows)


def test_sweep_writes_fig5(small_config, tmp_path):
    assert main(["sweep", "--config", str(small_config), "--out-dir", str(tmp_path)]) == 0
    header, rows = read_rows(tmp_path / "fig5.csv")
    assert header == "num_vehicles,algorithm,mean_worst_rate"
    assert len(rows) == 3 * 4
    assert [r[0] for r in rows[::4]] == ["2", "4", "6"]


def test_sweep_graph_column_matches_oracle(small_config, tmp_path):
    assert main([
        "sweep", "--config", str(small_config), "--algorithms", "graph,exhaustive-oracle",
        "--vehicle-counts", "1,2,3", "--out-dir", str(tmp_path),
    ]) == 0
    _, rows = read_rows(tmp_path / "fig5.csv")
    by = {(r[0], r[1]): r[2] for r in rows}
    for n in ("1", "2", "3"):
        assert by[(n, "graph")] == by[(n, "exhaustive")]


def test_sweep_rejects_large_count(small_config, tmp_path):
    assert main(["sweep", "--config", str(small_config), "--vehicle-counts", "7", "--out-dir", str(tmp_path)]) == 2


def test_cdf_writes_fig6(small_config, tmp_path):
    assert main(["cdf", "--config", str(small_config), "--out-dir", str(tmp_path)]) == 0
    header, rows = read_rows(tmp_path / "fig6.csv")
    assert header == "rate_bits_s_hz,algorithm,cdf"
    assert len(rows) == 30 * 4
    for name in ("graph", "greedy", "random", "unconstrained"):
        series = [float(r[2]) for r in rows if r[1] == name]
        assert series[-1] == 1.0
        assert np.all(np.diff(series) >= 0)


def test_selftest_quick(capsys):
    assert main(["selftest", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "oracle equivalence: 100/100" in out


def test_selftest_fault_injection(capsys):
    assert main(["selftest", "--quick", "--inject-fault"]) == 1
    out = capsys.readouterr().out
    assert "FAILED oracle equivalence; counterexample:" in out
