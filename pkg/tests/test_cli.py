import csv
import json
import math

import numpy as np
import pytest

from fockfactor.cli import main


def _write(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_list_suites(capsys):
    assert main(["--list-suites"]) == 0
    out = capsys.readouterr().out.split()
    assert out == sorted(["current-algebra", "normal-ordering",
                          "oscillatory", "generalized-oscillatory", "cms",
                          "delta-gas", "coulomb", "hierarchy", "jastrow",
                          "poisson-functional"])


def test_verify_writes_report_bundle(tmp_path, capsys):
    config = _write(tmp_path, """
suite = "normal-ordering"
seed = 1

[params]
n_sites = 4
particle_count = 3
spacing = 0.25
""")
    out = tmp_path / "out"
    assert main(["verify", "--config", config, "--out", str(out)]) == 0
    assert (out / "report.json").exists()
    assert (out / "checks.csv").exists()
    assert (out / "residuals.png").exists()
    payload = json.loads((out / "report.json").read_text())
    assert payload["passed"] is True
    assert payload["suite"] == "normal-ordering"
    for check in payload["checks"]:
        assert check["residual"] < 1e-12


def test_unknown_suite_lists_registry(tmp_path, capsys):
    config = _write(tmp_path, 'suite = "nope"\n')
    assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "normal-ordering" in err and "poisson-functional" in err


def test_malformed_toml(tmp_path):
    config = _write(tmp_path, 'suite = [broken\n')
    assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 2


def test_invalid_model_parameter(tmp_path):
    config = _write(tmp_path, """
suite = "cms"

[params]
length = -1.0
""")
    assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 2


def test_unknown_parameter_rejected(tmp_path):
    config = _write(tmp_path, """
suite = "normal-ordering"

[params]
typo_knob = 3
""")
    assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 2


def test_capacity_exit_code(tmp_path):
    config = _write(tmp_path, """
suite = "hierarchy"

[params]
n_sites = 40
particle_count = 12
""")
    assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 3


def test_failed_gate_exit_code(tmp_path):
    config = _write(tmp_path, """
suite = "current-algebra"

[params]
order_threshold = 3.0
""")
    out = tmp_path / "out"
    assert main(["verify", "--config", config, "--out", str(out)]) == 1
    payload = json.loads((out / "report.json").read_text())
    assert payload["passed"] is False


def test_seed_override_lands_in_report(tmp_path):
    config = _write(tmp_path, """
suite = "normal-ordering"
seed = 1
""")
    out = tmp_path / "out"
    assert main(["verify", "--config", config, "--out", str(out),
                 "--seed", "99"]) == 0
    payload = json.loads((out / "report.json").read_text())
    assert payload["seed"] == 99


def test_converge_short_ladder_rejected(tmp_path):
    config = _write(tmp_path, """
suite = "cms"

[params]
grid_sizes = [16, 32]
""")
    assert main(["converge", "--config", config, "--out", str(tmp_path)]) == 2


def test_converge_no_ladder_suite(tmp_path):
    config = _write(tmp_path, 'suite = "normal-ordering"\n')
    assert main(["converge", "--config", config, "--out", str(tmp_path)]) == 2


def test_converge_writes_fitted_order(tmp_path):
    config = _write(tmp_path, """
suite = "current-algebra"

[params]
grid_sizes = [16, 32, 64]
""")
    out = tmp_path / "out"
    assert main(["converge", "--config", config, "--out", str(out)]) == 0
    assert (out / "converge.png").exists()
    rows = list(csv.DictReader(open(out / "converge.csv")))
    assert len(rows) == 6  # two ladders, three rungs each
    orders = {row["check"]: float(row["fitted_order"]) for row in rows}
    assert len(orders) == 2
    for value in orders.values():
        assert value == pytest.approx(2.0, abs=0.1)
    by_check = {}
    for row in rows:
        by_check.setdefault(row["check"], []).append(float(row["residual"]))
    for residuals in by_check.values():
        assert residuals == sorted(residuals, reverse=True)


def test_decreasing_grid_ladder_rejected(tmp_path):
    config = _write(tmp_path, """
suite = "cms"

[params]
grid_sizes = [64, 32, 16]
""")
    assert main(["verify", "--config", config, "--out", str(tmp_path)]) == 2


def test_spectrum_free_gas_matches_closed_form(tmp_path):
    config = _write(tmp_path, """
suite = "delta-gas"

[params]
beta = 0.0
n_sites = 8
length = 1.0
particle_count = 1
""")
    out = tmp_path / "out"
    assert main(["spectrum", "--config", config, "--out", str(out)]) == 0
    assert (out / "spectrum.png").exists()
    rows = list(csv.DictReader(open(out / "spectrum.csv")))
    got = np.sort([float(row["eigenvalue"]) for row in rows])
    h = 1.0 / 8
    k = np.arange(8)
    expected = np.sort(2.0 * (1 - np.cos(2 * np.pi * k / 8)) / h ** 2)
    assert np.abs(got - expected).max() < 1e-9 * expected.max()
    for row in rows:
        assert float(row["residual_norm"]) < 1e-8 * expected.max()


def test_spectrum_needs_model_suite(tmp_path):
    config = _write(tmp_path, 'suite = "jastrow"\n')
    assert main(["spectrum", "--config", config, "--out", str(tmp_path)]) == 2


def test_sample_bundle(tmp_path):
    config = _write(tmp_path, """
suite = "poisson-functional"
seed = 11

[params]
intensity = 1.3
box_low = 0.0
box_high = 2.0
draws = 60
""")
    out = tmp_path / "out"
    assert main(["sample", "--config", config, "--out", str(out)]) == 0
    assert (out / "samples.png").exists()
    lines = (out / "samples.csv").read_text().strip().splitlines()
    assert lines[0] == "index,count,positions"
    assert len(lines) == 61
    for line in lines[1:]:
        parts = line.split(",")
        count = int(parts[1])
        positions = [float(p) for p in parts[2:] if p]
        assert len(positions) == count
        assert all(0.0 <= p <= 2.0 for p in positions)


def test_sample_rejects_other_suites(tmp_path):
    config = _write(tmp_path, 'suite = "cms"\n')
    assert main(["sample", "--config", config, "--out", str(tmp_path)]) == 2


def test_shared_config_drives_all_subcommands(tmp_path):
    config = _write(tmp_path, """
suite = "cms"
seed = 3

[params]
beta = 2.0
length = 1.0
particle_count = 2
grid_sizes = [16, 32, 64]
""")
    for command in ("verify", "converge", "spectrum"):
        out = tmp_path / command
        assert main([command, "--config", config, "--out", str(out)]) == 0
    spectrum_rows = list(csv.DictReader(
        open(tmp_path / "spectrum" / "spectrum.csv")))
    lam0 = min(float(row["eigenvalue"]) for row in spectrum_rows)
    target = (math.pi * 2.0) ** 2 * 2 * 3 / 3  # closed-form pair energy
    assert lam0 == pytest.approx(target, rel=2e-3)
