"""Command-line surface: exit codes, config precedence and outputs."""

import json

import numpy as np
import pytest

from concavecdf.cli import main
from concavecdf.dataio import read_grid_csv

FAST = ["--n-iter", "300", "--burn-in", "100", "--grid-step", "0.1"]


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--n", "60", "--seed", "3", "--out", str(out)]) == 0
    return out


def manifest(path):
    return json.loads((path / "manifest.json").read_text())


def test_simulate_outputs(dataset):
    names = {p.name for p in dataset.iterdir()}
    assert {"data.txt", "intervals.csv", "true_events.csv", "manifest.json"} <= names
    m = manifest(dataset)
    assert m["seed"] == 3 and m["config"]["n"] == 60


@pytest.mark.parametrize("fmt_file", ["data.txt", "intervals.csv"])
def test_fit_all(tmp_path, dataset, fmt_file):
    data = str(dataset / fmt_file)
    assert main(["fit-bayes", "--data", data, "--out", str(tmp_path / "b"), *FAST]) == 0
    assert main(["fit-npmle", "--data", data, "--out", str(tmp_path / "n")]) == 0
    assert main(["fit-cmle", "--data", data, "--out", str(tmp_path / "c"), "--truth", "exponential"]) == 0
    assert manifest(tmp_path / "n")["converged"] is True
    assert read_grid_csv(tmp_path / "c" / "cmle.csv").grid.size == 800


def test_evaluate_and_bands(tmp_path, dataset):
    data = str(dataset / "data.txt")
    main(["fit-bayes", "--data", data, "--out", str(tmp_path / "b"), "--save-draws", *FAST])
    main(["fit-npmle", "--data", data, "--out", str(tmp_path / "n"), "--grid-step", "0.1"])
    rc = main(["evaluate", "--estimates", str(tmp_path / "b" / "mean.csv"),
               str(tmp_path / "n" / "npmle.csv"), "--truth", "exponential",
               "--out", str(tmp_path / "e")])
    assert rc == 0
    assert (tmp_path / "e" / "ise.csv").exists() and (tmp_path / "e" / "log_mse.csv").exists()
    assert main(["bands", "--draws", str(tmp_path / "b" / "draws.csv"),
                 "--out", str(tmp_path / "q")]) == 0
    got = (tmp_path / "q" / "bands.csv").read_text().splitlines()[0]
    assert got.startswith("t,")


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# simulation\nn = 25\nseed = 8\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert manifest(tmp_path / "a")["config"]["n"] == 25
    assert main(["simulate", "--config", str(cfg), "--n", "30", "--out", str(tmp_path / "b")]) == 0
    m = manifest(tmp_path / "b")
    assert m["config"]["n"] == 30 and m["seed"] == 8


def test_exit_codes(tmp_path, dataset, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--bogus", "1", "--out", str(tmp_path)])
    assert exc.value.code == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense_key = 1\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2
    assert main(["simulate", "--n", "many", "--out", str(tmp_path / "x")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("left,right\n2,1\n")
    assert main(["fit-npmle", "--data", str(bad), "--out", str(tmp_path / "y")]) == 3
    assert "bad.csv:2" in capsys.readouterr().err
    rc = main(["fit-npmle", "--data", str(dataset / "data.txt"), "--out", str(tmp_path / "z"),
               "--method", "em", "--max-iter", "2"])
    assert rc == 4
    assert (tmp_path / "z" / "npmle.csv").exists()
    assert manifest(tmp_path / "z")["converged"] is False


def test_format_selection(tmp_path, dataset):
    main(["fit-cmle", "--data", str(dataset / "data.txt"), "--out", str(tmp_path), "--format", "csv"])
    assert not any(p.suffix in (".svg", ".json") for p in tmp_path.iterdir())


def test_survival_flag(tmp_path, dataset):
    data = str(dataset / "data.txt")
    main(["fit-cmle", "--data", data, "--out", str(tmp_path / "f")])
    main(["fit-cmle", "--data", data, "--out", str(tmp_path / "s"), "--survival"])
    F = read_grid_csv(tmp_path / "f" / "cmle.csv").values
    S = read_grid_csv(tmp_path / "s" / "cmle.csv").values
    np.testing.assert_allclose(F + S, 1.0, atol=1e-15)
