import json

import numpy as np
import pytest

from garchmidas.cli import main
from garchmidas.data import load_daily_series, load_monthly_series


@pytest.fixture(scope="module")
def sim_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("sim")
    daily, monthly = d / "daily.csv", d / "EPU.csv"
    code = main(["simulate", "--months", "93", "--start", "2008-01", "--seed", "3",
                 "--as-prices", "--label", "EPU", "--out-daily", str(daily),
                 "--out-monthly", str(monthly)])
    assert code == 0
    return daily, monthly


def _run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_row_count_and_determinism(tmp_path):
    paths = []
    for run in ("a", "b"):
        daily, monthly = tmp_path / f"{run}_d.csv", tmp_path / f"{run}_m.csv"
        assert main(["simulate", "--months", "500", "--days", "22", "--seed", "1",
                     "--out-daily", str(daily), "--out-monthly", str(monthly)]) == 0
        paths.append((daily, monthly))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()
    series = load_daily_series(paths[0][0], kind="log_return")
    assert len(series) == 11_000
    assert len(load_monthly_series(paths[0][1])) == 524


def test_simulate_infeasible_exit_3(tmp_path, capsys):
    code, _, err = _run(["simulate", "--months", "5", "--theta", "-10", "--out-daily",
                         tmp_path / "d.csv", "--out-monthly", tmp_path / "m.csv"], capsys)
    assert code == 3
    assert "infeasible" in err
    assert not (tmp_path / "d.csv").exists()


def test_weights(capsys):
    code, out, _ = _run(["weights", "--lags", "4", "--omega2", "3"], capsys)
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert rows[0] == ["lag", "weight"]
    assert np.allclose([float(r[1]) for r in rows[1:]], [9 / 14, 4 / 14, 1 / 14, 0])


def test_stats_json_and_text(sim_files, capsys):
    daily, monthly = sim_files
    code, out, _ = _run(["stats", "--daily", daily, "--monthly", monthly], capsys)
    assert code == 0
    table = json.loads(out)
    assert set(table) == {"RCP", "EPU"}
    for key in ("mean", "median", "max", "min", "std_dev", "skewness", "kurtosis",
                "jarque_bera", "jarque_bera_p", "adf", "adf_p"):
        assert key in table["RCP"]
    code, out, _ = _run(["stats", "--daily", daily, "--format", "text"], capsys)
    assert code == 0
    assert out.splitlines()[1].startswith("Mean")


def test_stats_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, _, err = _run(["stats", "--daily", empty], capsys)
    assert code == 2
    assert "MalformedRow" in err


def test_fit_forecast_evaluate_chain(sim_files, tmp_path, capsys):
    daily, _ = sim_files
    fit_json = tmp_path / "fit.json"
    code, _, _ = _run(["fit", "--daily", daily, "--regressor", "rv", "--est-start", "2010-01",
                       "--est-end", "2014-10", "--output", fit_json], capsys)
    assert code == 0
    report = json.loads(fit_json.read_text())
    names = [row["name"] for row in report["parameters"]]
    assert names[:3] == ["mu", "alpha", "beta"]
    assert {"log_likelihood", "aic", "n_obs", "converged"} <= set(report)

    fc_csv = tmp_path / "fc.csv"
    code, _, _ = _run(["forecast", "--daily", daily, "--fit", fit_json, "--start", "2014-10",
                       "--end", "2015-09", "--output", fc_csv], capsys)
    assert code == 0
    assert fc_csv.read_text().splitlines()[0] == "date,predicted_variance,actual_proxy"

    code, out, _ = _run(["evaluate", "--forecast", fc_csv], capsys)
    assert code == 0
    losses = json.loads(out)
    assert losses["sample"] == "out_of_sample" and losses["T"] == 12 * 22

    code, _, err = _run(["forecast", "--daily", daily, "--fit", fit_json, "--start", "2009-06",
                         "--end", "2010-06"], capsys)
    assert code == 2
    assert "RangeBeforeFitWindow" in err


def test_protocol_is_byte_identical(sim_files, tmp_path, capsys):
    daily, monthly = sim_files
    outs = []
    for run in ("a", "b"):
        out = tmp_path / f"{run}.json"
        code, _, _ = _run(["protocol", "--preset", "paper-2008-2015", "--daily", daily,
                           "--regressor", "file", "--monthly", monthly, "--output", out],
                          capsys)
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert [r["sample"] for r in rep["losses"]] == ["full_sample", "out_of_sample"]
    assert rep["regressor"] == "EPU"


def test_protocol_compare(sim_files, tmp_path, capsys):
    daily, monthly = sim_files
    reports = []
    for name, extra in (("rv", []), ("epu", ["--monthly", monthly])):
        out = tmp_path / f"{name}.json"
        code, _, _ = _run(["protocol", "--preset", "paper-2008-2015", "--daily", daily,
                           "--regressor", "rv" if name == "rv" else "file", *extra,
                           "--output", out], capsys)
        assert code == 0
        reports.append(out)
    code, out, _ = _run(["compare", *reports], capsys)
    assert code == 0
    cmp = json.loads(out)
    assert set(cmp["models"]) == {"RV", "EPU"}
    assert set(cmp["best"]) == {"rmse", "rmsd", "rmae", "rmad"}
    code, out, _ = _run(["compare", *reports, "--format", "text"], capsys)
    assert "lowest" in out


def test_config_file_and_env(sim_files, tmp_path, capsys, monkeypatch):
    daily, _ = sim_files
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"daily": str(daily), "est_start": "2010-01",
                               "est_end": "2014-10", "format": "text", "lags": 12}))
    code, out_file, _ = _run(["fit", "--config", cfg], capsys)
    assert code == 0
    monkeypatch.setenv("GARCHMIDAS_CONFIG", str(cfg))
    code, out_env, _ = _run(["fit"], capsys)
    assert code == 0 and out_env == out_file
    # flags win over the file
    code, out_json, _ = _run(["fit", "--format", "json"], capsys)
    assert json.loads(out_json)["n_lags"] == 12


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert _run(["fit", "--config", bad], capsys)[0] == 2
    assert _run(["fit", "--regressor", "file"], capsys)[0] == 2
    assert _run(["protocol", "--daily", "x.csv", "--est-start", "2014-01",
                 "--est-end", "2010-01"], capsys)[0] == 2
    assert _run(["protocol", "--daily", tmp_path / "missing.csv", "--preset",
                 "paper-2008-2015"], capsys)[0] == 2


def test_nonconvergence_exit_code(sim_files, tmp_path, capsys):
    daily, _ = sim_files
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"optimizer": {"max_iter": 2, "max_polish": 1,
                                             "compute_se": False}}))
    out = tmp_path / "fit.json"
    base = ["fit", "--config", cfg, "--daily", daily, "--est-start", "2010-01",
            "--est-end", "2014-10", "--output", out]
    assert _run(base, capsys)[0] == 4
    assert not out.exists()
    assert _run([*base, "--allow-nonconverged"], capsys)[0] == 0
    assert json.loads(out.read_text())["converged"] is False


def test_build_index(tmp_path, capsys):
    rng = np.random.default_rng(0)
    f = rng.standard_normal(36)
    lines = ["month,US,DE,FR,JP"]
    for t in range(36):
        cells = [f"{100 + 10 * f[t] + rng.standard_normal():.6f}" for _ in range(4)]
        if t == 0:
            cells[2] = ""
        lines.append(f"{np.datetime64('2010-01', 'M') + t}," + ",".join(cells))
    panel = tmp_path / "panel.csv"
    panel.write_text("\n".join(lines) + "\n")
    out = tmp_path / "GEPU.csv"
    code, _, _ = _run(["build-index", "--panel", panel, "--output", out], capsys)
    assert code == 0
    series = load_monthly_series(out)
    assert len(series) == 35 and series.label == "GEPU"
    side = json.loads((tmp_path / "GEPU.json").read_text())
    assert side["dropped_months"] == 1
    assert side["scaling"] == "standardize"


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "garchmidas", "weights", "--lags", "2",
                          "--omega2", "1"], capture_output=True, text=True, check=True)
    assert res.stdout == "lag,weight\n1,0.5\n2,0.5\n"
