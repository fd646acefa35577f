import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from garchmidas.errors import DegeneratePanel, MalformedRow, RegressorGap
from garchmidas.index_builder import IndexPanel, build_global_index, load_index_panel

MONTHS = np.datetime64("2000-01", "M") + np.arange(200)


def _panel(matrix, months=None):
    matrix = np.asarray(matrix, dtype=float)
    months = MONTHS[: matrix.shape[0]] if months is None else months
    countries = [f"C{i}" for i in range(matrix.shape[1])]
    return IndexPanel.from_raw(months, countries, matrix)


def _factor_panel(seed, n_countries=20, n_months=200, snr=3.0):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(n_months)
    load = rng.uniform(0.5, 1.5, n_countries)
    noise = rng.standard_normal((n_months, n_countries)) * load / np.sqrt(snr)
    level = rng.uniform(80, 200, n_countries)
    return f, _panel(level + 20 * (load * f[:, None] + noise))


def _z(x):
    return (x - x.mean()) / x.std()


def test_identical_columns_rank_one(rng):
    x = 100 + rng.standard_normal(50)
    g = build_global_index(_panel(np.column_stack([x, x])))
    assert abs(g.explained_variance_ratio - 1) < 1e-10
    assert abs(np.corrcoef(g.series.values, x)[0, 1]) == pytest.approx(1, abs=1e-12)
    assert_allclose(g.series.values, x, rtol=1e-12)


def test_antisymmetric_pair(rng):
    x = rng.standard_normal(40)
    g = build_global_index(_panel(np.column_stack([x, -x])))
    assert abs(g.explained_variance_ratio - 1) < 1e-10
    assert g.loadings[0] > 0
    assert g.loadings.mean() >= -1e-15


def test_explained_variance_in_unit_interval(rng):
    g = build_global_index(_panel(rng.standard_normal((60, 5))))
    assert 0 < g.explained_variance_ratio < 1
    assert g.loadings.mean() > 0


def test_rank_one_center_only(rng):
    f = rng.standard_normal(30)
    g = build_global_index(_panel(np.outer(f, [1.0, 2.0, 3.0]) + [5, 6, 7]),
                           scaling="center_only")
    assert abs(g.explained_variance_ratio - 1) < 1e-10


def test_factor_recovery():
    hits = 0
    for seed in range(10):
        f, panel = _factor_panel(seed)
        hits += np.corrcoef(build_global_index(panel).series.values, f)[0, 1] > 0.95
    assert hits == 10


def test_column_order_invariance():
    _, panel = _factor_panel(1, n_countries=6)
    perm = [3, 0, 5, 1, 4, 2]
    other = IndexPanel(panel.months, tuple(panel.countries[i] for i in perm),
                       panel.matrix[:, perm])
    a, b = build_global_index(panel), build_global_index(other)
    assert_allclose(a.series.values, b.series.values, rtol=1e-10)
    assert_allclose(a.loadings[perm], b.loadings, atol=1e-12)


def test_affine_invariance_with_standardize():
    _, panel = _factor_panel(2, n_countries=5)
    scale = np.array([0.1, 3.0, 7.0, 1.0, 250.0])
    shift = np.array([-50.0, 0.0, 12.0, 1e3, 4.0])
    moved = IndexPanel(panel.months, panel.countries, panel.matrix * scale + shift)
    a, b = build_global_index(panel), build_global_index(moved)
    assert_allclose(_z(a.series.values), _z(b.series.values), atol=1e-10)
    assert a.explained_variance_ratio == pytest.approx(b.explained_variance_ratio, rel=1e-12)


def test_output_matches_average_moments():
    _, panel = _factor_panel(3)
    g = build_global_index(panel)
    avg = panel.matrix.mean(axis=1)
    assert g.series.values.mean() == pytest.approx(avg.mean(), rel=1e-12)
    assert g.series.values.std(ddof=1) == pytest.approx(avg.std(ddof=1), rel=1e-12)
    assert g.series.label == "GEPU"


def test_degenerate_panels(rng):
    with pytest.raises(DegeneratePanel):
        _panel(rng.standard_normal((10, 1)))
    with pytest.raises(DegeneratePanel):
        _panel(rng.standard_normal((2, 3)))
    with pytest.raises(DegeneratePanel):
        build_global_index(_panel(np.column_stack([rng.standard_normal(10), np.ones(10)])))
    with pytest.raises(ValueError):
        build_global_index(_panel(rng.standard_normal((10, 3))), scaling="robust")


def test_missing_months_dropped(rng):
    m = rng.standard_normal((12, 3))
    m[0, 1] = np.nan
    m[11, 2] = np.nan
    panel = _panel(m)
    assert panel.n_dropped == 2
    assert panel.matrix.shape == (10, 3)
    g = build_global_index(panel)
    assert g.sidecar()["dropped_months"] == 2


def test_interior_gap_cannot_become_regressor(rng):
    m = rng.standard_normal((12, 3))
    m[5, 0] = np.nan
    with pytest.raises(RegressorGap):
        build_global_index(_panel(m))


def test_load_wide_csv(tmp_path):
    p = tmp_path / "panel.csv"
    p.write_text("month,US,DE,FR\n2010-02,2,3,4\n2010-01,1,2,\n2010-03,5,1,2\n"
                 "2010-04,3,3,3\n2010-05,4,1,5\n")
    panel = load_index_panel(p)
    assert panel.countries == ("US", "DE", "FR")
    assert panel.n_dropped == 1
    assert [str(m) for m in panel.months] == ["2010-02", "2010-03", "2010-04", "2010-05"]
    g = build_global_index(panel)
    side = json.loads(g.sidecar_json())
    assert side["countries"] == ["US", "DE", "FR"]
    assert len(side["loadings"]) == 3
    assert 0 < side["explained_variance_ratio"] <= 1


@pytest.mark.parametrize("text", ["country,US\n2010-01,1\n", "month,US,DE\n2010-01,1\n",
                                  "month,US,DE\n2010-01,1,x\n", "month,US,DE\n"])
def test_load_malformed(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(MalformedRow):
        load_index_panel(p)


def test_deterministic():
    _, panel = _factor_panel(4)
    a, b = build_global_index(panel), build_global_index(panel)
    assert_array_equal(a.series.values, b.series.values)
