import csv
import io
import json

import pytest

from harmonic_dpo.closedform import Form
from harmonic_dpo.errors import AllPointsSingular, InvalidParams
from harmonic_dpo.sweep import (
    SWEEP_HEADER,
    GridSpec,
    SweepSpec,
    figure_table,
    reproduce_figure,
    run_sweep,
    sweep_csv_text,
)


def spec(**kw):
    base = dict(kappa_values=(1.0,), lambda_c=0.5, eps1_grid=GridSpec(0.3, 5.0, 50))
    base.update(kw)
    return SweepSpec(**base)


def test_header_exact():
    text = sweep_csv_text(run_sweep(spec()).rows)
    assert text.splitlines()[0] == "kappa,eps1,duan_sum,var_plus,var_minus,nbar,delta_I,fraction,entangled,regime"
    assert SWEEP_HEADER[0] == "kappa" and len(SWEEP_HEADER) == 10


def test_rows_parse_and_are_full_precision():
    rows = list(csv.DictReader(io.StringIO(sweep_csv_text(run_sweep(spec()).rows))))
    assert len(rows) == 50
    first = rows[0]
    assert float(first["eps1"]) == 0.3
    assert first["regime"] == "above" and first["entangled"] in ("true", "false")
    assert float(first["fraction"]) == pytest.approx(0.3**2 / (0.3**2 + 0.5), rel=1e-12)


def test_deterministic_and_parallel_equal():
    s = spec(kappa_values=(0.3, 1.0))
    a = sweep_csv_text(run_sweep(s).rows)
    assert a == sweep_csv_text(run_sweep(s).rows)
    assert a == sweep_csv_text(run_sweep(s, workers=4).rows)


def test_guard_skip_counted():
    # 0.05 .. 0.45 step 0.05 hits eps1 = 0.25 kappa exactly
    s = spec(eps1_grid=GridSpec(0.05, 0.45, 9))
    res = run_sweep(s)
    assert len(res.rows) + len(res.skipped) == 9 == res.grid_size
    assert [sk["reason"] for sk in res.skipped] == ["SingularRegime"]
    assert res.skipped[0]["eps1"] == pytest.approx(0.25)


def test_all_singular():
    with pytest.raises(AllPointsSingular):
        run_sweep(spec(eps1_grid=GridSpec(0.25 - 1e-12, 0.25 + 1e-12, 2)))


def test_drive_grid_below_threshold_uses_general_form():
    s = spec(eps1_grid=None, drive_grid=GridSpec(0.0, 0.4, 5), forms=frozenset({Form.GENERAL}))
    res = run_sweep(s)
    assert len(res.rows) == 5
    assert res.rows[0].duan_sum == 2.0 and res.rows[0].fraction == 0.0
    assert {r.regime for r in res.rows} == {"below"}


def test_drive_grid_reduced_skips_off_domain():
    s = spec(eps1_grid=None, drive_grid=GridSpec(0.1, 3.0, 6))
    res = run_sweep(s)
    assert {sk["reason"] for sk in res.skipped} == {"FormMismatch"}
    assert all(r.regime == "above" for r in res.rows)


def test_observable_subset_leaves_blank_cells():
    res = run_sweep(spec(observables=frozenset({"var_minus"})))
    row = res.rows[0]
    assert row.duan_sum is None and row.entangled is None and row.var_minus is not None
    cells = sweep_csv_text(res.rows).splitlines()[1].split(",")
    assert cells[2] == "" and cells[4] != ""


def test_config_round_trip(tmp_path):
    s = spec(kappa_values=(0.1, 0.3), forms=frozenset({Form.GENERAL, Form.REDUCED}))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(s.to_dict()))
    assert SweepSpec.from_json(path) == s


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"lambda_c": 0.5, "eps1_grid": {"start": 0.3, "stop": 1, "count": 3}},
        {"kappa_values": [1], "lambda_c": 0.5},
        {"kappa_values": [1], "lambda_c": 0.5, "eps1_grid": {"start": 1, "stop": 0.3, "count": 3}},
        {"kappa_values": [1], "lambda_c": 0.5, "eps1_grid": {"start": 0.3, "stop": 1, "count": 1}},
        {"kappa_values": [-1], "lambda_c": 0.5, "eps1_grid": {"start": 0.3, "stop": 1, "count": 3}},
        {"kappa_values": [1], "lambda_c": 0.5, "eps1_grid": {"start": 0.3, "stop": 1, "count": 3}, "forms": ["exact"]},
        {"kappa_values": [1], "lambda_c": 0.5, "eps1_grid": {"start": 0.3, "stop": 1, "count": 3}, "colour": 1},
        {"kappa_values": [1], "lambda_c": 0.5, "eps1_grid": {"start": 0.3, "stop": 1, "count": 3}, "guard": -1},
    ],
)
def test_bad_configs(data):
    with pytest.raises(InvalidParams):
        SweepSpec.from_dict(data)


def test_bad_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{not json")
    with pytest.raises(InvalidParams):
        SweepSpec.from_json(path)


def test_log_grid():
    pts = GridSpec(0.1, 10.0, 3, "log").points()
    assert pts.tolist() == pytest.approx([0.1, 1.0, 10.0])


def test_figure_table_columns():
    t = figure_table(2, kappas=(0.3,), count=20)
    assert t.header == ("kappa", "eps1", "var_minus_reduced", "var_minus_general", "var_minus_oracle")
    assert len(t.rows) == 20
    assert min(r[1] for r in t.rows) > 0.075
    assert all(r[4] is not None for r in t.rows)


def test_reproduce_figure_writes_metadata(tmp_path):
    out = tmp_path / "fig1.csv"
    reproduce_figure(1, out, kappas=(0.3,), count=10)
    lines = out.read_text().splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    assert any("kappa values [0.3]" in ln for ln in meta)
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "kappa,eps1,duan_sum_reduced,duan_sum_general,duan_sum_oracle"
    assert len(body) == 11


def test_figure_rejects_bad_number():
    with pytest.raises(InvalidParams):
        figure_table(5)
