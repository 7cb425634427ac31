import json

import pytest

from harmonic_dpo.closedform import Form
from harmonic_dpo.model import SystemParams, solve_steady_state, working_point_from_eps1
from harmonic_dpo.sweep import GridSpec, SweepSpec
from harmonic_dpo.validation import rel_diff, region, validate, validate_point

BOTH = frozenset({Form.GENERAL, Form.REDUCED})


def ids(res):
    return {f["id"] for f in res["flags"]}


def test_rel_diff():
    assert rel_diff(1.0, 1.0) == 0
    assert rel_diff(0.0, 0.0) == 0
    assert rel_diff(2.0, 1.0) == 0.5
    assert rel_diff(1e-12, 0.0) == pytest.approx(1e-3)


def test_region_labels():
    assert region(solve_steady_state(SystemParams(1, 0.5, 0.3))) == "below_threshold"
    assert region(working_point_from_eps1(1, 0.5, 0.01)) == "near_threshold"
    assert region(working_point_from_eps1(1, 0.5, 0.26)) == "near_quarter_kappa_pole"
    assert region(working_point_from_eps1(1, 0.5, 0.15)) == "hyperbolic"
    assert region(working_point_from_eps1(1, 0.5, 1.0)) == "oscillatory"


def test_undriven_point_is_clean():
    res = validate_point(solve_steady_state(SystemParams(1, 0.5, 0.0)), BOTH)
    assert res["flags"] == []
    assert res["quantities"]["duan_sum"]["oracle"] == pytest.approx(2.0, abs=1e-12)
    assert "FormMismatch" in res["quantities"]["duan_sum"]["errors"].values()


def test_below_threshold_flags():
    """Below threshold the variances agree; the swapped self-correlations and the mean-field start do not."""
    res = validate_point(solve_steady_state(SystemParams(1, 0.5, 0.3)), BOTH)
    flagged = {i.split(":")[0] for i in ids(res)}
    assert flagged == {"delta_I", "noise_ff", "noise_gg", "mean_b_initial", "mean_b_transient"}
    q = res["quantities"]
    assert q["noise_ff"]["closed_general"] == pytest.approx(q["noise_gg"]["oracle"], rel=1e-12)
    assert q["noise_gg"]["closed_general"] == pytest.approx(q["noise_ff"]["oracle"], rel=1e-12)


def test_coherent_photon_term_flagged():
    res = validate_point(working_point_from_eps1(1.0, 0.5, 1.0), BOTH)
    assert "nbar_coherent:general~reduced" in ids(res)
    q = res["quantities"]["nbar_coherent"]
    assert q["closed_general"] == pytest.approx(4.5) and q["closed_reduced"] == 0.0


def test_quarter_kappa_divergence_flagged():
    wp = working_point_from_eps1(1.0, 0.5, 0.25 * (1 + 1e-6))
    res = validate_point(wp, BOTH)
    q = res["quantities"]["duan_sum"]
    assert abs(q["closed_reduced"]) > 1e4
    assert q["oracle"] == pytest.approx(184 / 27, rel=1e-4)
    assert "duan_sum:reduced~oracle" in ids(res)


def test_guarded_pole_recorded_as_error():
    res = validate_point(working_point_from_eps1(1.0, 0.5, 0.25), BOTH)
    q = res["quantities"]["duan_sum"]
    assert q["closed_reduced"] is None and q["errors"]["closed_reduced"] == "SingularRegime"
    assert q["oracle"] == pytest.approx(184 / 27, rel=1e-12)


def test_negative_reduced_duan_flagged():
    res = validate_point(working_point_from_eps1(1.0, 0.5, 0.27), BOTH)
    assert "duan_sum:reduced:non_positive" in ids(res)


def test_report_on_acceptance_grid(tmp_path):
    spec = SweepSpec((1.0,), 0.5, GridSpec(0.3, 5.0, 50), forms=BOTH)
    report = validate(spec, top_k=5)
    s = report.summary()
    assert s["grid_size"] == 50 and s["evaluated_points"] == 50 and s["skipped_points"] == 0
    assert len(report.worst_offenders) == 5
    rel = [w["rel_diff"] for w in report.worst_offenders]
    assert rel == sorted(rel, reverse=True)
    for p in report.points:
        for name in ("duan_sum", "var_plus", "var_minus"):
            q = p["quantities"][name]
            if q["pairs"]["reduced~oracle"]["rel_diff"] > 1e-6:
                assert report.flagged(p["kappa"], p["eps1"], name)
    out = tmp_path / "v.json"
    report.write_json(out)
    data = json.loads(out.read_text())
    assert set(data) == {"metadata", "grid", "points", "worst_offenders", "flags", "skipped"}
    assert data["metadata"]["summary"]["flag_count"] == len(report.flags)


def test_report_deterministic_under_threads():
    spec = SweepSpec((0.3, 1.0), 0.5, GridSpec(0.3, 2.0, 8), forms=BOTH)
    a = validate(spec).to_dict()
    b = validate(spec, workers=4).to_dict()
    assert a == b
