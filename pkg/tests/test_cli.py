import io
import json
import math
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest
from scipy.integrate import trapezoid

from tasks import RunConfig, render_table, verify
from tasks.cli import main
from triangles.errors import DomainError
from triangles.models import M1
from triangles.montecarlo import sample_triangles


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def read_csv(text):
    return pd.read_csv(io.StringIO(text), float_precision="round_trip")


def test_sample_perimeter_model(capsys):
    code, out = run(capsys, "sample", "--model", "m1", "--n", "3", "--seed", "7", "--format", "csv")
    assert code == 0
    frame = read_csv(out)
    assert list(frame.columns) == ["a", "b", "c", "alpha", "beta", "gamma"]
    assert len(frame) == 3
    assert np.all(np.abs(frame.a + frame.b + frame.c - 1.0) < 1e-12)
    assert "\r" not in out


def test_sample_quarter_circle(capsys):
    code, out = run(capsys, "sample", "--model", "m5", "--n", "1", "--seed", "1")
    assert code == 0
    row = read_csv(out).iloc[0]
    assert row.a ** 2 + row.b ** 2 == pytest.approx(1.0, abs=1e-12)


def test_csv_round_trips_exactly(capsys):
    code, out = run(capsys, "sample", "--model", "m1", "--n", "50", "--seed", "3", "--chunk-size", "16")
    assert code == 0
    batch = sample_triangles(M1, 50, seed=3, chunk_size=16)
    frame = read_csv(out)
    np.testing.assert_array_equal(frame.a.to_numpy(), batch.a)
    np.testing.assert_array_equal(frame.gamma.to_numpy(), batch.gamma)


def test_sample_json_and_out_file(capsys, tmp_path):
    target = tmp_path / "rows.json"
    code, out = run(capsys, "sample", "--model", "m4", "--n", "4", "--format", "json", "--out", str(target))
    assert code == 0
    assert out == ""
    rows = json.loads(target.read_text())
    assert len(rows) == 4
    assert set(rows[0]) == {"a", "b", "c", "alpha", "beta", "gamma"}


def test_unknown_model_is_a_usage_error(capsys):
    assert main(["sample", "--model", "m9"]) == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["sample", "--model", "m1", "--n", "0"],
    ["sample", "--model", "m1", "--threads", "0"],
    ["density", "--model", "m1", "--kind", "side", "--var", "alpha"],
    ["density", "--model", "m1", "--kind", "side", "--var", "c"],
    ["moments", "--model", "m2", "--method", "exact"],
    ["verify", "--suite", "everything"],
])
def test_bad_flags_exit_two(capsys, argv):
    assert main(argv) == 2


def test_bad_environment_override(capsys, monkeypatch):
    monkeypatch.setenv("TRI_THREADS", "many")
    assert main(["sample", "--model", "m1", "--n", "1"]) == 2


def test_perimeter_angle_curve(capsys):
    code, out = run(capsys, "density", "--model", "m1", "--kind", "angle", "--var", "alpha", "--grid", "512")
    assert code == 0
    frame = read_csv(out)
    assert len(frame) == 512
    assert frame.x.iloc[0] == 0.0 and frame.x.iloc[-1] == pytest.approx(math.pi)
    peak = frame.x.iloc[frame.density.idxmax()]
    assert 0.3 < peak < 0.7
    right_angle = frame.iloc[(frame.x - math.pi / 2).abs().idxmin()]
    assert right_angle.density == pytest.approx(12.0 * math.log(2.0) - 8.0, abs=5e-3)
    # trapezoid mass of the curve
    assert trapezoid(frame.density, frame.x) == pytest.approx(1.0, abs=1e-3)


def test_quarter_circle_side_c_curve_spikes_at_one(capsys):
    code, out = run(capsys, "density", "--model", "m5", "--kind", "side", "--var", "c", "--grid", "512")
    assert code == 0
    frame = read_csv(out)
    peak = frame.x.iloc[frame.density.idxmax()]
    assert abs(peak - 1.0) < 0.01


def test_bivariate_grid_masks_the_support(capsys):
    code, out = run(capsys, "density", "--model", "m2", "--kind", "side", "--grid", "64")
    assert code == 0
    frame = read_csv(out)
    assert len(frame) == 64 * 64
    assert list(frame.columns) == ["x", "y", "density"]
    assert (frame.density == 0.0).any()
    assert (frame.density > 0.0).any()
    assert (frame.density >= 0.0).all()


def test_closed_moments(capsys):
    code, out = run(capsys, "moments", "--model", "m2", "--method", "closed")
    assert code == 0
    frame = read_csv(out).set_index("key")
    expected = (9.0 + math.sqrt(3.0) * math.pi) / (9.0 * math.sqrt(3.0) * math.pi)
    assert frame.loc["m2.E_ab", "value"] == pytest.approx(expected, rel=1e-15)


def test_quadrature_moments(capsys):
    code, out = run(capsys, "moments", "--model", "m3", "--method", "quadrature")
    assert code == 0
    frame = read_csv(out).set_index("key")
    assert frame.loc["m3.E_alphabeta", "value"] == pytest.approx(0.3420140195, abs=1e-7)
    assert frame.loc["m3.E_c", "value"] == pytest.approx(math.pi / 4, abs=1e-8)


def test_monte_carlo_moments(capsys):
    code, out = run(capsys, "moments", "--model", "m6", "--method", "mc", "--n", "50000", "--seed", "42")
    assert code == 0
    frame = read_csv(out).set_index("key")
    row = frame.loc["m6.E_a2"]
    assert abs(row.value - 0.3209403207) <= 5 * row.std_error
    assert "m6.inv_C" not in frame.index


def test_verify_roundtrip_report(capsys, tmp_path):
    code, out = run(capsys, "verify", "--suite", "roundtrip", "--n", "2000", "--report-dir", str(tmp_path))
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1
    assert len(report["checks"]) == 6
    for entry in report["checks"]:
        assert set(entry) == {"key", "expected", "computed", "tolerance", "pass"}
        assert entry["pass"]
        assert entry["computed"] < 1e-12
    saved = sorted(p.suffix for p in tmp_path.iterdir())
    assert saved == [".csv", ".json"]


def test_verify_marginal_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "marginal")
    report = json.loads(out)
    failed = [c["key"] for c in report["checks"] if not c["pass"]]
    assert failed == []
    assert code == 0


def test_run_config_validation():
    with pytest.raises(DomainError):
        RunConfig(subcommand="plot")
    with pytest.raises(DomainError):
        RunConfig(subcommand="sample", tolerance=0.0)
    with pytest.raises(DomainError):
        RunConfig(subcommand="sample", seed=-1)


def test_render_table_formats():
    frame = pd.DataFrame({"x": [0.1, 1.0 / 3.0]})
    text = render_table(frame, "csv")
    assert text == "x\n0.10000000000000001\n0.33333333333333331\n"
    assert json.loads(render_table(frame, "json")) == [{"x": 0.1}, {"x": 1.0 / 3.0}]


def test_verify_reports_unexpected_errors_as_failed_checks(capsys, monkeypatch):
    def broken(model, kind, spec=None):
        raise ZeroDivisionError("float division by zero")

    monkeypatch.setattr(verify, "normalization", broken)
    code, out = run(capsys, "verify", "--suite", "normalization")
    assert code == 1
    report = json.loads(out)
    assert len(report["checks"]) == 12
    assert all(entry["computed"] is None and not entry["pass"] for entry in report["checks"])


def test_verify_keeps_going_after_a_suite_crashes(capsys, monkeypatch):
    def crash(config):
        raise RuntimeError("worker died")

    monkeypatch.setitem(verify._SUITE_RUNNERS, "roundtrip", crash)
    code, out = run(capsys, "verify", "--suite", "roundtrip")
    assert code == 1
    checks = json.loads(out)["checks"]
    assert [entry["key"] for entry in checks] == ["roundtrip.completed"]
    assert checks[0]["pass"] is False


def test_verify_passes_tol_to_quadrature(capsys, monkeypatch):
    seen = []

    def record_spec(model, kind, spec=None):
        seen.append(spec)
        return SimpleNamespace(value=1.0)

    monkeypatch.setattr(verify, "normalization", record_spec)
    code, _ = run(capsys, "verify", "--suite", "normalization", "--tol", "1e-6")
    assert code == 0
    assert len(seen) == 12
    assert {(spec.absolute_tolerance, spec.relative_tolerance) for spec in seen} == {(1e-6, 1e-6)}
