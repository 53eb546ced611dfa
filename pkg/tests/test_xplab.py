from fractions import Fraction

import pytest
from pydantic import ValidationError

from pseudoflat.errors import EmitError, InsufficientData
from pseudoflat.xplab import (
    ExperimentConfig,
    ExperimentReport,
    RunRecord,
    certify_bound,
    emit_outputs,
    fit_exponent,
    incidence_bound_check,
    incidence_exponents,
    rich_exponents,
    rich_frame,
    run_once,
    run_rich_scaling,
    write_csv,
)
from pseudoflat.xplab.certify import threshold_ok
from pseudoflat.xplab.fitting import profile_window
from pseudoflat.xplab.sweep import build_points


@pytest.fixture(scope="module")
def grid_report():
    cfg = ExperimentConfig(scenario="grid-lines", n=2, sizes=[3, 4], k_values=[2, 3])
    return run_rich_scaling(cfg, threads=2)


def test_fit_recovers_power_law():
    ks = list(range(2, 9))
    fit = fit_exponent(ks, [1000 / k**3 for k in ks])
    assert fit.slope == pytest.approx(-3, abs=1e-9)
    assert fit.points == 7
    assert fit.within(-3)
    assert fit.constant == pytest.approx(1000, rel=1e-9)


def test_fit_needs_spread_data():
    with pytest.raises(InsufficientData):
        fit_exponent([2, 3], [4, 9])
    with pytest.raises(InsufficientData):
        fit_exponent([2, 2, 2], [1, 2, 3])
    with pytest.raises(InsufficientData):
        fit_exponent([2, 3, 4], [0, 0, 5])
    with pytest.raises(ValueError):
        fit_exponent([2, 3, 4], [1, 2, 3], mode="in-M")


def test_profile_window():
    assert profile_window({1: 5, 2: 4, 3: 0, 4: 2}, 2, 4) == ([2, 4], [4, 2])
    assert profile_window({1: 5, 2: 4, 3: 0, 4: 2}, 2, None) == ([2, 4], [4, 2])
    assert profile_window({1: 5, 2: 4}, 3, 1) == ([], [])


def test_exponents():
    assert rich_exponents("1.3", 2, 2) == (3, 2, None)
    assert rich_exponents("1.5", 2, 3) == (4, 3, 5)
    with pytest.raises(ValueError):
        rich_exponents("2.1", 2, 2)
    assert incidence_exponents(2, 2) == (Fraction(2, 3), Fraction(2, 3))
    assert incidence_exponents(2, 3) == (Fraction(3, 4), Fraction(1, 2))
    assert incidence_exponents(2, 3, surfaces=True) == (Fraction(3, 4), Fraction(3, 4))


@pytest.mark.parametrize(
    "fields",
    [
        {"sizes": [3, 3]},
        {"sizes": []},
        {"scenario": "grid-planes", "n": 2},
        {"scenario": "custom"},
        {"k_values": [1, 3]},
        {"n": 4},
        {"c_vol": 0},
        {"c_hom": 0},
        {"bucket_t": 0},
    ],
)
def test_experiment_config_rejects(fields):
    with pytest.raises(ValidationError):
        ExperimentConfig(**fields)


def test_experiment_config_normalizes():
    cfg = ExperimentConfig(scenario="lattice-planes", n=3, k_values=[3, 2, 3])
    assert cfg.k_values == [2, 3]
    assert cfg.kind == "planes"


def test_point_constants_reach_the_point_set():
    cfg = ExperimentConfig(scenario="lattice-lines", sizes=[10], c_hom=3, c_vol=0.5)
    P = build_points(cfg, 10)
    assert (P.c_hom, P.c_vol) == (3, Fraction(1, 2))
    assert build_points(ExperimentConfig(), 3).c_vol == 2


def test_run_once_without_recount_keeps_the_profile():
    _, _, counted, record = run_once(ExperimentConfig(sizes=[4]), 4)
    _, _, scanned, plain = run_once(ExperimentConfig(sizes=[4], bucket_t=None), 4)
    assert counted.point_lists() == scanned.point_lists()
    assert record.profile == plain.profile


def test_sweep_runs_in_size_order(grid_report):
    runs = grid_report.runs
    assert [run.size for run in runs] == [3, 4]
    assert (runs[0].N, runs[0].M, runs[0].total_incidences, runs[0].max_rich) == (9, 20, 48, 3)
    assert runs[1].rich_count(3) == 14
    assert runs[1].rich_count(4) == 10
    assert runs[1].rich_count(9) == 0
    assert grid_report.rows()[:2] == [("grid-lines", 9, 20, 2, 20, 48, 0), ("grid-lines", 9, 20, 3, 8, 48, 0)]


def test_certify_bound(grid_report):
    cert = certify_bound(grid_report, "1.3", 2, 2, c_thresh=Fraction(2))
    # R(3) = 8 on the 3x3 grid: 8 * 3^3 / 9^2
    assert cert.C == pytest.approx(8 / 3)
    assert cert.threshold_pass
    assert cert.fit is None
    assert cert.passed
    assert cert.row()[:4] == ("1.3", 2, 2, "3")
    assert not certify_bound(grid_report, "1.3", 2, 2, c_bound=1.0).passed
    assert not certify_bound(grid_report, "1.3", 2, 2, c_thresh=Fraction(1, 2)).passed


def test_threshold_is_strict():
    run = RunRecord("custom", 1, N=16, M=0, seed=0, profile={}, total_incidences=0, max_rich=8)
    assert not threshold_ok(run, Fraction(2), "1.3", 2)
    run.max_rich = 7
    assert threshold_ok(run, Fraction(2), "1.3", 2)
    run.max_rich = 0
    assert threshold_ok(run, Fraction(1, 100), "1.5", 3)


def test_incidence_bound_check(grid_report):
    check = incidence_bound_check(grid_report, 2, 2)
    assert (check.alpha, check.beta) == (Fraction(2, 3), Fraction(2, 3))
    assert check.C_I == max(check.ratios.values())
    assert check.passed
    assert not incidence_bound_check(grid_report, 2, 2, c_incidence=check.C_I / 2).passed
    assert check.to_dict()["alpha"] == "2/3"


def test_emit_outputs(grid_report, tmp_path):
    cert = certify_bound(grid_report, "1.3", 2, 2)
    written = emit_outputs(grid_report, [cert], tmp_path, svg=True)
    assert [p.name for p in written] == ["rich_profile.csv", "certificates.csv", "bound_1.3_in-k.svg"]
    rows = (tmp_path / "rich_profile.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "scenario,N,M,k,rich_count,total_incidences,seed"
    assert "grid-lines,9,20,3,8,48,0" in rows
    assert (tmp_path / "certificates.csv").read_text(encoding="utf-8").startswith(
        "theorem,r,n,exponent_theory,slope_fit,slope_stderr,C,verdict\n1.3,2,2,3,,,"
    )
    first = (tmp_path / "bound_1.3_in-k.svg").read_bytes()
    emit_outputs(grid_report, [cert], tmp_path, svg=True)
    assert (tmp_path / "bound_1.3_in-k.svg").read_bytes() == first


def test_rich_frame_is_integral(grid_report):
    frame = rich_frame(grid_report)
    assert list(frame.columns) == ["scenario", "N", "M", "k", "rich_count", "total_incidences", "seed"]
    assert str(frame["rich_count"].dtype) == "int64"


def test_emit_error(grid_report, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    with pytest.raises(EmitError):
        write_csv(rich_frame(grid_report), blocker / "rich_profile.csv")


def test_constant_profile_has_zero_slope():
    fit = fit_exponent([2, 3, 4, 5], [5, 5, 5, 5])
    assert fit.slope == pytest.approx(0, abs=1e-12)
    assert fit.constant == pytest.approx(5)


def test_empty_profile_writes_header_only(tmp_path):
    run = RunRecord("grid-lines", 1, N=1, M=0, seed=0, profile={}, total_incidences=0, max_rich=0)
    report = ExperimentReport(ExperimentConfig(), [run])
    write_csv(rich_frame(report), tmp_path / "rich_profile.csv")
    assert (tmp_path / "rich_profile.csv").read_text(encoding="utf-8") == (
        "scenario,N,M,k,rich_count,total_incidences,seed\n"
    )


def test_full_lines_of_ten_grid():
    report = run_rich_scaling(ExperimentConfig(scenario="grid-lines", sizes=[10]))
    # 10 rows, 10 columns and the two main diagonals
    assert report.runs[0].rich_count(10) == 22
    assert report.runs[0].max_rich == 10


def test_fit_in_N_and_its_plot(tmp_path):
    report = run_rich_scaling(ExperimentConfig(scenario="grid-lines", sizes=[4, 5, 6]), threads=3)
    cert = certify_bound(report, "1.3", 2, 2, k_min=3)
    assert cert.fit_in_N is not None
    assert cert.fit_in_N.mode == "in-N"
    assert cert.fit_in_N.points == 3
    assert cert.to_dict()["fit_in_N"]["points"] == 3
    names = [p.name for p in emit_outputs(report, [cert], tmp_path)]
    assert "bound_1.3_in-N.svg" in names


def test_certificate_keeps_fit_of_largest_run():
    big_profile = {k: 1000 // k**2 for k in range(1, 13)}
    small_profile = {k: 100 // k for k in range(1, 11)}
    big = RunRecord("custom", 2, N=1000, M=1000, seed=0, profile=big_profile, total_incidences=0, max_rich=12)
    small = RunRecord("custom", 1, N=100, M=100, seed=0, profile=small_profile, total_incidences=0, max_rich=10)
    cert = certify_bound(ExperimentReport(ExperimentConfig(), [big, small]), "1.3", 2, 2)
    expected = fit_exponent(*profile_window(big_profile, 3, 6), "in-k")
    assert cert.fit.slope == pytest.approx(expected.slope)
    assert set(cert.run_slopes) == {1, 2}
    assert cert.run_slopes[1] != pytest.approx(expected.slope)
