import json
import math

import pytest

from weakdecay import ConfigInvalid
from weakdecay import cli, harness


# ---------------------------------------------------------------- config parsing

def test_parse_config_text_basics():
    raw = harness.parse_config_text(
        """
        # comment
        model = spin
        omega = 2.0   # trailing comment
        t_f = 3.0
        """
    )
    assert raw == {"model": "spin", "omega": "2.0", "t_f": "3.0"}


def test_parse_config_rejects_garbage():
    with pytest.raises(ConfigInvalid):
        harness.parse_config_text("just words\n")


def test_build_config_defaults_and_overrides():
    cfg = harness.build_config({"model": "spin", "omega": "2.5"})
    assert cfg.model == "spin"
    assert cfg.omega == 2.5
    assert cfg.n_points == 101
    assert cfg.t_start == cfg.t_i and cfg.t_end == cfg.t_f
    assert cfg.tolerance == 1e-10


def test_build_config_unknown_key():
    with pytest.raises(ConfigInvalid, match="unknown keys"):
        harness.build_config({"model": "spin", "bogus": "1"})


def test_build_config_grid_outside_window():
    with pytest.raises(ConfigInvalid, match="within the selection window"):
        harness.build_config({"model": "spin", "t_f": "1.0", "t_end": "2.0"})


def test_build_config_field_diagnostics_accumulate():
    with pytest.raises(ConfigInvalid) as excinfo:
        harness.build_config({"model": "decay", "n_half": "0", "delta_e": "-1", "post": "nope"})
    text = "; ".join(excinfo.value.problems)
    assert "n_half" in text and "delta_e" in text and "post" in text


def test_build_config_decay_post_forms():
    cfg = harness.build_config({"model": "decay", "post": "photon:-3", "n_half": "10"})
    assert cfg.post == "photon:-3"
    with pytest.raises(ConfigInvalid):
        harness.build_config({"model": "decay", "post": "photon:0"})
    with pytest.raises(ConfigInvalid):
        harness.build_config({"model": "decay", "post": "photon:11", "n_half": "10"})


# ---------------------------------------------------------------- scenarios

def test_spin_scenario_matches_closed_form():
    cfg = harness.build_config(
        {"model": "spin", "post": "xminus", "t_f": str(math.pi / 2), "n_points": "101"}
    )
    result = harness.run_scenario(cfg)
    assert result.summary["max_abs_error"] <= 1e-10
    assert result.passed
    assert len(result.rows) == 101


def test_spin_scenario_row_errors_are_markers_not_aborts():
    # whole window of pi makes the +x closed form singular at every grid point
    cfg = harness.build_config({"model": "spin", "post": "xplus", "t_f": str(math.pi)})
    result = harness.run_scenario(cfg)
    assert not result.passed
    assert len(result.summary["row_errors"]) == cfg.n_points
    # the kernel and the closed form flag the same orthogonal post-selection
    assert all(
        e["error"] in ("PostSelectionNull", "ClosedFormSingular")
        for e in result.summary["row_errors"]
    )
    csv_text = harness.rows_to_csv(result.rows)
    assert csv_text.count("none") == cfg.n_points


def test_decay_scenario_small_bath():
    cfg = harness.build_config(
        {
            "model": "decay",
            "n_half": "200",
            "delta_e": "0.5",
            "post": "asymptotic",
            "t_f": "2.0",
            "n_points": "21",
            "tolerance": "0.05",
        }
    )
    result = harness.run_scenario(cfg)
    assert result.summary["max_abs_error"] is not None
    assert "truncation_bound" in result.summary
    assert result.summary["recurrence_time"] == pytest.approx(2 * math.pi / 0.5)


def test_sums_scenario():
    cfg = harness.build_config(
        {"model": "sums", "k_max": "20000", "t_start": "0.0", "t_end": "2.0", "n_points": "11"}
    )
    result = harness.run_scenario(cfg)
    assert result.passed


# ---------------------------------------------------------------- output format

def test_csv_header_and_determinism():
    cfg = harness.build_config({"model": "spin", "n_points": "11"})
    first = harness.rows_to_csv(harness.run_scenario(cfg).rows)
    second = harness.rows_to_csv(harness.run_scenario(cfg).rows)
    assert first == second
    lines = first.splitlines()
    assert lines[0] == "t,value_re,value_im,reference_re,reference_im,abs_error"
    assert len(lines) == 12


def test_threaded_run_matches_serial():
    base = {"model": "spin", "n_points": "31"}
    serial = harness.run_scenario(harness.build_config(base))
    threaded = harness.run_scenario(harness.build_config({**base, "threads": "4"}))
    assert harness.rows_to_csv(serial.rows) == harness.rows_to_csv(threaded.rows)


def test_summary_json_is_single_line():
    cfg = harness.build_config({"model": "spin", "n_points": "5"})
    text = harness.summary_to_json(harness.run_scenario(cfg).summary)
    assert "\n" not in text
    assert json.loads(text)["model"] == "spin"


# ---------------------------------------------------------------- sweep

def test_sweep_single_level_has_no_trend():
    cfg = harness.build_config(
        {"model": "decay", "delta_e": "0.2", "t_f": "3.0", "t_end": "3.0", "n_points": "31"}
    )
    result = harness.convergence_sweep(cfg, (100,))
    assert result.trend == "n/a"
    assert len(result.rows) == 1


def test_sweep_errors_decrease_with_fixed_spacing():
    cfg = harness.build_config(
        {"model": "decay", "delta_e": "0.2", "t_f": "3.0", "t_end": "3.0", "n_points": "31"}
    )
    result = harness.convergence_sweep(cfg, (100, 200, 400))
    errs = [r.max_abs_error for r in result.rows]
    assert result.trend == "decreasing"
    assert errs[-1] < errs[0]


def test_sweep_marks_recurrence_violations_per_level():
    # fixed-band scaling gives small levels a coarse spacing and an early
    # recurrence, so they are marked while larger levels still report
    cfg = harness.build_config(
        {
            "model": "decay",
            "scaling": "fixed_band",
            "n_half": "200",
            "delta_e": "0.1",
            "t_f": "4.0",
            "t_end": "4.0",
            "n_points": "21",
        }
    )
    result = harness.convergence_sweep(cfg, (2, 200))
    assert result.rows[0].marker == "beyond_recurrence"
    assert result.rows[0].max_abs_error is None
    assert result.rows[1].marker == ""
    assert result.rows[1].max_abs_error is not None


def test_sweep_rejects_unsorted_levels():
    cfg = harness.build_config({"model": "decay"})
    with pytest.raises(ConfigInvalid):
        harness.convergence_sweep(cfg, (200, 100))


# ---------------------------------------------------------------- CLI

def test_cli_spin_ok(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    code = cli.main(["spin", "--set", "n_points=11", "--out", str(out)])
    captured = capsys.readouterr().out.strip()
    assert code == 0
    assert json.loads(captured)["passed"] is True
    assert out.read_text(encoding="utf-8").splitlines()[0] == harness.CSV_HEADER


def test_cli_config_file_and_set_override(tmp_path, capsys):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text("model = spin\nn_points = 5\nomega = 1.0\n", encoding="utf-8")
    code = cli.main(["spin", "--config", str(cfg), "--set", "omega=2.0"])
    assert code == 0
    assert json.loads(capsys.readouterr().out.strip())["n_rows"] == 5


def test_cli_invalid_config_exits_2(tmp_path, capsys):
    code = cli.main(["spin", "--set", "t_end=9.0"])  # grid beyond the window
    assert code == 2
    assert "within the selection window" in capsys.readouterr().err


def test_cli_model_conflict_exits_2(capsys):
    assert cli.main(["spin", "--set", "model=decay"]) == 2


def test_cli_tolerance_breach_exits_1(capsys):
    code = cli.main(["spin", "--set", "tolerance=1e-30", "--set", "n_points=5"])
    assert code == 1
    assert json.loads(capsys.readouterr().out.strip())["passed"] is False


def test_cli_numerical_failure_exits_3(monkeypatch, capsys):
    from weakdecay.errors import EigenFailure

    def boom(config):
        raise EigenFailure("synthetic solver breakdown")

    monkeypatch.setattr(harness, "run_scenario", boom)
    code = cli.main(["spin", "--set", "n_points=5"])
    assert code == 3
    assert "EigenFailure" in capsys.readouterr().err


def test_cli_sweep_writes_table(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = cli.main(
        [
            "sweep",
            "--set", "levels=100,200",
            "--set", "delta_e=0.2",
            "--set", "t_end=3.0",
            "--set", "t_f=3.0",
            "--set", "n_points=31",
            "--set", "tolerance=0.2",
            "--out", str(out),
        ]
    )
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "n_half,max_abs_error,seconds,marker"
    assert len(lines) == 3
    summary = json.loads(capsys.readouterr().out.strip())
    assert summary["trend"] in ("decreasing", "n/a")
