import json
from pathlib import Path

import numpy as np
import pytest

from conceptor_ccl.cli import main
from conceptor_ccl.errors import ConfigError
from conceptor_ccl.experiments import (ExperimentConfig, Table, emit_csv, emit_plot_script, load_config,
                                       run_degradation, run_distortion, run_interpolation, write_record)
from conceptor_ccl.signals import load_csv

ROOT = Path(__file__).resolve().parents[1]


def small_interp(**kw):
    base = dict(n=64, t1=[25.0], lambda_rate=1e-3, tail=2000, eta=0.2 / 64, beta=1e-3,
                period_window=500, output_stride=5)
    base.update(kw)
    return ExperimentConfig.for_experiment("interpolate", **base)


def small_degrade(**kw):
    base = dict(n=120, k_list=[0, 120], trials=2, train_length=800)
    base.update(kw)
    return ExperimentConfig.for_experiment("degrade", **base)


def small_distort(**kw):
    base = dict(n=20, n_rfc=80, steps=800, eval_steps=300, train_length=1000, layers=2)
    base.update(kw)
    return ExperimentConfig.for_experiment("distort", **base)


def test_defaults_per_experiment():
    d = ExperimentConfig.for_experiment("degrade")
    assert (d.n, d.rho, d.rho_in, d.rho_b, d.alpha, d.ridge_reg, d.aperture, d.eta, d.beta) == \
        (1500, 0.749, 1.149, 1.5, 0.988, 1000.0, 31.6, 0.001, 0.7)
    r = ExperimentConfig.for_experiment("distort")
    assert (r.n, r.n_rfc, r.aperture, r.eta, r.beta, r.layers, r.gain) == (50, 200, 8.0, 0.8, 4e-3, 4, 0.3)
    i = ExperimentConfig.for_experiment("interpolate")
    assert (i.n, i.rho, i.alpha, i.aperture, i.beta, i.t0, i.t1) == (256, 1.6, 0.75, 25.0, 2.5e-5, 20.0,
                                                                      [25.0, 30.0, 35.0])


@pytest.mark.parametrize("experiment,field,value", [
    ("interpolate", "alpha", 1.5), ("interpolate", "rho", 0.0), ("interpolate", "aperture", -1.0),
    ("interpolate", "eta", 0.0), ("interpolate", "beta", -0.1), ("interpolate", "t1", [15.0]),
    ("interpolate", "lambda_rate", 0.0), ("interpolate", "ccl_form", "other"), ("interpolate", "mode", "x"),
    ("interpolate", "ridge_reg", -1.0), ("interpolate", "seed", -1), ("interpolate", "n", 0),
    ("degrade", "k_list", [2000]), ("degrade", "trials", 0), ("degrade", "threshold", -1.0),
    ("degrade", "data_csv", "/nonexistent.csv"), ("degrade", "eval_steps", 1),
    ("distort", "n_rfc", 10), ("distort", "layers", 0), ("distort", "steps", 10),
])
def test_validation_names_field(experiment, field, value):
    cfg = ExperimentConfig.for_experiment(experiment, **{field: value})
    with pytest.raises(ConfigError) as info:
        cfg.validate()
    assert info.value.field == field


def test_unknown_override():
    with pytest.raises(ConfigError):
        ExperimentConfig.for_experiment("degrade", bogus=1)


def test_committed_configs_load():
    names = {p.name: load_config(p).validate() for p in sorted((ROOT / "configs").glob("*.ini"))}
    assert {c.experiment for c in names.values()} == {"interpolate", "degrade", "distort"}
    assert names["interpolate_extended.ini"].file_prefix() == "fig4ext"


def test_config_parsing(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[common]\nseed = 7\n[degrade]\nk_list = 10, 20\nstandardize = yes\nbeta = 0.5  # gain\n")
    cfg = load_config(p)
    assert (cfg.experiment, cfg.seed, cfg.k_list, cfg.standardize, cfg.beta) == ("degrade", 7, [10, 20], True, 0.5)
    p.write_text("[degrade]\nbeta = abc\n")
    with pytest.raises(ConfigError) as info:
        load_config(p)
    assert info.value.field == "beta"
    p.write_text("[degrade]\nwhat = 1\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_empty_table_gives_header_only(tmp_path):
    emit_csv(Table(["a", "b"]), tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text() == "a,b\n"


def test_plot_script_references_csv(tmp_path):
    path = emit_plot_script(tmp_path / "p.gp", "t", "data.csv", [("x", "y", "lbl")], "x", "y")
    text = path.read_text()
    assert "'data.csv' using 'x':'y'" in text and "set datafile separator ','" in text


def test_degenerate_interpolation_keeps_period():
    rec = run_interpolation(small_interp(t1=[20.0]))
    per = rec.tables["period"]
    periods = np.array(per.column("period"))
    assert set(per.column("mode")) == {"static", "ccl"}
    assert np.all(np.abs(periods - 20) < 1)


def test_interpolation_rows_carry_identifiers():
    rec = run_interpolation(small_interp(mode="ccl"))
    assert rec.tables["output"].columns[:4] == ["seed", "t1", "mode", "k"]
    lam = rec.tables["output"].column("lambda")
    assert lam[0] == 0.0 and lam[-1] == 1.0


def test_degradation_extremes():
    rec = run_degradation(small_degrade())
    rows = {(r[1], r[2], r[3]): r for r in rec.tables["trials"].rows}
    for trial in range(2):
        for mode in ("static", "ccl"):
            assert not rows[0, trial, mode][4]
            assert rows[0, trial, mode][7] < 0.1
            assert rows[120, trial, mode][4] and rows[120, trial, mode][7] is None


def test_degradation_masks_are_nested():
    from conceptor_ccl.experiments.degradation import trial_mask

    small, big = trial_mask(100, 10, 5, 3), trial_mask(100, 30, 5, 3)
    assert set(small) <= set(big) and len(big) == 30
    assert not np.array_equal(trial_mask(100, 10, 5, 4), small)


def test_degradation_reads_csv(tmp_path):
    t = np.arange(901)
    data = np.c_[np.sin(2 * np.pi * t / 30), np.cos(2 * np.pi * t / 30)]
    np.savetxt(tmp_path / "d.csv", data, delimiter=",")
    rec = run_degradation(small_degrade(data_csv=str(tmp_path / "d.csv"), standardize=True, k_list=[0],
                                        trials=1, mode="static"))
    assert rec.extras["baseline_period"] == pytest.approx(30, abs=1)


def test_distortion_tables():
    rec = run_distortion(small_distort())
    assert rec.tables["nrmse"].columns == ["seed", "layer", "nrmse_ccl", "nrmse_static"]
    assert len(rec.tables["series"]) == 800
    assert np.all(np.isfinite(np.array(rec.tables["nrmse"].rows, dtype=float)))


@pytest.mark.parametrize("factory,prefix", [(small_interp, "fig3"), (small_degrade, "fig5"),
                                            (small_distort, "fig6")])
def test_outputs_are_byte_identical(tmp_path, factory, prefix):
    from conceptor_ccl.experiments import RUNNERS

    for name in ("a", "b"):
        cfg = factory()
        write_record(RUNNERS[cfg.experiment](cfg), tmp_path / name, plots=False)
    csvs = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
    assert csvs and all(n.startswith(prefix) for n in csvs)
    for n in csvs:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_numeric_result_csv_round_trips(tmp_path):
    rec = run_distortion(small_distort())
    write_record(rec, tmp_path, plots=False)
    back = load_csv(tmp_path / "fig6_nrmse.csv")
    assert np.array_equal(back.data, np.array(rec.tables["nrmse"].rows, dtype=float))


def test_interpolation_files_and_figure(tmp_path):
    files = write_record(run_interpolation(small_interp()), tmp_path)
    names = {p.name for p in files}
    assert {"fig3_output.csv", "fig3_period.csv", "fig3_period.gp", "fig3.png", "fig3_run.json"} <= names
    meta = json.loads((tmp_path / "fig3_run.json").read_text())
    assert meta["config"]["n"] == 64 and meta["seed"] == 0


def test_cli_runs_and_reports_errors(tmp_path, capsys):
    cfg = tmp_path / "d.ini"
    cfg.write_text("[distort]\nn = 20\nn_rfc = 80\nsteps = 500\neval_steps = 200\ntrain_length = 800\nlayers = 2\n")
    assert main(["distort", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "3",
                 "--no-plots"]) == 0
    meta = json.loads((tmp_path / "o" / "fig6_run.json").read_text())
    assert meta["seed"] == 3
    cfg.write_text("[distort]\nlayers = 0\n")
    assert main(["distort", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "ConfigError" and err["field"] == "layers"


def test_cli_conceptor_dump(tmp_path):
    cfg = tmp_path / "i.ini"
    cfg.write_text("[interpolate]\nn = 30\nt1 = 25\neta = 0.001\n")
    assert main(["conceptor-dump", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    from conceptor_ccl.conceptor import load_conceptor

    c = load_conceptor(tmp_path / "conceptor_T25.csv")
    assert c.n == 30 and c.aperture == 25.0
    cfg2 = tmp_path / "g.ini"
    cfg2.write_text("[degrade]\nn = 60\nk_list = 0, 10\ntrain_length = 500\n")
    assert main(["conceptor-dump", "--config", str(cfg2), "--out", str(tmp_path / "g")]) == 0
    rec = run_degradation(small_degrade(n=60, train_length=500, k_list=[0], trials=1,
                                        target_csv=str(tmp_path / "g" / "conceptor_target.csv")))
    assert rec.tables["summary"].rows[0][3] == 0
