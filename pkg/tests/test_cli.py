import json

import numpy as np
import pytest

from debroglie.cli import main
from debroglie.config import UnitContext, missing_fields, resolve, set_dotted
from debroglie.core import AMU, PhysicalParams, natural_units
from debroglie.errors import ConfigurationError
from debroglie.io import read_csv
from debroglie.runner import validate

SMALL_DELTA = {
    "scenario": "DeltaPeak",
    "grid": {"length": 128, "num_points": 512},
    "pulse": {"T": "2 tau", "V_tilde": 0.1, "p0": 0},
    "evolution": {"dt": 0.002},
}


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _argon_ctx():
    si = PhysicalParams.from_gradient_frequency(40 * AMU, 1e11)
    return UnitContext(si, natural_units(si))


@pytest.mark.parametrize("text, kind, expected", [
    (4.8, "time", 4.8), ("4.8 tau", "time", 4.8), ("3 d", "length", 3.0),
    ("0.1 hbar/tau", "energy", 0.1), ("-2.4 hbar/d", "momentum", -2.4), ("2.5", "length", 2.5),
])
def test_natural_quantities(text, kind, expected):
    assert UnitContext().to_natural(text, kind, "x") == pytest.approx(expected)


def test_si_quantities_convert_through_d_and_tau():
    ctx = _argon_ctx()
    u = ctx.units
    assert ctx.to_natural("108.1066 nm", "length", "x") == pytest.approx(108.1066e-9 / u.length_d)
    assert ctx.to_natural("14.722 us", "time", "x") == pytest.approx(14.722e-6 / u.time_tau)
    assert ctx.to_natural("1 um", "length", "x") == pytest.approx(1e-6 / u.length_d)


@pytest.mark.parametrize("text", ["3 parsec", "abc", True])
def test_bad_quantities(text):
    with pytest.raises(ConfigurationError, match="pulse.T"):
        _argon_ctx().to_natural(text, "time", "pulse.T")


def test_si_units_need_physical_section():
    with pytest.raises(ConfigurationError, match="physical"):
        UnitContext().to_natural("3 nm", "length", "grid.length")


def test_set_dotted_creates_sections():
    cfg = {}
    set_dotted(cfg, "pulse.T", 3)
    assert cfg == {"pulse": {"T": 3}}


def test_empty_config_lists_required_fields():
    fields = {f.field for f in missing_fields({})}
    assert fields == {"scenario", "grid.length", "grid.num_points", "pulse.T"}
    assert all(f.level == "error" for f in validate({}))


def test_unknown_scenario():
    (f,) = validate({"scenario": "Nope"})
    assert f.field == "scenario"


def test_seed_default_and_output():
    rc = resolve(SMALL_DELTA)
    assert rc.seed == 24301 and rc.output == "out/DeltaPeak"
    assert rc.raw["seed"] == 24301


def test_bad_num_points_named():
    cfg = json.loads(json.dumps(SMALL_DELTA))
    cfg["grid"]["num_points"] = 500
    (f,) = validate(cfg)
    assert f.level == "error" and f.field == "grid"


def test_grid_too_small_reports_required_extent():
    cfg = json.loads(json.dumps(SMALL_DELTA))
    cfg["grid"]["length"] = 8
    cfg["grid"]["num_points"] = 64
    errs = [f for f in validate(cfg) if f.field == "grid.length"]
    assert errs and "need" in errs[0].message and " d " in errs[0].message


def test_momentum_lattice_too_short():
    cfg = json.loads(json.dumps(SMALL_DELTA))
    cfg["grid"]["num_points"] = 128  # p_max = pi < 2 F T = 4
    assert any(f.field == "grid.num_points" for f in validate(cfg))


def test_coverage_error_names_requirement():
    cfg = {"scenario": "TargetState", "grid": {"length": 256, "num_points": 1024},
           "pulse": {"T": 2, "peak_rabi": 0.1, "p0": 3.0},
           "target": {"kind": "gaussian", "sigma_z": 4}}
    errs = [f for f in validate(cfg) if f.level == "error"]
    assert len(errs) == 1 and errs[0].field == "pulse.p0"
    assert "coverage requirement" in errs[0].message


def test_dt_warning_does_not_block():
    cfg = json.loads(json.dumps(SMALL_DELTA))
    cfg["evolution"]["dt"] = 0.05
    found = validate(cfg)
    assert [f.level for f in found] == ["warning"] and found[0].field == "evolution.dt"


def test_off_lattice_p0_is_snapped_with_warning():
    cfg = json.loads(json.dumps(SMALL_DELTA))
    cfg["pulse"]["p0"] = 0.01
    assert any(f.level == "warning" and f.field == "pulse.p0" for f in validate(cfg))


def test_units_command(capsys):
    assert main(["units", "--mass", "40 amu", "--gradient", "1e9 Hz/cm"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["d_nm"] == pytest.approx(108.0, rel=0.01)
    assert out["tau_us"] == pytest.approx(14.7, rel=0.01)
    assert "30 amu" in out["note"]


def test_units_scenario_report(tmp_path):
    cfg = {"scenario": "Units", "physical": {"mass": "40 amu", "gradient": "1e12 Hz/cm"}}
    assert main(["run", _write(tmp_path, cfg), "--output", str(tmp_path / "u")]) == 0
    rep = json.loads((tmp_path / "u" / "report.json").read_text())
    assert rep["metrics"]["d_nm"] == pytest.approx(10.8, rel=0.01)
    assert rep["metrics"]["tau_us"] == pytest.approx(0.147, rel=0.01)
    assert any("30 amu" in n for n in rep["notes"])


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", _write(tmp_path, SMALL_DELTA)]) == 0
    assert main(["validate", _write(tmp_path, {}, "empty.json")]) == 2
    out = capsys.readouterr().out
    assert "ERROR grid.length" in out


def test_invalid_json_exit_code(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["validate", str(p)]) == 2


def test_set_override(tmp_path):
    path = _write(tmp_path, SMALL_DELTA)
    assert main(["validate", path, "--set", "grid.num_points=500"]) == 2
    assert main(["validate", path, "--set", "pulse.T=\"1 tau\""]) == 0
    with pytest.raises(SystemExit):
        main(["validate"])
    assert main(["validate", path, "--set", "oops"]) == 2


def test_wraparound_exit_code(tmp_path):
    cfg = json.loads(json.dumps(SMALL_DELTA))
    cfg["pulse"]["monochromatic"] = True
    cfg["pulse"]["V_tilde"] = 1.0
    cfg["evolution"]["edge_amplitude_limit"] = 1e-6
    assert main(["run", _write(tmp_path, cfg), "--output", str(tmp_path / "w")]) == 3


def test_delta_peak_outputs(tmp_path):
    out = tmp_path / "dp"
    assert main(["run", _write(tmp_path, SMALL_DELTA), "--output", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["density_chirped.csv", "density_monochromatic.csv", "report.json",
                     "waveform_chirped.csv", "waveform_monochromatic.csv"]
    d = read_csv(out / "density_chirped.csv")
    assert list(d) == ["z", "density1", "density2", "re_psi2", "im_psi2"]
    w = read_csv(out / "waveform_chirped.csv")
    assert list(w) == ["t", "re_V", "im_V", "abs_V", "phase"]
    np.testing.assert_allclose(w["abs_V"], 0.1, rtol=1e-10)
    rep = json.loads((out / "report.json").read_text())
    assert rep["metrics"]["chirped"]["hwhm"] == pytest.approx(1.39156, rel=0.05)
    # every CSV embeds the resolved config
    for f in out.glob("*.csv"):
        header = "".join(l[2:] for l in f.read_text().splitlines() if l.startswith("# ") and
                         not l.startswith("# scheme") and not l.startswith("# dt") and
                         not l.startswith("# time"))
        echo = json.loads(header)
        assert echo["scenario"] == "DeltaPeak"
        assert echo["resolved"]["pulse"]["T"] == 2.0
        assert echo["resolved"]["grid"]["z_min"] == -64.0


def test_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DEBROGLIE_OUTPUT_ROOT", str(tmp_path / "root"))
    cfg = {"scenario": "Units", "physical": {"mass": "40 amu", "gradient": "1e9 Hz/cm"},
           "output": "rel"}
    assert main(["run", _write(tmp_path, cfg)]) == 0
    assert (tmp_path / "root" / "rel" / "report.json").exists()


def test_identical_reruns_are_byte_identical(tmp_path):
    cfg = {"scenario": "Litho", "grid": {"length": 256, "num_points": 1024},
           "pulse": {"T": 1, "T_laser": 0.3},
           "litho": {"N": 5, "dz": 3.7, "realizations": 2}, "evolution": {"dt": 0.002},
           "seed": 7}
    path = _write(tmp_path, cfg)
    out = tmp_path / "a"
    assert main(["run", path, "--output", str(out)]) == 0
    first = {f.name: f.read_bytes() for f in out.iterdir()}
    assert main(["run", path, "--output", str(out)]) == 0
    assert {f.name: f.read_bytes() for f in out.iterdir()} == first


def test_width_scan_and_target_scenarios(tmp_path):
    scan = {"scenario": "WidthScan", "grid": {"length": 256, "num_points": 1024},
            "pulse": {"V_tilde": 1}, "scan": {"T_values": {"start": 1, "stop": 2, "num": 2}},
            "evolution": {"dt": 0.002}}
    assert main(["run", _write(tmp_path, scan, "s.json"), "--output", str(tmp_path / "s")]) == 0
    assert list(read_csv(tmp_path / "s" / "width_scan.csv")) == [
        "T", "center", "hwhm", "lobe_hwhm", "peak_density"]
    target = {"scenario": "TargetState", "grid": {"length": 256, "num_points": 1024},
              "pulse": {"T": 4.8, "peak_rabi": 0.1}, "evolution": {"dt": 0.002},
              "target": {"kind": "double_gaussian", "separation": 16, "sigma_z": 2}}
    assert main(["run", _write(tmp_path, target, "t.json"), "--output", str(tmp_path / "t")]) == 0
    rep = json.loads((tmp_path / "t" / "report.json").read_text())["metrics"]
    assert rep["coverage"] > 1 - 1e-4
    assert rep["fidelity_vs_target"] > 0.99


def test_mass_note_independent_of_gradient(capsys):
    main(["units", "--mass", "40 amu", "--gradient", "1e12 Hz/cm"])
    note = json.loads(capsys.readouterr().out)["note"]
    assert "d = 119.0 nm" in note and "tau = 13.38 us" in note
