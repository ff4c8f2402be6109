import math

import numpy as np
import pytest

from casimirchip import (
    ConfigError,
    DomainError,
    Drude,
    IdealMetal,
    Plasma,
    SuperconductorTwoFluid,
    example_config_path,
    load_device_config,
    parse_material_spec,
)
from casimirchip.cli import main
from casimirchip.config import parse_length, parse_pressure, parse_temperature
from casimirchip.serialize import (
    SPRING_CSV_HEADER,
    fmt,
    read_csv_table,
    read_spring_csv,
    scan_csv,
)

EXAMPLE = str(example_config_path())


# ------------------------------------------------------------------- config

def test_example_config_loads():
    cfg = load_device_config(EXAMPLE)
    assert cfg.geometry.gap == pytest.approx(100e-9)
    assert cfg.cavity.kappa == pytest.approx(2 * math.pi * 4.2e9)
    assert cfg.cavity.g_om == pytest.approx(2 * math.pi * 50e18)
    assert cfg.calib.min_resolvable_shift == pytest.approx(10e6)
    assert cfg.m_eff == pytest.approx(418e-15)
    assert cfg.film.t_c == pytest.approx(0.9)
    assert set(cfg.materials) == {"al_plasma", "al_drude", "al_sc"}
    assert isinstance(cfg.materials["al_drude"], Drude)
    assert isinstance(cfg.materials["al_sc"], SuperconductorTwoFluid)
    assert cfg.sweep is not None
    assert dict(cfg.signals)["gravitational_casimir"] == pytest.approx(0.5)
    # energy-quoted omega_p converts through e/hbar
    assert cfg.materials["al_plasma"].omega_p == pytest.approx(1.823e16, rel=1e-3)


def test_config_collects_all_problems(tmp_path):
    bad = tmp_path / "bad.cfg"
    text = (example_config_path().read_text()
            .replace("gap_nm = 100", "gap = 100")
            .replace("kappa_GHz = 4.2", "kappa_GHz = not-a-number"))
    bad.write_text(text)
    with pytest.raises(ConfigError) as excinfo:
        load_device_config(str(bad))
    problems = "\n".join(excinfo.value.problems)
    assert "unknown key 'gap'" in problems
    assert "missing required key 'gap_nm'" in problems
    assert "expected a number" in problems


def test_config_rejects_unknown_section(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(example_config_path().read_text() + "\n[typo]\nx_nm = 1\n")
    with pytest.raises(ConfigError) as excinfo:
        load_device_config(str(bad))
    assert any("unknown section" in p for p in excinfo.value.problems)


def test_signals_require_pa_suffix(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(example_config_path().read_text().replace(
        "gravitational_casimir_Pa", "gravitational_casimir"))
    with pytest.raises(ConfigError) as excinfo:
        load_device_config(str(bad))
    assert any("_Pa suffix" in p for p in excinfo.value.problems)


def test_parse_material_specs():
    cfg = load_device_config(EXAMPLE)
    assert isinstance(parse_material_spec("ideal", cfg.materials), IdealMetal)
    assert parse_material_spec("al_drude", cfg.materials) is cfg.materials["al_drude"]
    inline = parse_material_spec("plasma:omega_p_eV=12")
    assert isinstance(inline, Plasma)
    sc = parse_material_spec("superconductor:omega_p_eV=12,gamma_meV=50,tc_K=0.9")
    assert isinstance(sc, SuperconductorTwoFluid)
    with pytest.raises(DomainError):
        parse_material_spec("unobtainium", cfg.materials)
    with pytest.raises(DomainError):
        parse_material_spec("drude:omega_p_eV=12")  # gamma missing


def test_quantity_parsers():
    assert parse_length("100nm") == pytest.approx(100e-9)
    assert parse_length("0.1um") == pytest.approx(100e-9)
    assert parse_length("1e-7m") == pytest.approx(100e-9)
    assert parse_length("0") == 0.0
    assert parse_temperature("10mK") == pytest.approx(0.01)
    assert parse_temperature("1.2K") == pytest.approx(1.2)
    assert parse_pressure("6mPa") == pytest.approx(6e-3)
    with pytest.raises(DomainError):
        parse_length("100")  # bare nonzero number: no unit
    with pytest.raises(DomainError):
        parse_temperature("10s")


# ---------------------------------------------------------------- serialize

def test_fmt_round_trips_doubles():
    values = [13.001257724477536, 1e-300, -2.5e17, 0.1 + 0.2]
    assert all(float(fmt(v)) == v for v in values)


def test_scan_csv_round_trip_and_bands():
    points = [(0.5, -6.1e8), (0.9, 0.0), (1.2, 1.0 / 3.0)]
    text = scan_csv(points, resolution_band=1e7, drift_band=3e7)
    assert "# resolution_band_Hz = 10000000" in text
    header, rows = read_csv_table(text)
    assert header == ("temperature_K", "freq_shift_Hz")
    parsed = [(float(t), float(s)) for t, s in rows]
    assert parsed == points


def test_read_spring_csv():
    text = ",".join(SPRING_CSV_HEADER) + "\n-1e9,-120\n2e9,88\n"
    data = read_spring_csv(text)
    assert data.shape == (2, 2)
    assert data[0, 1] == -120.0
    with pytest.raises(DomainError):
        read_spring_csv("a,b\n1,2\n")


# ---------------------------------------------------------------------- CLI

def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cli_pressure_ideal(capsys):
    code, out, err = run_cli(
        capsys, "pressure", "--gap", "100nm", "--temp", "0",
        "--model-a", "ideal", "--model-b", "ideal",
    )
    assert code == 0 and err == ""
    value = float(out.splitlines()[0].split("=")[1])
    assert value == pytest.approx(13.00, abs=0.01)


def test_cli_pressure_json_format(capsys):
    import json

    code, out, _ = run_cli(
        capsys, "pressure", "--gap", "1um", "--temp", "0",
        "--model-a", "ideal", "--model-b", "ideal", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["pressure_Pa"] == pytest.approx(1.300e-3, rel=1e-3)


def test_cli_pressure_named_material(capsys):
    code, out, _ = run_cli(
        capsys, "pressure", "--gap", "150nm", "--temp", "1.3K",
        "--model-a", "al_drude", "--model-b", "al_drude", "--config", EXAMPLE,
    )
    assert code == 0
    assert float(out.splitlines()[0].split("=")[1]) > 0


def test_cli_pressure_usage_error(capsys):
    code = main(["pressure", "--gap", "100nm"])
    capsys.readouterr()
    assert code == 2


def test_cli_pressure_domain_error(capsys):
    code, out, err = run_cli(
        capsys, "pressure", "--gap", "100nm", "--temp=-1K",
        "--model-a", "ideal", "--model-b", "ideal",
    )
    assert code == 1 and out == "" and "error" in err


@pytest.mark.filterwarnings("ignore:frequency shift")
def test_cli_sweep_with_spec_file(capsys, tmp_path):
    spec = tmp_path / "sweep.cfg"
    spec.write_text(
        "[sweep]\ngap_min_nm = 100\ngap_max_nm = 120\ngap_step_nm = 10\n"
        "temperatures_K = 1.3\npairs = al_drude/al_drude\n"
    )
    code, out, err = run_cli(
        capsys, "sweep", "--config", EXAMPLE, "--spec", str(spec), "--workers", "2",
    )
    assert code == 0 and err == ""
    header, rows = read_csv_table(out)
    assert header[0] == "gap_m"
    assert len(rows) == 3
    gaps = [float(r[0]) for r in rows]
    assert gaps == sorted(gaps)
    # lossless numeric round trip at 17 significant digits
    for row in rows:
        assert float(row[3]) > 0


def test_cli_scan_grav_stub(capsys):
    code, out, err = run_cli(
        capsys, "scan", "--config", EXAMPLE, "--tmin", "500mK", "--tmax", "1.2K",
        "--points", "8", "--theory", "grav-casimir",
    )
    assert code == 0 and err == ""
    assert "# resolution_band_Hz" in out and "# drift_band_Hz" in out
    header, rows = read_csv_table(out)
    assert header == ("temperature_K", "freq_shift_Hz")
    assert len(rows) == 8
    shifts = [float(s) for _, s in rows]
    assert shifts[-1] == 0.0
    assert 0.5e9 <= abs(shifts[0]) <= 4.5e9


def test_cli_film_reports_both_mean_free_paths(capsys):
    code, out, err = run_cli(capsys, "film", "--config", EXAMPLE)
    assert code == 0 and err == ""
    lines = dict(
        line.split(" = ", 1) for line in out.splitlines() if " = " in line
    )
    assert float(lines["mean_free_path_from_sigma_nm"]) == pytest.approx(16.4, rel=1e-3)
    assert float(lines["quoted_mean_free_path_nm"]) == pytest.approx(10.8)
    assert "disagree" in lines["mean_free_path_note"]
    assert float(lines["coherence_length_approx_from_quoted_nm"]) == pytest.approx(
        131.5, rel=1e-3
    )
    assert float(lines["penetration_depth_exact_t0_from_quoted_nm"]) == pytest.approx(
        120.7, rel=1e-3
    )


def test_cli_film_with_r4k(capsys):
    code, out, _ = run_cli(capsys, "film", "--config", EXAMPLE, "--r4k", "45")
    assert code == 0
    lines = dict(l.split(" = ", 1) for l in out.splitlines() if " = " in l)
    assert float(lines["sigma_4k_per_ohm_m"]) == pytest.approx(4.1e7, rel=1e-3)


def test_cli_tc_two_step(capsys, tmp_path):
    t = np.linspace(0.6, 1.6, 160)
    sig = lambda x: 1.0 / (1.0 + np.exp(-x))
    r = 1.0 + 19.0 * sig((t - 0.9) / 0.003) + 25.0 * sig((t - 1.2) / 0.003)
    path = tmp_path / "twostep.csv"
    path.write_text(
        "temperature_K,resistance_ohm\n"
        + "".join(f"{ti},{ri}\n" for ti, ri in zip(t, r))
    )
    code, out, err = run_cli(capsys, "tc", "--input", str(path))
    assert code == 0 and err == ""
    lines = dict(l.split(" = ", 1) for l in out.splitlines())
    assert float(lines["tc_K"]) == pytest.approx(0.9, abs=0.02)
    assert lines["multi_step"] == "true"
    assert int(lines["n_steps"]) == 2
    assert float(lines["step1_T_K"]) == pytest.approx(1.2, abs=0.02)
    assert float(lines["step2_T_K"]) == pytest.approx(0.9, abs=0.02)


def test_cli_tc_no_transition_exits_one(capsys, tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text(
        "temperature_K,resistance_ohm\n"
        + "".join(f"{0.5 + 0.01 * i},45.0\n" for i in range(20))
    )
    code, out, err = run_cli(capsys, "tc", "--input", str(path))
    assert code == 1 and "error" in err


def test_cli_transduce(capsys):
    code, out, err = run_cli(
        capsys, "transduce", "--config", EXAMPLE, "--pressure", "0.5Pa",
    )
    assert code == 0 and err == ""
    lines = dict(l.split(" = ", 1) for l in out.splitlines())
    assert 10e-12 <= float(lines["gap_closing_m"]) <= 30e-12
    assert -4.5e9 <= float(lines["freq_shift_Hz"]) <= -0.5e9
    assert float(lines["pdh_voltage_V"]) < 0


def test_cli_detect_default_signals(capsys):
    code, out, err = run_cli(capsys, "detect", "--config", EXAMPLE)
    assert code == 0 and err == ""
    header, rows = read_csv_table(out)
    assert header[0] == "name"
    row = dict(zip(header, rows[0]))
    assert row["name"] == "gravitational_casimir"
    assert row["detectable"] == "true"
    assert 40 <= float(row["margin"]) <= 170


def test_cli_detect_custom_signal(capsys):
    code, out, _ = run_cli(
        capsys, "detect", "--config", EXAMPLE, "--signal", "faint=1mPa",
    )
    assert code == 0
    _, rows = read_csv_table(out)
    assert rows[0][0] == "faint"
    assert rows[0][4] == "false"


def test_cli_validate(capsys):
    code, out, err = run_cli(capsys, "validate", "--config", EXAMPLE)
    assert code == 0 and err == ""
    assert "config ok" in out
    assert "q_optical vs omega_c/kappa" in out
    assert "pressure floor" in out
    assert "fundamental frequency" in out


def test_cli_validate_bad_config_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[geometry]\ngap_nm = 100\n")
    code, out, err = run_cli(capsys, "validate", "--config", str(bad))
    assert code == 2
    assert "config error" in err and out == ""


def test_cli_help_documents_units(capsys):
    code = main(["pressure", "--help"])
    out = capsys.readouterr().out
    assert code == 0
    assert "100nm" in out and "10mK" in out
