import json
import math

import numpy as np
import pytest

from dtdd3d import __version__
from dtdd3d.cli import (
    PRESETS,
    ConfigError,
    ScenarioConfig,
    analytic_table,
    load_config,
    main,
    parse_config,
    preset_configs,
    run_scenario,
    validate,
)
from dtdd3d.antenna import BeamKind
from dtdd3d.scenario import Direction, TddMode
from dtdd3d.specfun import omega


def _write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_empty_file_gives_defaults(tmp_path):
    spec = parse_config(_write(tmp_path, ""))
    assert spec.cfg.p_dl_dbm == 43 and spec.cfg.p_star_dbm == 20 and spec.cfg.p_noise_dbm == -93
    assert spec.cfg.a_db == 130 and spec.cfg.two_b == 3.5 and spec.cfg.sigma_db == 6
    assert spec.cfg.g_ant_db == 17.5 and spec.cfg.l_b == 0.02
    assert spec.layout.rings == 5 and spec.layout.delta == 0.75
    assert spec.tdd.mode is TddMode.DYNAMIC and spec.tdd.alpha_d == 0.5
    assert spec.mode.kind is BeamKind.BEAM_3D
    assert spec.mode.theta_h3db == pytest.approx(math.radians(14))
    assert spec.mode.theta_v3db == pytest.approx(math.radians(8))
    assert spec.mode.fixed_downtilt == pytest.approx(math.radians(8))


def test_sections_and_flat_keys(tmp_path):
    text = "radio.k_fpc = 0.7\n[antenna]\nmode = sector_only\n[campaign]\ndirection = ul  # comment\n"
    spec = parse_config(_write(tmp_path, text))
    assert spec.cfg.k_fpc == 0.7
    assert spec.mode.kind is BeamKind.SECTOR_ONLY
    assert spec.mode.theta_h3db == pytest.approx(math.radians(65))
    assert spec.direction is Direction.UL


def test_rings_zero_accepted(tmp_path):
    assert parse_config(_write(tmp_path, "[network]\nrings = 0\n")).layout.n_sites == 1


@pytest.mark.parametrize(
    "text, needle",
    [
        ("[radio]\nk_fpc = 1.5\n", "k_fpc"),
        ("[radio]\nk_fpc 0.3\n", ":2:"),
        ("\n\nradio.bogus = 1\n", ":3: unknown key radio.bogus"),
        ("[network]\nrings = two\n", ":2: network.rings"),
        ("[tdd]\nmode = sometimes\n", "sometimes"),
        ("k_fpc = 0.2\n", "dotted prefix"),
        ("[tdd]\nalpha_d = 2\n", "alpha_d"),
    ],
)
def test_config_errors(tmp_path, text, needle):
    with pytest.raises(ConfigError, match=needle.replace("(", r"\(")):
        load_config(_write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="missing.ini"):
        load_config(tmp_path / "missing.ini")


def test_run_outputs_and_manifest_round_trip(tmp_path):
    cfg = ScenarioConfig.defaults().with_(campaign__n_drops=300, network__rings=2)
    run_scenario(cfg, tmp_path / "a")
    head = (tmp_path / "a" / "sinr_samples.csv").read_text().splitlines()
    assert head[0] == "drop_index,x,sinr_db,isr_bs,isr_mobile"
    assert len(head) == 301
    cov = (tmp_path / "a" / "coverage.csv").read_text().splitlines()
    assert cov[0] == "gamma_db,theta,stderr"
    theta = np.array([float(line.split(",")[1]) for line in cov[1:]])
    assert np.all(np.diff(theta) <= 0)
    manifest = tmp_path / "a" / "manifest.ini"
    assert f"version = {__version__}" in manifest.read_text()
    again = load_config(manifest)
    run_scenario(again, tmp_path / "b")
    for name in ("sinr_samples.csv", "coverage.csv", "manifest.ini"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_full_precision_numbers(tmp_path):
    cfg = ScenarioConfig.defaults().with_(campaign__n_drops=5, network__rings=1)
    run_scenario(cfg, tmp_path)
    row = (tmp_path / "sinr_samples.csv").read_text().splitlines()[1].split(",")
    # repr round-trips exactly.
    assert repr(float(row[1])) == row[1]


@pytest.mark.parametrize("name, count", [("fig2", 9), ("fig3", 7), ("fig4", 8), ("fig5", 5), ("fig6", 6)])
def test_preset_sizes(name, count):
    curves = preset_configs(name)
    assert len(curves) == count
    for cfg in curves.values():
        cfg.to_spec()


def test_preset_grids():
    fig6 = preset_configs("fig6")
    ks = sorted({c["radio.k_fpc"] for c in fig6.values()})
    assert ks == [0.4, 0.7, 1.0]
    widths = sorted({c["antenna.theta_h3db_deg"] for c in preset_configs("fig4").values()})
    assert widths == [8.0, 14.0, 20.0, 30.0]
    with pytest.raises(ConfigError):
        preset_configs("fig9")
    assert set(PRESETS) == {"fig2", "fig3", "fig4", "fig5", "fig6"}


def test_main_run_and_errors(tmp_path, capsys):
    p = _write(tmp_path, "[network]\nrings = 1\n")
    assert main(["run", str(p), "--out", str(tmp_path / "o"), "--drops", "20", "--seed", "4"]) == 0
    assert "seed = 4" in (tmp_path / "o" / "manifest.ini").read_text()
    bad = _write(tmp_path, "[radio]\nk_fpc = 3\n", "bad.ini")
    assert main(["run", str(bad)]) == 2
    assert "k_fpc" in capsys.readouterr().err


def test_main_sweep(tmp_path):
    base = _write(tmp_path, "[network]\nrings = 1\n")
    assert main(["sweep", "--preset", "fig5", "--config", str(base), "--drops", "30", "--out", str(tmp_path)]) == 0
    assert len(list((tmp_path / "fig5").glob("*/coverage.csv"))) == 5


def test_analytic_table(tmp_path, capsys):
    cfg = ScenarioConfig.defaults().with_(antenna__mode="beam2d")
    rows = analytic_table(cfg, xs=(0.2, 0.4))
    assert rows[0]["D_down"] < rows[1]["D_down"]
    assert rows[0]["U_up"] < rows[1]["U_up"]
    p = _write(tmp_path, "[antenna]\nmode = sector_only\n")
    assert main(["analytic", str(p)]) == 0
    out = capsys.readouterr().out
    assert "D_down" in out and len(out.splitlines()) == 6


@pytest.fixture(scope="module")
def quick_config():
    return ScenarioConfig.defaults().with_(network__rings=1, antenna__mode="beam2d")


def test_validate_passes(quick_config):
    report = validate(quick_config)
    assert report["passed"], [c for c in report["checks"] if not c["passed"]]
    json.dumps(report)


def test_validate_detects_corrupted_omega(quick_config):
    report = validate(quick_config, omega_override=lambda z, acc=None: omega(z) * 1.01)
    failed = {c["name"] for c in report["checks"] if not c["passed"]}
    assert {"series_vs_oracle", "closed_form_vs_oracle"} <= failed
    assert not report["passed"]
