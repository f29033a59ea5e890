import csv
import json

import numpy as np
import pytest

from chainbath.cli import main, parse_config, parse_config_text
from chainbath.errors import ConfigError
from chainbath.units import WAVENUMBER_PER_MEV

SMALL = """\
preset = singlet_fission

[bath]
n_modes = 6

[evolution]
d_bath = 4
dt = 1 fs
t_final = 20 fs
measure_every = 2
svd_cutoff = 1e-8

[couplings]
t_max = 50 fs
n_times = 5
"""


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(SMALL)
    return path


class TestParse:
    def test_table_defaults(self):
        spec = parse_config_text('preset = "singlet_fission"\n')
        p = spec.manifest_params()
        assert p["delta_z"] == {"value": 100.0, "unit": "meV"}
        assert p["delta_x"]["value"] == 20.0
        assert p["n_modes"] == 300
        assert p["svd_cutoff"] == 1e-4
        assert p["d_bath"] == 160
        assert p["lambda_s1"]["value"] == pytest.approx(56.0)
        assert p["omega_max"]["value"] == pytest.approx(800 / WAVENUMBER_PER_MEV)
        assert p["gamma"]["value"] == pytest.approx(0.6582119569)

    def test_units_are_converted(self):
        spec = parse_config_text(
            "preset = singlet_fission\n[model]\ndelta_z = 806.5544 cm-1\n"
            "gamma = 2 ps-1\n[evolution]\ndt = 0.5 fs\n")
        assert spec.params["delta_z"] == pytest.approx(100.0)
        assert spec.params["gamma"] == pytest.approx(2 * 0.6582119569)
        assert spec.evolution.dt == pytest.approx(0.5e-3)

    def test_lambda_multiples_follow_sweep(self):
        spec = parse_config_text("preset = singlet_fission\n[model]\nlambda_tt = 2 hbar_omega_diag\n")
        point = spec.with_params(omega_diag=20.0)
        assert point.manifest_params()["lambda_tt"]["value"] == pytest.approx(40.0)

    def test_degenerate_block(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("preset = singlet_fission\nmapping = block_lanczos\n"
                              "[model]\nomega_diag = 60 meV\nomega_od = 60 meV\n")
        assert "omega_diag != omega_od" in str(err.value)
        # the same model is fine with a single-seed chain
        parse_config_text("preset = singlet_fission\nmapping = lanczos_z\n"
                          "[model]\nomega_diag = 60 meV\nomega_od = 60 meV\n")

    def test_bad_unit_names_field(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("preset = singlet_fission\n[model]\ndelta_z = 100 meVs\n")
        assert "model.delta_z" in str(err.value)
        assert ":3:" in str(err.value)

    def test_all_problems_reported(self):
        text = ("preset = singlet_fission\nbogus = 1\n[model]\ndelta_x = 20\n"
                "[evolution]\ndt = 1 meV\n[nowhere]\nx = 1\n")
        with pytest.raises(ConfigError) as err:
            parse_config_text(text)
        assert len(err.value.problems) == 4

    def test_missing_preset(self):
        with pytest.raises(ConfigError, match="run.preset"):
            parse_config_text("")

    def test_spin_boson_rejects_sf_fields(self):
        with pytest.raises(ConfigError, match="does not apply"):
            parse_config_text("preset = spin_boson\n[model]\nomega_diag = 20 meV\n")

    def test_overrides(self):
        spec = parse_config_text("preset = singlet_fission\n",
                                 ["d_bath=10", "model.omega_od=30 meV", "sweep.omega_diag=20, 80 meV"])
        assert spec.evolution.d_bath == 10
        assert spec.params["omega_od"] == 30.0
        assert spec.sweep == {"omega_diag": [20.0, 80.0]}
        with pytest.raises(ConfigError):
            parse_config_text("preset = singlet_fission\n", ["nothing=1"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "absent.ini")


class TestVerbs:
    def test_validate(self, small_config, capsys):
        assert main(["validate", "--config", str(small_config)]) == 0
        assert json.loads(capsys.readouterr().out)["preset"] == "singlet_fission"

    def test_config_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.ini"
        bad.write_text("preset = singlet_fission\n[model]\ndelta_z = 1 meVs\n")
        assert main(["run", "--config", str(bad)]) == 2
        assert "delta_z" in capsys.readouterr().err

    def test_run_outputs(self, small_config, tmp_path):
        out = tmp_path / "a"
        assert main(["run", "--config", str(small_config), "--out", str(out)]) == 0
        pops = read_csv(out / "populations.csv")
        assert pops[0] == ["t_ps", "P_S1", "P_TT"]
        assert float(pops[1][1]) == 1.0
        assert len(pops) == 1 + 11
        ent = read_csv(out / "entropy.csv")
        assert ent[0] == ["t_ps", "bond", "S_nats", "bond_dim"]
        assert len(ent) == 1 + 11 * 6
        assert read_csv(out / "couplings.csv")[0] == ["t_ps", "mode", "channel", "abs_coupling"]
        assert read_csv(out / "bandcoeffs.csv")[0] == ["index", "alpha_meV", "beta_meV", "kappa_meV"]
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["status"] == "ok" and not manifest["partial"]
        assert manifest["parameters"]["omega_diag"] == {"value": 80.0, "unit": "meV"}
        assert "numpy" in manifest["versions"]

    def test_deterministic(self, small_config, tmp_path):
        for name in ("a", "b"):
            main(["run", "--config", str(small_config), "--out", str(tmp_path / name)])
        for f in ("populations.csv", "entropy.csv", "couplings.csv", "bandcoeffs.csv", "bath.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_compare_mode(self, small_config, tmp_path):
        out = tmp_path / "cmp"
        assert main(["run", "--config", str(small_config), "--out", str(out),
                     "--override", "compare=block_lanczos"]) == 0
        assert (out / "lanczos_z" / "populations.csv").exists()
        assert (out / "block_lanczos" / "populations.csv").exists()
        rows = read_csv(out / "diff_summary.csv")
        assert rows[0][2] == "max_abs_dP_state0"
        assert 0 <= float(rows[1][2]) < 1e-2

    def test_couplings_mode(self, small_config, tmp_path):
        out = tmp_path / "wave"
        assert main(["couplings", "--config", str(small_config), "--out", str(out)]) == 0
        rows = read_csv(out / "couplings.csv")
        assert len(rows) == 1 + 5 * 2 * 6
        assert not (out / "populations.csv").exists()
        first = [r for r in rows[1:] if float(r[0]) == 0.0 and r[2] == "z"]
        assert float(first[0][3]) > 0 and max(float(r[3]) for r in first[1:]) < 1e-10

    def test_bandcoeffs(self, small_config, tmp_path):
        out = tmp_path / "band"
        assert main(["bandcoeffs", "--config", str(small_config), "--out", str(out),
                     "--override", "mapping=block_lanczos"]) == 0
        rows = np.array(read_csv(out / "bandcoeffs.csv")[1:], dtype=float)
        assert rows.shape == (6, 4)
        assert np.all(rows[2:, 3] > 0)

    def test_sweep(self, small_config, tmp_path):
        out = tmp_path / "grid"
        code = main(["sweep", "--config", str(small_config), "--out", str(out),
                     "--override", "mapping=block_lanczos",
                     "--override", "sweep.omega_diag=30, 60 meV",
                     "--override", "sweep.omega_od=60 meV", "--workers", "2"])
        assert code == 3  # the 60/60 point is degenerate for block Lanczos
        rows = read_csv(out / "summary.csv")
        assert rows[0] == ["omega_diag_meV", "omega_od_meV", "status", "P_S1_final", "P_TT_final"]
        status = {r[0]: r[2] for r in rows[1:]}
        assert status["30"] == "ok"
        assert status["60"].startswith("DegenerateSeedError")
        assert (out / "omega_diag=30_omega_od=60" / "populations.csv").exists()

    def test_single_point_sweep_equals_run(self, small_config, tmp_path):
        main(["run", "--config", str(small_config), "--out", str(tmp_path / "r")])
        main(["sweep", "--config", str(small_config), "--out", str(tmp_path / "s"),
              "--override", "sweep.omega_diag=80 meV"])
        a = (tmp_path / "r" / "populations.csv").read_bytes()
        b = (tmp_path / "s" / "omega_diag=80" / "populations.csv").read_bytes()
        assert a == b
