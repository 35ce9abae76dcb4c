import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gcsdyn.cli import expand_sweep, main
from gcsdyn.scenario import ConfigError, load_config, parse_config, run_scenario

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("GCSDYN_OUTPUT_DIR", str(tmp_path))
    return tmp_path


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2))
    return path


BASE = {
    "group": "SU11",
    "weights": [0.25],
    "z0": [0.3, 0.1],
    "track": {"family": "oscillator", "channels": {"omega": 1.1, "b": 0.05}},
    "T": 1.0,
    "stride": 0.25,
    "experiment": "classical",
    "output": {"dir": "out", "stem": "run"},
}


class TestSimulate:
    @pytest.mark.parametrize("name", ["stationary_su11", "stability_su2", "mobius_piecewise",
                                      "observables_su11", "thermal"])
    def test_demo_configs(self, name, outdir):
        assert main(["simulate", str(CONFIGS / f"{name}.json")]) == 0
        stem = load_config(CONFIGS / f"{name}.json").data["output"]["stem"]
        summary = json.loads((outdir / f"{stem}.json").read_text())
        assert summary["version"] == "0.1.0"
        header = (outdir / f"{stem}.csv").read_text().splitlines()[0]
        assert header.startswith("beta_omega" if name == "thermal" else "t,")

    def test_classical_csv(self, tmp_path, outdir):
        main(["simulate", str(write_config(tmp_path, BASE))])
        data = np.genfromtxt(outdir / "run.csv", delimiter=",", names=True)
        assert data.dtype.names == ("t", "re_z", "im_z", "abs_z")
        np.testing.assert_allclose(data["t"], [0, 0.25, 0.5, 0.75, 1.0])
        np.testing.assert_allclose(data["abs_z"], np.hypot(data["re_z"], data["im_z"]))

    def test_output_is_deterministic(self, tmp_path, outdir):
        cfg = dict(BASE, experiment="stability", truncation={"segments": 64})
        path = write_config(tmp_path, cfg)
        main(["simulate", str(path)])
        first = (outdir / "run.csv").read_bytes()
        main(["simulate", str(path)])
        assert (outdir / "run.csv").read_bytes() == first

    def test_config_echo_round_trip(self, tmp_path, outdir):
        cfg = dict(BASE, weights=["1/4", 0.75], z0="0.3+0.1j")
        main(["simulate", str(write_config(tmp_path, cfg))])
        echo = json.loads((outdir / "run.json").read_text())["config"]
        assert echo["weights"] == [0.25, 0.75]
        again = parse_config(echo)
        assert again == parse_config(cfg)
        assert run_scenario(again).csv_text == (outdir / "run.csv").read_text()

    def test_output_dir_from_config(self, tmp_path, monkeypatch):
        monkeypatch.delenv("GCSDYN_OUTPUT_DIR", raising=False)
        cfg = dict(BASE, output={"dir": str(tmp_path / "nested"), "stem": "x"})
        assert main(["simulate", str(write_config(tmp_path, cfg))]) == 0
        assert (tmp_path / "nested" / "x.csv").exists()


class TestConfigErrors:
    def test_complex_h0_names_the_field(self, capsys, outdir):
        assert main(["simulate", str(CONFIGS / "invalid_h0.json")]) == 2
        err = capsys.readouterr().err
        assert "track.channels.h0" in err and "line 7" in err
        assert not list(outdir.iterdir())

    @pytest.mark.parametrize("patch,path", [
        ({"group": "SO3"}, "group"),
        ({"z0": [1.2, 0]}, "z0"),
        ({"weights": [-1]}, "weights[0]"),
        ({"T": -1}, "T"),
        ({"experiment": "nope"}, "experiment"),
        ({"bogus": 1}, "bogus"),
        ({"track": {"family": "oscillator", "channels": {"omega": [1, 1]}}}, "track.channels.omega"),
        ({"track": {"family": "oscillator",
                    "channels": {"omega": {"piecewise": {"breaks": [0, 2], "values": [1, 2]}}}}},
         "track.channels.omega"),
    ])
    def test_invalid_fields(self, patch, path):
        with pytest.raises(ConfigError) as info:
            parse_config(dict(BASE, **patch))
        assert info.value.path.startswith(path)

    def test_bad_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{\n  \"group\": \n}")
        assert main(["simulate", str(path)]) == 2
        assert "line" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["simulate", str(tmp_path / "absent.json")]) == 1

    def test_computational_failure(self, tmp_path, outdir, capsys):
        cfg = dict(BASE, experiment="stability", z0=0.95, truncation={"trunc_dim": 16})
        assert main(["simulate", str(write_config(tmp_path, cfg))]) == 1
        assert "computation failed" in capsys.readouterr().err


class TestVerify:
    def test_filtered(self, capsys):
        assert main(["verify", "--filter", "resolve"]) == 0
        out = capsys.readouterr().out
        assert "(1 - r^2)^2" in out and "-j(1-|z|^2)" in out and "3/3 checks passed" in out

    def test_no_match(self):
        assert main(["verify", "--filter", "no-such-check"]) == 2


class TestSweep:
    def test_expand_is_sorted_product(self):
        paths, items = expand_sweep(dict(BASE, z0={"re": 0, "im": 0},
                                           sweep={"z0.re": [0, 1], "T": [1, 2, 3]}))
        assert paths == ["T", "z0.re"]
        assert len(items) == 6
        assert items[1][0] == {"T": 1, "z0.re": 1}

    def test_disc_grid(self, tmp_path, outdir):
        cfg = dict(BASE, z0={"re": 0.0, "im": 0.0},
                   sweep={"z0.re": [-0.5, 0.0, 0.5], "z0.im": [-0.5, 0.5]})
        assert main(["sweep", str(write_config(tmp_path, cfg))]) == 0
        report = json.loads((outdir / "run_sweep.json").read_text())
        assert report["count"] == 6 and report["failures"] == 0
        assert (outdir / "run_0005.csv").exists()
        assert all("wall_time" not in e["summary"] for e in report["scenarios"])

    def test_weight_sweep_shares_trajectory(self, outdir):
        assert main(["sweep", str(CONFIGS / "sweep_weights.json"), "--jobs", "2"]) == 0
        report = json.loads((outdir / "sweep_weights_sweep.json").read_text())
        hashes = {e["summary"]["trajectory_sha256"] for e in report["scenarios"]}
        assert len(hashes) == 1
        assert all(e["summary"]["min_fidelity"] > 1 - 1e-8 for e in report["scenarios"])

    def test_failures_are_recorded(self, tmp_path, outdir):
        cfg = dict(BASE, sweep={"z0.re": [0.5, 1.5]}, z0={"re": 0.0, "im": 0.0})
        assert main(["sweep", str(write_config(tmp_path, cfg))]) == 0
        report = json.loads((outdir / "run_sweep.json").read_text())
        assert [e["status"] for e in report["scenarios"]] == ["ok", "config_error"]

    def test_thermal_sweep(self, outdir):
        assert main(["sweep", str(CONFIGS / "sweep_thermal.json")]) == 0
        report = json.loads((outdir / "sweep_thermal_sweep.json").read_text())
        assert report["failures"] == 0

    def test_missing_sweep_section(self, tmp_path):
        assert main(["sweep", str(write_config(tmp_path, BASE))]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gcsdyn.cli", "verify", "--filter", "casimir"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "2/2 checks passed" in proc.stdout
