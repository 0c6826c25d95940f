import json
from pathlib import Path

import numpy as np
import pytest

from superabsorption.cli import main, spec_from_meta
from superabsorption.config import (
    ConfigError,
    config_text,
    parse_angle,
    parse_config,
    parse_rate,
    parse_time,
)

TWO_PI = 2 * np.pi
PRESETS = Path(__file__).resolve().parents[1] / "src" / "superabsorption" / "presets"


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


MINIMAL = """
n_atoms = 2
coupling = 2pi*100kHz
pulse_area = 0.5pi
duration = 100ns
samples = 21
fock_cutoff = 6
"""


class TestUnitParsing:
    def test_rate_forms(self):
        assert parse_rate("2pi*256kHz", "g") == pytest.approx(TWO_PI * 256e3)
        assert parse_rate("1.5MHz", "g") == pytest.approx(1.5e6)
        assert parse_rate("823097rad/s", "g") == pytest.approx(823097.0)
        assert parse_rate("0rad/s", "g") == 0.0

    def test_rate_requires_tag(self):
        with pytest.raises(ConfigError, match="unit tag"):
            parse_rate("256000", "coupling")
        with pytest.raises(ConfigError):
            parse_rate("2pi*100rad/s", "coupling")

    def test_time_and_angle_forms(self):
        assert parse_time("280ns", "t") == pytest.approx(280e-9)
        assert parse_time("1.92us", "t") == pytest.approx(1.92e-6)
        assert parse_angle("0.5pi", "a") == pytest.approx(np.pi / 2)
        assert parse_angle("pi", "a") == pytest.approx(np.pi)
        assert parse_angle("1.2", "a") == pytest.approx(1.2)
        with pytest.raises(ConfigError):
            parse_time("280", "t")


class TestParseConfig:
    def test_reference_preset_loads_strong_coupling_constants(self):
        run = parse_config(PRESETS / "barium-cavity.cfg", "superradiance")
        p = run.spec.params
        assert p.coupling == pytest.approx(TWO_PI * 256e3)
        assert p.cavity_rate == pytest.approx(TWO_PI * 131e3)
        assert p.atomic_rate == pytest.approx(TWO_PI * 25e3)
        assert run.spec.pump.pulse_area == pytest.approx(np.pi / 2)
        assert p.mean_atoms == pytest.approx(6.8)

    def test_all_shipped_presets_parse(self):
        for name, scenario in (
            ("barium-cavity.cfg", "superradiance"),
            ("timetrace-n6p8.cfg", "superabsorb"),
            ("aperture-n2p7.cfg", "aperture-scan"),
            ("scaling-t280.cfg", "scaling"),
        ):
            run = parse_config(PRESETS / name, scenario)
            assert run.scenario == scenario

    def test_empty_file_lists_required_keys(self, tmp_path):
        path = write_cfg(tmp_path, "\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path, "superabsorb")
        for key in ("n_atoms", "coupling", "pulse_area", "duration", "initial_photons"):
            assert key in str(err.value)

    def test_negative_rate_names_field(self, tmp_path):
        path = write_cfg(tmp_path, MINIMAL + "cavity_rate = -2pi*10kHz\n")
        with pytest.raises(ConfigError, match="cavity_rate"):
            parse_config(path, "superradiance")

    def test_unknown_scenario_rejected(self, tmp_path):
        path = write_cfg(tmp_path, MINIMAL)
        with pytest.raises(ConfigError, match="unknown scenario"):
            parse_config(path, "frobnicate")

    def test_unknown_key_rejected(self, tmp_path):
        path = write_cfg(tmp_path, MINIMAL + "volume = 11\n")
        with pytest.raises(ConfigError, match="volume"):
            parse_config(path, "superradiance")

    def test_vacuum_scenarios_reject_photons(self, tmp_path):
        path = write_cfg(tmp_path, MINIMAL + "initial_photons = 1.0\n")
        with pytest.raises(ConfigError, match="vacuum"):
            parse_config(path, "superradiance")

    def test_oracle_scenario_caps_atoms(self, tmp_path):
        path = write_cfg(tmp_path, MINIMAL.replace("n_atoms = 2", "n_atoms = 5"))
        with pytest.raises(ConfigError, match="oracle"):
            parse_config(path, "oracle-check")

    def test_round_trip_through_resolved_echo(self, tmp_path):
        run = parse_config(PRESETS / "timetrace-n6p8.cfg", "superabsorb")
        echoed = write_cfg(tmp_path, config_text(run.resolved), "echo.cfg")
        again = parse_config(echoed, "superabsorb")
        a, b = run.spec, again.spec
        assert a.params.n_atoms == b.params.n_atoms
        assert a.params.coupling == pytest.approx(b.params.coupling, rel=1e-12)
        assert a.params.cavity_rate == pytest.approx(b.params.cavity_rate, rel=1e-12)
        assert a.pump.pulse_area == pytest.approx(b.pump.pulse_area, rel=1e-12)
        assert a.duration == pytest.approx(b.duration, rel=1e-12)
        assert a.initial_photons == pytest.approx(b.initial_photons, rel=1e-12)
        assert a.pump_off_at == pytest.approx(b.pump_off_at, rel=1e-12)


FAST_RUN = """
n_atoms = 2
coupling = 2pi*100kHz
pulse_area = 0.5pi
duration = 200ns
samples = 21
fock_cutoff = 6
"""


class TestCliRuns:
    def test_superradiance_csv_layout(self, tmp_path):
        cfg = write_cfg(tmp_path, FAST_RUN)
        out = tmp_path / "out"
        assert main(["superradiance", "--config", cfg, "--out", str(out)]) == 0
        header = (out / "series.csv").read_text().splitlines()[0]
        assert header == "t_ns,mean_n,mean_Jz,re_mean_a,im_mean_a,trace,tail"
        meta = json.loads((out / "meta.json").read_text())
        assert meta["schema_version"] == "1"
        assert "wall_time_s" in meta
        summary = json.loads((out / "summary.json").read_text())
        assert summary["peak_mean_n"] > 0

    def test_metadata_reparses_to_equivalent_spec(self, tmp_path):
        cfg = write_cfg(tmp_path, FAST_RUN)
        out = tmp_path / "out"
        main(["superradiance", "--config", cfg, "--out", str(out)])
        meta = json.loads((out / "meta.json").read_text())
        again = spec_from_meta(meta)
        original = parse_config(cfg, "superradiance")
        assert again.spec.params.n_atoms == original.spec.params.n_atoms
        assert again.spec.duration == pytest.approx(original.spec.duration, rel=1e-12)
        assert again.spec.params.coupling == pytest.approx(
            original.spec.params.coupling, rel=1e-12
        )

    def test_json_format_bundle(self, tmp_path):
        cfg = write_cfg(tmp_path, FAST_RUN)
        out = tmp_path / "out"
        assert main(["superradiance", "--config", cfg, "--out", str(out),
                     "--format", "json"]) == 0
        payload = json.loads((out / "run.json").read_text())
        assert set(payload) == {"meta", "series", "summary"}
        assert set(payload["series"]) == {
            "t_ns", "mean_n", "mean_Jz", "re_mean_a", "im_mean_a", "trace", "tail"
        }

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_cfg(tmp_path, FAST_RUN + "coupling_spread = 0.1\nmc_samples = 6\n")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["superradiance", "--config", cfg, "--out", str(out1), "--seed", "7"])
        main(["superradiance", "--config", cfg, "--out", str(out2), "--seed", "7"])
        assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()

    def test_scaling_emits_per_atom_rows_and_fit(self, tmp_path):
        cfg = write_cfg(tmp_path, """
n_atoms = 2
coupling = 2pi*100kHz
pulse_area = 0.5
t_window = 600ns
atom_numbers = 2,3,4
samples = 121
fock_cutoff = 12
""")
        out = tmp_path / "out"
        assert main(["scaling", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "series.csv").read_text().splitlines()
        assert lines[0] == "n_atoms,n_input,turning_time_ns,n_absorbed,ratio"
        assert len(lines) == 4
        summary = json.loads((out / "summary.json").read_text())
        assert {"exponent", "stderr_q", "prefactor", "r_squared"} <= set(summary)

    def test_reversal_check_exit_status(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            FAST_RUN.replace("fock_cutoff = 6", "fock_cutoff = 12") + "reversal_time = 500ns\n",
        )
        out = tmp_path / "out"
        assert main(["reversal-check", "--config", cfg, "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["passed"] is True
        assert summary["exact_final_mean_n"] < 1e-6

    def test_oracle_check_exit_status(self, tmp_path):
        cfg = write_cfg(tmp_path, FAST_RUN)
        out = tmp_path / "out"
        assert main(["oracle-check", "--config", cfg, "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["max_dev_mean_n"] < 1e-10

    def test_config_error_exits_2(self, tmp_path):
        cfg = write_cfg(tmp_path, "n_atoms = 2\n")
        assert main(["superabsorb", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_module_failure_writes_error_record(self, tmp_path):
        # a cutoff far too small for the requested field trips the guard
        cfg = write_cfg(tmp_path, """
n_atoms = 2
coupling = 2pi*100kHz
pulse_area = 0.5pi
duration = 200ns
samples = 21
fock_cutoff = 18
initial_photons = 1.0
atomic_decay = off
""".replace("fock_cutoff = 18", "fock_cutoff = 17"))
        # initial_photons = 1 needs cutoff 17, so force failure differently:
        # a pumped ordinary-absorption run is a contract violation
        out = tmp_path / "out"
        status = main(["ordinary", "--config", cfg, "--out", str(out)])
        assert status == 1
        record = json.loads((out / "error.json").read_text())
        assert record["error_type"] == "ScenarioError"
