"""Tests für INI-Konfiguration, Schemas und Overrides."""
from pathlib import Path

import pytest

from sb_ising.config import (
    BenchConfig,
    SweepGrid,
    apply_overrides,
    build_config,
    load_config,
)
from sb_ising.const import (
    DEFAULT_THRESHOLDS,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    ENGINE_HARDWARE,
    ENGINE_IDEAL,
    ENV_WORKERS,
)
from sb_ising.exceptions import ValidationError
from sb_ising.hw_model import HwConfig, NoiseDacConfig, NoiseTopology
from sb_ising.sb_solver import NoiseKind, NoiseSchedule, SbParams


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "bench.ini"
    path.write_text(text, encoding="utf-8")
    return path


class TestDefaults:
    def test_no_file(self):
        config = load_config(None)
        assert config.engine == ENGINE_IDEAL
        assert config.trials == DEFAULT_TRIALS
        assert config.thresholds == DEFAULT_THRESHOLDS
        assert config.workers == DEFAULT_WORKERS
        assert config.sb == SbParams()
        assert config.noise.kind is NoiseKind.DECAYING

    def test_example_file_matches_defaults(self):
        """docs/bench.example.ini dokumentiert genau die Standardwerte."""
        config = load_config(Path(__file__).parents[1] / "docs" / "bench.example.ini")
        assert config.sb == SbParams()
        assert config.noise == NoiseSchedule()
        assert config.hardware == HwConfig()
        assert config.dac == NoiseDacConfig()
        assert config.trials == DEFAULT_TRIALS
        assert config.thresholds == DEFAULT_THRESHOLDS
        assert config.grid.betas == (0.05, 0.1, 0.15, 0.2)

    def test_empty_sections(self):
        assert build_config({}) == build_config({"bench": {}, "sb": {}})


class TestLoadConfig:
    def test_full_file(self, tmp_path):
        path = _write(tmp_path, """
[bench]
engine = hardware
instances = data
trials = 20
thresholds = 0.9, 0.95
seed = 17
output = results

[sb]
alpha = 1.2
beta = 0.4
iterations = 50
beta_grid = 0.3 0.4 0.5

[noise]
kind = uniform-constant
amplitude0 = 0.8

[hardware]
sigma_cell = 0.02
chip_seed = 3

[dac]
topology = per-column-magnitude
branch_doubling = false

[local_search]
restarts = 200
""")
        config = load_config(path)
        assert config.engine == ENGINE_HARDWARE
        assert config.instances == (tmp_path / "data",)
        assert config.output == tmp_path / "results"
        assert config.trials == 20
        assert config.thresholds == (0.9, 0.95)
        assert config.seed == 17
        assert config.sb == SbParams(alpha=1.2, beta=0.4, iterations=50)
        assert config.iterations == 50
        assert config.noise == NoiseSchedule(kind=NoiseKind.CONSTANT, amplitude0=0.8)
        assert config.hardware.sigma_cell == 0.02
        assert config.hardware.chip_seed == 3
        assert config.dac.topology is NoiseTopology.PER_COLUMN
        assert not config.dac.branch_doubling
        assert config.local_search.restarts == 200
        assert config.local_search.provenance == "local-search(restarts=200)"
        assert config.grid.betas == (0.3, 0.4, 0.5)

    def test_absolute_output_kept(self, tmp_path):
        target = tmp_path / "abs"
        path = _write(tmp_path, f"[bench]\noutput = {target}\n")
        assert load_config(path).output == target

    def test_percent_sign_allowed(self, tmp_path):
        path = _write(tmp_path, "[bench]\noutput = out%1\n")
        assert load_config(path).output.name == "out%1"

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / "fehlt.ini")

    def test_malformed_file(self, tmp_path):
        path = _write(tmp_path, "kein abschnitt\n")
        with pytest.raises(ValidationError, match="nicht lesbar"):
            load_config(path)

    def test_bias_voltages(self, tmp_path):
        path = _write(tmp_path, "[hardware]\nv_bias_fb_volts = 0.8\nv_bias_c_volts = 0.8\n")
        config = load_config(path)
        assert config.hardware.i_fb_amperes / config.hardware.i_c_amperes == pytest.approx(6.0)


class TestValidation:
    @pytest.mark.parametrize(
        "sections, fragment",
        [
            ({"bench": {"engine": "quantum"}}, "bench.engine"),
            ({"bench": {"trials": "0"}}, "bench.trials"),
            ({"bench": {"thresholds": "0.9, 1.5"}}, "bench.thresholds"),
            ({"bench": {"seed": "-1"}}, "bench.seed"),
            ({"sb": {"alpha": "0"}}, "sb.alpha"),
            ({"sb": {"iterations": "abc"}}, "sb.iterations"),
            ({"noise": {"kind": "gaussian"}}, "noise.kind"),
            ({"dac": {"prbs_width": "20"}}, "dac.prbs_width"),
            ({"dac": {"branch_doubling": "vielleicht"}}, "dac.branch_doubling"),
            ({"hardware": {"c_bl_farads": "-1"}}, "hardware.c_bl_farads"),
            ({"bench": {"unbekannt": "1"}}, "bench.unbekannt"),
        ],
    )
    def test_error_names_key(self, sections, fragment):
        with pytest.raises(ValidationError, match=fragment.replace(".", r"\.")):
            build_config(sections)

    def test_unknown_section(self):
        with pytest.raises(ValidationError, match="Unbekannter Abschnitt"):
            build_config({"plot": {}})

    def test_bias_needs_both(self):
        with pytest.raises(ValidationError, match="gemeinsam"):
            build_config({"hardware": {"v_bias_fb_volts": "0.8"}})

    def test_bias_excludes_currents(self):
        with pytest.raises(ValidationError, match="schließen sich aus"):
            build_config({"hardware": {
                "v_bias_fb_volts": "0.8", "v_bias_c_volts": "0.8", "i_c_amperes": "1e-6",
            }})

    def test_invariant_errors_name_section(self):
        with pytest.raises(ValidationError, match="^hardware:"):
            build_config({"hardware": {"v_bias_fb_volts": "2.0", "v_bias_c_volts": "0.8"}})

    def test_dataclass_rejects_bad_engine(self):
        with pytest.raises(ValidationError):
            BenchConfig(engine="analog")


class TestOverrides:
    def test_cli_flags_win(self):
        config = apply_overrides(
            load_config(None),
            seed=5, output="x", engine=ENGINE_HARDWARE, trials=3, iterations=7, environ={},
        )
        assert (config.seed, config.trials, config.iterations) == (5, 3, 7)
        assert config.output == Path("x")
        assert config.engine == ENGINE_HARDWARE

    def test_nothing_to_override(self):
        config = load_config(None)
        assert apply_overrides(config, environ={}) is config

    def test_workers_from_environment(self):
        config = apply_overrides(load_config(None), environ={ENV_WORKERS: "3"})
        assert config.workers == 3

    def test_workers_not_integer(self):
        with pytest.raises(ValidationError, match=ENV_WORKERS):
            apply_overrides(load_config(None), environ={ENV_WORKERS: "viele"})

    def test_workers_must_be_positive(self):
        with pytest.raises(ValidationError):
            apply_overrides(load_config(None), environ={ENV_WORKERS: "0"})

    def test_iterations_validated(self):
        with pytest.raises(ValidationError, match="--iterations"):
            apply_overrides(load_config(None), iterations=0, environ={})

    def test_seed_range(self):
        with pytest.raises(ValidationError, match="--seed"):
            apply_overrides(load_config(None), seed=2**64, environ={})


class TestSweepGrid:
    def test_empty_grid_is_base_point(self):
        sb = SbParams(alpha=1.0, beta=0.5)
        noise = NoiseSchedule(amplitude0=1.5, decay_rate=0.25)
        assert SweepGrid().points(sb, noise) == [(1.0, 0.5, 1.5, 0.25)]

    def test_cartesian_order(self):
        grid = SweepGrid(alphas=(1.0, 2.0), betas=(0.1, 0.2))
        points = grid.points(SbParams(), NoiseSchedule(amplitude0=1.0, decay_rate=0.0))
        assert points == [
            (1.0, 0.1, 1.0, 0.0),
            (1.0, 0.2, 1.0, 0.0),
            (2.0, 0.1, 1.0, 0.0),
            (2.0, 0.2, 1.0, 0.0),
        ]
