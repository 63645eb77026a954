"""Benchmark-Konfiguration: INI-Datei, voluptuous-Schemas und CLI-Overrides."""
from __future__ import annotations

import configparser
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping

import voluptuous as vol

from .baselines import GwParams, LocalSearchParams
from .const import (
    CONF_ALPHA,
    CONF_ALPHA_GRID,
    CONF_AMPLITUDE,
    CONF_AMPLITUDE_GRID,
    CONF_BETA,
    CONF_BETA_GRID,
    CONF_COUNT,
    CONF_DECAY_GRID,
    CONF_DECAY_RATE,
    CONF_DENSITY,
    CONF_ENGINE,
    CONF_INSTANCES,
    CONF_ITERATIONS,
    CONF_LEVELS,
    CONF_NODES,
    CONF_NOISE_KIND,
    CONF_OUTPUT,
    CONF_SEED,
    CONF_TARGET_ACCURACY,
    CONF_THRESHOLDS,
    CONF_TRIALS,
    DEFAULT_ALPHA,
    DEFAULT_AMPLITUDE,
    DEFAULT_BETA,
    DEFAULT_DECAY_RATE,
    DEFAULT_DENSITY,
    DEFAULT_GW_MAX_ITERS,
    DEFAULT_GW_ROUNDINGS,
    DEFAULT_GW_STEP,
    DEFAULT_ITERATIONS,
    DEFAULT_LEVELS,
    DEFAULT_LS_RESTARTS,
    DEFAULT_NODES,
    DEFAULT_TARGET_ACCURACY,
    DEFAULT_THRESHOLDS,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    ENGINE_IDEAL,
    ENGINES,
    ENV_WORKERS,
    INSTANCE_SUFFIX,
    SECTION_BENCH,
    SECTION_DAC,
    SECTION_GW,
    SECTION_HARDWARE,
    SECTION_LOCAL_SEARCH,
    SECTION_NOISE,
    SECTION_SB,
)
from .exceptions import ValidationError
from .hw_model import HwConfig, NoiseDacConfig, NoiseTopology, config_from_bias
from .ising_core import SEED_MAX
from .sb_solver import NoiseKind, NoiseSchedule, SbParams

_LOGGER = logging.getLogger(__name__)

SECTIONS = (
    SECTION_BENCH,
    SECTION_SB,
    SECTION_NOISE,
    SECTION_HARDWARE,
    SECTION_DAC,
    SECTION_GW,
    SECTION_LOCAL_SEARCH,
)


# ============================================================================
# Validatoren
# ============================================================================


def _boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise vol.Invalid(f"kein Wahrheitswert: '{value}'")


def _float_list(value: Any) -> tuple[float, ...]:
    """Komma- oder leerzeichengetrennte Zahlenliste."""
    if isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [v for v in str(value).replace(",", " ").split() if v]
    if not items:
        raise vol.Invalid("leere Liste")
    try:
        return tuple(float(v) for v in items)
    except ValueError as err:
        raise vol.Invalid(f"keine Zahlenliste: '{value}'") from err


def _thresholds(values: tuple[float, ...]) -> tuple[float, ...]:
    for tau in values:
        if not 0.0 <= tau <= 1.0:
            raise vol.Invalid(f"Schwelle {tau} außerhalb [0,1]")
    return values


def _path_list(value: Any) -> tuple[str, ...]:
    return tuple(v for v in str(value).replace(",", " ").split() if v)


_SEED = vol.All(vol.Coerce(int), vol.Range(min=0, max=SEED_MAX))
_POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
_NON_NEGATIVE = vol.All(vol.Coerce(float), vol.Range(min=0))

BENCH_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_ENGINE, default=ENGINE_IDEAL): vol.In(ENGINES),
        vol.Optional(CONF_INSTANCES, default=""): _path_list,
        vol.Optional(CONF_NODES, default=DEFAULT_NODES): vol.All(
            vol.Coerce(int), vol.Range(min=2)
        ),
        vol.Optional(CONF_DENSITY, default=DEFAULT_DENSITY): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=1, min_included=False)
        ),
        vol.Optional(CONF_COUNT, default=10): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_SEED, default=0): _SEED,
        vol.Optional(CONF_TRIALS, default=DEFAULT_TRIALS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_THRESHOLDS, default=DEFAULT_THRESHOLDS): vol.All(
            _float_list, _thresholds
        ),
        vol.Optional(CONF_TARGET_ACCURACY, default=DEFAULT_TARGET_ACCURACY): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=1, min_included=False)
        ),
        vol.Optional(CONF_OUTPUT, default="out"): str,
        vol.Optional("workers", default=DEFAULT_WORKERS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
    }
)

SB_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_ALPHA, default=DEFAULT_ALPHA): _POSITIVE,
        vol.Optional(CONF_BETA, default=DEFAULT_BETA): _NON_NEGATIVE,
        vol.Optional(CONF_ITERATIONS, default=DEFAULT_ITERATIONS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_ALPHA_GRID): _float_list,
        vol.Optional(CONF_BETA_GRID): _float_list,
    }
)

NOISE_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_NOISE_KIND, default=NoiseKind.DECAYING.value): vol.In(
            [k.value for k in NoiseKind]
        ),
        vol.Optional(CONF_AMPLITUDE, default=DEFAULT_AMPLITUDE): _NON_NEGATIVE,
        vol.Optional(CONF_DECAY_RATE, default=DEFAULT_DECAY_RATE): _NON_NEGATIVE,
        vol.Optional(CONF_LEVELS, default=DEFAULT_LEVELS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_AMPLITUDE_GRID): _float_list,
        vol.Optional(CONF_DECAY_GRID): _float_list,
    }
)

HARDWARE_SCHEMA = vol.Schema(
    {
        vol.Optional("i_fb_amperes"): _POSITIVE,
        vol.Optional("i_c_amperes"): _POSITIVE,
        vol.Optional("v_bias_fb_volts"): _POSITIVE,
        vol.Optional("v_bias_c_volts"): _POSITIVE,
        vol.Optional("c_bl_farads"): _POSITIVE,
        vol.Optional("t_pulse_seconds"): _POSITIVE,
        vol.Optional("v_precharge_volts"): _POSITIVE,
        vol.Optional("sigma_cell"): _NON_NEGATIVE,
        vol.Optional("i_leak_amperes"): _NON_NEGATIVE,
        vol.Optional("clock_hz"): _POSITIVE,
        vol.Optional("cycles_per_iteration"): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional("sigma_offset_volts"): _NON_NEGATIVE,
        vol.Optional("trim_lsb_volts"): _NON_NEGATIVE,
        vol.Optional("chip_seed"): _SEED,
    }
)

DAC_SCHEMA = vol.Schema(
    {
        vol.Optional("i_ref_amperes"): _POSITIVE,
        vol.Optional("mirror_bits"): vol.All(vol.Coerce(int), vol.Range(min=1, max=8)),
        vol.Optional("decay_bits"): vol.All(vol.Coerce(int), vol.Range(min=1, max=16)),
        vol.Optional("counter_bits"): vol.All(vol.Coerce(int), vol.Range(min=1, max=32)),
        vol.Optional("decay_rate"): _NON_NEGATIVE,
        vol.Optional("branch_doubling"): _boolean,
        vol.Optional("branch_ratio"): _NON_NEGATIVE,
        vol.Optional("noise_mirror_ratio"): _POSITIVE,
        vol.Optional("topology"): vol.In([t.value for t in NoiseTopology]),
        vol.Optional("enabled"): _boolean,
        vol.Optional("prbs_width"): vol.All(vol.Coerce(int), vol.In([16, 23, 31])),
    }
)

GW_SCHEMA = vol.Schema(
    {
        vol.Optional("rank"): vol.All(vol.Coerce(int), vol.Range(min=2)),
        vol.Optional("max_iters", default=DEFAULT_GW_MAX_ITERS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional("step_size", default=DEFAULT_GW_STEP): _POSITIVE,
        vol.Optional("roundings", default=DEFAULT_GW_ROUNDINGS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_SEED, default=0): _SEED,
    }
)

LOCAL_SEARCH_SCHEMA = vol.Schema(
    {
        vol.Optional("restarts", default=DEFAULT_LS_RESTARTS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional("max_flips"): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional(CONF_SEED, default=0): _SEED,
    }
)

SCHEMAS: dict[str, vol.Schema] = {
    SECTION_BENCH: BENCH_SCHEMA,
    SECTION_SB: SB_SCHEMA,
    SECTION_NOISE: NOISE_SCHEMA,
    SECTION_HARDWARE: HARDWARE_SCHEMA,
    SECTION_DAC: DAC_SCHEMA,
    SECTION_GW: GW_SCHEMA,
    SECTION_LOCAL_SEARCH: LOCAL_SEARCH_SCHEMA,
}


# ============================================================================
# Konfigurationsobjekte
# ============================================================================


@dataclass(frozen=True)
class SweepGrid:
    """Parametergitter; leere Achsen übernehmen den Basiswert."""

    alphas: tuple[float, ...] = ()
    betas: tuple[float, ...] = ()
    amplitudes: tuple[float, ...] = ()
    decay_rates: tuple[float, ...] = ()

    def points(self, sb: SbParams, noise: NoiseSchedule) -> list[tuple[float, float, float, float]]:
        """Alle Gitterpunkte (α, β, A_0, decay) in fester Reihenfolge."""
        alphas = self.alphas or (sb.alpha,)
        betas = self.betas or (sb.beta,)
        amplitudes = self.amplitudes or (noise.amplitude0,)
        decays = self.decay_rates or (noise.decay_rate,)
        return [
            (a, b, amp, d)
            for a in alphas
            for b in betas
            for amp in amplitudes
            for d in decays
        ]


@dataclass(frozen=True)
class BenchConfig:
    """Vollständige, validierte Lauf-Konfiguration."""

    engine: str = ENGINE_IDEAL
    instances: tuple[Path, ...] = ()
    nodes: int = DEFAULT_NODES
    density: float = DEFAULT_DENSITY
    count: int = 10
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    target_accuracy: float = DEFAULT_TARGET_ACCURACY
    output: Path = Path("out")
    workers: int = DEFAULT_WORKERS
    sb: SbParams = field(default_factory=SbParams)
    noise: NoiseSchedule = field(default_factory=NoiseSchedule)
    hardware: HwConfig = field(default_factory=HwConfig)
    dac: NoiseDacConfig = field(default_factory=NoiseDacConfig)
    gw: GwParams = field(default_factory=GwParams)
    local_search: LocalSearchParams = field(default_factory=LocalSearchParams)
    grid: SweepGrid = field(default_factory=SweepGrid)

    def __post_init__(self) -> None:
        if self.engine not in ENGINES:
            raise ValidationError(f"bench.engine: unbekannte Engine '{self.engine}'")
        if self.trials < 1:
            raise ValidationError(f"bench.trials: muss >= 1 sein, ist {self.trials}")
        if self.workers < 1:
            raise ValidationError(f"bench.workers: muss >= 1 sein, ist {self.workers}")
        for tau in self.thresholds:
            if not 0.0 <= tau <= 1.0:
                raise ValidationError(f"bench.thresholds: {tau} außerhalb [0,1]")

    @property
    def iterations(self) -> int:
        return self.sb.iterations

    def resolve_instances(self) -> list[Path]:
        """Expandiert Verzeichnisse zu sortierten *.ising-Dateien."""
        paths: list[Path] = []
        for entry in self.instances:
            if entry.is_dir():
                paths.extend(sorted(entry.glob(f"*{INSTANCE_SUFFIX}")))
            else:
                paths.append(entry)
        return paths


def _validate_section(section: str, raw: Mapping[str, Any]) -> dict[str, Any]:
    """Schema-Prüfung eines Abschnitts; Fehler nennen section.key."""
    try:
        return SCHEMAS[section](dict(raw))
    except vol.MultipleInvalid as err:
        first = err.errors[0]
        key = ".".join(str(p) for p in first.path) or "?"
        raise ValidationError(f"{section}.{key}: {first.msg}") from err


def _build(section: str, factory: Callable[..., Any], values: dict[str, Any]) -> Any:
    """Erzeugt ein Konfigurationsobjekt; Invarianten-Fehler erhalten den Abschnitt."""
    try:
        return factory(**values)
    except ValidationError as err:
        raise ValidationError(f"{section}: {err}") from err


def build_config(
    sections: Mapping[str, Mapping[str, Any]], base_dir: Path | None = None
) -> BenchConfig:
    """Baut eine BenchConfig aus bereits eingelesenen Abschnitten."""
    unknown = sorted(set(sections) - set(SECTIONS))
    if unknown:
        raise ValidationError(f"Unbekannter Abschnitt [{unknown[0]}]")
    data = {name: _validate_section(name, sections.get(name, {})) for name in SECTIONS}
    base = base_dir or Path(".")

    bench = data[SECTION_BENCH]
    sb = data[SECTION_SB]
    noise = data[SECTION_NOISE]

    hardware = dict(data[SECTION_HARDWARE])
    v_fb = hardware.pop("v_bias_fb_volts", None)
    v_c = hardware.pop("v_bias_c_volts", None)
    if (v_fb is None) != (v_c is None):
        raise ValidationError("hardware: v_bias_fb_volts und v_bias_c_volts nur gemeinsam")
    if v_fb is not None:
        if "i_fb_amperes" in hardware or "i_c_amperes" in hardware:
            raise ValidationError("hardware: Bias-Spannungen und Zellströme schließen sich aus")
        hw_cfg = _build(SECTION_HARDWARE, config_from_bias, {
            "v_bias_fb": v_fb, "v_bias_c": v_c, **hardware,
        })
    else:
        hw_cfg = _build(SECTION_HARDWARE, HwConfig, hardware)

    output = Path(bench[CONF_OUTPUT])
    return BenchConfig(
        engine=bench[CONF_ENGINE],
        instances=tuple(base / p for p in bench[CONF_INSTANCES]),
        nodes=bench[CONF_NODES],
        density=bench[CONF_DENSITY],
        count=bench[CONF_COUNT],
        seed=bench[CONF_SEED],
        trials=bench[CONF_TRIALS],
        thresholds=tuple(bench[CONF_THRESHOLDS]),
        target_accuracy=bench[CONF_TARGET_ACCURACY],
        output=output if output.is_absolute() else base / output,
        workers=bench["workers"],
        sb=_build(SECTION_SB, SbParams, {
            "alpha": sb[CONF_ALPHA],
            "beta": sb[CONF_BETA],
            "iterations": sb[CONF_ITERATIONS],
        }),
        noise=_build(SECTION_NOISE, NoiseSchedule, {
            "kind": noise[CONF_NOISE_KIND],
            "amplitude0": noise[CONF_AMPLITUDE],
            "decay_rate": noise[CONF_DECAY_RATE],
            "levels": noise[CONF_LEVELS],
        }),
        hardware=hw_cfg,
        dac=_build(SECTION_DAC, NoiseDacConfig, data[SECTION_DAC]),
        gw=_build(SECTION_GW, GwParams, data[SECTION_GW]),
        local_search=_build(SECTION_LOCAL_SEARCH, LocalSearchParams, data[SECTION_LOCAL_SEARCH]),
        grid=SweepGrid(
            alphas=sb.get(CONF_ALPHA_GRID, ()),
            betas=sb.get(CONF_BETA_GRID, ()),
            amplitudes=noise.get(CONF_AMPLITUDE_GRID, ()),
            decay_rates=noise.get(CONF_DECAY_GRID, ()),
        ),
    )


def load_config(path: str | Path | None) -> BenchConfig:
    """Liest eine INI-Datei; ohne Pfad gelten alle Standardwerte.

    Relative Pfade (instances, output) beziehen sich auf das Verzeichnis der Datei.
    """
    if path is None:
        return build_config({})
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as err:
        raise ValidationError(f"Konfigurationsdatei {path} nicht lesbar: {err}") from err
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    _LOGGER.debug("Konfiguration %s geladen: %s", path, ", ".join(sections))
    return build_config(sections, base_dir=path.parent)


def apply_overrides(
    config: BenchConfig,
    *,
    seed: int | None = None,
    output: str | Path | None = None,
    engine: str | None = None,
    trials: int | None = None,
    iterations: int | None = None,
    environ: Mapping[str, str] | None = None,
) -> BenchConfig:
    """CLI-Flags und SB_ISING_WORKERS überschreiben Dateiwerte."""
    changes: dict[str, Any] = {}
    if seed is not None:
        if not 0 <= seed <= SEED_MAX:
            raise ValidationError(f"--seed: {seed} außerhalb 0..2^64-1")
        changes["seed"] = seed
    if output is not None:
        changes["output"] = Path(output)
    if engine is not None:
        changes["engine"] = engine
    if trials is not None:
        changes["trials"] = trials
    if iterations is not None:
        changes["sb"] = _replace_iterations(config.sb, iterations)

    env = os.environ if environ is None else environ
    raw_workers = env.get(ENV_WORKERS)
    if raw_workers:
        try:
            changes["workers"] = int(raw_workers)
        except ValueError:
            raise ValidationError(
                f"{ENV_WORKERS}: keine Ganzzahl: '{raw_workers}'"
            ) from None
    return replace(config, **changes) if changes else config


def _replace_iterations(sb: SbParams, iterations: int) -> SbParams:
    try:
        return replace(sb, iterations=iterations)
    except ValidationError as err:
        raise ValidationError(f"--iterations: {err}") from err
