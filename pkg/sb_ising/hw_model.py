"""
Verhaltensmodell des SRAM-CIM-SB-Chips.

Eine Iteration läuft in cycles_per_iteration Takten:

  1. Wordline-Pulse (t_pulse) aktivieren C- und FB-Zellen; jede aktive Zelle
     zieht einen konstanten Strom aus BL oder BLB ihrer Spalte.
  2. Die Rausch-DAC speist pro Spalte einen PRBS-gesteuerten Strom ein
     (Vorzeichen wählt BL/BLB, Betrag über binär gewichtete Spiegelzweige,
     Abklingen über zusätzlich zugeschaltete Widerstandszweige).
  3. Die vorgeladenen Bitleitungen (c_bl) entladen linear, ein Strong-Arm-
     Komparator je Spalte entscheidet den neuen Spin.

Vorzeichen: v_bl − v_blb = (i_blb − i_bl)·t/c = t/c·(i_fb·x_n − i_c·(J·x)_n),
also mit α = i_fb·t/c und β = i_c·t/c genau die ideale Iteration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import numpy.typing as npt

from .exceptions import ValidationError
from .ising_core import CouplingMatrix, ProblemInstance, SpinVector, cut_size, validate_spins
from .sb_solver import NoiseKind, NoiseSchedule, SbParams, TrialResult, random_spins

_LOGGER = logging.getLogger(__name__)

# ============================================================================
# Schaltungskonstanten
# ============================================================================

DEFAULT_I_FB = 10.0e-6         # FB-Zellstrom [A], α/β = 10
DEFAULT_I_C = 1.0e-6           # C-Zellstrom [A]
DEFAULT_C_BL = 200e-15         # Bitleitungskapazität [F]
DEFAULT_T_PULSE = 4e-9         # WL-Pulsbreite [s]
DEFAULT_V_PRECHARGE = 1.8      # Vorladespannung = VDD [V]
DEFAULT_CLOCK_HZ = 100e6
DEFAULT_CYCLES_PER_ITERATION = 3
DEFAULT_SIGMA_OFFSET = 5e-3    # Komparator-Offset σ [V]
DEFAULT_TRIM_LSB = 1e-3        # Kalibrier-LSB [V]

# Quadratgesetz-Steilheit der Biastransistoren [A/V²]; 0.57 V / 0.85 V → 10 µA / 1 µA
DEFAULT_K_FB = 6.6e-6
DEFAULT_K_C = 1.1e-6

DEFAULT_I_REF = 300e-6         # DAC-Referenzstrom [A]
DEFAULT_NOISE_MIRROR_RATIO = 0.1
DEFAULT_BRANCH_RATIO = 1 / 64  # Leitwert Zweig 0 / Grundleitwert
DEFAULT_DECAY_CODES_PER_ITERATION = 1.0

MISMATCH_FLOOR = 1e-3

# Galois-Masken maximaler Länge (Rechtsschieben, Bit w−1 … 0)
MAXIMAL_TAPS: dict[int, int] = {
    16: 0xB400,      # x^16 + x^14 + x^13 + x^11 + 1
    23: 0x420000,    # x^23 + x^18 + 1
    31: 0x48000000,  # x^31 + x^28 + 1
}


class NoiseTopology(str, Enum):
    """Ein DAC-Betrag für alle Spalten oder je Spalte ein eigener."""
    SHARED = "shared-magnitude"
    PER_COLUMN = "per-column-magnitude"


class BiasPolarity(str, Enum):
    """SOURCE: Bias an der Source (Strom steigt mit sinkender Spannung)."""
    SOURCE = "source"
    GATE = "gate"


# ============================================================================
# Konfiguration
# ============================================================================


@dataclass(frozen=True)
class HwConfig:
    """Physikalische Parameter des Arrays (SI-Einheiten im Feldnamen)."""

    i_fb_amperes: float = DEFAULT_I_FB
    i_c_amperes: float = DEFAULT_I_C
    c_bl_farads: float = DEFAULT_C_BL
    t_pulse_seconds: float = DEFAULT_T_PULSE
    v_precharge_volts: float = DEFAULT_V_PRECHARGE
    sigma_cell: float = 0.0
    i_leak_amperes: float = 0.0
    clock_hz: float = DEFAULT_CLOCK_HZ
    cycles_per_iteration: int = DEFAULT_CYCLES_PER_ITERATION
    sigma_offset_volts: float = DEFAULT_SIGMA_OFFSET
    trim_lsb_volts: float = DEFAULT_TRIM_LSB
    chip_seed: int = 0

    def __post_init__(self) -> None:
        for name in (
            "i_fb_amperes", "i_c_amperes", "c_bl_farads", "t_pulse_seconds",
            "v_precharge_volts", "clock_hz",
        ):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} muss > 0 sein, ist {getattr(self, name)}")
        for name in ("sigma_cell", "i_leak_amperes", "sigma_offset_volts", "trim_lsb_volts"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} muss >= 0 sein, ist {getattr(self, name)}")
        if self.cycles_per_iteration < 1:
            raise ValidationError(
                f"cycles_per_iteration muss >= 1 sein, ist {self.cycles_per_iteration}"
            )

    def volts(self, current: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
        """Linearer Entladehub ΔV = I·t/C ohne Klemmung."""
        return np.asarray(current) * self.t_pulse_seconds / self.c_bl_farads

    def check_headroom(self, n: int) -> None:
        """Prüft t·(i_fb + n·i_c)/c ≤ v_precharge (keine Entladung unter Masse)."""
        worst = float(self.volts(self.i_fb_amperes + n * self.i_c_amperes))
        if worst > self.v_precharge_volts:
            raise ValidationError(
                f"Bitleitung entlädt im Worst Case um {worst:.3f} V "
                f"> v_precharge {self.v_precharge_volts} V (n={n})"
            )


@dataclass(frozen=True)
class NoiseDacConfig:
    """Rausch-DAC: PRBS-gesteuerte Spiegelzweige plus Abkling-Widerstandsnetz."""

    i_ref_amperes: float = DEFAULT_I_REF
    mirror_bits: int = 4
    decay_bits: int = 8
    counter_bits: int = 12
    decay_rate: float = DEFAULT_DECAY_CODES_PER_ITERATION
    branch_doubling: bool = True
    branch_ratio: float = DEFAULT_BRANCH_RATIO
    noise_mirror_ratio: float = DEFAULT_NOISE_MIRROR_RATIO
    topology: NoiseTopology = NoiseTopology.SHARED
    enabled: bool = True
    prbs_width: int = 16

    def __post_init__(self) -> None:
        object.__setattr__(self, "topology", NoiseTopology(self.topology))
        if not self.i_ref_amperes > 0:
            raise ValidationError(f"i_ref_amperes muss > 0 sein, ist {self.i_ref_amperes}")
        for name in ("mirror_bits", "decay_bits", "counter_bits"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} muss >= 1 sein, ist {getattr(self, name)}")
        if self.decay_rate < 0 or self.branch_ratio < 0:
            raise ValidationError("decay_rate und branch_ratio müssen >= 0 sein")
        if not self.noise_mirror_ratio > 0:
            raise ValidationError(
                f"noise_mirror_ratio muss > 0 sein, ist {self.noise_mirror_ratio}"
            )
        if self.prbs_width not in MAXIMAL_TAPS:
            raise ValidationError(
                f"prbs_width {self.prbs_width} nicht unterstützt "
                f"({', '.join(str(w) for w in MAXIMAL_TAPS)})"
            )

    @property
    def levels(self) -> int:
        return 2**self.mirror_bits

    @property
    def max_decay_code(self) -> int:
        return 2**self.decay_bits - 1


# ============================================================================
# PRBS
# ============================================================================


@dataclass
class PrbsState:
    """Galois-LFSR; Zustand wird nie null, Periode 2^width − 1.

    Gehört genau einem Hardware-Lauf und trägt auch die einmalige Meldung
    eines Zählerüberlaufs.
    """

    lfsr: int
    width: int = 16
    taps: int = field(default=0)
    counter_saturated: bool = False

    def __post_init__(self) -> None:
        if self.width < 16:
            raise ValidationError(f"PRBS-Breite {self.width} < 16")
        if not self.taps:
            if self.width not in MAXIMAL_TAPS:
                raise ValidationError(f"Keine Standard-Taps für Breite {self.width}")
            self.taps = MAXIMAL_TAPS[self.width]
        mask = (1 << self.width) - 1
        if not 0 < self.lfsr <= mask:
            raise ValidationError(f"LFSR-Zustand {self.lfsr:#x} ungültig (0 oder zu breit)")

    @classmethod
    def from_seed(cls, seed: int, width: int = 16) -> PrbsState:
        """Bildet einen 64-Bit-Seed auf einen Zustand ungleich null ab."""
        return cls(lfsr=int(seed) % ((1 << width) - 1) + 1, width=width)

    def next_bit(self) -> int:
        out = self.lfsr & 1
        self.lfsr >>= 1
        if out:
            self.lfsr ^= self.taps
        return out

    def next_bits(self, count: int) -> int:
        """``count`` Bits, MSB zuerst."""
        value = 0
        for _ in range(count):
            value = (value << 1) | self.next_bit()
        return value


class PrbsNoiseSource:
    """Rauschquelle für die ideale Engine mit der Bitreihenfolge des Chips.

    Pro Spalte: mirror_bits Betragsbits, dann ein Vorzeichenbit. Bei geteiltem
    Betrag werden die Betragsbits einmal pro Iteration gezogen.
    """

    def __init__(self, prbs: PrbsState, dac: NoiseDacConfig) -> None:
        self.prbs = prbs
        self._dac = dac

    def draw(self, n: int, levels: int) -> tuple[np.ndarray, np.ndarray]:
        if levels != self._dac.levels:
            raise ValidationError(
                f"Stufenzahl {levels} passt nicht zur DAC ({self._dac.levels})"
            )
        bits = self._dac.mirror_bits
        signs = np.empty(n, dtype=np.int64)
        mags = np.empty(n, dtype=np.int64)
        if self._dac.topology is NoiseTopology.SHARED:
            mags[:] = self.prbs.next_bits(bits)
            for col in range(n):
                signs[col] = 1 if self.prbs.next_bit() else -1
        else:
            for col in range(n):
                mags[col] = self.prbs.next_bits(bits)
                signs[col] = 1 if self.prbs.next_bit() else -1
        return signs, mags


# ============================================================================
# Rausch-DAC
# ============================================================================


def counter_to_decay(k: int, dac: NoiseDacConfig) -> tuple[int, bool]:
    """12-Bit-Iterationszähler → 8-Bit-Abklingcode; (Code, übergelaufen)."""
    if k >= 2**dac.counter_bits:
        return dac.max_decay_code, True
    return min(dac.max_decay_code, int(np.floor(k * dac.decay_rate))), False


def decay_gain(d: int, dac: NoiseDacConfig) -> float:
    """Dämpfung des Widerstandsnetzes bei Abklingcode d.

    Bit b von d schaltet Zweig b mit Leitwert 2^b·g_unit parallel zum
    Grundleitwert; eine Stufe dämpft also um 1/(1 + ratio·d). Mit
    branch_doubling sind die Zweige in zwei gleichen Teilerstufen
    hintereinander ausgeführt, die Dämpfung quadriert sich und fällt
    überlinear: 1/(1 + ratio·d)². decay_gain(0) = 1, streng fallend in d.
    """
    if not 0 <= d <= dac.max_decay_code:
        raise ValidationError(f"Abklingcode {d} außerhalb 0..{dac.max_decay_code}")
    enabled = sum(2**b for b in range(dac.decay_bits) if (d >> b) & 1)
    stage = 1.0 / (1.0 + dac.branch_ratio * enabled)
    return stage * stage if dac.branch_doubling else stage


def _dac_scale(k: int, dac: NoiseDacConfig, prbs: PrbsState) -> float:
    """Strom pro Betragsstufe bei Iteration k (DAC-Ausgang, nicht Zellstrom)."""
    d, saturated = counter_to_decay(k, dac)
    if saturated and not prbs.counter_saturated:
        prbs.counter_saturated = True
        _LOGGER.warning(
            "Iterationszähler übergelaufen (k=%d >= 2^%d), Abklingen bleibt bei Code %d",
            k,
            dac.counter_bits,
            d,
        )
    return dac.i_ref_amperes / (dac.levels - 1) * decay_gain(d, dac)


def noise_dac_current(
    k: int, dac: NoiseDacConfig, prbs: PrbsState
) -> tuple[float, int]:
    """Eine DAC-Ziehung: (Betrag [A], Vorzeichen ±1); rückt den PRBS vor."""
    if k < 0:
        raise ValidationError(f"Iterationsindex {k} < 0")
    m = prbs.next_bits(dac.mirror_bits)
    sign = 1 if prbs.next_bit() else -1
    return m * _dac_scale(k, dac, prbs), sign


def expected_noise_current(k: int, dac: NoiseDacConfig) -> float:
    """Erwartungswert E[|i_noise|](k) bei gleichverteiltem Betragscode."""
    d, _ = counter_to_decay(k, dac)
    return dac.i_ref_amperes * 0.5 * decay_gain(d, dac)


# ============================================================================
# Array, Bitleitung, Komparator
# ============================================================================


def sample_mismatch(
    n: int, sigma: float, rng: np.random.Generator
) -> npt.NDArray[np.float64]:
    """Eingefrorene Zellfaktoren ~ N(1, σ); Diagonale sind die FB-Zellen."""
    if sigma == 0:
        return np.ones((n, n))
    return np.maximum(rng.normal(1.0, sigma, size=(n, n)), MISMATCH_FLOOR)


def cell_currents(
    j: CouplingMatrix,
    x: npt.ArrayLike,
    cfg: HwConfig,
    mismatch: npt.NDArray[np.float64] | None = None,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Summenströme (i_bl, i_blb) je Spalte.

    C-Zelle (m,n) mit J_mn = 1 zieht i_c aus BL, wenn x_m = +1, sonst aus BLB.
    FB-Zelle n zieht i_fb aus BLB, wenn x_n = +1, sonst aus BL. Inaktive
    C-Zellen lecken i_leak auf die von ihrer Wordline gewählte Leitung.
    """
    n = j.n
    spins = validate_spins(x, n)
    factors = np.ones((n, n)) if mismatch is None else np.asarray(mismatch, dtype=float)
    if factors.shape != (n, n):
        raise ValidationError(f"Mismatch-Form {factors.shape} passt nicht zu n={n}")
    if not (factors > 0).all():
        raise ValidationError("Mismatch-Faktoren müssen positiv sein")

    plus = (spins > 0).astype(float)
    minus = 1.0 - plus
    weighted = j.entries * factors
    i_bl = cfg.i_c_amperes * (plus @ weighted)
    i_blb = cfg.i_c_amperes * (minus @ weighted)

    fb = cfg.i_fb_amperes * np.diagonal(factors)
    i_blb = i_blb + plus * fb
    i_bl = i_bl + minus * fb

    if cfg.i_leak_amperes > 0:
        off = 1 - j.entries.astype(float)
        np.fill_diagonal(off, 0.0)
        i_bl = i_bl + cfg.i_leak_amperes * (plus @ off)
        i_blb = i_blb + cfg.i_leak_amperes * (minus @ off)
    return i_bl, i_blb


def bitline_discharge(current: float, cfg: HwConfig) -> tuple[float, bool]:
    """ΔV = I·t_pulse/c_bl, geklemmt auf v_precharge; (ΔV, gesättigt)."""
    if current < 0:
        raise ValidationError(f"Bitleitungsstrom {current} < 0")
    dv = current * cfg.t_pulse_seconds / cfg.c_bl_farads
    if dv > cfg.v_precharge_volts:
        return cfg.v_precharge_volts, True
    return dv, False


@dataclass(frozen=True, eq=False)
class ComparatorBank:
    """Eingangsbezogene Offsets und Kalibrierspannungen je Spalte."""

    offsets: npt.NDArray[np.float64]
    trims: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        offsets = np.array(self.offsets, dtype=float)
        trims = np.array(self.trims, dtype=float)
        if offsets.shape != trims.shape or offsets.ndim != 1:
            raise ValidationError("Offsets und Trims brauchen gleiche 1D-Form")
        for arr in (offsets, trims):
            arr.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "trims", trims)

    @classmethod
    def zeros(cls, n: int) -> ComparatorBank:
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def sample(cls, n: int, sigma_off: float, rng: np.random.Generator) -> ComparatorBank:
        offsets = rng.normal(0.0, sigma_off, size=n) if sigma_off > 0 else np.zeros(n)
        return cls(offsets, np.zeros(n))

    @property
    def residuals(self) -> npt.NDArray[np.float64]:
        return self.offsets - self.trims


def calibrate_offsets(bank: ComparatorBank, trim_lsb: float) -> ComparatorBank:
    """Setzt jede Trim-Spannung auf das nächstgelegene Vielfache von trim_lsb."""
    if not trim_lsb > 0:
        raise ValidationError(f"trim_lsb muss > 0 sein, ist {trim_lsb}")
    return ComparatorBank(bank.offsets, np.round(bank.offsets / trim_lsb) * trim_lsb)


def comparator_decide(
    v_bl: float,
    v_blb: float,
    column: int,
    bank: ComparatorBank,
    prev_spin: int,
) -> int:
    """+1 bei v_bl − v_blb + offset − trim > 0, −1 bei < 0, sonst prev_spin."""
    diff = v_bl - v_blb + bank.offsets[column] - bank.trims[column]
    if diff > 0:
        return 1
    if diff < 0:
        return -1
    return prev_spin


# ============================================================================
# Bias → Strom
# ============================================================================


@dataclass(frozen=True)
class BiasModel:
    """Quadratgesetz I = k·(Overdrive)^exponent; Konstanten sind Modellwahl."""

    k_amperes: float = DEFAULT_K_C
    exponent: float = 2.0
    v_threshold_volts: float = 0.0
    v_supply_volts: float = DEFAULT_V_PRECHARGE
    polarity: BiasPolarity = BiasPolarity.SOURCE

    def __post_init__(self) -> None:
        object.__setattr__(self, "polarity", BiasPolarity(self.polarity))
        if not self.k_amperes > 0 or not self.exponent > 0:
            raise ValidationError("k_amperes und exponent müssen > 0 sein")


def bias_to_current(v_bias: float, model: BiasModel) -> float:
    """Zellstrom bei externer Biasspannung (monoton, Quadratgesetz)."""
    if not 0 < v_bias < model.v_supply_volts:
        raise ValidationError(
            f"v_bias {v_bias} V außerhalb (0, {model.v_supply_volts}) V"
        )
    if model.polarity is BiasPolarity.SOURCE:
        overdrive = model.v_supply_volts - v_bias - model.v_threshold_volts
    else:
        overdrive = v_bias - model.v_threshold_volts
    return model.k_amperes * max(0.0, overdrive) ** model.exponent


def config_from_bias(
    v_bias_fb: float,
    v_bias_c: float,
    fb_model: BiasModel | None = None,
    c_model: BiasModel | None = None,
    **overrides: object,
) -> HwConfig:
    """HwConfig aus den beiden externen Biasspannungen (α- und β-Steuerung)."""
    fb_model = fb_model or BiasModel(k_amperes=DEFAULT_K_FB)
    c_model = c_model or BiasModel()
    return HwConfig(
        i_fb_amperes=bias_to_current(v_bias_fb, fb_model),
        i_c_amperes=bias_to_current(v_bias_c, c_model),
        **overrides,  # type: ignore[arg-type]
    )


# ============================================================================
# Iteration
# ============================================================================


@dataclass(frozen=True, eq=False)
class HwStepResult:
    spins: SpinVector
    v_bl: npt.NDArray[np.float64]
    v_blb: npt.NDArray[np.float64]
    saturated: npt.NDArray[np.bool_]


def _clamped(dv: npt.NDArray[np.float64], cfg: HwConfig) -> tuple[np.ndarray, np.ndarray]:
    saturated = dv > cfg.v_precharge_volts
    return np.minimum(dv, cfg.v_precharge_volts), saturated


def hw_step_detail(
    j: CouplingMatrix,
    x: npt.ArrayLike,
    cfg: HwConfig,
    dac: NoiseDacConfig,
    prbs: PrbsState,
    bank: ComparatorBank,
    k: int,
    mismatch: npt.NDArray[np.float64] | None = None,
) -> HwStepResult:
    """Eine Chip-Iteration mit allen Zwischenspannungen."""
    spins = validate_spins(x, j.n)
    if bank.offsets.shape[0] != j.n:
        raise ValidationError(f"Komparatorbank hat {bank.offsets.shape[0]} Spalten, n={j.n}")
    i_bl, i_blb = cell_currents(j, spins, cfg, mismatch)

    if dac.enabled:
        signs, mags = PrbsNoiseSource(prbs, dac).draw(j.n, dac.levels)
        noise = mags * (_dac_scale(k, dac, prbs) * dac.noise_mirror_ratio)
        # positives Vorzeichen entlädt BLB und schiebt Richtung +1
        i_blb = i_blb + np.where(signs > 0, noise, 0.0)
        i_bl = i_bl + np.where(signs < 0, noise, 0.0)

    dv_bl, sat_bl = _clamped(cfg.volts(i_bl), cfg)
    dv_blb, sat_blb = _clamped(cfg.volts(i_blb), cfg)
    saturated = sat_bl | sat_blb
    if saturated.any():
        _LOGGER.debug("Bitleitung gesättigt in %d Spalten (k=%d)", int(saturated.sum()), k)

    v_bl = cfg.v_precharge_volts - dv_bl
    v_blb = cfg.v_precharge_volts - dv_blb
    diff = v_bl - v_blb + bank.offsets - bank.trims
    new = np.where(diff > 0, 1, np.where(diff < 0, -1, spins)).astype(np.int8)
    return HwStepResult(spins=new, v_bl=v_bl, v_blb=v_blb, saturated=saturated)


def hw_step(
    j: CouplingMatrix,
    x: npt.ArrayLike,
    cfg: HwConfig,
    dac: NoiseDacConfig,
    prbs: PrbsState,
    bank: ComparatorBank,
    k: int,
    mismatch: npt.NDArray[np.float64] | None = None,
) -> SpinVector:
    """Eine synchrone Chip-Iteration: Zellströme → Rauschen → Entladung → Komparator."""
    return hw_step_detail(j, x, cfg, dac, prbs, bank, k, mismatch).spins


# ============================================================================
# Chip-Instanz und Lauf
# ============================================================================


@dataclass(frozen=True, eq=False)
class ChipSample:
    """Eine Monte-Carlo-Chipinstanz: Zell-Mismatch und kalibrierte Komparatoren."""

    mismatch: npt.NDArray[np.float64] | None
    bank: ComparatorBank

    @classmethod
    def ideal(cls, n: int) -> ChipSample:
        return cls(mismatch=None, bank=ComparatorBank.zeros(n))

    @classmethod
    def sample(cls, n: int, cfg: HwConfig, seed: int | None = None) -> ChipSample:
        rng = np.random.default_rng(cfg.chip_seed if seed is None else seed)
        mismatch = sample_mismatch(n, cfg.sigma_cell, rng) if cfg.sigma_cell > 0 else None
        bank = ComparatorBank.sample(n, cfg.sigma_offset_volts, rng)
        if cfg.trim_lsb_volts > 0 and cfg.sigma_offset_volts > 0:
            bank = calibrate_offsets(bank, cfg.trim_lsb_volts)
        return cls(mismatch=mismatch, bank=bank)


def run_hw_trial(
    instance: ProblemInstance,
    cfg: HwConfig,
    dac: NoiseDacConfig,
    iterations: int,
    trial_seed: int,
    chip: ChipSample | None = None,
    initial: npt.ArrayLike | None = None,
) -> TrialResult:
    """Kompletter Hardware-Lauf.

    Startzustand wie in sb_solver.run_trial aus trial_seed, PRBS aus demselben
    Seed; ohne ``chip`` wird die Chipinstanz aus cfg.chip_seed gezogen.
    """
    if iterations < 1:
        raise ValidationError(f"iterations muss >= 1 sein, ist {iterations}")
    j = instance.coupling
    cfg.check_headroom(j.n)
    chip = chip or ChipSample.sample(j.n, cfg)
    rng = np.random.default_rng(trial_seed)
    x = random_spins(rng, j.n) if initial is None else validate_spins(initial, j.n).copy()
    prbs = PrbsState.from_seed(trial_seed, dac.prbs_width)

    trajectory: list[int] = []
    best_spins = x
    best = -1
    for k in range(iterations):
        x = hw_step(j, x, cfg, dac, prbs, chip.bank, k, chip.mismatch)
        cut = cut_size(j, x)
        trajectory.append(cut)
        if cut > best:
            best = cut
            best_spins = x
    return TrialResult.from_run(trajectory, x.copy(), best_spins.copy(), trial_seed)


# ============================================================================
# Abbildung auf die ideale Engine und Zeitbuchhaltung
# ============================================================================


def ideal_params(cfg: HwConfig, iterations: int, seed: int = 0) -> SbParams:
    """α = i_fb·t/c, β = i_c·t/c (in Volt)."""
    return SbParams(
        alpha=float(cfg.volts(cfg.i_fb_amperes)),
        beta=float(cfg.volts(cfg.i_c_amperes)),
        iterations=iterations,
        seed=seed,
    )


def hardware_noise_schedule(cfg: HwConfig, dac: NoiseDacConfig) -> NoiseSchedule:
    """Rauschplan der idealen Engine mit DAC-Quantisierung und -Abklingkurve."""
    if not dac.enabled:
        return NoiseSchedule.disabled()
    full_scale = dac.i_ref_amperes * dac.noise_mirror_ratio
    return NoiseSchedule(
        kind=NoiseKind.DECAYING,
        amplitude0=float(cfg.volts(full_scale)),
        levels=dac.levels,
        decay=lambda k: decay_gain(counter_to_decay(k, dac)[0], dac),
    )


def iteration_latency(cfg: HwConfig) -> float:
    """Dauer einer Iteration in Sekunden (3 Takte bei 100 MHz = 30 ns)."""
    return cfg.cycles_per_iteration / cfg.clock_hz


def time_to_solution(iterations: int, cfg: HwConfig) -> float:
    """Hardware-äquivalente Zeit für ``iterations`` Iterationen."""
    return iterations * cfg.cycles_per_iteration / cfg.clock_hz
