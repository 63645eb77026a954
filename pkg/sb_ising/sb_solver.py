"""
Ideal-mathematische SB-Engine.

Eine SB-Iteration ist das synchrone Update

    x_{k+1} = sgn(α·x_k − β·J·x_k + ζ_k)

mit iterationsabhängigem, quantisiertem Rauschen ζ_k (je Knoten unabhängig).
sgn(0) behält den vorherigen Spin bei.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Protocol

import numpy as np
import numpy.typing as npt

from .const import (
    DEFAULT_ALPHA,
    DEFAULT_AMPLITUDE,
    DEFAULT_BETA,
    DEFAULT_DECAY_RATE,
    DEFAULT_ITERATIONS,
    DEFAULT_LEVELS,
)
from .exceptions import ValidationError
from .ising_core import (
    SEED_MAX,
    CouplingMatrix,
    ProblemInstance,
    SpinVector,
    cut_size,
    validate_spins,
)

_LOGGER = logging.getLogger(__name__)

DecayFn = Callable[[int], float]


class NoiseKind(str, Enum):
    """Rauscharten für ζ_k."""
    NONE = "none"
    CONSTANT = "uniform-constant"
    DECAYING = "uniform-decaying"


def hyperbolic_decay(rate: float) -> DecayFn:
    """Standard-Abklingfunktion k → 1 / (1 + k·rate)."""
    if rate < 0:
        raise ValidationError(f"decay_rate {rate} < 0")
    return lambda k: 1.0 / (1.0 + k * rate)


# ============================================================================
# Parameter
# ============================================================================


@dataclass(frozen=True)
class SbParams:
    """Schleifenparameter α (Selbstrückkopplung), β (Kopplung), Iterationszahl."""

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValidationError(f"alpha muss > 0 sein, ist {self.alpha}")
        # β = 0 bleibt als Kontrollpunkt (Kopplung aus) zulässig
        if not self.beta >= 0:
            raise ValidationError(f"beta muss >= 0 sein, ist {self.beta}")
        if self.iterations < 1:
            raise ValidationError(f"iterations muss >= 1 sein, ist {self.iterations}")
        if not 0 <= self.seed <= SEED_MAX:
            raise ValidationError(f"Seed {self.seed} außerhalb 0..2^64-1")


@dataclass(frozen=True)
class NoiseSchedule:
    """Amplitudenverlauf A_k und Quantisierung des injizierten Rauschens.

    ``decay`` ersetzt die hyperbolische Standardkurve, z.B. durch die
    Kennlinie des Hardware-DACs (siehe hw_model.hardware_noise_schedule).
    """

    kind: NoiseKind = NoiseKind.DECAYING
    amplitude0: float = DEFAULT_AMPLITUDE
    decay_rate: float = DEFAULT_DECAY_RATE
    levels: int = DEFAULT_LEVELS
    decay: DecayFn | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.amplitude0 < 0:
            raise ValidationError(f"amplitude0 {self.amplitude0} < 0")
        if self.decay_rate < 0:
            raise ValidationError(f"decay_rate {self.decay_rate} < 0")
        if self.levels < 1:
            raise ValidationError(f"levels muss >= 1 sein, ist {self.levels}")

    @classmethod
    def disabled(cls) -> NoiseSchedule:
        return cls(kind=NoiseKind.NONE, amplitude0=0.0)

    def amplitude(self, k: int) -> float:
        """Halbe Spannweite A_k."""
        if self.kind is NoiseKind.NONE:
            return 0.0
        if self.kind is NoiseKind.CONSTANT:
            return self.amplitude0
        decay = self.decay or hyperbolic_decay(self.decay_rate)
        factor = decay(k)
        if factor < 0:
            raise ValidationError(f"Abklingfaktor bei k={k} negativ: {factor}")
        return self.amplitude0 * factor

    def level_step(self, k: int) -> float:
        """Abstand zweier Quantisierungsstufen A_k / (L − 1)."""
        if self.levels == 1:
            return 0.0
        return self.amplitude(k) / (self.levels - 1)


# ============================================================================
# Rauschquellen
# ============================================================================


class NoiseSource(Protocol):
    """Liefert je Iteration Vorzeichen (±1) und Betragsindizes (0..L−1)."""

    def draw(self, n: int, levels: int) -> tuple[np.ndarray, np.ndarray]:
        ...


class RngNoiseSource:
    """Rauschquelle auf einem numpy-Generator: erst Vorzeichen, dann Betrag."""

    def __init__(self, rng: np.random.Generator) -> None:
        self._rng = rng

    def draw(self, n: int, levels: int) -> tuple[np.ndarray, np.ndarray]:
        signs = self._rng.integers(0, 2, size=n) * 2 - 1
        mags = self._rng.integers(0, levels, size=n)
        return signs, mags


class NegatedNoiseSource:
    """Invertiert den Vorzeichenstrom einer anderen Quelle."""

    def __init__(self, inner: NoiseSource) -> None:
        self._inner = inner

    def draw(self, n: int, levels: int) -> tuple[np.ndarray, np.ndarray]:
        signs, mags = self._inner.draw(n, levels)
        return -signs, mags


def _as_source(rng: np.random.Generator | NoiseSource) -> NoiseSource:
    if isinstance(rng, np.random.Generator):
        return RngNoiseSource(rng)
    return rng


def noise_vector(
    schedule: NoiseSchedule,
    k: int,
    rng: np.random.Generator | NoiseSource,
    n: int,
) -> npt.NDArray[np.float64]:
    """ζ_k für n Knoten; bei kind=none wird nichts aus der Quelle gezogen."""
    if k < 0:
        raise ValidationError(f"Iterationsindex {k} < 0")
    if schedule.kind is NoiseKind.NONE:
        return np.zeros(n)
    signs, mags = _as_source(rng).draw(n, schedule.levels)
    return signs * mags * schedule.level_step(k)


def noise_sample(
    schedule: NoiseSchedule,
    k: int,
    rng: np.random.Generator | NoiseSource,
) -> float:
    """Einzelne Ziehung s · m · A_k/(L−1), gleichverteilt über 2L Stufen."""
    return float(noise_vector(schedule, k, rng, 1)[0])


# ============================================================================
# Iteration
# ============================================================================


def sb_step(
    j: CouplingMatrix,
    x: npt.ArrayLike,
    params: SbParams,
    schedule: NoiseSchedule,
    k: int,
    rng: np.random.Generator | NoiseSource,
) -> SpinVector:
    """Eine synchrone SB-Iteration; alle y_i werden aus dem alten x berechnet."""
    spins = validate_spins(x, j.n)
    s64 = spins.astype(np.int64)
    zeta = noise_vector(schedule, k, rng, j.n)
    y = params.alpha * s64 - params.beta * (j.as_int64 @ s64) + zeta
    return np.where(y > 0, 1, np.where(y < 0, -1, spins)).astype(np.int8)


def random_spins(rng: np.random.Generator, n: int) -> SpinVector:
    """Gleichverteilter Startzustand über {−1,+1}^n."""
    return (rng.integers(0, 2, size=n) * 2 - 1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Ergebnis eines Laufs: Schnittverlauf nach jeder Iteration."""

    final_spins: SpinVector
    best_cut: int
    best_iteration: int
    trajectory: tuple[int, ...]
    seed: int
    best_spins: SpinVector

    @classmethod
    def from_run(
        cls,
        trajectory: list[int],
        final_spins: SpinVector,
        best_spins: SpinVector,
        seed: int,
    ) -> TrialResult:
        best_iteration = int(np.argmax(trajectory))
        for spins in (final_spins, best_spins):
            spins.setflags(write=False)
        return cls(
            final_spins=final_spins,
            best_cut=int(trajectory[best_iteration]),
            best_iteration=best_iteration,
            trajectory=tuple(int(c) for c in trajectory),
            seed=int(seed),
            best_spins=best_spins,
        )

    def best_so_far(self) -> npt.NDArray[np.int64]:
        """Bester bisheriger Schnitt je Iteration (monoton)."""
        return np.maximum.accumulate(np.asarray(self.trajectory, dtype=np.int64))

    def to_record(self, instance_id: str) -> dict[str, object]:
        """JSON-Lines-Datensatz eines Laufs."""
        return {
            "instance_id": instance_id,
            "trial_seed": self.seed,
            "trajectory": list(self.trajectory),
            "best_cut": self.best_cut,
            "best_iteration": self.best_iteration,
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrialResult):
            return NotImplemented
        return (
            self.trajectory == other.trajectory
            and self.best_cut == other.best_cut
            and self.best_iteration == other.best_iteration
            and self.seed == other.seed
            and np.array_equal(self.final_spins, other.final_spins)
            and np.array_equal(self.best_spins, other.best_spins)
        )

    __hash__ = None  # type: ignore[assignment]


def run_trial(
    instance: ProblemInstance,
    params: SbParams,
    schedule: NoiseSchedule,
    trial_seed: int,
    initial: npt.ArrayLike | None = None,
    noise: NoiseSource | None = None,
) -> TrialResult:
    """Vollständiger Lauf über params.iterations Iterationen.

    Startzustand und Rauschen stammen aus demselben Generator (trial_seed),
    außer ``initial`` bzw. ``noise`` werden explizit übergeben.
    """
    j = instance.coupling
    rng = np.random.default_rng(trial_seed)
    x = random_spins(rng, j.n) if initial is None else validate_spins(initial, j.n).copy()
    source = noise if noise is not None else RngNoiseSource(rng)

    trajectory: list[int] = []
    best_spins = x
    best = -1
    for k in range(params.iterations):
        x = sb_step(j, x, params, schedule, k, source)
        cut = cut_size(j, x)
        trajectory.append(cut)
        if cut > best:
            best = cut
            best_spins = x
    return TrialResult.from_run(trajectory, x.copy(), best_spins.copy(), trial_seed)


def derive_seed(base_seed: int, index: int) -> int:
    """Deterministischer 64-Bit-Seed für Lauf ``index`` aus ``base_seed``."""
    seq = np.random.SeedSequence([int(base_seed), int(index)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def run_trials(
    instance: ProblemInstance,
    params: SbParams,
    schedule: NoiseSchedule,
    n_trials: int,
    base_seed: int,
    first_trial: int = 0,
) -> list[TrialResult]:
    """Unabhängige Läufe first_trial..first_trial+n_trials−1 mit abgeleiteten Seeds."""
    if n_trials < 1:
        raise ValidationError(f"n_trials muss >= 1 sein, ist {n_trials}")
    return [
        run_trial(instance, params, schedule, derive_seed(base_seed, t))
        for t in range(first_trial, first_trial + n_trials)
    ]


def detect_cycle(
    j: CouplingMatrix,
    x0: npt.ArrayLike,
    params: SbParams,
    max_steps: int | None = None,
) -> tuple[int, int]:
    """Sucht den Zyklus der rauschfreien Dynamik: (Vorlauf, Periode).

    Ohne Rauschen ist die Abbildung deterministisch und die Zustandsfolge
    schließlich periodisch.
    """
    schedule = NoiseSchedule.disabled()
    limit = max_steps if max_steps is not None else 2 ** min(j.n, 20) + 1
    x = validate_spins(x0, j.n)
    seen: dict[bytes, int] = {x.tobytes(): 0}
    rng = np.random.default_rng(params.seed)
    for step in range(1, limit + 1):
        x = sb_step(j, x, params, schedule, step - 1, rng)
        key = x.tobytes()
        if key in seen:
            return seen[key], step - seen[key]
        seen[key] = step
    raise ValidationError(f"Kein Zyklus innerhalb von {limit} Schritten gefunden")
