"""
Referenzverfahren für die Genauigkeitsnormierung.

- Goemans-Williamson über eine Burer-Monteiro-Faktorisierung (Zeilen von V
  sind Einheitsvektoren, Rundung über zufällige Hyperebenen).
- Multi-Start-Lokalsuche (steilster Anstieg über Einzelflips) als
  Best-Known-Orakel für Instanzen oberhalb der exhaustiven Grenze.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from numba import njit

from .const import (
    DEFAULT_GW_MAX_ITERS,
    DEFAULT_GW_ROUNDINGS,
    DEFAULT_GW_STEP,
    DEFAULT_LS_FLIPS_PER_NODE,
    DEFAULT_LS_RESTARTS,
    PROVENANCE_LOCAL_SEARCH,
)
from .exceptions import SbIsingError, ValidationError
from .ising_core import SEED_MAX, ProblemInstance, SpinVector, cut_size
from .sb_solver import derive_seed, random_spins

_LOGGER = logging.getLogger(__name__)

GW_LABEL_BEST = "gw-best"
GW_LABEL_EXPECTED = "gw-expected"

GW_TOLERANCE = 1e-9
MAX_BACKTRACKS = 40
SPOT_CHECK_INTERVAL = 64


# ============================================================================
# Goemans-Williamson
# ============================================================================


@dataclass(frozen=True)
class GwParams:
    """rank=None wählt ceil(sqrt(2n))."""

    rank: int | None = None
    max_iters: int = DEFAULT_GW_MAX_ITERS
    step_size: float = DEFAULT_GW_STEP
    roundings: int = DEFAULT_GW_ROUNDINGS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rank is not None and self.rank < 2:
            raise ValidationError(f"rank muss >= 2 sein, ist {self.rank}")
        if self.roundings < 1:
            raise ValidationError(f"roundings muss >= 1 sein, ist {self.roundings}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters muss >= 1 sein, ist {self.max_iters}")
        if not self.step_size > 0:
            raise ValidationError(f"step_size muss > 0 sein, ist {self.step_size}")
        if not 0 <= self.seed <= SEED_MAX:
            raise ValidationError(f"Seed {self.seed} außerhalb 0..2^64-1")

    def rank_for(self, n: int) -> int:
        return self.rank if self.rank is not None else max(2, math.ceil(math.sqrt(2 * n)))


@dataclass(frozen=True, eq=False)
class GwResult:
    """Relaxation plus Rundung; beide GW-Varianten sind getrennt beschriftet."""

    best_cut: int
    expected_cut: float
    spins: SpinVector
    relaxation_value: float
    history: tuple[float, ...]
    converged: bool
    iterations: int
    embedding: npt.NDArray[np.float64]

    def value(self, label: str) -> float:
        if label == GW_LABEL_BEST:
            return float(self.best_cut)
        if label == GW_LABEL_EXPECTED:
            return self.expected_cut
        raise ValidationError(f"Unbekannte GW-Variante '{label}'")


def _normalize_rows(v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    return v / norms


def relaxation_value(j: npt.NDArray[np.float64], v: npt.NDArray[np.float64]) -> float:
    """Σ_{m<n} J_mn (1 − v_m·v_n) / 2."""
    edges = j.sum() / 2
    return float((edges - 0.5 * np.sum(j * (v @ v.T))) / 2)


def round_hyperplane(v: npt.NDArray[np.float64], r: npt.NDArray[np.float64]) -> SpinVector:
    """x = sgn(V·r); Null wird zu +1."""
    return np.where(v @ r >= 0, 1, -1).astype(np.int8)


def gw_solve(instance: ProblemInstance, params: GwParams | None = None) -> GwResult:
    """Projizierter Gradientenanstieg auf der Rang-r-Relaxation, dann Rundung.

    Ein Schritt, der den Relaxationswert senken würde, wird halbiert bis er
    nicht mehr senkt; findet sich keiner, gilt die Relaxation als konvergiert.
    """
    params = params or GwParams()
    coupling = instance.coupling
    j = coupling.as_int64.astype(float)
    n = coupling.n
    rank = params.rank_for(n)
    rng = np.random.default_rng(params.seed)

    v = _normalize_rows(rng.standard_normal((n, rank)))
    value = relaxation_value(j, v)
    history = [value]
    step = params.step_size / max(1, int(coupling.degrees.max()))
    converged = False
    iterations = 0

    for iterations in range(1, params.max_iters + 1):
        grad = -0.5 * (j @ v)
        trial_step = step
        for _ in range(MAX_BACKTRACKS):
            candidate = _normalize_rows(v + trial_step * grad)
            candidate_value = relaxation_value(j, candidate)
            if candidate_value >= value - GW_TOLERANCE:
                break
            trial_step /= 2
        else:
            converged = True
            break
        gain = candidate_value - value
        v, value = candidate, candidate_value
        history.append(value)
        if gain <= GW_TOLERANCE * max(1.0, abs(value)):
            converged = True
            break

    if not converged:
        _LOGGER.warning(
            "GW-Relaxation nach %d Iterationen nicht konvergiert (Wert %.6f)",
            params.max_iters,
            value,
        )

    cuts = np.empty(params.roundings, dtype=np.int64)
    best_spins = np.ones(n, dtype=np.int8)
    for t in range(params.roundings):
        spins = round_hyperplane(v, rng.standard_normal(rank))
        cuts[t] = cut_size(coupling, spins)
        if cuts[t] > cuts[:t].max(initial=-1):
            best_spins = spins

    _LOGGER.debug(
        "GW: Relaxation %.3f, Schnitt best %d / erwartet %.2f (%d Iterationen)",
        value,
        int(cuts.max()),
        float(cuts.mean()),
        iterations,
    )
    return GwResult(
        best_cut=int(cuts.max()),
        expected_cut=float(cuts.mean()),
        spins=best_spins,
        relaxation_value=value,
        history=tuple(history),
        converged=converged,
        iterations=iterations,
        embedding=v,
    )


# ============================================================================
# Lokalsuche
# ============================================================================


@dataclass(frozen=True)
class LocalSearchParams:
    """max_flips=None bedeutet 10·n Flips pro Neustart."""

    restarts: int = DEFAULT_LS_RESTARTS
    max_flips: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValidationError(f"restarts muss >= 1 sein, ist {self.restarts}")
        if self.max_flips is not None and self.max_flips < 0:
            raise ValidationError(f"max_flips muss >= 0 sein, ist {self.max_flips}")
        if not 0 <= self.seed <= SEED_MAX:
            raise ValidationError(f"Seed {self.seed} außerhalb 0..2^64-1")

    def flips_for(self, n: int) -> int:
        return self.max_flips if self.max_flips is not None else DEFAULT_LS_FLIPS_PER_NODE * n

    @property
    def provenance(self) -> str:
        return f"{PROVENANCE_LOCAL_SEARCH}(restarts={self.restarts})"


@dataclass(frozen=True, eq=False)
class LocalSearchResult:
    best_cut: int
    spins: SpinVector
    best_restart: int
    restarts: int
    local_optimum: bool


@njit(cache=True)
def _cut_from_scratch(j: np.ndarray, x: np.ndarray) -> int:  # pragma: no cover - JIT
    n = x.shape[0]
    cut = 0
    for m in range(n):
        for k in range(m + 1, n):
            if j[m, k] and x[m] != x[k]:
                cut += 1
    return cut


@njit(cache=True)
def _steepest_ascent(j: np.ndarray, x: np.ndarray, max_flips: int):  # pragma: no cover - JIT
    """Kippt jeweils den Spin mit größtem Gewinn x_i·h_i bis kein Gewinn > 0.

    Rückgabe (Schnitt, Flips, Buchhaltung konsistent). x wird verändert.
    """
    n = x.shape[0]
    h = np.zeros(n, dtype=np.int64)
    for m in range(n):
        acc = 0
        for k in range(n):
            acc += j[m, k] * x[k]
        h[m] = acc
    cut = _cut_from_scratch(j, x)
    flips = 0
    while flips < max_flips:
        best_i = -1
        best_gain = 0
        for i in range(n):
            gain = x[i] * h[i]
            if gain > best_gain:
                best_gain = gain
                best_i = i
        if best_i < 0:
            break
        xi = x[best_i]
        x[best_i] = -xi
        for m in range(n):
            h[m] -= 2 * xi * j[m, best_i]
        cut += best_gain
        flips += 1
        if flips % 64 == 0 and _cut_from_scratch(j, x) != cut:
            return cut, flips, False
    return cut, flips, True


def _is_one_flip_optimal(instance: ProblemInstance, x: SpinVector) -> bool:
    j = instance.coupling.as_int64
    s = x.astype(np.int64)
    return bool(((s * (j @ s)) <= 0).all())


def local_search_best(
    instance: ProblemInstance, params: LocalSearchParams | None = None
) -> LocalSearchResult:
    """Bester Schnitt über alle Neustarts; deterministisch pro Seed.

    Neustart r startet aus derive_seed(seed, r); bei Gleichstand gewinnt der
    frühere Neustart.
    """
    params = params or LocalSearchParams()
    coupling = instance.coupling
    j = coupling.as_int64
    max_flips = params.flips_for(coupling.n)

    best_cut = -1
    best_spins: SpinVector | None = None
    best_restart = 0
    for r in range(params.restarts):
        rng = np.random.default_rng(derive_seed(params.seed, r))
        x = random_spins(rng, coupling.n).astype(np.int64)
        cut, _, consistent = _steepest_ascent(j, x, max_flips)
        if not consistent:
            raise SbIsingError(
                f"Inkonsistente Gewinnbuchhaltung in Neustart {r} (Schnitt {cut})"
            )
        if cut > best_cut:
            best_cut = int(cut)
            best_spins = x.astype(np.int8)
            best_restart = r

    assert best_spins is not None
    if cut_size(coupling, best_spins) != best_cut:
        raise SbIsingError(
            f"Lokalsuche meldet Schnitt {best_cut}, Nachrechnung ergibt "
            f"{cut_size(coupling, best_spins)}"
        )
    optimum = _is_one_flip_optimal(instance, best_spins)
    if not optimum:
        _LOGGER.warning(
            "Lokalsuche: Flip-Budget %d erschöpft, Ergebnis nicht 1-flip-optimal",
            max_flips,
        )
    _LOGGER.info(
        "Lokalsuche: bester Schnitt %d aus Neustart %d/%d",
        best_cut,
        best_restart,
        params.restarts,
    )
    return LocalSearchResult(
        best_cut=best_cut,
        spins=best_spins,
        best_restart=best_restart,
        restarts=params.restarts,
        local_optimum=optimum,
    )
