"""Verteilt Läufe auf einen Thread-Pool und sammelt sie deterministisch ein."""
from __future__ import annotations

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

from .config import BenchConfig
from .const import ENGINE_HARDWARE
from .exceptions import SbIsingError
from .hw_model import ChipSample, run_hw_trial
from .ising_core import ProblemInstance
from .sb_solver import NoiseSchedule, SbParams, TrialResult, derive_seed, run_trial

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class TrialKey:
    """Sortierschlüssel eines Laufs: (Instanz, Laufindex)."""

    instance_id: str
    trial: int


class BenchCoordinator:
    """Koordiniert alle Läufe eines Kommandos.

    Lauf t jeder Instanz verwendet derive_seed(config.seed, t); damit sehen
    alle Instanzen und alle Sweep-Punkte dieselben Zufallszahlen.
    """

    def __init__(self, config: BenchConfig, workers: int | None = None) -> None:
        self._config = config
        self._workers = workers or config.workers
        self._chips: dict[int, ChipSample] = {}

    @property
    def config(self) -> BenchConfig:
        return self._config

    @property
    def workers(self) -> int:
        return self._workers

    def trial_seed(self, trial: int) -> int:
        return derive_seed(self._config.seed, trial)

    def _chip(self, n: int) -> ChipSample:
        if n not in self._chips:
            self._chips[n] = ChipSample.sample(n, self._config.hardware)
        return self._chips[n]

    def run_one(
        self,
        instance: ProblemInstance,
        trial: int,
        params: SbParams | None = None,
        schedule: NoiseSchedule | None = None,
    ) -> TrialResult:
        """Ein Lauf mit der konfigurierten Engine."""
        cfg = self._config
        params = params or cfg.sb
        seed = self.trial_seed(trial)
        if cfg.engine == ENGINE_HARDWARE:
            return run_hw_trial(
                instance,
                cfg.hardware,
                cfg.dac,
                params.iterations,
                seed,
                chip=self._chip(instance.n),
            )
        return run_trial(instance, params, schedule or cfg.noise, seed)

    async def async_run(
        self,
        instances: Mapping[str, ProblemInstance],
        params: SbParams | None = None,
        schedule: NoiseSchedule | None = None,
        trials: int | None = None,
    ) -> dict[str, list[TrialResult]]:
        """Alle (Instanz, Lauf)-Paare parallel; Ergebnis nach TrialKey sortiert."""
        trials = trials or self._config.trials
        keys = [TrialKey(iid, t) for iid in sorted(instances) for t in range(trials)]
        if self._config.engine == ENGINE_HARDWARE:
            # Chip-Exemplare vor dem Verteilen ziehen
            for instance in instances.values():
                self._chip(instance.n)

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self._workers) as pool:
            futures = [
                loop.run_in_executor(
                    pool, self.run_one, instances[key.instance_id], key.trial, params, schedule
                )
                for key in keys
            ]
            try:
                results = await asyncio.gather(*futures)
            except SbIsingError:
                raise
            except Exception as err:
                _LOGGER.warning("Lauf fehlgeschlagen: %s", err)
                raise SbIsingError(f"Fehler bei der Ausführung eines Laufs: {err}") from err

        collected: dict[str, list[TrialResult]] = {iid: [] for iid in sorted(instances)}
        for key, result in sorted(zip(keys, results), key=lambda pair: pair[0]):
            collected[key.instance_id].append(result)
        _LOGGER.info(
            "%d Läufe auf %d Instanzen abgeschlossen (%d Worker)",
            len(keys),
            len(instances),
            self._workers,
        )
        return collected

    def run(
        self,
        instances: Mapping[str, ProblemInstance],
        params: SbParams | None = None,
        schedule: NoiseSchedule | None = None,
        trials: int | None = None,
    ) -> dict[str, list[TrialResult]]:
        """Synchroner Einstieg für die CLI."""
        return asyncio.run(self.async_run(instances, params, schedule, trials))
