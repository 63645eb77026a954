"""
Auswertung der Läufe: Genauigkeitskurven, Erfolgswahrscheinlichkeiten,
Histogramm, Hardware-Zeit und Ausgabedateien.

Genauigkeit ist immer bester-bisheriger-Schnitt / Nenner; jede Zeile nennt
die Herkunft des Nenners.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from .baselines import GW_LABEL_BEST, GW_LABEL_EXPECTED, GwResult
from .const import (
    HISTOGRAM_BIN,
    HISTOGRAM_LOW,
    PROVENANCE_EXACT,
    PROVENANCE_GW,
    PROVENANCE_LOCAL_SEARCH,
    REPORT_CSV,
    REPORT_JSON,
    SUMMARY_FILE,
    SWEEP_BEST,
    SWEEP_CSV,
    TRIALS_FILE,
)
from .exceptions import MissingDenominatorError, ValidationError
from .hw_model import HwConfig, time_to_solution
from .ising_core import ProblemInstance
from .sb_solver import TrialResult

_LOGGER = logging.getLogger(__name__)

AGGREGATE_ID = "ALL"
HW_TIME_LABEL = "hardware-equivalent time"


# ============================================================================
# Nenner
# ============================================================================


@dataclass(frozen=True)
class Denominator:
    value: int
    provenance: str

    @property
    def kind(self) -> str:
        """Provenienz ohne Budgetangabe: exact, local-search oder gw."""
        return self.provenance.split("(", 1)[0]


def denominator_of(instance_id: str, instance: ProblemInstance) -> Denominator:
    """Gespeicherter Nenner einer Instanz; fehlt er, ist das ein harter Fehler."""
    if instance.best_known_cut is None:
        raise MissingDenominatorError(
            f"Instanz {instance_id} hat keinen best_known_cut; "
            f"zuerst 'sb-ising oracle' für diese Instanz ausführen"
        )
    return Denominator(instance.best_known_cut, instance.provenance or "unknown")


def check_provenance(denominators: Iterable[Denominator]) -> str:
    """Eine Auswertung darf nur Nenner einer Herkunftsart mischen."""
    kinds = sorted({d.kind for d in denominators})
    if not kinds:
        raise ValidationError("Keine Instanzen für die Auswertung")
    if len(kinds) > 1:
        raise ValidationError(
            f"Gemischte Nenner-Provenienz ({', '.join(kinds)}) in einer Auswertung"
        )
    if kinds[0] not in (PROVENANCE_EXACT, PROVENANCE_LOCAL_SEARCH, PROVENANCE_GW):
        _LOGGER.warning("Unbekannte Nenner-Provenienz '%s'", kinds[0])
    return kinds[0]


# ============================================================================
# Kennzahlen
# ============================================================================


def accuracy_matrix(
    trials: Sequence[TrialResult], denominator: int
) -> npt.NDArray[np.float64]:
    """Läufe × Iterationen, bester-bisheriger-Schnitt / Nenner."""
    if not trials:
        raise ValidationError("Keine Läufe")
    lengths = {len(t.trajectory) for t in trials}
    if len(lengths) != 1:
        raise ValidationError(f"Läufe mit unterschiedlicher Iterationszahl: {sorted(lengths)}")
    best = np.vstack([t.best_so_far() for t in trials]).astype(float)
    if denominator == 0:
        return np.ones_like(best)
    return best / denominator


def success_probability(
    acc: npt.NDArray[np.float64], tau: float
) -> npt.NDArray[np.float64]:
    """Anteil der Läufe mit Genauigkeit ≥ τ je Iteration."""
    return (acc >= tau).mean(axis=0)


def first_iteration_reaching(curve: npt.ArrayLike, target: float) -> int | None:
    """Erste Iteration (1-basiert), bei der die Kurve target erreicht."""
    hits = np.flatnonzero(np.asarray(curve) >= target)
    return int(hits[0]) + 1 if hits.size else None


def accuracy_histogram(values: npt.ArrayLike) -> dict[str, Any]:
    """Festes Raster 0.80..1.00 in 0.01-Schritten plus Unter-/Überlauf."""
    values = np.asarray(values, dtype=float)
    bins = int(round((1.0 - HISTOGRAM_LOW) / HISTOGRAM_BIN))
    edges = np.linspace(HISTOGRAM_LOW, 1.0, bins + 1)
    inside = values[(values >= HISTOGRAM_LOW) & (values <= 1.0)]
    counts, _ = np.histogram(inside, bins=edges)
    return {
        "edges": [round(float(e), 2) for e in edges],
        "counts": [int(c) for c in counts],
        "below": int((values < HISTOGRAM_LOW).sum()),
        "above": int((values > 1.0).sum()),
    }


def comparison_iterations(iterations: int) -> tuple[int, int]:
    """Vergleichspunkte für die Erfolgswahrscheinlichkeit (bei 20: 15 und 20)."""
    return max(1, (iterations * 3) // 4), iterations


def _p_column(tau: float) -> str:
    return f"p_ge_{tau:g}"


@dataclass(frozen=True)
class CurveStats:
    """Kennzahlen je Iteration über eine Menge von Läufen."""

    mean_acc: tuple[float, ...]
    std_acc: tuple[float, ...]
    success: dict[float, tuple[float, ...]]
    above_gw: tuple[float, ...] | None = None

    @classmethod
    def from_matrix(
        cls,
        acc: npt.NDArray[np.float64],
        thresholds: Sequence[float],
        gw_accuracy: npt.ArrayLike | None = None,
    ) -> CurveStats:
        above = None
        if gw_accuracy is not None:
            # Referenz je Lauf (gepoolte Instanzen haben verschiedene Referenzen)
            ref = np.asarray(gw_accuracy, dtype=float).reshape(-1, 1)
            above = tuple(float(v) for v in (acc > ref).mean(axis=0))
        return cls(
            mean_acc=tuple(float(v) for v in acc.mean(axis=0)),
            std_acc=tuple(float(v) for v in acc.std(axis=0)),
            success={
                tau: tuple(float(v) for v in success_probability(acc, tau))
                for tau in thresholds
            },
            above_gw=above,
        )


@dataclass(frozen=True)
class InstanceReport:
    instance_id: str
    denominator: Denominator
    trials: int
    best_cut: int
    curve: CurveStats
    gw_expected_acc: float | None = None
    gw_best_acc: float | None = None
    gw_crossover_iteration: int | None = None
    time_to_target_iteration: int | None = None


@dataclass(frozen=True)
class BenchReport:
    """Gesamtauswertung eines Benchmarks; rein funktional aus den Läufen."""

    engine: str
    iterations: int
    provenance: str
    thresholds: tuple[float, ...]
    target_accuracy: float
    instances: tuple[InstanceReport, ...]
    aggregate: CurveStats
    histogram: dict[str, Any]
    hw_time_s: tuple[float, ...]
    time_to_target_iteration: int | None
    gw_crossover_iteration: int | None
    gw_label: str | None = None
    comparison: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def total_trials(self) -> int:
        return sum(r.trials for r in self.instances)

    def _time_at(self, iteration: int | None) -> float | None:
        return None if iteration is None else self.hw_time_s[iteration - 1]

    def csv_rows(self) -> list[dict[str, Any]]:
        """Eine Zeile je (Instanz, Iteration), zuletzt die Aggregatzeilen."""
        rows: list[dict[str, Any]] = []
        blocks = [(r.instance_id, r.curve, r.denominator.provenance) for r in self.instances]
        blocks.append((AGGREGATE_ID, self.aggregate, self.provenance))
        for instance_id, curve, provenance in blocks:
            for k in range(self.iterations):
                row: dict[str, Any] = {
                    "instance_id": instance_id,
                    "iteration": k + 1,
                    "mean_acc": curve.mean_acc[k],
                    "std_acc": curve.std_acc[k],
                }
                for tau in self.thresholds:
                    row[_p_column(tau)] = curve.success[tau][k]
                row["above_gw"] = "" if curve.above_gw is None else curve.above_gw[k]
                row["hw_time_s"] = self.hw_time_s[k]
                row["provenance"] = provenance
                rows.append(row)
        return rows

    def csv_columns(self) -> list[str]:
        return (
            ["instance_id", "iteration", "mean_acc", "std_acc"]
            + [_p_column(tau) for tau in self.thresholds]
            + ["above_gw", "hw_time_s", "provenance"]
        )

    def as_dict(self) -> dict[str, Any]:
        def curve_dict(curve: CurveStats) -> dict[str, Any]:
            return {
                "mean_acc": list(curve.mean_acc),
                "std_acc": list(curve.std_acc),
                "success": {_p_column(t): list(v) for t, v in curve.success.items()},
                "above_gw": None if curve.above_gw is None else list(curve.above_gw),
            }

        return {
            "engine": self.engine,
            "iterations": self.iterations,
            "provenance": self.provenance,
            "thresholds": list(self.thresholds),
            "total_trials": self.total_trials,
            "time_axis": {"label": HW_TIME_LABEL, "seconds": list(self.hw_time_s)},
            "aggregate": curve_dict(self.aggregate),
            "histogram": self.histogram,
            "comparison": self.comparison,
            "target": {
                "accuracy": self.target_accuracy,
                "iteration": self.time_to_target_iteration,
                "hw_time_s": self._time_at(self.time_to_target_iteration),
            },
            "gw": {
                "label": self.gw_label,
                "crossover_iteration": self.gw_crossover_iteration,
                "crossover_hw_time_s": self._time_at(self.gw_crossover_iteration),
            },
            "instances": [
                {
                    "instance_id": r.instance_id,
                    "denominator": r.denominator.value,
                    "provenance": r.denominator.provenance,
                    "trials": r.trials,
                    "best_cut": r.best_cut,
                    "gw_expected_acc": r.gw_expected_acc,
                    "gw_best_acc": r.gw_best_acc,
                    "gw_crossover_iteration": r.gw_crossover_iteration,
                    "time_to_target_iteration": r.time_to_target_iteration,
                    **curve_dict(r.curve),
                }
                for r in self.instances
            ],
        }


def build_report(
    results: Mapping[str, Sequence[TrialResult]],
    instances: Mapping[str, ProblemInstance],
    *,
    engine: str,
    thresholds: Sequence[float],
    target_accuracy: float,
    hardware: HwConfig,
    gw: Mapping[str, GwResult] | None = None,
) -> BenchReport:
    """Aggregiert Läufe zu einem BenchReport.

    GW-Vergleiche beziehen sich auf den erwarteten gerundeten Schnitt
    (gw-expected); der beste Rundungsschnitt wird zusätzlich ausgewiesen.
    """
    ids = sorted(results)
    denominators = {iid: denominator_of(iid, instances[iid]) for iid in ids}
    provenance = check_provenance(denominators.values())
    thresholds = tuple(thresholds)

    reports: list[InstanceReport] = []
    matrices: list[npt.NDArray[np.float64]] = []
    gw_refs: list[npt.NDArray[np.float64]] = []
    for iid in ids:
        trials = results[iid]
        denom = denominators[iid]
        acc = accuracy_matrix(trials, denom.value)
        matrices.append(acc)

        gw_expected = gw_best = None
        if gw is not None and iid in gw:
            scale = denom.value or 1
            gw_expected = gw[iid].value(GW_LABEL_EXPECTED) / scale
            gw_best = gw[iid].value(GW_LABEL_BEST) / scale
            gw_refs.append(np.full(len(trials), gw_expected))
        curve = CurveStats.from_matrix(
            acc, thresholds, None if gw_expected is None else np.full(len(trials), gw_expected)
        )
        reports.append(
            InstanceReport(
                instance_id=iid,
                denominator=denom,
                trials=len(trials),
                best_cut=max(t.best_cut for t in trials),
                curve=curve,
                gw_expected_acc=gw_expected,
                gw_best_acc=gw_best,
                gw_crossover_iteration=(
                    None if gw_expected is None
                    else _first_exceeding(curve.mean_acc, gw_expected)
                ),
                time_to_target_iteration=first_iteration_reaching(
                    curve.mean_acc, target_accuracy
                ),
            )
        )

    pooled = np.vstack(matrices)
    with_gw = len(gw_refs) == len(ids)
    aggregate = CurveStats.from_matrix(
        pooled, thresholds, np.concatenate(gw_refs) if with_gw else None
    )
    iterations = pooled.shape[1]
    hw_time = tuple(time_to_solution(k + 1, hardware) for k in range(iterations))

    crossover = None
    if with_gw:
        mean_gw = float(np.mean([r.gw_expected_acc for r in reports]))
        crossover = _first_exceeding(aggregate.mean_acc, mean_gw)

    early, late = comparison_iterations(iterations)
    comparison = {
        _p_column(tau): {
            str(early): aggregate.success[tau][early - 1],
            str(late): aggregate.success[tau][late - 1],
        }
        for tau in thresholds
    }

    report = BenchReport(
        engine=engine,
        iterations=iterations,
        provenance=provenance,
        thresholds=thresholds,
        target_accuracy=target_accuracy,
        instances=tuple(reports),
        aggregate=aggregate,
        histogram=accuracy_histogram(pooled[:, -1]),
        hw_time_s=hw_time,
        time_to_target_iteration=first_iteration_reaching(aggregate.mean_acc, target_accuracy),
        gw_crossover_iteration=crossover,
        gw_label=GW_LABEL_EXPECTED if with_gw else None,
        comparison=comparison,
    )
    _LOGGER.info(
        "Auswertung: %d Instanzen, %d Läufe, mittlere Genauigkeit %.4f nach %d Iterationen",
        len(ids),
        report.total_trials,
        aggregate.mean_acc[-1],
        iterations,
    )
    return report


def _first_exceeding(curve: Sequence[float], reference: float) -> int | None:
    hits = np.flatnonzero(np.asarray(curve) > reference)
    return int(hits[0]) + 1 if hits.size else None


# ============================================================================
# Sweep
# ============================================================================


SweepPoint = tuple[float, float, float, float]


@dataclass(frozen=True)
class SweepSummary:
    """Bester Einzelpunkt und Abstand zu den instanzweise besten Punkten."""

    best_point: SweepPoint
    best_mean_acc: float
    per_instance_best: dict[str, tuple[SweepPoint, float]]
    single_point_gap: dict[str, float]

    @property
    def max_gap(self) -> float:
        return max(self.single_point_gap.values(), default=0.0)

    def as_dict(self) -> dict[str, Any]:
        names = ("alpha", "beta", "amplitude0", "decay_rate")
        return {
            "best_point": dict(zip(names, self.best_point)),
            "best_mean_acc": self.best_mean_acc,
            "per_instance_best": {
                iid: {"point": dict(zip(names, point)), "mean_acc": acc}
                for iid, (point, acc) in self.per_instance_best.items()
            },
            "single_point_gap": self.single_point_gap,
            "max_gap": self.max_gap,
        }


def summarize_sweep(
    table: Mapping[SweepPoint, Mapping[str, float]]
) -> SweepSummary:
    """table[Punkt][Instanz] = mittlere Endgenauigkeit; erster Punkt gewinnt Gleichstände."""
    if not table:
        raise ValidationError("Leeres Parametergitter")
    points = list(table)
    pooled = [float(np.mean(list(table[p].values()))) for p in points]
    best_index = int(np.argmax(pooled))
    best_point = points[best_index]

    per_instance: dict[str, tuple[SweepPoint, float]] = {}
    for iid in sorted(table[best_point]):
        accs = [table[p][iid] for p in points]
        i = int(np.argmax(accs))
        per_instance[iid] = (points[i], accs[i])
    gaps = {
        iid: per_instance[iid][1] - table[best_point][iid] for iid in per_instance
    }
    return SweepSummary(
        best_point=best_point,
        best_mean_acc=pooled[best_index],
        per_instance_best=per_instance,
        single_point_gap=gaps,
    )


# ============================================================================
# Dateien
# ============================================================================


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_trials(outdir: Path, results: Mapping[str, Sequence[TrialResult]]) -> Path:
    """JSON-Lines, sortiert nach (Instanz, Laufindex)."""
    path = outdir / TRIALS_FILE
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for iid in sorted(results):
            for trial in results[iid]:
                handle.write(json.dumps(trial.to_record(iid), sort_keys=True) + "\n")
    return path


def write_report(outdir: Path, report: BenchReport) -> tuple[Path, Path]:
    csv_path = outdir / REPORT_CSV
    json_path = outdir / REPORT_JSON
    _write_csv(csv_path, report.csv_columns(), report.csv_rows())
    _write_json(json_path, report.as_dict())
    return csv_path, json_path


SUMMARY_COLUMNS = (
    "instance_id", "trials", "iterations", "best_cut", "denominator",
    "provenance", "mean_acc", "std_acc", "hw_time_s",
)


def summary_rows(
    results: Mapping[str, Sequence[TrialResult]],
    instances: Mapping[str, ProblemInstance],
    hardware: HwConfig,
) -> list[dict[str, Any]]:
    """Eine Zeile je Instanz; ohne Nenner bleiben die Genauigkeitsfelder leer."""
    rows = []
    for iid in sorted(results):
        trials = results[iid]
        iterations = len(trials[0].trajectory)
        row: dict[str, Any] = {
            "instance_id": iid,
            "trials": len(trials),
            "iterations": iterations,
            "best_cut": max(t.best_cut for t in trials),
            "denominator": "",
            "provenance": "",
            "mean_acc": "",
            "std_acc": "",
            "hw_time_s": time_to_solution(iterations, hardware),
        }
        instance = instances[iid]
        if instance.best_known_cut is not None:
            acc = accuracy_matrix(trials, instance.best_known_cut)[:, -1]
            row.update(
                denominator=instance.best_known_cut,
                provenance=instance.provenance or "unknown",
                mean_acc=float(acc.mean()),
                std_acc=float(acc.std()),
            )
        rows.append(row)
    return rows


def write_summary(outdir: Path, rows: Sequence[Mapping[str, Any]]) -> Path:
    path = outdir / SUMMARY_FILE
    _write_csv(path, SUMMARY_COLUMNS, rows)
    return path


SWEEP_COLUMNS = ("alpha", "beta", "amplitude0", "decay_rate", "instance_id", "mean_acc")


def write_sweep(
    outdir: Path,
    table: Mapping[SweepPoint, Mapping[str, float]],
    summary: SweepSummary,
) -> tuple[Path, Path]:
    rows = []
    for point, per_instance in table.items():
        alpha, beta, amplitude, decay = point
        for iid in sorted(per_instance):
            rows.append({
                "alpha": alpha, "beta": beta, "amplitude0": amplitude,
                "decay_rate": decay, "instance_id": iid, "mean_acc": per_instance[iid],
            })
        rows.append({
            "alpha": alpha, "beta": beta, "amplitude0": amplitude,
            "decay_rate": decay, "instance_id": AGGREGATE_ID,
            "mean_acc": float(np.mean(list(per_instance.values()))),
        })
    csv_path = outdir / SWEEP_CSV
    json_path = outdir / SWEEP_BEST
    _write_csv(csv_path, SWEEP_COLUMNS, rows)
    _write_json(json_path, summary.as_dict())
    return csv_path, json_path
