"""Tests für Kennzahlen, Berichte und Ausgabedateien."""
import csv
import json

import numpy as np
import pytest

from sb_ising.baselines import GwResult
from sb_ising.exceptions import MissingDenominatorError, ValidationError
from sb_ising.hw_model import HwConfig
from sb_ising.report import (
    AGGREGATE_ID,
    Denominator,
    accuracy_histogram,
    accuracy_matrix,
    build_report,
    check_provenance,
    comparison_iterations,
    denominator_of,
    first_iteration_reaching,
    success_probability,
    summarize_sweep,
    summary_rows,
    write_report,
    write_summary,
    write_sweep,
    write_trials,
)
from sb_ising.sb_solver import TrialResult

from .conftest import complete_graph


def _trial(trajectory, seed=0, n=4):
    spins = np.ones(n, dtype=np.int8)
    return TrialResult.from_run(list(trajectory), spins, spins.copy(), seed)


def _gw(expected: float, best: int, n: int) -> GwResult:
    return GwResult(
        best_cut=best,
        expected_cut=expected,
        spins=np.ones(n, dtype=np.int8),
        relaxation_value=float(best),
        history=(float(best),),
        converged=True,
        iterations=1,
        embedding=np.eye(n),
    )


@pytest.fixture
def bench_inputs():
    """Zwei Instanzen mit exaktem Nenner (4 bzw. 2) und je zwei Läufen."""
    instances = {
        "a": complete_graph(4).with_best_known(4, "exact"),
        "b": complete_graph(3).with_best_known(2, "exact"),
    }
    results = {
        "a": [_trial([2, 3, 4, 4], 1), _trial([4, 4, 4, 4], 2)],
        "b": [_trial([1, 2, 2, 2], 1, n=3), _trial([2, 2, 2, 2], 2, n=3)],
    }
    gw = {"a": _gw(3.0, 4, 4), "b": _gw(1.5, 2, 3)}
    return results, instances, gw


@pytest.fixture
def report(bench_inputs):
    results, instances, gw = bench_inputs
    return build_report(
        results,
        instances,
        engine="ideal",
        thresholds=(0.9, 0.95),
        target_accuracy=0.95,
        hardware=HwConfig(),
        gw=gw,
    )


class TestDenominator:
    def test_kind_strips_budget(self):
        assert Denominator(10, "local-search(restarts=1000)").kind == "local-search"
        assert Denominator(10, "exact").kind == "exact"

    def test_missing(self):
        with pytest.raises(MissingDenominatorError, match="oracle"):
            denominator_of("g000", complete_graph(3))

    def test_mixed_provenance_rejected(self):
        with pytest.raises(ValidationError, match="Gemischte"):
            check_provenance([Denominator(3, "exact"), Denominator(4, "local-search(restarts=10)")])

    def test_same_kind_different_budget(self):
        assert check_provenance([
            Denominator(3, "local-search(restarts=10)"),
            Denominator(4, "local-search(restarts=20)"),
        ]) == "local-search"

    def test_empty(self):
        with pytest.raises(ValidationError):
            check_provenance([])


class TestMetrics:
    def test_accuracy_uses_best_so_far(self):
        acc = accuracy_matrix([_trial([3, 2, 5]), _trial([1, 4, 4])], 5)
        assert acc.tolist() == [[0.6, 0.6, 1.0], [0.2, 0.8, 0.8]]

    def test_zero_denominator(self):
        acc = accuracy_matrix([_trial([0, 0])], 0)
        assert acc.tolist() == [[1.0, 1.0]]

    def test_mismatched_lengths(self):
        with pytest.raises(ValidationError):
            accuracy_matrix([_trial([1, 2]), _trial([1, 2, 3])], 3)

    def test_success_probability(self):
        acc = np.array([[0.5, 0.95], [0.96, 0.99]])
        assert success_probability(acc, 0.95).tolist() == [0.5, 1.0]

    def test_first_iteration_reaching(self):
        assert first_iteration_reaching([0.5, 0.9, 0.96], 0.95) == 3
        assert first_iteration_reaching([0.5, 0.9], 0.95) is None

    def test_histogram(self):
        hist = accuracy_histogram([0.79, 0.80, 0.855, 1.0, 1.01])
        assert len(hist["edges"]) == 21
        assert hist["edges"][0] == 0.8 and hist["edges"][-1] == 1.0
        assert hist["below"] == 1 and hist["above"] == 1
        assert sum(hist["counts"]) == 3
        assert hist["counts"][0] == 1 and hist["counts"][-1] == 1

    @pytest.mark.parametrize("iterations, expected", [(20, (15, 20)), (4, (3, 4)), (1, (1, 1))])
    def test_comparison_iterations(self, iterations, expected):
        assert comparison_iterations(iterations) == expected


class TestBuildReport:
    def test_aggregate_curve(self, report):
        assert report.aggregate.mean_acc == pytest.approx((0.75, 0.9375, 1.0, 1.0))
        assert report.total_trials == 4
        assert report.provenance == "exact"
        assert report.time_to_target_iteration == 3

    def test_gw_comparison(self, report):
        assert report.gw_label == "gw-expected"
        assert report.gw_crossover_iteration == 2
        assert report.aggregate.above_gw[0] == pytest.approx(0.5)
        first = report.instances[0]
        assert first.gw_expected_acc == pytest.approx(0.75)
        assert first.gw_best_acc == pytest.approx(1.0)
        assert first.gw_crossover_iteration == 2

    def test_success_comparison(self, report):
        assert report.comparison == {
            "p_ge_0.9": {"3": 1.0, "4": 1.0},
            "p_ge_0.95": {"3": 1.0, "4": 1.0},
        }

    def test_hw_time_axis(self, report):
        assert report.hw_time_s == pytest.approx((3e-8, 6e-8, 9e-8, 1.2e-7))

    def test_histogram_of_final_accuracy(self, report):
        assert report.histogram["counts"][-1] == 4

    def test_csv_rows(self, report):
        rows = report.csv_rows()
        assert len(rows) == 3 * 4
        assert list(rows[0]) == report.csv_columns()
        assert [r["instance_id"] for r in rows[-4:]] == [AGGREGATE_ID] * 4
        assert rows[0]["provenance"] == "exact"
        assert "p_ge_0.95" in report.csv_columns()

    def test_without_gw(self, bench_inputs):
        results, instances, _ = bench_inputs
        report = build_report(
            results, instances, engine="ideal", thresholds=(0.95,),
            target_accuracy=0.95, hardware=HwConfig(),
        )
        assert report.gw_crossover_iteration is None
        assert report.csv_rows()[0]["above_gw"] == ""

    def test_missing_denominator(self, bench_inputs):
        results, instances, _ = bench_inputs
        instances = dict(instances, b=complete_graph(3))
        with pytest.raises(MissingDenominatorError):
            build_report(
                results, instances, engine="ideal", thresholds=(0.95,),
                target_accuracy=0.95, hardware=HwConfig(),
            )


class TestSweepSummary:
    def test_best_point_and_gap(self):
        p1, p2 = (1.0, 0.5, 1.5, 0.25), (2.0, 0.5, 1.5, 0.25)
        summary = summarize_sweep({p1: {"a": 0.9, "b": 0.8}, p2: {"a": 0.85, "b": 0.95}})
        assert summary.best_point == p2
        assert summary.best_mean_acc == pytest.approx(0.9)
        assert summary.per_instance_best["a"] == (p1, 0.9)
        assert summary.single_point_gap["a"] == pytest.approx(0.05)
        assert summary.single_point_gap["b"] == 0.0
        assert summary.max_gap == pytest.approx(0.05)

    def test_tie_keeps_first(self):
        p1, p2 = (1.0, 0.1, 0.0, 0.0), (1.0, 0.2, 0.0, 0.0)
        assert summarize_sweep({p1: {"a": 0.9}, p2: {"a": 0.9}}).best_point == p1

    def test_empty(self):
        with pytest.raises(ValidationError):
            summarize_sweep({})


class TestFiles:
    def test_trials_sorted(self, tmp_path, bench_inputs):
        results, _, _ = bench_inputs
        path = write_trials(tmp_path, {"b": results["b"], "a": results["a"]})
        records = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert [r["instance_id"] for r in records] == ["a", "a", "b", "b"]
        assert records[0]["trajectory"] == [2, 3, 4, 4]

    def test_report_files(self, tmp_path, report):
        csv_path, json_path = write_report(tmp_path, report)
        data = json.loads(json_path.read_text(encoding="utf-8"))
        assert data["time_axis"]["label"] == "hardware-equivalent time"
        assert data["target"]["hw_time_s"] == pytest.approx(9e-8)
        assert data["gw"]["crossover_iteration"] == 2
        with csv_path.open(encoding="utf-8") as handle:
            assert len(list(csv.DictReader(handle))) == 12

    def test_report_is_reproducible(self, tmp_path, report):
        first = tmp_path / "1"
        second = tmp_path / "2"
        first.mkdir()
        second.mkdir()
        write_report(first, report)
        write_report(second, report)
        for name in ("report.csv", "report.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_summary_without_denominator(self, tmp_path, bench_inputs):
        results, instances, _ = bench_inputs
        instances = dict(instances, b=complete_graph(3))
        rows = summary_rows(results, instances, HwConfig())
        assert rows[0]["mean_acc"] == pytest.approx(1.0)
        assert rows[0]["denominator"] == 4
        assert rows[1]["mean_acc"] == ""
        path = write_summary(tmp_path, rows)
        assert path.read_text(encoding="utf-8").startswith("instance_id,trials,iterations")

    def test_sweep_files(self, tmp_path):
        p1 = (1.0, 0.5, 1.5, 0.25)
        table = {p1: {"a": 0.9, "b": 0.8}}
        csv_path, json_path = write_sweep(tmp_path, table, summarize_sweep(table))
        with csv_path.open(encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert [r["instance_id"] for r in rows] == ["a", "b", AGGREGATE_ID]
        assert float(rows[-1]["mean_acc"]) == pytest.approx(0.85)
        assert json.loads(json_path.read_text(encoding="utf-8"))["best_point"]["alpha"] == 1.0
