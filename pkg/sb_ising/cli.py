"""Kommandozeile: gen, import, solve, bench, sweep, oracle."""
from __future__ import annotations

import argparse
import asyncio
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import gw_solve, local_search_best
from .config import BenchConfig, apply_overrides, load_config
from .const import (
    ENGINE_IDEAL,
    ENGINES,
    EXHAUSTIVE_NODE_CAP,
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    INSTANCE_SUFFIX,
    MANIFEST_FILE,
    PROVENANCE_EXACT,
    PROVENANCE_GW,
)
from .coordinator import BenchCoordinator
from .exceptions import SbIsingError, ValidationError
from .ising_core import (
    ProblemInstance,
    brute_force_ground_state,
    import_adjacency_list,
    load_instance,
    random_graph,
    save_instance,
)
from .report import (
    build_report,
    denominator_of,
    check_provenance,
    summarize_sweep,
    summary_rows,
    write_report,
    write_summary,
    write_sweep,
    write_trials,
)
from .sb_solver import SbParams, derive_seed

_LOGGER = logging.getLogger(__name__)

PRINT_EVERY = 5
METHOD_AUTO = "auto"
METHOD_LOCAL_SEARCH = "local-search"
ORACLE_METHODS = (METHOD_AUTO, PROVENANCE_EXACT, METHOD_LOCAL_SEARCH, PROVENANCE_GW)


# ============================================================================
# Hilfsfunktionen
# ============================================================================


def _config(args: argparse.Namespace) -> BenchConfig:
    config = load_config(args.config)
    return apply_overrides(
        config,
        seed=args.seed,
        output=args.out,
        engine=args.engine,
        trials=args.trials,
        iterations=args.iterations,
    )


def _instance_paths(args: argparse.Namespace, config: BenchConfig) -> list[Path]:
    if getattr(args, "instances", None):
        paths: list[Path] = []
        for raw in args.instances:
            path = Path(raw)
            paths.extend(sorted(path.glob(f"*{INSTANCE_SUFFIX}")) if path.is_dir() else [path])
    else:
        paths = config.resolve_instances()
    if not paths:
        raise ValidationError("Keine Instanzen angegeben (Argument oder bench.instances)")
    return paths


def _load_all(paths: Sequence[Path]) -> dict[str, ProblemInstance]:
    instances: dict[str, ProblemInstance] = {}
    for path in paths:
        if path.stem in instances:
            raise ValidationError(f"Instanz-ID '{path.stem}' doppelt")
        instances[path.stem] = load_instance(path)
    return instances


def _output_dir(config: BenchConfig) -> Path:
    config.output.mkdir(parents=True, exist_ok=True)
    return config.output


# ============================================================================
# Kommandos
# ============================================================================


async def cmd_gen(args: argparse.Namespace) -> int:
    """Erzeugt count Zufallsinstanzen plus Manifest."""
    config = _config(args)
    n = args.n if args.n is not None else config.nodes
    density = args.density if args.density is not None else config.density
    count = args.count if args.count is not None else config.count
    if count < 1:
        raise ValidationError(f"count muss >= 1 sein, ist {count}")
    outdir = _output_dir(config)

    entries = []
    for index in range(count):
        seed = derive_seed(config.seed, index)
        instance = random_graph(n, density, seed)
        name = f"g{index:03d}{INSTANCE_SUFFIX}"
        save_instance(instance, outdir / name)
        entries.append({"file": name, "seed": seed, "edges": instance.edge_count})
        _LOGGER.debug("Instanz %s: %d Kanten", name, instance.edge_count)

    manifest = {
        "n": n,
        "density": density,
        "count": count,
        "seed": config.seed,
        "instances": entries,
    }
    (outdir / MANIFEST_FILE).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _LOGGER.info("%d Instanzen nach %s geschrieben", count, outdir)
    return EXIT_OK


async def cmd_import(args: argparse.Namespace) -> int:
    """Übernimmt eine networkx-Adjazenzliste ins native Format."""
    instance = import_adjacency_list(args.source, seed=args.seed or 0)
    save_instance(instance, args.target)
    _LOGGER.info("%s → %s (n=%d, %d Kanten)", args.source, args.target, instance.n, instance.edge_count)
    return EXIT_OK


async def cmd_solve(args: argparse.Namespace) -> int:
    """Läufe auf den Instanzen, JSON-Lines plus Zusammenfassung."""
    config = _config(args)
    instances = _load_all(_instance_paths(args, config))
    coordinator = BenchCoordinator(config)
    results = await coordinator.async_run(instances)

    outdir = _output_dir(config)
    write_trials(outdir, results)
    write_summary(outdir, summary_rows(results, instances, config.hardware))

    for iid, trials in results.items():
        best = np.vstack([t.best_so_far() for t in trials]).astype(float)
        denom = instances[iid].best_known_cut
        marks = [k for k in range(PRINT_EVERY, best.shape[1] + 1, PRINT_EVERY)] or [best.shape[1]]
        if denom:
            cells = ", ".join(f"{k}: {best[:, k - 1].mean() / denom:.4f}" for k in marks)
            print(f"{iid} Genauigkeit [{instances[iid].provenance}] {cells}")
        else:
            cells = ", ".join(f"{k}: {best[:, k - 1].mean():.1f}" for k in marks)
            print(f"{iid} Schnitt (kein Nenner) {cells}")
    return EXIT_OK


async def cmd_bench(args: argparse.Namespace) -> int:
    """Vollständiger Benchmark mit GW-Referenz und BenchReport."""
    config = _config(args)
    instances = _load_all(_instance_paths(args, config))
    # Nenner vor den Läufen prüfen
    check_provenance(denominator_of(iid, inst) for iid, inst in instances.items())

    coordinator = BenchCoordinator(config)
    results = await coordinator.async_run(instances)
    gw = {
        iid: gw_solve(inst, replace(config.gw, seed=derive_seed(config.gw.seed, index)))
        for index, (iid, inst) in enumerate(sorted(instances.items()))
    }
    report = build_report(
        results,
        instances,
        engine=config.engine,
        thresholds=config.thresholds,
        target_accuracy=config.target_accuracy,
        hardware=config.hardware,
        gw=gw,
    )
    outdir = _output_dir(config)
    write_trials(outdir, results)
    write_report(outdir, report)

    for key, values in report.comparison.items():
        cells = ", ".join(f"{it} Iterationen: {p:.3f}" for it, p in values.items())
        print(f"{key}: {cells}")
    print(f"Genauigkeit nach {report.iterations} Iterationen: "
          f"{report.aggregate.mean_acc[-1]:.4f} ± {report.aggregate.std_acc[-1]:.4f} "
          f"[{report.provenance}]")
    return EXIT_OK


async def cmd_sweep(args: argparse.Namespace) -> int:
    """Gitter über (α, β, A_0, decay) mit gemeinsamen Zufallszahlen."""
    config = _config(args)
    if config.engine != ENGINE_IDEAL:
        raise ValidationError("sweep unterstützt nur die Engine 'ideal'")
    instances = _load_all(_instance_paths(args, config))
    check_provenance(denominator_of(iid, inst) for iid, inst in instances.items())

    coordinator = BenchCoordinator(config)
    table: dict[tuple[float, float, float, float], dict[str, float]] = {}
    for alpha, beta, amplitude, decay in config.grid.points(config.sb, config.noise):
        params = SbParams(alpha=alpha, beta=beta, iterations=config.sb.iterations)
        schedule = replace(config.noise, amplitude0=amplitude, decay_rate=decay)
        results = await coordinator.async_run(instances, params, schedule)
        table[(alpha, beta, amplitude, decay)] = {
            iid: float(np.mean([t.best_cut for t in trials]))
            / (instances[iid].best_known_cut or 1)
            for iid, trials in results.items()
        }
        _LOGGER.info(
            "Gitterpunkt α=%g β=%g A0=%g decay=%g: %.4f",
            alpha, beta, amplitude, decay,
            float(np.mean(list(table[(alpha, beta, amplitude, decay)].values()))),
        )

    summary = summarize_sweep(table)
    write_sweep(_output_dir(config), table, summary)
    print(f"Bester Punkt {summary.best_point}: {summary.best_mean_acc:.4f}, "
          f"max. Abstand zum instanzweisen Optimum {summary.max_gap:.4f}")
    return EXIT_OK


async def cmd_oracle(args: argparse.Namespace) -> int:
    """Bestimmt den Nenner und schreibt ihn monoton in die Instanzdatei zurück."""
    config = _config(args)
    for path in _instance_paths(args, config):
        instance = load_instance(path)
        method = args.method
        if method == METHOD_AUTO:
            method = PROVENANCE_EXACT if instance.n <= EXHAUSTIVE_NODE_CAP else METHOD_LOCAL_SEARCH

        if method == PROVENANCE_EXACT:
            cut, _ = brute_force_ground_state(instance.coupling)
            provenance = PROVENANCE_EXACT
        elif method == METHOD_LOCAL_SEARCH:
            params = config.local_search
            cut = local_search_best(instance, params).best_cut
            provenance = params.provenance
        else:
            cut = gw_solve(instance, config.gw).best_cut
            provenance = PROVENANCE_GW

        updated = instance.with_best_known(cut, provenance)
        if updated is not instance:
            save_instance(updated, path)
        record = {
            "instance": str(path),
            "n": instance.n,
            "found": cut,
            "best_known_cut": updated.best_known_cut,
            "provenance": updated.provenance,
        }
        print(json.dumps(record, sort_keys=True))
    return EXIT_OK


# ============================================================================
# Einstieg
# ============================================================================


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed <= 2**64 - 1:
        raise argparse.ArgumentTypeError(f"Seed {value} außerhalb 0..2^64-1")
    return seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="INI-Konfigurationsdatei")
    common.add_argument("--seed", type=_seed, help="Basis-Seed (0..2^64-1)")
    common.add_argument("--out", "-o", help="Ausgabeverzeichnis")
    common.add_argument("--engine", choices=ENGINES, help="Engine (default aus Konfiguration)")
    common.add_argument("--trials", type=int, help="Läufe pro Instanz")
    common.add_argument("--iterations", type=int, help="Iterationen pro Lauf")
    common.add_argument("--verbose", "-v", action="store_true", help="Verbose/Debug-Ausgabe")

    parser = argparse.ArgumentParser(
        prog="sb-ising",
        description="Simulated-Bifurcation-Ising-Solver für MAXCUT",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="Zufallsinstanzen erzeugen")
    gen.add_argument("--n", type=int, help="Knotenzahl")
    gen.add_argument("--density", type=float, help="Kantenwahrscheinlichkeit")
    gen.add_argument("--count", type=int, help="Anzahl Instanzen")
    gen.set_defaults(handler=cmd_gen)

    imp = sub.add_parser("import", parents=[common], help="Adjazenzliste importieren")
    imp.add_argument("source", help="networkx-Adjazenzliste")
    imp.add_argument("target", help="Zieldatei (.ising)")
    imp.set_defaults(handler=cmd_import)

    for name, handler, text in (
        ("solve", cmd_solve, "Läufe ausführen"),
        ("bench", cmd_bench, "Benchmark mit Bericht"),
        ("sweep", cmd_sweep, "Parameter-Sweep"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("instances", nargs="*", help="Instanzdateien oder Verzeichnisse")
        cmd.set_defaults(handler=handler)

    oracle = sub.add_parser("oracle", parents=[common], help="Nenner bestimmen")
    oracle.add_argument("instances", nargs="*", help="Instanzdateien oder Verzeichnisse")
    oracle.add_argument(
        "--method", choices=ORACLE_METHODS, default=METHOD_AUTO,
        help=f"exact bis n={EXHAUSTIVE_NODE_CAP}, sonst local-search (default: %(default)s)",
    )
    oracle.set_defaults(handler=cmd_oracle)
    return parser


async def _async_main(args: argparse.Namespace) -> int:
    try:
        return await args.handler(args)
    except ValidationError as err:
        _LOGGER.error("Ungültige Eingabe: %s", err)
        return EXIT_VALIDATION
    except (SbIsingError, OSError) as err:
        _LOGGER.error("Fehler: %s", err)
        return EXIT_RUNTIME


def main(argv: Sequence[str] | None = None) -> int:
    """Kommandozeilen-Einstieg; Rückgabe ist der Exit-Code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    log_level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s [%(levelname)s] %(message)s"
    )

    return asyncio.run(_async_main(args))


if __name__ == "__main__":
    exit(main())
