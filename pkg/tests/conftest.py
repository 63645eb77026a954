"""Gemeinsame Test-Fixtures für den SB-Ising-Solver."""
import os

import numpy as np
import pytest

from sb_ising.hw_model import HwConfig, NoiseDacConfig
from sb_ising.ising_core import (
    CouplingMatrix,
    ProblemInstance,
    brute_force_ground_state,
    random_graph,
    save_instance,
)

# Nicht kommensurabel zu i_c, damit keine exakten Gleichstände am Komparator entstehen
LOCKSTEP_I_FB = 2.2360679e-6


def complete_graph(n: int) -> ProblemInstance:
    arr = np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8)
    return ProblemInstance(coupling=CouplingMatrix(arr), density=1.0)


def path_graph(n: int) -> ProblemInstance:
    return ProblemInstance(
        coupling=CouplingMatrix.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    )


def with_exact_denominator(instance: ProblemInstance) -> ProblemInstance:
    cut, _ = brute_force_ground_state(instance.coupling)
    return instance.with_best_known(cut, "exact")


@pytest.fixture
def k2():
    """Einzelne Kante."""
    return complete_graph(2)


@pytest.fixture
def k3():
    """Vollständiges Dreieck."""
    return complete_graph(3)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def p4():
    """Pfad mit 4 Knoten und 3 Kanten."""
    return path_graph(4)


@pytest.fixture
def small_instance():
    """Zufallsinstanz n=10, Dichte 0.5, mit exaktem Nenner."""
    return with_exact_denominator(random_graph(10, 0.5, 1234))


@pytest.fixture
def lockstep_hw():
    """Hardware-Konfiguration ohne Variation, Offsets oder Leckströme."""
    return HwConfig(
        i_fb_amperes=LOCKSTEP_I_FB,
        sigma_cell=0.0,
        i_leak_amperes=0.0,
        sigma_offset_volts=0.0,
    )


@pytest.fixture
def dac():
    return NoiseDacConfig()


@pytest.fixture
def instance_dir(tmp_path):
    """Drei kleine Instanzen mit exaktem Nenner in einem Verzeichnis."""
    directory = tmp_path / "data"
    directory.mkdir()
    for index, seed in enumerate((11, 12, 13)):
        instance = with_exact_denominator(random_graph(10, 0.5, seed))
        save_instance(instance, directory / f"g{index:03d}.ising")
    return directory


@pytest.fixture
def slow():
    """Überspringt teure Prüfungen ohne SB_ISING_SLOW."""
    if not os.environ.get("SB_ISING_SLOW"):
        pytest.skip("SB_ISING_SLOW nicht gesetzt, langsamer Test übersprungen")
