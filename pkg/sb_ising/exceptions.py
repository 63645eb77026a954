"""Fehlerklassen für den SB-Ising-Solver."""
from __future__ import annotations


class SbIsingError(Exception):
    """Basisklasse aller Solver-Fehler (Laufzeitfehler, CLI-Exit 1)."""


class ValidationError(SbIsingError, ValueError):
    """Verletzte Invariante oder ungültige Konfiguration (CLI-Exit 2)."""


class DimensionError(ValidationError):
    """Spinvektor und Kopplungsmatrix haben unterschiedliche Länge."""

    def __init__(self, expected: int, actual: int) -> None:
        super().__init__(
            f"Dimensionsfehler: Matrix hat n={expected}, Vektor hat Länge {actual}"
        )
        self.expected = expected
        self.actual = actual


class InstanceFormatError(ValidationError):
    """Instanzdatei nicht lesbar, mit Zeilen-/Feldkontext."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None) -> None:
        context = []
        if line is not None:
            context.append(f"Zeile {line}")
        if field is not None:
            context.append(f"Feld '{field}'")
        prefix = f"[{', '.join(context)}] " if context else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field


class OracleCapacityError(SbIsingError):
    """Instanz zu groß für das exhaustive Orakel."""


class MissingDenominatorError(SbIsingError):
    """Benchmark ohne gespeicherten Nenner (best_known_cut)."""
