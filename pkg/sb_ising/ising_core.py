"""
MAXCUT-Instanzen und Ising-Auswertung.

Eine Instanz ist eine symmetrische, binäre Kantenmatrix J (Diagonale 0),
eine Lösung ein Spinvektor x über {−1, +1}.

Vorzeichenkonvention (eigene Festlegung, die Quelle nennt keine):

    H(x) = Σ_{m<n} J_mn · x_m · x_n
    C(x) = Σ_{m<n} J_mn · (1 − x_m · x_n) / 2 = (|E| − H(x)) / 2

Minimales H entspricht damit dem maximalen Schnitt. Alle Werte in diesem
Modul sind exakte Ganzzahlen.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import networkx as nx
import numpy as np
import numpy.typing as npt
from numba import njit

from .const import EXHAUSTIVE_NODE_CAP, MAX_NODES, PROVENANCE_EXACT
from .exceptions import (
    DimensionError,
    InstanceFormatError,
    OracleCapacityError,
    ValidationError,
)

_LOGGER = logging.getLogger(__name__)

SpinVector = npt.NDArray[np.int8]

# ============================================================================
# Instanzformat
# ============================================================================

FORMAT_MAGIC = "ising-maxcut v1"
HEADER_KEYS = ("n", "density", "seed", "best_known")
OPTIONAL_HEADER_KEYS = ("provenance",)
SEED_MAX = 2**64 - 1


# ============================================================================
# Datentypen
# ============================================================================


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Symmetrische binäre Kantenmatrix J, dicht gespeichert und schreibgeschützt."""

    entries: npt.NDArray[np.int8]
    _j64: npt.NDArray[np.int64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        raw = np.asarray(self.entries)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise ValidationError(f"J muss quadratisch sein, Form {raw.shape}")
        if raw.shape[0] < 2:
            raise ValidationError(f"J braucht mindestens 2 Knoten, hat {raw.shape[0]}")
        if not np.isin(raw, (0, 1)).all():
            m, n = np.argwhere(~np.isin(raw, (0, 1)))[0]
            raise ValidationError(f"J nicht binär: Eintrag {raw[m, n]} bei ({m},{n})")
        diag = np.flatnonzero(np.diagonal(raw))
        if diag.size:
            d = int(diag[0])
            raise ValidationError(f"Diagonale nicht null bei ({d},{d})")
        mismatch = np.argwhere(raw != raw.T)
        if mismatch.size:
            m, n = sorted(int(v) for v in mismatch[0])
            raise ValidationError(f"J nicht symmetrisch: asymmetric at ({m},{n})")

        entries = np.array(raw, dtype=np.int8, copy=True)
        entries.setflags(write=False)
        j64 = entries.astype(np.int64)
        j64.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_j64", j64)

    @classmethod
    def from_dense(cls, array: npt.ArrayLike) -> CouplingMatrix:
        """Erstellt J aus einer dichten Matrix (validiert alle Invarianten)."""
        return cls(np.asarray(array))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> CouplingMatrix:
        """Erstellt J aus einer Kantenliste ungeordneter Paare."""
        arr = np.zeros((n, n), dtype=np.int8)
        for m, k in edges:
            arr[m, k] = 1
            arr[k, m] = 1
        return cls(arr)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self._j64.sum()) // 2

    @property
    def degrees(self) -> npt.NDArray[np.int64]:
        return self._j64.sum(axis=1)

    @property
    def density(self) -> float:
        """Tatsächliche Kantendichte |E| / C(n,2)."""
        return self.edge_count / (self.n * (self.n - 1) / 2)

    @property
    def as_int64(self) -> npt.NDArray[np.int64]:
        return self._j64

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CouplingMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class ProblemInstance:
    """MAXCUT-Instanz mit Generator-Metadaten und optionalem Referenzschnitt."""

    coupling: CouplingMatrix
    seed: int = 0
    density: float = 0.0
    best_known_cut: int | None = None
    provenance: str | None = None

    def __post_init__(self) -> None:
        # numpy-Skalare würden im Dateikopf als np.float64(...) erscheinen
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "density", float(self.density))
        if self.best_known_cut is not None:
            object.__setattr__(self, "best_known_cut", int(self.best_known_cut))
        if not 0 <= self.seed <= SEED_MAX:
            raise ValidationError(f"Seed {self.seed} außerhalb 0..2^64-1")
        if not 0.0 <= self.density <= 1.0:
            raise ValidationError(f"Dichte {self.density} außerhalb [0,1]")
        if self.best_known_cut is not None:
            if self.best_known_cut < 0:
                raise ValidationError(f"best_known_cut negativ: {self.best_known_cut}")
            if self.best_known_cut > self.coupling.edge_count:
                raise ValidationError(
                    f"best_known_cut {self.best_known_cut} größer als "
                    f"Kantenanzahl {self.coupling.edge_count}"
                )
        if self.provenance is not None and (
            not self.provenance or any(c.isspace() for c in self.provenance)
        ):
            raise ValidationError(f"Ungültiger Provenienz-Tag: {self.provenance!r}")

    @property
    def n(self) -> int:
        return self.coupling.n

    @property
    def edge_count(self) -> int:
        return self.coupling.edge_count

    def with_best_known(self, cut: int, provenance: str) -> ProblemInstance:
        """Übernimmt einen neuen Referenzschnitt, senkt einen bestehenden aber nie.

        Ein gleich guter Wert ersetzt die Provenienz nur, wenn er exakt ist.
        """
        current = self.best_known_cut
        if current is None or cut > current or (
            cut == current and provenance == PROVENANCE_EXACT
        ):
            return replace(self, best_known_cut=cut, provenance=provenance)
        if cut < current:
            _LOGGER.info(
                "Gespeicherter Schnitt %d bleibt erhalten (neuer Wert %d ist kleiner)",
                current,
                cut,
            )
        return self


# ============================================================================
# Auswertung
# ============================================================================


def validate_spins(x: npt.ArrayLike, n: int) -> SpinVector:
    """Prüft Länge und Wertebereich eines Spinvektors."""
    spins = np.asarray(x)
    if spins.ndim != 1 or spins.shape[0] != n:
        raise DimensionError(n, int(spins.size) if spins.ndim == 1 else -1)
    if not np.isin(spins, (-1, 1)).all():
        raise ValidationError("Spinvektor enthält Werte außer −1/+1")
    return spins.astype(np.int8, copy=False)


def local_fields(j: CouplingMatrix, x: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Lokale Felder h = J·x."""
    spins = validate_spins(x, j.n)
    return j.as_int64 @ spins.astype(np.int64)


def flip_gains(j: CouplingMatrix, x: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Schnittänderung beim Kippen jedes einzelnen Spins: x_i · (J·x)_i."""
    spins = validate_spins(x, j.n)
    return spins.astype(np.int64) * (j.as_int64 @ spins.astype(np.int64))


def ising_energy(j: CouplingMatrix, x: npt.ArrayLike) -> int:
    """H = Σ_{m<n} J_mn x_m x_n."""
    spins = validate_spins(x, j.n).astype(np.int64)
    return int(spins @ (j.as_int64 @ spins)) // 2


def cut_size(j: CouplingMatrix, x: npt.ArrayLike) -> int:
    """Anzahl der Kanten zwischen Knoten unterschiedlichen Zustands."""
    return (j.edge_count - ising_energy(j, x)) // 2


# ============================================================================
# Generator
# ============================================================================


def random_graph(n: int, density: float, seed: int) -> ProblemInstance:
    """Zufallsgraph G(n, p): jedes Paar unabhängig mit Wahrscheinlichkeit density."""
    if n < 2:
        raise ValidationError(f"Knotenzahl {n} < 2")
    if n > MAX_NODES:
        raise ValidationError(f"Knotenzahl {n} > {MAX_NODES}")
    if not 0.0 < density <= 1.0:
        raise ValidationError(f"Dichte {density} außerhalb (0,1]")
    if not 0 <= seed <= SEED_MAX:
        raise ValidationError(f"Seed {seed} außerhalb 0..2^64-1")

    rng = np.random.default_rng(seed)
    upper = np.triu_indices(n, k=1)
    present = rng.random(upper[0].size) < density
    arr = np.zeros((n, n), dtype=np.int8)
    arr[upper] = present
    arr += arr.T
    return ProblemInstance(coupling=CouplingMatrix(arr), seed=seed, density=density)


# ============================================================================
# Exaktes Orakel (Gray-Code-Enumeration)
# ============================================================================


@njit(cache=True)
def _gray_code_search(j: np.ndarray) -> tuple[int, int]:  # pragma: no cover - JIT
    """Minimiert H über alle Zustände mit x_0 = +1.

    Schritt s kippt Spin ctz(s)+1; der Zustand nach Schritt s entspricht den
    gesetzten Bits von s ^ (s >> 1). Gibt (min H, erster Schritt mit min H) zurück.
    """
    n = j.shape[0]
    x = np.ones(n, dtype=np.int64)
    h = np.zeros(n, dtype=np.int64)
    energy = 0
    for i in range(n):
        s = 0
        for m in range(n):
            s += j[i, m]
        h[i] = s
        energy += s
    energy //= 2
    best = energy
    best_step = 0
    total = 1 << (n - 1)
    for step in range(1, total):
        bit = 0
        t = step
        while (t & 1) == 0:
            t >>= 1
            bit += 1
        i = bit + 1
        xi = x[i]
        energy -= 2 * xi * h[i]
        x[i] = -xi
        for m in range(n):
            h[m] -= 2 * xi * j[m, i]
        if energy < best:
            best = energy
            best_step = step
    return best, best_step


def _gray_state(step: int, n: int) -> SpinVector:
    gray = step ^ (step >> 1)
    spins = np.ones(n, dtype=np.int8)
    for b in range(n - 1):
        if (gray >> b) & 1:
            spins[b + 1] = -1
    return spins


def brute_force_ground_state(
    j: CouplingMatrix, cap: int = EXHAUSTIVE_NODE_CAP
) -> tuple[int, SpinVector]:
    """Exakter Maximalschnitt mit Zeuge; Spin 0 ist wegen x → −x fest auf +1."""
    if j.n > cap:
        raise OracleCapacityError(
            f"Instanz zu groß für exhaustive Suche: n={j.n} > {cap}"
        )
    best_energy, best_step = _gray_code_search(j.as_int64)
    spins = _gray_state(int(best_step), j.n)
    cut = (j.edge_count - int(best_energy)) // 2
    _LOGGER.debug("Exaktes Orakel: n=%d, Schnitt=%d", j.n, cut)
    return cut, spins


# ============================================================================
# Datei-I/O
# ============================================================================


def format_instance(instance: ProblemInstance) -> str:
    """Serialisiert eine Instanz im Textformat (obere Dreiecksmatrix zeilenweise)."""
    best = "none" if instance.best_known_cut is None else str(instance.best_known_cut)
    header = (
        f"n={instance.n} density={instance.density!r} "
        f"seed={instance.seed} best_known={best}"
    )
    if instance.provenance is not None:
        header += f" provenance={instance.provenance}"

    lines = [FORMAT_MAGIC, header]
    entries = instance.coupling.entries
    for m in range(instance.n):
        cols = np.flatnonzero(entries[m, m + 1 :]) + m + 1
        lines.append(" ".join(str(int(c)) for c in cols))
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise InstanceFormatError(f"Erwarte key=value, erhielt '{token}'", line=2)
        if key not in HEADER_KEYS and key not in OPTIONAL_HEADER_KEYS:
            raise InstanceFormatError("Unbekannter Schlüssel", line=2, field=key)
        if key in fields:
            raise InstanceFormatError("Schlüssel doppelt", line=2, field=key)
        fields[key] = value
    for key in HEADER_KEYS:
        if key not in fields:
            raise InstanceFormatError("Pflichtfeld fehlt", line=2, field=key)
    return fields


def _parse_int(value: str, line: int, field_name: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise InstanceFormatError(
            f"Keine Ganzzahl: '{value}'", line=line, field=field_name
        ) from None


def parse_instance(text: str) -> ProblemInstance:
    """Liest eine Instanz aus dem Textformat und validiert alle Invarianten."""
    if not text.strip():
        raise InstanceFormatError("Leere Instanzdatei", line=1)
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    if lines[0].strip() != FORMAT_MAGIC:
        raise InstanceFormatError(
            f"Erwarte '{FORMAT_MAGIC}', erhielt '{lines[0].strip()}'", line=1
        )
    if len(lines) < 2:
        raise InstanceFormatError("Kopfzeile fehlt", line=2)

    header = _parse_header(lines[1])
    n = _parse_int(header["n"], 2, "n")
    if n < 2:
        raise InstanceFormatError(f"n={n} < 2", line=2, field="n")
    if n > MAX_NODES:
        raise InstanceFormatError(f"n={n} > {MAX_NODES}", line=2, field="n")
    try:
        density = float(header["density"])
    except ValueError:
        raise InstanceFormatError(
            f"Keine Zahl: '{header['density']}'", line=2, field="density"
        ) from None
    seed = _parse_int(header["seed"], 2, "seed")
    best_known = (
        None if header["best_known"] == "none"
        else _parse_int(header["best_known"], 2, "best_known")
    )

    rows = lines[2:]
    if len(rows) > n:
        extra = next(
            (i for i, row in enumerate(rows[n:], start=n) if row.strip()), None
        )
        if extra is not None:
            raise InstanceFormatError(
                f"Mehr Zeilen als Knoten (n={n})", line=extra + 3
            )

    arr = np.zeros((n, n), dtype=np.int8)
    for m, row in enumerate(rows[:n]):
        line_no = m + 3
        for token in row.split():
            c = _parse_int(token, line_no, f"row {m}")
            if not 0 <= c < n:
                raise InstanceFormatError(
                    f"Index {c} außerhalb 0..{n - 1}", line=line_no, field=f"row {m}"
                )
            if c == m:
                raise ValidationError(f"Diagonale nicht null bei ({m},{m})")
            if c < m:
                if arr[m, c]:
                    raise InstanceFormatError(
                        f"Doppelte Kante ({c},{m})", line=line_no, field=f"row {m}"
                    )
                raise ValidationError(f"J nicht symmetrisch: asymmetric at ({c},{m})")
            if arr[m, c]:
                raise InstanceFormatError(
                    f"Doppelte Kante ({m},{c})", line=line_no, field=f"row {m}"
                )
            arr[m, c] = 1
            arr[c, m] = 1

    return ProblemInstance(
        coupling=CouplingMatrix(arr),
        seed=seed,
        density=density,
        best_known_cut=best_known,
        provenance=header.get("provenance"),
    )


def save_instance(instance: ProblemInstance, path: str | Path) -> None:
    """Schreibt eine Instanz; load_instance(save_instance(p)) == p."""
    Path(path).write_text(format_instance(instance), encoding="utf-8")


def load_instance(path: str | Path) -> ProblemInstance:
    """Liest eine Instanzdatei."""
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def import_adjacency_list(path: str | Path, seed: int = 0) -> ProblemInstance:
    """Importiert eine networkx-Adjazenzliste mit ganzzahligen Knotennamen.

    Knoten werden sortiert auf 0..n−1 abgebildet; Selbstschleifen sind unzulässig.
    """
    graph = nx.read_adjlist(path, nodetype=int)
    if nx.number_of_selfloops(graph):
        node = next(nx.selfloop_edges(graph))[0]
        raise ValidationError(f"Selbstschleife an Knoten {node}")
    graph = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    n = graph.number_of_nodes()
    arr = nx.to_numpy_array(graph, nodelist=range(n), dtype=np.int8, weight=None)
    coupling = CouplingMatrix(arr)
    return ProblemInstance(coupling=coupling, seed=seed, density=coupling.density)
