"""
Lineares System (A, E) einer Konfiguration, Validierung und Kennzahlen.

A ist die l x p Inzidenzmatrix (Zeile i = Kontext i, Spalte j = Observable j),
E der Bewertungsvektor (E_i = 1 genau für negative Kontexte).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from geometry import Configuration
from gf2 import from_bits, matvec, rank
from pauli import fold_product, observable_string, symplectic_bits

logger = logging.getLogger(__name__)


class IncidenceError(ValueError):
    """Inkonsistentes lineares System (Dimensionen, Zeilengewicht, Bewertung)."""


@dataclass(frozen=True)
class IncidenceSystem:
    """Bitgepacktes System A x = E über GF(2).

    ``rows[i]`` hat Bit j gesetzt, wenn Kontext i Observable j enthält;
    ``valuation`` hat Bit i gesetzt, wenn Kontext i negativ ist.
    """

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]
    valuation: int

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise IncidenceError(f"{len(self.rows)} Zeilen statt {self.n_rows}")
        limit = 1 << self.n_cols
        for i, row in enumerate(self.rows):
            if row < 0 or row >= limit:
                raise IncidenceError(f"Zeile {i} passt nicht zu {self.n_cols} Spalten")
            if row.bit_count() < 2:
                raise IncidenceError(f"Zeile {i} hat weniger als zwei Einsen")
        if self.valuation < 0 or self.valuation >= 1 << self.n_rows:
            raise IncidenceError(f"Bewertungsvektor passt nicht zu {self.n_rows} Zeilen")

    @property
    def n_negative(self) -> int:
        return self.valuation.bit_count()

    @property
    def n_positive(self) -> int:
        return self.n_rows - self.n_negative

    def product(self, x: int) -> int:
        """A x über GF(2), Bit i = Zeile i."""
        return matvec(self.rows, x)

    def columns(self) -> list[int]:
        """Spalten von A als l-Bit-Vektoren (Erzeuger von Im(A))."""
        cols = [0] * self.n_cols
        for i, row in enumerate(self.rows):
            while row:
                low = row & -row
                cols[low.bit_length() - 1] |= 1 << i
                row ^= low
        return cols

    def to_dense(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            for j in range(self.n_cols):
                a[i, j] = row >> j & 1
        e = np.array([self.valuation >> i & 1 for i in range(self.n_rows)], dtype=np.uint8)
        return a, e

    @classmethod
    def from_dense(cls, a, e) -> "IncidenceSystem":
        a = np.asarray(a, dtype=np.uint8) & 1
        e = np.asarray(e, dtype=np.uint8) & 1
        if a.ndim != 2 or e.shape != (a.shape[0],):
            raise IncidenceError(f"Unpassende Dimensionen: A {a.shape}, E {e.shape}")
        rows = tuple(from_bits(r.tolist()) for r in a)
        return cls(a.shape[0], a.shape[1], rows, from_bits(e.tolist()))

    def with_valuation(self, valuation: int) -> "IncidenceSystem":
        return IncidenceSystem(self.n_rows, self.n_cols, self.rows, valuation)


@dataclass(frozen=True)
class ConfigStats:
    n_contexts: int
    n_observables: int
    n_negative: int
    n_positive: int
    rank: int


class ViolationKind(str, Enum):
    QUBIT_MISMATCH = "qubit-mismatch"
    BAD_INDEX = "bad-index"
    TOO_SMALL = "too-small"
    NON_COMMUTING = "non-commuting"
    SIGN_UNDEFINED = "sign-undefined"
    SIGN_MISMATCH = "sign-mismatch"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    context: Optional[int]
    message: str

    def __str__(self) -> str:
        where = f"Kontext {self.context}" if self.context is not None else "Konfiguration"
        return f"[{self.kind.value}] {where}: {self.message}"


def build_incidence(c: Configuration) -> IncidenceSystem:
    """Baut (A, E); Spalten in der Reihenfolge c.points, Zeilen wie c.contexts.

    Raises:
        IncidenceError: Kontext mit weniger als zwei Observablen.
    """
    rows = []
    valuation = 0
    for i, ctx in enumerate(c.contexts):
        rows.append(sum(1 << j for j in set(ctx.members)))
        if ctx.negative:
            valuation |= 1 << i
    system = IncidenceSystem(len(c.contexts), len(c.points), tuple(rows), valuation)
    logger.debug(f"Inzidenzsystem {system.n_rows}x{system.n_cols}, {system.n_negative} negativ")
    return system


def validate(c: Configuration) -> list[Violation]:
    """Prüft alle Kontexte und liefert sämtliche Verstöße (leer = gültig)."""
    violations: list[Violation] = []
    for j, p in enumerate(c.points):
        if p.qubits != c.qubits:
            violations.append(
                Violation(ViolationKind.QUBIT_MISMATCH, None, f"Punkt {j} ({p}) hat {p.qubits} Qubits statt {c.qubits}")
            )
    if violations:
        return violations

    n = c.qubits
    for i, ctx in enumerate(c.contexts):
        if any(j < 0 or j >= len(c.points) for j in ctx.members):
            violations.append(Violation(ViolationKind.BAD_INDEX, i, f"Index außerhalb von 0..{len(c.points) - 1}"))
            continue
        if len(set(ctx.members)) < 2:
            violations.append(Violation(ViolationKind.TOO_SMALL, i, "weniger als zwei Observablen"))
            continue
        bits = [c.points[j].bits for j in ctx.members]
        commuting = True
        for a_idx, a in enumerate(bits):
            for b in bits[a_idx + 1:]:
                if symplectic_bits(a, b, n):
                    commuting = False
                    violations.append(
                        Violation(
                            ViolationKind.NON_COMMUTING,
                            i,
                            f"{observable_string(a, n)} und {observable_string(b, n)} kommutieren nicht",
                        )
                    )
        if not commuting:
            continue
        residue, phase = fold_product(bits, n)
        if residue:
            violations.append(
                Violation(
                    ViolationKind.SIGN_UNDEFINED,
                    i,
                    f"Produkt ist {observable_string(residue, n)}, kein Vielfaches der Identität",
                )
            )
            continue
        sign = 1 if phase == 0 else -1
        if sign != ctx.sign:
            violations.append(
                Violation(
                    ViolationKind.SIGN_MISMATCH,
                    i,
                    f"Vorzeichen {ctx.sign:+d} angegeben, Produkt ergibt {sign:+d}",
                )
            )
    if violations:
        logger.warning(f"Konfiguration '{c.family}' hat {len(violations)} Verstöße")
    return violations


def stats(s: IncidenceSystem) -> ConfigStats:
    return ConfigStats(
        n_contexts=s.n_rows,
        n_observables=s.n_cols,
        n_negative=s.n_negative,
        n_positive=s.n_positive,
        rank=rank(s.rows),
    )


def assignment_from_bits(bits: Sequence[int], n_cols: int) -> int:
    """0/1-Folge x_1..x_p als Bitmaske (Bit j = x_{j+1}).

    Raises:
        IncidenceError: Falsche Länge oder Werte außer 0/1.
    """
    if len(bits) != n_cols:
        raise IncidenceError(f"Belegung hat Länge {len(bits)} statt {n_cols}")
    if any(b not in (0, 1) for b in bits):
        raise IncidenceError("Belegung darf nur 0 und 1 enthalten")
    return from_bits(bits)
