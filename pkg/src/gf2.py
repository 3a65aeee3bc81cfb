"""GF(2)-Lineare Algebra auf bitgepackten Zeilen (Python-int als Bitvektor)."""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveResult:
    """Ergebnis von solve(): Lösung oder Widerspruchszertifikat."""

    solution: Optional[int]
    certificate: Optional[int]  # Bitmaske der kombinierten Zeilen

    @property
    def consistent(self) -> bool:
        return self.solution is not None


def from_bits(bits: Iterable[int]) -> int:
    value = 0
    for i, b in enumerate(bits):
        if b:
            value |= 1 << i
    return value


def matvec(rows: Sequence[int], x: int) -> int:
    """A*x über GF(2); Bit i des Ergebnisses ist Zeile i."""
    out = 0
    for i, row in enumerate(rows):
        if (row & x).bit_count() & 1:
            out |= 1 << i
    return out


def rank(vectors: Iterable[int]) -> int:
    """Rang einer Menge von Bitvektoren."""
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            lead = v.bit_length() - 1
            pivot = basis.get(lead)
            if pivot is None:
                basis[lead] = v
                break
            v ^= pivot
    return len(basis)


def solve(rows: Sequence[int], rhs: int, n_cols: int) -> SolveResult:
    """Löst A x = E über GF(2) (Gauß-Elimination, Zeilen als Bitmasken).

    Spalte j ist Bit j einer Zeile, E_i ist Bit i von ``rhs``. Ist das
    System widersprüchlich, enthält das Zertifikat die Zeilen, deren Summe
    (0...0 | 1) ergibt.
    """
    # erweiterte Zeile: Spalten um 1 verschoben, Bit 0 = rechte Seite
    basis: dict[int, tuple[int, int]] = {}
    for i, row in enumerate(rows):
        v = (row << 1) | ((rhs >> i) & 1)
        combo = 1 << i
        while v > 1:
            lead = v.bit_length() - 1
            entry = basis.get(lead)
            if entry is None:
                basis[lead] = (v, combo)
                break
            v ^= entry[0]
            combo ^= entry[1]
        if v == 1:
            logger.debug(f"Widerspruch nach Zeile {i} gefunden")
            return SolveResult(None, combo)
    x = 0
    for lead in sorted(basis):
        v, _ = basis[lead]
        col = lead - 1
        lower = (v >> 1) & ((1 << col) - 1)
        if ((v & 1) + (lower & x).bit_count()) & 1:
            x |= 1 << col
    return SolveResult(x, None)


def systematic_form(
    generators: Sequence[int],
    combos: Sequence[int],
    coordinates: Iterable[int],
) -> tuple[list[int], list[int], list[int], list[tuple[int, int]]]:
    """Gauß-Jordan über Koordinaten in vorgegebener Reihenfolge.

    Returns:
        (pivots, gens, gen_combos, rest): gens[a] hat an Koordinate pivots[a]
        eine 1 und an allen anderen Pivot-Koordinaten eine 0. ``rest`` sind
        die nicht pivotisierten, von Null verschiedenen Vektoren (mit combo);
        sie verschwinden auf allen durchlaufenen Koordinaten.
    """
    pending = [(g, c) for g, c in zip(generators, combos) if g]
    pivots: list[int] = []
    gens: list[int] = []
    gen_combos: list[int] = []
    for coord in coordinates:
        if not pending:
            break
        bit = 1 << coord
        hit = next((idx for idx, (g, _) in enumerate(pending) if g & bit), None)
        if hit is None:
            continue
        g, c = pending.pop(hit)
        for a in range(len(gens)):
            if gens[a] & bit:
                gens[a] ^= g
                gen_combos[a] ^= c
        reduced = []
        for h, hc in pending:
            if h & bit:
                h ^= g
                hc ^= c
            if h:
                reduced.append((h, hc))
        pending = reduced
        pivots.append(coord)
        gens.append(g)
        gen_combos.append(c)
    return pivots, gens, gen_combos, pending
