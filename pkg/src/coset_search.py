"""
Suche nach Vektoren kleinen Gewichts in einer Nebenklasse E + Im(A).

Der Kontextualitätsgrad ist das minimale Gewicht in E + Im(A) (Abstand
des Codeworts). Der Code Im(A) wird von den Spalten von A aufgespannt,
jede Spalte ist ein l-Bit-int (Bit i = Kontext i).

Exakte Verfahren:
    SyndromeTable                -- Breitensuche über alle 2^(l-rang) Syndrome
    InformationSetEnumeration    -- Aufzählung über disjunkte Informationsmengen
                                    mit Brouwer-Zimmermann-Schranke

Heuristik:
    information_set_decoding     -- randomisiertes Lee-Brickell (p=2) plus
                                    gierige Einzelflips, parallele Neustarts
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import reduce
from itertools import combinations, repeat
from math import comb
from operator import xor
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from gf2 import rank, systematic_form

logger = logging.getLogger(__name__)

# Größte Redundanz l - rang, für die die Syndromtabelle aufgebaut wird
SYNDROME_TABLE_MAX_REDUNDANCY = 20

_BFS_BLOCK = 1 << 22
_DEADLINE_CHECK_EVERY = 4096

# Koordinatenreihenfolgen, aus denen die Informationsmengen gewählt werden
_INFORMATION_SET_TRIES = 24


class SearchBudgetExceeded(Exception):
    """Zeit- oder Iterationsbudget der Suche ist aufgebraucht."""


def _check_deadline(deadline: Optional[float]):
    if deadline is not None and time.time() > deadline:
        raise SearchBudgetExceeded("Zeitlimit der Nebenklassensuche erreicht")


def _reduce(v: int, pivots: Sequence[int], gens: Sequence[int]) -> int:
    """Eliminiert v an allen Pivot-Koordinaten (systematische Generatoren)."""
    for coord, g in zip(pivots, gens):
        if v >> coord & 1:
            v ^= g
    return v


class SyndromeTable:
    """Exakte Suche per Breitensuche über den Quotientenraum F2^l / Im(A).

    Jeder Einheitsvektor e_c wird auf sein Syndrom abgebildet; der Abstand
    eines Syndroms vom Nullsyndrom in diesem Cayley-Graphen ist das minimale
    Gewicht seiner Nebenklasse. Die Ebenen werden nur so weit aufgebaut, wie
    die Anfragen es verlangen.
    """

    def __init__(self, columns: Sequence[int], target: int, length: int):
        nonzero = [c for c in columns if c]
        self.length = length
        self._pivots, self._gens, _, _ = systematic_form(nonzero, [0] * len(nonzero), range(length))
        pivot_set = set(self._pivots)
        self._free = [c for c in range(length) if c not in pivot_set]
        self.redundancy = len(self._free)
        if self.redundancy > SYNDROME_TABLE_MAX_REDUNDANCY:
            raise ValueError(
                f"Syndromtabelle mit Redundanz {self.redundancy} ist zu groß "
                f"(Maximum {SYNDROME_TABLE_MAX_REDUNDANCY})"
            )
        self._unit = np.array([self._syndrome(1 << c) for c in range(length)], dtype=np.int64)
        self._target = self._syndrome(target)
        size = 1 << self.redundancy
        self._dist = np.full(size, -1, dtype=np.int32)
        self._parent = np.full(size, -1, dtype=np.int32)
        self._dist[0] = 0
        self._frontier = np.zeros(1, dtype=np.int64)
        self._level = 0
        logger.debug(f"Syndromtabelle: l={length}, Redundanz {self.redundancy}")

    def _syndrome(self, v: int) -> int:
        v = _reduce(v, self._pivots, self._gens)
        s = 0
        for t, c in enumerate(self._free):
            if v >> c & 1:
                s |= 1 << t
        return s

    def _expand(self):
        level = self._level + 1
        block = max(1, _BFS_BLOCK // max(1, self.length))
        columns = np.arange(self.length, dtype=np.int32)
        parts = []
        for start in range(0, self._frontier.size, block):
            chunk = self._frontier[start:start + block]
            succ = (chunk[:, None] ^ self._unit[None, :]).ravel()
            cols = np.broadcast_to(columns, (chunk.size, self.length)).ravel()
            fresh = self._dist[succ] < 0
            succ, cols = succ[fresh], cols[fresh]
            succ, first = np.unique(succ, return_index=True)
            self._dist[succ] = level
            self._parent[succ] = cols[first]
            parts.append(succ)
        self._frontier = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        self._level = level

    def _leader(self, syndrome: int) -> int:
        e = 0
        while syndrome:
            c = int(self._parent[syndrome])
            e ^= 1 << c
            syndrome ^= int(self._unit[c])
        return e

    def search(self, max_weight: int, deadline: Optional[float] = None) -> Optional[int]:
        """Ein Vektor der Nebenklasse mit Gewicht <= max_weight oder None."""
        while self._dist[self._target] < 0:
            if self._level >= max_weight or self._frontier.size == 0:
                return None
            _check_deadline(deadline)
            self._expand()
            logger.debug(f"Syndromtabelle: Ebene {self._level}, {self._frontier.size} neue Syndrome")
        if self._dist[self._target] > max_weight:
            return None
        return self._leader(self._target)


def _disjoint_information_sets(
    generators: Sequence[int], order: Sequence[int], k: int
) -> list[tuple[int, list[int], list[int]]]:
    """Paarweise disjunkte (Teil-)Informationsmengen entlang ``order``.

    Jede Menge I_j wird in den noch freien Koordinaten pivotisiert; fehlt
    dort Rang, liegen die übrigen k - r_j Pivots auf schon benutzten
    Koordinaten. Liefert (Defizit k - r_j, Pivots, Generatoren) je Menge.
    """
    sets = []
    remaining = list(order)
    used: list[int] = []
    while remaining:
        pivots, gens, _, _ = systematic_form(generators, [0] * len(generators), remaining + used)
        free = set(remaining)
        own = [c for c in pivots if c in free]
        if not own:
            break
        sets.append((k - len(own), pivots, gens))
        taken = set(own)
        remaining = [c for c in remaining if c not in taken]
        used.extend(own)
    return sets


def _bound_after(deficits: Sequence[int], t: int) -> int:
    """Untere Schranke nach vollständiger Ebene t (Brouwer-Zimmermann)."""
    return sum(max(0, t + 1 - d) for d in deficits)


def _work(deficits: Sequence[int], k: int, goal: int) -> int:
    """Anzahl der Kandidaten, bis die Schranke ``goal`` erreicht ist."""
    total = 0
    for t in range(k + 1):
        total += len(deficits) * comb(k, t)
        if _bound_after(deficits, t) >= goal:
            break
    return total


class InformationSetEnumeration:
    """Exakte Suche über paarweise disjunkte Informationsmengen.

    Für jede Menge I_j (Rang r_j, Defizit k - r_j) wird die Nebenklasse in
    systematischer Form dargestellt; auf Ebene t werden alle Vektoren mit
    genau t Generatoren aufgezählt. Nach vollständiger Ebene t hat jeder
    nicht gesehene Vektor in I_j mindestens t+1-(k-r_j) Einsen, insgesamt
    also mindestens die Summe dieser Beiträge.

    Die Mengen hängen von der Koordinatenreihenfolge ab; aus mehreren
    Reihenfolgen (fester Seed) wird die mit dem geringsten geschätzten
    Aufwand bis zum Gewicht des Ziels gewählt.
    """

    def __init__(self, columns: Sequence[int], target: int, length: int, seed: int = 0):
        nonzero = [c for c in columns if c]
        self.length = length
        self.rank = rank(nonzero)
        self.best = target
        self.best_weight = target.bit_count()
        self._sets: list[tuple[int, list[int], int]] = []
        if self.rank:
            self._sets = self._choose_sets(nonzero, target, seed)
        self.deficits = [d for d, _, _ in self._sets]
        self.lower_bound = 0 if self._sets else self.best_weight
        self._candidates = self._enumerate()
        logger.debug(
            f"Informationsmengen: l={length}, rang={self.rank}, "
            f"{len(self._sets)} disjunkte Mengen, Defizite {self.deficits}"
        )

    def _choose_sets(self, generators: list[int], target: int, seed: int) -> list[tuple[int, list[int], int]]:
        k = self.rank
        goal = max(1, self.best_weight)
        rng = np.random.default_rng(seed)
        best_sets, best_work = None, None
        for attempt in range(_INFORMATION_SET_TRIES):
            order = range(self.length) if attempt == 0 else rng.permutation(self.length).tolist()
            sets = _disjoint_information_sets(generators, order, k)
            deficits = [d for d, _, _ in sets]
            # Teilmengen kosten pro Ebene so viel wie volle Mengen
            prefix = min(range(1, len(sets) + 1), key=lambda p: _work(deficits[:p], k, goal))
            work = _work(deficits[:prefix], k, goal)
            if best_work is None or work < best_work:
                best_sets, best_work = sets[:prefix], work
            if len(best_sets) >= self.length // k and all(d == 0 for d, _, _ in best_sets):
                break
        return [(d, gens, _reduce(target, pivots, gens)) for d, pivots, gens in best_sets]

    def _enumerate(self) -> Iterator[int]:
        for t in range(self.rank + 1):
            for _, gens, reduced in self._sets:
                for subset in combinations(gens, t):
                    yield reduce(xor, subset, reduced)
            self.lower_bound = _bound_after(self.deficits, t)
            logger.debug(f"Ebene {t} abgeschlossen, untere Schranke {self.lower_bound}")
        self.lower_bound = self.length + 1

    def search(self, max_weight: int, deadline: Optional[float] = None) -> Optional[int]:
        """Ein Vektor der Nebenklasse mit Gewicht <= max_weight oder None."""
        if self.best_weight <= max_weight:
            return self.best
        seen = 0
        while self.lower_bound <= max_weight:
            try:
                v = next(self._candidates)
            except StopIteration:
                break
            seen += 1
            if seen % _DEADLINE_CHECK_EVERY == 0:
                _check_deadline(deadline)
            w = v.bit_count()
            if w < self.best_weight:
                self.best, self.best_weight = v, w
                if w <= max_weight:
                    return v
        return None


CosetEngine = Union[SyndromeTable, InformationSetEnumeration]


def exact_engine(columns: Sequence[int], target: int, length: int) -> CosetEngine:
    """Wählt das exakte Verfahren anhand der Redundanz l - rang."""
    redundancy = length - rank(columns)
    if redundancy <= SYNDROME_TABLE_MAX_REDUNDANCY:
        return SyndromeTable(columns, target, length)
    return InformationSetEnumeration(columns, target, length)


# === HEURISTIK ===


@dataclass(frozen=True)
class IsdResult:
    """Bester gefundener Nebenklassenvektor und Verlauf der Schranke.

    ``trace`` enthält (Iteration, Gewicht) bei jeder Verbesserung, die
    Iteration -1 steht für den Startvektor E selbst.
    """

    vector: int
    weight: int
    iterations: int
    trace: tuple[tuple[int, int], ...]


def polish(v: int, columns: Sequence[int]) -> int:
    """Gierige Einzelflips: addiert Spalten, solange das Gewicht sinkt."""
    w = v.bit_count()
    while True:
        best_col, best_w = None, w
        for col in columns:
            nw = (v ^ col).bit_count()
            if nw < best_w:
                best_col, best_w = col, nw
        if best_col is None:
            return v
        v ^= best_col
        w = best_w


def _lee_brickell(columns: Sequence[int], target: int, length: int, rng: np.random.Generator) -> int:
    order = rng.permutation(length).tolist()
    pivots, gens, _, _ = systematic_form(columns, [0] * len(columns), order)
    base = _reduce(target, pivots, gens)
    best, best_w = base, base.bit_count()
    for a, ga in enumerate(gens):
        va = base ^ ga
        w = va.bit_count()
        if w < best_w:
            best, best_w = va, w
        for gb in gens[a + 1:]:
            vab = va ^ gb
            w = vab.bit_count()
            if w < best_w:
                best, best_w = vab, w
    return polish(best, columns)


def _isd_chunk(
    columns: tuple[int, ...],
    target: int,
    length: int,
    seed: int,
    indices: Sequence[int],
    deadline: Optional[float],
) -> list[tuple[int, int, int]]:
    """Führt die Iterationen ``indices`` aus; liefert (i, Gewicht, Vektor) je Iteration."""
    out = []
    for i in indices:
        if deadline is not None and time.time() > deadline:
            break
        rng = np.random.default_rng([seed, i])
        v = _lee_brickell(columns, target, length, rng)
        out.append((i, v.bit_count(), v))
    return out


def information_set_decoding(
    columns: Sequence[int],
    target: int,
    length: int,
    iterations: int,
    seed: int = 0,
    threads: int = 1,
    deadline: Optional[float] = None,
) -> IsdResult:
    """Randomisierte Suche nach einem leichten Vektor in target + span(columns).

    Iteration i verwendet den Zufallsgenerator default_rng([seed, i]); das
    Ergebnis ist das Minimum über (Gewicht, i) und damit unabhängig von
    ``threads``. Mehr Iterationen verschlechtern die Schranke nie.
    """
    columns = tuple(c for c in columns if c)
    if not columns or target == 0:
        return IsdResult(target, target.bit_count(), 0, ((-1, target.bit_count()),))

    indices = list(range(iterations))
    if threads <= 1:
        results = _isd_chunk(columns, target, length, seed, indices, deadline)
    else:
        n_chunks = min(len(indices), threads * 4)
        chunks = [indices[j::n_chunks] for j in range(n_chunks)]
        results = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(
                _isd_chunk,
                repeat(columns),
                repeat(target),
                repeat(length),
                repeat(seed),
                chunks,
                repeat(deadline),
            ):
                results.extend(part)
    results.sort()

    best, best_w = target, target.bit_count()
    trace = [(-1, best_w)]
    for i, w, v in results:
        if w < best_w:
            best, best_w = v, w
            trace.append((i, w))
            logger.info(f"ISD Iteration {i}: Schranke {w}")
    if len(results) < iterations:
        logger.warning(f"ISD nach {len(results)} von {iterations} Iterationen abgebrochen (Zeitlimit)")
    return IsdResult(best, best_w, len(results), tuple(trace))
