"""
Geometrie von W_N

Aufzählung der total isotropen Unterräume (rekursiv, jeder Unterraum genau
einmal in lexikographisch kanonischer Form) und die daraus abgeleiteten
Konfigurationen: Perpsets, Quadriken, Doilies, Spreads, Two-Spreads und
Mermin-Peres-Gitter.
"""

import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import islice, repeat
from typing import Iterator, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from gf2 import rank
from pauli import (
    PAULI_LETTERS,
    PauliError,
    Point,
    encode,
    observable_string,
    product_phase,
    quadratic_form,
    sign_of_members,
    symplectic_bits,
)

logger = logging.getLogger(__name__)

# Kandidaten werden als int64 gehalten
MAX_ENUMERATION_QUBITS = 31

# Höchstens so viele offene Zweige je Worker-Prozess
BRANCHES_PER_WORKER = 2


class GeometryError(ValueError):
    """Ungültige Parameter oder Eingabe ohne die geforderte Struktur."""


class Family(str, Enum):
    SUBSPACES = "subspaces"
    PERPSET = "perpset"
    QUADRIC = "quadric"
    DOILY = "doily"
    TWO_SPREAD = "two-spread"
    GRID = "grid"


class QuadricType(str, Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"


# === DATENTYPEN ===


@dataclass(frozen=True)
class Subspace:
    """Total isotroper Unterraum der projektiven Dimension ``dim``.

    ``members`` sind die 2^(dim+1)-1 Punkte als rohe Bitvektoren, sortiert.
    """

    qubits: int
    dim: int
    members: tuple[int, ...]
    sign: Optional[int] = None

    @property
    def points(self) -> tuple[Point, ...]:
        return tuple(Point(b, self.qubits) for b in self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Context:
    """Kontext: Indizes in Configuration.points plus Vorzeichen."""

    members: tuple[int, ...]
    sign: int

    @property
    def negative(self) -> bool:
        return self.sign < 0


@dataclass(frozen=True)
class Configuration:
    """Quantenkonfiguration (O, C) mit Kontextbewertung."""

    qubits: int
    family: str
    points: tuple[Point, ...]
    contexts: tuple[Context, ...]
    label: str = ""

    @property
    def n_negative(self) -> int:
        return sum(1 for c in self.contexts if c.negative)

    def observables(self) -> list[str]:
        return [str(p) for p in self.points]

    def context_points(self, index: int) -> tuple[Point, ...]:
        return tuple(self.points[j] for j in self.contexts[index].members)

    def isolated(self) -> list[int]:
        """Indizes der Punkte, die in keinem Kontext liegen."""
        used = {j for c in self.contexts for j in c.members}
        return [j for j in range(len(self.points)) if j not in used]

    @classmethod
    def from_point_sets(
        cls,
        qubits: int,
        family: str,
        point_sets: Sequence[Sequence[int]],
        signs: Optional[Sequence[int]] = None,
        points: Optional[Sequence[int]] = None,
        label: str = "",
    ) -> "Configuration":
        """Baut eine Konfiguration aus Punktmengen (rohe Bitvektoren).

        Ohne ``signs`` werden die Vorzeichen berechnet; ohne ``points`` ist
        die Punktliste die sortierte Vereinigung der Kontexte.
        """
        if points is None:
            points = sorted({b for members in point_sets for b in members})
        index = {b: i for i, b in enumerate(points)}
        if len(index) != len(points):
            raise GeometryError("Punktliste enthält Duplikate")
        contexts = []
        for j, members in enumerate(point_sets):
            try:
                idx = tuple(sorted(index[b] for b in members))
            except KeyError as e:
                raise GeometryError(
                    f"Kontext {j} enthält einen Punkt außerhalb der Punktliste: "
                    f"{observable_string(e.args[0], qubits)}"
                ) from None
            sign = signs[j] if signs is not None else sign_of_members(members, qubits)
            contexts.append(Context(idx, int(sign)))
        return cls(
            qubits=qubits,
            family=family,
            points=tuple(Point(b, qubits) for b in points),
            contexts=tuple(contexts),
            label=label,
        )


@dataclass(frozen=True)
class SubspaceCensus:
    """Zählung (Anzahl, davon negativ); assoziativ addierbar."""

    count: int = 0
    negative: int = 0

    def __add__(self, other: "SubspaceCensus") -> "SubspaceCensus":
        return SubspaceCensus(self.count + other.count, self.negative + other.negative)


class FamilySpec(BaseModel):
    """Parameter einer Konfigurationsfamilie (CLI und build_family)."""

    family: Family
    qubits: int = Field(ge=1)
    k: Optional[int] = None
    anchor: Optional[str] = None
    embedding: Optional[tuple[int, ...]] = None

    @model_validator(mode="after")
    def _check_consistency(self):
        n = self.qubits
        if self.family == Family.SUBSPACES:
            if self.k is None:
                raise ValueError("Familie 'subspaces' benötigt k")
            _check_subspace_params(n, self.k)
        elif self.k is not None:
            raise ValueError(f"k ist nur für 'subspaces' erlaubt, nicht für '{self.family.value}'")

        if self.anchor is not None:
            if self.family not in (Family.PERPSET, Family.QUADRIC):
                raise ValueError(f"Anker ist für '{self.family.value}' nicht erlaubt")
            if len(self.anchor) != n or any(c not in PAULI_LETTERS for c in self.anchor):
                raise ValueError(f"Anker {self.anchor!r} ist keine {n}-Qubit-Observable")
            if self.family == Family.PERPSET and set(self.anchor) == {"I"}:
                raise ValueError("Perpset-Zentrum darf nicht die Identität sein")

        if self.family in (Family.DOILY, Family.TWO_SPREAD, Family.GRID):
            if n < 2:
                raise ValueError(f"Familie '{self.family.value}' benötigt mindestens 2 Qubits")
            _active_slots(n, self.embedding)
        elif self.embedding is not None:
            raise ValueError(f"Einbettung ist für '{self.family.value}' nicht erlaubt")
        return self


# === AUFZÄHLUNG TOTAL ISOTROPER UNTERRÄUME ===


def _check_subspace_params(qubits: int, k: int):
    if qubits < 2:
        raise GeometryError(f"Aufzählung benötigt N >= 2, nicht {qubits}")
    if qubits > MAX_ENUMERATION_QUBITS:
        raise GeometryError(f"Aufzählung unterstützt höchstens {MAX_ENUMERATION_QUBITS} Qubits")
    if not 1 <= k <= qubits - 1:
        raise GeometryError(f"Dimension k={k} außerhalb von 1..{qubits - 1}")


def _popcount(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values).astype(np.int64)


def _orthogonal_mask(cands: np.ndarray, p: int, qubits: int) -> np.ndarray:
    mask = (1 << qubits) - 1
    pz, px = p >> qubits, p & mask
    return (_popcount(((cands >> qubits) & px) ^ (cands & mask & pz)) & 1) == 0


def _child_candidates(cands: np.ndarray, p: int, qubits: int) -> np.ndarray:
    """Zulässige Nachfolger nach Aufnahme von p.

    Ein Nachfolger p' muss größer als jedes Element des neuen Unterraums
    sein (höchstes Bit oberhalb aller Pivots), an allen Pivot-Positionen 0
    haben und orthogonal zu p sein. Die übrigen Bedingungen sind bereits in
    ``cands`` erfüllt.
    """
    msb = p.bit_length() - 1
    rest = cands[np.searchsorted(cands, 1 << (msb + 1)):]
    keep = ((rest >> msb) & 1) == 0
    keep &= _orthogonal_mask(rest, p, qubits)
    return rest[keep]


def _mul_vec(a_bits, a_phase, b_bits, qubits: int):
    """Vektorisiertes Produkt (i^a_phase P(a)) * P(b)."""
    mask = (1 << qubits) - 1
    az, ax = a_bits >> qubits, a_bits & mask
    bz, bx = b_bits >> qubits, b_bits & mask
    c = a_bits ^ b_bits
    cz, cx = c >> qubits, c & mask
    e = _popcount(az & ax) + _popcount(bz & bx) + 2 * _popcount(az & bx) - _popcount(cz & cx)
    return c, (a_phase + e) & 3


def _extend_product(prod: tuple[int, int], p: int, members: tuple[int, ...], qubits: int):
    bits, phase = prod
    for b in (p,) + tuple(q ^ p for q in members):
        phase = (phase + product_phase(bits, b, qubits)) & 3
        bits ^= b
    return bits, phase


def _leaf_signs(qubits: int, members: tuple[int, ...], prod: tuple[int, int], cands: np.ndarray):
    """Vorzeichen aller Unterräume S + {p} + (S+p) für p in cands."""
    bits = np.full(cands.shape, prod[0], dtype=np.int64)
    phase = np.full(cands.shape, prod[1], dtype=np.int64)
    bits, phase = _mul_vec(bits, phase, cands, qubits)
    for q in members:
        bits, phase = _mul_vec(bits, phase, cands ^ q, qubits)
    if np.any(bits) or np.any(phase & 1):
        raise GeometryError("Interner Fehler: Unterraumprodukt ist kein reelles Vielfaches der Identität")
    return np.where(phase == 0, 1, -1)


def _walk(qubits: int, k: int, level: int, members: tuple[int, ...], prod, cands: np.ndarray):
    """Rekursiver Abstieg; liefert (members, prod, cands) auf der letzten Ebene."""
    if level == k:
        yield members, prod, cands
        return
    for p in cands.tolist():
        child = _child_candidates(cands, p, qubits)
        if child.size == 0:
            continue
        yield from _walk(
            qubits,
            k,
            level + 1,
            members + (p,) + tuple(q ^ p for q in members),
            _extend_product(prod, p, members, qubits),
            child,
        )


def _all_candidates(qubits: int) -> np.ndarray:
    return np.arange(1, 1 << (2 * qubits), dtype=np.int64)


def _leaf_batches(qubits: int, k: int, first_points: Sequence[int]):
    cands = _all_candidates(qubits)
    for p in first_points:
        child = _child_candidates(cands, p, qubits)
        if child.size == 0:
            continue
        yield from _walk(qubits, k, 1, (p,), (p, 0), child)


def _materialize_branch(qubits: int, k: int, first_point: int) -> list[tuple[tuple[int, ...], int]]:
    out = []
    for members, prod, leaf in _leaf_batches(qubits, k, (first_point,)):
        signs = _leaf_signs(qubits, members, prod, leaf)
        for c, s in zip(leaf.tolist(), signs.tolist()):
            out.append((tuple(sorted(members + (c,) + tuple(q ^ c for q in members))), s))
    return out


def _census_branch(qubits: int, k: int, first_points: Sequence[int]) -> SubspaceCensus:
    census = SubspaceCensus()
    for members, prod, leaf in _leaf_batches(qubits, k, first_points):
        signs = _leaf_signs(qubits, members, prod, leaf)
        census = census + SubspaceCensus(int(leaf.size), int(np.count_nonzero(signs < 0)))
    return census


def totally_isotropic_subspaces(qubits: int, k: int, threads: int = 1) -> Iterator[Subspace]:
    """Liefert jeden total isotropen k-Unterraum von W_N genau einmal.

    Die Reihenfolge ist deterministisch (lexikographisch über die
    Konstruktionspunkte) und hängt nicht von ``threads`` ab.

    Raises:
        GeometryError: Wenn k nicht in 1..N-1 liegt.
    """
    _check_subspace_params(qubits, k)
    firsts = range(1, 1 << (2 * qubits))
    if threads <= 1:
        for p in firsts:
            for members, sign in _materialize_branch(qubits, k, p):
                yield Subspace(qubits, k, members, sign)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        points = iter(firsts)
        pending = deque(
            pool.submit(_materialize_branch, qubits, k, p)
            for p in islice(points, threads * BRANCHES_PER_WORKER)
        )
        try:
            while pending:
                branch = pending.popleft().result()
                for p in islice(points, 1):
                    pending.append(pool.submit(_materialize_branch, qubits, k, p))
                for members, sign in branch:
                    yield Subspace(qubits, k, members, sign)
        finally:
            for future in pending:
                future.cancel()


def subspace_census(qubits: int, k: int, threads: int = 1) -> SubspaceCensus:
    """Zählt die k-Unterräume und die negativen darunter, ohne sie zu halten."""
    _check_subspace_params(qubits, k)
    firsts = list(range(1, 1 << (2 * qubits)))
    if threads <= 1:
        census = _census_branch(qubits, k, firsts)
    else:
        n_chunks = min(len(firsts), threads * 4)
        chunks = [firsts[i::n_chunks] for i in range(n_chunks)]
        census = SubspaceCensus()
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_census_branch, repeat(qubits), repeat(k), chunks):
                census = census + part
    logger.info(
        f"Zählung N={qubits}, k={k}: {census.count} Unterräume, {census.negative} negativ"
    )
    return census


def closure(basis: Sequence[Point]) -> Subspace:
    """Alle nichttrivialen GF(2)-Kombinationen einer isotropen Basis.

    Raises:
        GeometryError: Leere, linear abhängige oder nicht isotrope Basis.
    """
    if not basis:
        raise GeometryError("Leere Basis")
    qubits = basis[0].qubits
    if any(b.qubits != qubits for b in basis):
        raise GeometryError("Basispunkte haben unterschiedliche Qubit-Anzahl")
    vectors = [b.bits for b in basis]
    if rank(vectors) != len(vectors):
        raise GeometryError(f"Basis ist linear abhängig: {[str(b) for b in basis]}")
    for i, a in enumerate(vectors):
        for b in vectors[i + 1:]:
            if symplectic_bits(a, b, qubits):
                raise GeometryError(
                    f"Basis ist nicht isotrop: {observable_string(a, qubits)} und "
                    f"{observable_string(b, qubits)} kommutieren nicht"
                )
    members: list[int] = []
    for b in vectors:
        members = members + [b] + [m ^ b for m in members]
    members.sort()
    sign = sign_of_members(members, qubits) if len(members) >= 3 else None
    return Subspace(qubits, len(vectors) - 1, tuple(members), sign)


@lru_cache(maxsize=8)
def _line_table(qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Alle Geraden von W_N als (L x 3 Bitvektoren, L Vorzeichen)."""
    rows, signs = [], []
    for s in totally_isotropic_subspaces(qubits, 1):
        rows.append(s.members)
        signs.append(s.sign)
    return np.array(rows, dtype=np.int64).reshape(-1, 3), np.array(signs, dtype=np.int64)


def lines(qubits: int) -> tuple[tuple[tuple[int, int, int], int], ...]:
    """Alle Geraden von W_N als ((a, b, a^b), Vorzeichen), zwischengespeichert."""
    table, signs = _line_table(qubits)
    return tuple((tuple(row), s) for row, s in zip(table.tolist(), signs.tolist()))


def subspace_configuration(qubits: int, k: int, threads: int = 1) -> Configuration:
    """Alle Punkte von W_N mit allen k-Unterräumen als Kontexte."""
    point_sets, signs = [], []
    for s in totally_isotropic_subspaces(qubits, k, threads=threads):
        point_sets.append(s.members)
        signs.append(s.sign)
    return Configuration.from_point_sets(
        qubits,
        Family.SUBSPACES.value,
        point_sets,
        signs=signs,
        points=range(1, 1 << (2 * qubits)),
        label=f"k={k}",
    )


# === PERPSETS UND QUADRIKEN ===


def perpset(qubits: int, p: Point) -> Configuration:
    """Alle mit p kommutierenden Punkte; Kontexte sind die Geraden durch p."""
    if p.qubits != qubits:
        raise GeometryError(f"Zentrum {p} hat nicht {qubits} Qubits")
    points = [q for q in range(1, 1 << (2 * qubits)) if not symplectic_bits(p.bits, q, qubits)]
    point_sets = []
    for q in points:
        r = q ^ p.bits
        if q != p.bits and q < r:
            point_sets.append(tuple(sorted((p.bits, q, r))))
    return Configuration.from_point_sets(
        qubits, Family.PERPSET.value, point_sets, points=points, label=f"p={p}"
    )


def quadric_type(qubits: int, q: int) -> QuadricType:
    return QuadricType.HYPERBOLIC if quadratic_form(q, qubits) == 0 else QuadricType.ELLIPTIC


def quadric_counts(qubits: int) -> dict[QuadricType, int]:
    counts = {QuadricType.HYPERBOLIC: 0, QuadricType.ELLIPTIC: 0}
    for q in range(1 << (2 * qubits)):
        counts[quadric_type(qubits, q)] += 1
    return counts


def quadric(qubits: int, q: int) -> tuple[Configuration, QuadricType]:
    """Quadrik Q_q(x) = Q0(x) + <x|q> mit allen enthaltenen Geraden.

    q = 0 ergibt die Standard-hyperbolische Quadrik.
    """
    if q < 0 or q >= 1 << (2 * qubits):
        raise GeometryError(f"Quadrikindex {q:#x} passt nicht zu {qubits} Qubits")
    kind = quadric_type(qubits, q)
    everything = _all_candidates(qubits)
    mask = (1 << qubits) - 1
    q0 = _popcount((everything >> qubits) & everything & mask) & 1
    pairing = _popcount(((everything >> qubits) & (q & mask)) ^ (everything & mask & (q >> qubits))) & 1
    on_quadric = np.zeros(1 << (2 * qubits), dtype=bool)
    on_quadric[everything] = (q0 ^ pairing) == 0
    table, signs = _line_table(qubits)
    inside = on_quadric[table].all(axis=1)
    config = Configuration.from_point_sets(
        qubits,
        Family.QUADRIC.value,
        [tuple(row) for row in table[inside].tolist()],
        signs=signs[inside].tolist(),
        points=everything[on_quadric[everything]].tolist(),
        label=f"q={observable_string(q, qubits)} type={kind.value}",
    )
    return config, kind


def all_quadrics(qubits: int) -> Iterator[tuple[Configuration, QuadricType]]:
    for q in range(1 << (2 * qubits)):
        yield quadric(qubits, q)


# === DOILIES, SPREADS, GITTER ===


def _active_slots(qubits: int, embedding: Optional[Sequence[int]]) -> tuple[int, int]:
    """Die zwei aktiven Qubit-Positionen (0-basiert) einer Identitäts-Einbettung."""
    if embedding is None:
        embedding = tuple(range(3, qubits + 1))
    slots = tuple(embedding)
    if len(slots) != qubits - 2:
        raise GeometryError(
            f"Einbettung braucht {qubits - 2} Identitäts-Positionen, nicht {len(slots)}"
        )
    if len(set(slots)) != len(slots) or any(not 1 <= s <= qubits for s in slots):
        raise GeometryError(f"Ungültige Einbettung {slots} für {qubits} Qubits")
    active = [j for j in range(qubits) if j + 1 not in slots]
    return active[0], active[1]


def _pad(bits: int, active: tuple[int, int], qubits: int) -> int:
    letters = observable_string(bits, 2)
    out = ["I"] * qubits
    out[active[0]], out[active[1]] = letters[0], letters[1]
    return encode("".join(out)).bits


def _embed(config: Configuration, qubits: int, embedding, family: str, label: str) -> Configuration:
    active = _active_slots(qubits, embedding)
    padded = [_pad(p.bits, active, qubits) for p in config.points]
    order = sorted(range(len(padded)), key=padded.__getitem__)
    point_sets = [tuple(padded[j] for j in c.members) for c in config.contexts]
    return Configuration.from_point_sets(
        qubits,
        family,
        point_sets,
        points=[padded[j] for j in order],
        label=label,
    )


def doily(qubits: int = 2, embedding: Optional[Sequence[int]] = None) -> Configuration:
    """Zwei-Qubit-Doily (alle Punkte und Geraden von W_2), ggf. mit I aufgefüllt.

    ``embedding`` sind die 1-basierten Identitäts-Positionen (N-2 Stück),
    Standard: 3..N.
    """
    table, _ = _line_table(2)
    base = Configuration.from_point_sets(2, Family.DOILY.value, [tuple(r) for r in table.tolist()])
    slots = tuple(embedding) if embedding is not None else tuple(range(3, qubits + 1))
    return _embed(base, qubits, slots, Family.DOILY.value, f"embedding={','.join(map(str, slots)) or '-'}")


def _check_doily(d: Configuration):
    if len(d.points) != 15 or len(d.contexts) != 15:
        raise GeometryError(
            f"Keine Doily: {len(d.points)} Punkte und {len(d.contexts)} Kontexte statt 15/15"
        )
    per_point = [0] * 15
    for c in d.contexts:
        if len(c.members) != 3:
            raise GeometryError("Keine Doily: Kontext ohne genau 3 Punkte")
        for j in c.members:
            per_point[j] += 1
    if any(n != 3 for n in per_point):
        raise GeometryError("Keine Doily: nicht jeder Punkt liegt auf 3 Kontexten")


def spreads(d: Configuration) -> list[tuple[int, ...]]:
    """Alle Spreads einer Doily (5 disjunkte Geraden, die alle Punkte überdecken).

    Raises:
        GeometryError: Wenn die Eingabe keine Doily-Inzidenz hat.
    """
    _check_doily(d)
    masks = [sum(1 << j for j in c.members) for c in d.contexts]
    full = (1 << 15) - 1
    found: list[tuple[int, ...]] = []

    def extend(covered: int, chosen: tuple[int, ...]):
        if covered == full:
            found.append(chosen)
            return
        first_free = (~covered & full & -(~covered & full)).bit_length() - 1
        for i, m in enumerate(masks):
            if m >> first_free & 1 and not m & covered:
                extend(covered | m, chosen + (i,))

    extend(0, ())
    result = sorted(tuple(sorted(s)) for s in found)
    if len(result) != 6:
        raise GeometryError(f"Keine Doily: {len(result)} Spreads statt 6")
    return result


def two_spreads(d: Configuration) -> list[Configuration]:
    """Die sechs Two-Spreads: Doily ohne jeweils einen Spread von Geraden."""
    result = []
    for i, spread in enumerate(spreads(d)):
        removed = set(spread)
        result.append(
            Configuration(
                qubits=d.qubits,
                family=Family.TWO_SPREAD.value,
                points=d.points,
                contexts=tuple(c for j, c in enumerate(d.contexts) if j not in removed),
                label=f"{d.label} spread={i}".strip(),
            )
        )
    return result


def grids(qubits: int = 2, embedding: Optional[Sequence[int]] = None) -> list[Configuration]:
    """Die 10 Mermin-Peres-Gitter (hyperbolische Quadriken von W_2), ggf. eingebettet."""
    result = []
    for q in range(16):
        if quadric_type(2, q) != QuadricType.HYPERBOLIC:
            continue
        config, _ = quadric(2, q)
        label = f"q={observable_string(q, 2)}"
        result.append(_embed(config, qubits, embedding, Family.GRID.value, label))
    return result


def _anchor_bits(anchor: str, qubits: int) -> int:
    if set(anchor) == {"I"}:
        return 0
    try:
        return encode(anchor).bits
    except PauliError as e:
        raise GeometryError(str(e)) from None


def build_family(spec: FamilySpec, threads: int = 1) -> list[Configuration]:
    """Alle Konfigurationen, die eine FamilySpec beschreibt."""
    n = spec.qubits
    if spec.family == Family.SUBSPACES:
        return [subspace_configuration(n, spec.k, threads=threads)]
    if spec.family == Family.PERPSET:
        if spec.anchor is not None:
            return [perpset(n, Point(_anchor_bits(spec.anchor, n), n))]
        return [perpset(n, Point(b, n)) for b in range(1, 1 << (2 * n))]
    if spec.family == Family.QUADRIC:
        if spec.anchor is not None:
            return [quadric(n, _anchor_bits(spec.anchor, n))[0]]
        return [c for c, _ in all_quadrics(n)]
    if spec.family == Family.DOILY:
        return [doily(n, spec.embedding)]
    if spec.family == Family.TWO_SPREAD:
        return two_spreads(doily(n, spec.embedding))
    return grids(n, spec.embedding)
