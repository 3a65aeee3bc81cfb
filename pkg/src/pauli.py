"""
Pauli-Kern: Kodierung von N-Qubit-Observablen als Bitvektoren über F2,
symplektische Form, Produkte mit Phasenbuchhaltung und Kontext-Vorzeichen.

Bitlayout: ein Punkt ist ein Python-int mit 2N Bits, g_1 ist das höchstwertige
Bit. Damit entspricht der Integer-Vergleich genau der lexikographischen
Ordnung der Bitvektoren. Die obere Hälfte (g_1..g_N) ist der Z-Anteil, die
untere Hälfte (g_{N+1}..g_{2N}) der X-Anteil:
I <-> (0,0), X <-> (0,1), Y <-> (1,1), Z <-> (1,0).
"""

import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

PAULI_LETTERS = "IXYZ"

# (z, x) je Buchstabe
_LETTER_BITS = {"I": (0, 0), "X": (0, 1), "Y": (1, 1), "Z": (1, 0)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}

_SINGLE_QUBIT_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class PauliError(ValueError):
    """Ungültige Observable, ungültiger Kontext oder unpassende Qubit-Anzahl."""


@dataclass(frozen=True, order=True)
class Point:
    """Punkt von W_N: nichttrivialer Bitvektor der Länge 2N.

    Die Ordnung (order=True) vergleicht zuerst ``bits``, also lexikographisch.
    """

    bits: int
    qubits: int

    def __post_init__(self):
        if self.qubits < 1:
            raise PauliError(f"Ungültige Qubit-Anzahl: {self.qubits}")
        if self.bits == 0:
            raise PauliError("Der Nullvektor ist kein Punkt von W_N")
        if self.bits < 0 or self.bits >= 1 << (2 * self.qubits):
            raise PauliError(
                f"Bitvektor {self.bits:#x} passt nicht zu {self.qubits} Qubits"
            )

    @property
    def vector(self) -> tuple[int, ...]:
        """Bitvektor (g_1, ..., g_2N)."""
        length = 2 * self.qubits
        return tuple((self.bits >> (length - 1 - i)) & 1 for i in range(length))

    @property
    def weight(self) -> int:
        """Anzahl der Qubits ungleich I."""
        mask = (1 << self.qubits) - 1
        return ((self.bits >> self.qubits) | (self.bits & mask)).bit_count()

    @classmethod
    def from_vector(cls, vector: Sequence[int]) -> "Point":
        if len(vector) % 2 or not vector:
            raise PauliError(f"Bitvektor muss gerade, positive Länge haben: {vector}")
        bits = 0
        for g in vector:
            if g not in (0, 1):
                raise PauliError(f"Ungültiger Bitwert {g} in {vector}")
            bits = (bits << 1) | g
        return cls(bits, len(vector) // 2)

    def __str__(self) -> str:
        return decode(self)


@dataclass(frozen=True)
class PhasedPauli:
    """Observable i^phase * P(bits); bits darf 0 sein (Identität)."""

    bits: int
    qubits: int
    phase: int = 0

    def __post_init__(self):
        if self.qubits < 1:
            raise PauliError(f"Ungültige Qubit-Anzahl: {self.qubits}")
        if self.bits < 0 or self.bits >= 1 << (2 * self.qubits):
            raise PauliError(
                f"Bitvektor {self.bits:#x} passt nicht zu {self.qubits} Qubits"
            )
        if self.phase not in (0, 1, 2, 3):
            raise PauliError(f"Phasenexponent muss in 0..3 liegen: {self.phase}")

    @classmethod
    def from_point(cls, p: Point) -> "PhasedPauli":
        return cls(p.bits, p.qubits, 0)

    @classmethod
    def identity(cls, qubits: int) -> "PhasedPauli":
        return cls(0, qubits, 0)

    @property
    def is_identity_multiple(self) -> bool:
        return self.bits == 0

    def __mul__(self, other: "PhasedPauli") -> "PhasedPauli":
        return pauli_product(self, other)


@dataclass(frozen=True)
class CountParams:
    """Parameter für die Anzahl der k-dimensionalen Unterräume von W(2N-1, q)."""

    q: int
    qubits: int
    k: int

    def __post_init__(self):
        if self.q < 2:
            raise PauliError(f"Körperordnung q muss >= 2 sein: {self.q}")
        if self.qubits < 1:
            raise PauliError(f"Rang N muss >= 1 sein: {self.qubits}")
        if not 0 <= self.k <= self.qubits - 1:
            raise PauliError(
                f"Dimension k={self.k} außerhalb von 0..{self.qubits - 1}"
            )


# === KODIERUNG ===


def encode(observable: str) -> Point:
    """Wandelt z.B. "YX" in den Punkt (1,0,1,1) um.

    Raises:
        PauliError: Bei leerem String, ungültigen Zeichen oder reiner Identität.
    """
    if not observable:
        raise PauliError("Leere Observable")
    n = len(observable)
    z = x = 0
    for letter in observable:
        try:
            zb, xb = _LETTER_BITS[letter]
        except KeyError:
            raise PauliError(
                f"Ungültiges Zeichen {letter!r} in {observable!r} (erlaubt: I, X, Y, Z)"
            ) from None
        z = (z << 1) | zb
        x = (x << 1) | xb
    if z == 0 and x == 0:
        raise PauliError(f"{observable!r} ist die Identität und kein Punkt von W_N")
    return Point((z << n) | x, n)


def decode(p: Point) -> str:
    """Inverse von encode."""
    return _letters(p.bits, p.qubits)


def _letters(bits: int, qubits: int) -> str:
    z, x = bits >> qubits, bits & ((1 << qubits) - 1)
    return "".join(
        _BITS_LETTER[((z >> (qubits - 1 - j)) & 1, (x >> (qubits - 1 - j)) & 1)]
        for j in range(qubits)
    )


def observable_string(bits: int, qubits: int) -> str:
    """Wie decode, aber für rohe Bitvektoren (auch 0 -> "II..I")."""
    return _letters(bits, qubits)


# === SYMPLEKTISCHE FORM ===


def _check_same(x, y):
    if x.qubits != y.qubits:
        raise PauliError(
            f"Unterschiedliche Qubit-Anzahl: {x.qubits} und {y.qubits}"
        )


def symplectic_bits(x: int, y: int, qubits: int) -> int:
    """<x|y> für rohe Bitvektoren."""
    mask = (1 << qubits) - 1
    return (((x >> qubits) & y & mask) ^ ((y >> qubits) & x & mask)).bit_count() & 1


def symplectic_form(x: Point, y: Point) -> int:
    """<x|y> = sum_i x_i y_{N+i} + x_{N+i} y_i (mod 2)."""
    _check_same(x, y)
    return symplectic_bits(x.bits, y.bits, x.qubits)


def commutes(x: Point, y: Point) -> bool:
    """Zwei Observablen kommutieren genau dann, wenn <x|y> = 0."""
    return symplectic_form(x, y) == 0


def quadratic_form(bits: int, qubits: int) -> int:
    """Q0(x) = sum_i x_i x_{N+i} (mod 2); polarisiert die symplektische Form."""
    return ((bits >> qubits) & bits & ((1 << qubits) - 1)).bit_count() & 1


# === PRODUKTE ===


def product_phase(a: int, b: int, qubits: int) -> int:
    """Exponent e mit P(a) P(b) = i^e P(a XOR b), modulo 4.

    Mit P(z,x) = i^{z.x} X^x Z^z je Qubit gilt
    e = |z1&x1| + |z2&x2| + 2|z1&x2| - |z3&x3|.
    """
    mask = (1 << qubits) - 1
    az, ax = a >> qubits, a & mask
    bz, bx = b >> qubits, b & mask
    c = a ^ b
    cz, cx = c >> qubits, c & mask
    return (
        (az & ax).bit_count()
        + (bz & bx).bit_count()
        + 2 * (az & bx).bit_count()
        - (cz & cx).bit_count()
    ) & 3


def pauli_product(a: PhasedPauli, b: PhasedPauli) -> PhasedPauli:
    """Produkt a*b inklusive Phase (XOR der Bitvektoren)."""
    _check_same(a, b)
    phase = (a.phase + b.phase + product_phase(a.bits, b.bits, a.qubits)) & 3
    return PhasedPauli(a.bits ^ b.bits, a.qubits, phase)


def fold_product(members: Iterable[int], qubits: int) -> tuple[int, int]:
    """Produkt roher Bitvektoren als (bits, phase)."""

    def step(acc, bits):
        acc_bits, acc_phase = acc
        return acc_bits ^ bits, (acc_phase + product_phase(acc_bits, bits, qubits)) & 3

    return reduce(step, members, (0, 0))


def sign_of_members(members: Sequence[int], qubits: int) -> int:
    """Vorzeichen einer Kontext-Punktmenge ohne Kommutierungsprüfung.

    Raises:
        PauliError: Produkt ist kein reelles Vielfaches der Identität.
    """
    bits, phase = fold_product(members, qubits)
    if bits != 0:
        raise PauliError(
            f"Produkt {observable_string(bits, qubits)} ist kein Vielfaches der Identität"
        )
    if phase & 1:
        raise PauliError(
            "Imaginäre Restphase im Kontextprodukt (interner Fehler oder nicht-kommutierender Kontext)"
        )
    return 1 if phase == 0 else -1


def context_sign(points: Sequence[Point]) -> int:
    """+1 wenn das Produkt aller Observablen I_N ist, -1 wenn -I_N.

    Raises:
        PauliError: Nicht kommutierendes Paar, Produkt kein Vielfaches der
            Identität oder imaginäre Restphase.
    """
    if not points:
        raise PauliError("Leerer Kontext")
    qubits = points[0].qubits
    for i, p in enumerate(points):
        _check_same(points[0], p)
        for q in points[i + 1:]:
            if symplectic_bits(p.bits, q.bits, qubits):
                raise PauliError(f"{p} und {q} kommutieren nicht")
    return sign_of_members([p.bits for p in points], qubits)


# === ZÄHLFORMELN ===


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Gaußscher Binomialkoeffizient [n über k]_q (exakt)."""
    if k < 0 or k > n:
        return 0
    numerator = math.prod(q ** (n - k + i) - 1 for i in range(1, k + 1))
    denominator = math.prod(q ** i - 1 for i in range(1, k + 1))
    return numerator // denominator


def subspace_count(params: CountParams) -> int:
    """Anzahl der k-dimensionalen total isotropen Unterräume von W(2N-1, q)."""
    q, n, k = params.q, params.qubits, params.k
    return gaussian_binomial(n, k + 1, q) * math.prod(
        q ** (n + 1 - i) + 1 for i in range(1, k + 2)
    )


# === HILFSFUNKTIONEN ===


def all_points(qubits: int) -> list[Point]:
    """Alle Punkte von W_N in lexikographischer Ordnung."""
    return [Point(bits, qubits) for bits in range(1, 1 << (2 * qubits))]


def pauli_matrix(p: Union[Point, PhasedPauli]) -> np.ndarray:
    """Dichte 2^N x 2^N Matrix (Orakel für Tests, sinnvoll bis N ~ 6)."""
    phase = p.phase if isinstance(p, PhasedPauli) else 0
    letters = _letters(p.bits, p.qubits)
    matrix = reduce(np.kron, (_SINGLE_QUBIT_MATRICES[c] for c in letters))
    return (1j ** phase) * matrix
