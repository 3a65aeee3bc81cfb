"""
Textformate: Konfigurationsdateien, Inzidenzmatrizen und Gradergebnisse.

Konfiguration:
    qubits=3 family=doily
    # optionale Kommentarzeilen
    observables XII IXI ...
    XII IXI XXI +
    ...

Inzidenz:
    l p
    <Zeile von A als 0/1> <E_i>
"""

import logging
from pathlib import Path
from typing import Union

from geometry import Configuration, GeometryError
from incidence import IncidenceError, IncidenceSystem
from pauli import PAULI_LETTERS, PauliError, encode

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class FormatError(ValueError):
    """Fehlerhafte Datei; die Meldung nennt die Zeilennummer."""


# === KONFIGURATION ===


def dump_configuration(c: Configuration) -> str:
    lines = [f"qubits={c.qubits} family={c.family}"]
    if c.label:
        lines.append(f"# {c.label}")
    lines.append("observables " + " ".join(c.observables()))
    for ctx in c.contexts:
        members = " ".join(str(c.points[j]) for j in ctx.members)
        lines.append(f"{members} {'+' if ctx.sign > 0 else '-'}")
    return "\n".join(lines) + "\n"


def write_configuration(c: Configuration, path: PathLike):
    Path(path).write_text(dump_configuration(c), encoding="utf-8")
    logger.debug(f"Konfiguration geschrieben: {path}")


def _parse_observable(token: str, qubits: int, lineno: int) -> int:
    if len(token) != qubits or any(ch not in PAULI_LETTERS for ch in token):
        raise FormatError(f"Zeile {lineno}: {token!r} ist keine {qubits}-Qubit-Observable")
    try:
        return encode(token).bits
    except PauliError as e:
        raise FormatError(f"Zeile {lineno}: {e}") from None


def _parse_header(line: str, lineno: int) -> tuple[int, str]:
    fields = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep:
            raise FormatError(f"Zeile {lineno}: Kopfzeile erwartet key=value, gefunden {token!r}")
        fields[key] = value
    if "qubits" not in fields or "family" not in fields:
        raise FormatError(f"Zeile {lineno}: Kopfzeile braucht qubits= und family=")
    try:
        qubits = int(fields["qubits"])
    except ValueError:
        raise FormatError(f"Zeile {lineno}: qubits={fields['qubits']!r} ist keine Zahl") from None
    if qubits < 1:
        raise FormatError(f"Zeile {lineno}: qubits muss positiv sein")
    return qubits, fields["family"]


def parse_configuration(text: str) -> Configuration:
    """Liest das Konfigurationsformat.

    Die Vorzeichen werden aus der Datei übernommen; ob sie zum Produkt der
    Observablen passen, prüft incidence.validate.

    Raises:
        FormatError: Fehlende Kopfzeile, ungültige Observable, fehlendes
            Vorzeichen oder Punkt außerhalb der observables-Liste.
    """
    qubits = None
    family = ""
    label = ""
    points = None
    point_sets, signs = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if qubits is not None and not label:
                label = line[1:].strip()
            continue
        if qubits is None:
            qubits, family = _parse_header(line, lineno)
            continue
        tokens = line.split()
        if tokens[0] == "observables":
            if points is not None:
                raise FormatError(f"Zeile {lineno}: observables mehrfach angegeben")
            if point_sets:
                raise FormatError(f"Zeile {lineno}: observables muss vor den Kontexten stehen")
            points = [_parse_observable(t, qubits, lineno) for t in tokens[1:]]
            if len(set(points)) != len(points):
                raise FormatError(f"Zeile {lineno}: doppelte Observable in observables")
            continue
        if tokens[-1] not in ("+", "-"):
            raise FormatError(f"Zeile {lineno}: Kontext endet nicht mit + oder -")
        members = [_parse_observable(t, qubits, lineno) for t in tokens[:-1]]
        if not members:
            raise FormatError(f"Zeile {lineno}: leerer Kontext")
        if len(set(members)) != len(members):
            raise FormatError(f"Zeile {lineno}: Observable doppelt im Kontext")
        point_sets.append(members)
        signs.append(1 if tokens[-1] == "+" else -1)
    if qubits is None:
        raise FormatError("Datei enthält keine Kopfzeile qubits=N family=<name>")
    try:
        return Configuration.from_point_sets(
            qubits, family, point_sets, signs=signs, points=points, label=label
        )
    except GeometryError as e:
        raise FormatError(str(e)) from None


def read_configuration(path: PathLike) -> Configuration:
    return parse_configuration(Path(path).read_text(encoding="utf-8"))


# === INZIDENZ ===


def dump_incidence(s: IncidenceSystem) -> str:
    lines = [f"{s.n_rows} {s.n_cols}"]
    for i, row in enumerate(s.rows):
        bits = "".join(str(row >> j & 1) for j in range(s.n_cols))
        lines.append(f"{bits} {s.valuation >> i & 1}")
    return "\n".join(lines) + "\n"


def parse_incidence(text: str) -> IncidenceSystem:
    lines = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not lines:
        raise FormatError("Leere Inzidenzdatei")
    try:
        n_rows, n_cols = (int(v) for v in lines[0].split())
    except ValueError:
        raise FormatError(f"Kopfzeile 'l p' erwartet, gefunden {lines[0]!r}") from None
    if len(lines) - 1 != n_rows:
        raise FormatError(f"{len(lines) - 1} Zeilen statt {n_rows}")
    rows, valuation = [], 0
    for i, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != 2 or len(parts[0]) != n_cols or set(parts[0]) - {"0", "1"} or parts[1] not in ("0", "1"):
            raise FormatError(f"Zeile {i + 2}: erwartet {n_cols} Bits und E_i, gefunden {line!r}")
        rows.append(sum(1 << j for j, ch in enumerate(parts[0]) if ch == "1"))
        if parts[1] == "1":
            valuation |= 1 << i
    try:
        return IncidenceSystem(n_rows, n_cols, tuple(rows), valuation)
    except IncidenceError as e:
        raise FormatError(str(e)) from None


# === ERGEBNISSE ===


def format_degree_result(result, n_contexts: int) -> str:
    """key=value-Zeilen eines DegreeResult (status, d, b, witness, unsatisfied)."""
    lines = [
        f"status={result.status.value}",
        f"d={result.d}",
        f"b={n_contexts - 2 * result.d}",
        f"witness={result.witness_string()}",
        f"unsatisfied={','.join(map(str, result.unsatisfied))}",
    ]
    if result.trace:
        lines.append(f"trace={','.join(map(str, result.trace))}")
    if result.method:
        lines.append(f"method={result.method}")
    return "\n".join(lines) + "\n"
