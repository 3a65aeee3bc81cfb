"""
Brücke zu externen SAT-Solvern

- to_bc_text / parse_bc_text: bc2cnf-Eingabe ("BC1.1", "ASSIGN[low,high](...)")
- to_dimacs: eigene CNF-Kodierung (Tseitin-Kette je Kontext, Indikator s_i,
  Totalizer für low <= sum s_i <= high)
- run_external: Solver-Aufruf per subprocess, Ausgabe im SAT-Competition-Format
"""

import logging
import os
import re
import subprocess
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from incidence import IncidenceError, IncidenceSystem
from solver import OracleAnswer, OracleVerdict

logger = logging.getLogger(__name__)


class SatStatus(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class XorThresholdProblem:
    """Mindestens ``low`` und höchstens ``high`` der l XOR-Gleichungen erfüllen."""

    system: IncidenceSystem
    low: int
    high: int

    def __post_init__(self):
        if not 0 <= self.low <= self.high <= self.system.n_rows:
            raise ValueError(
                f"Ungültiges Band [{self.low},{self.high}] für {self.system.n_rows} Kontexte"
            )


@dataclass(frozen=True)
class SolverModel:
    """Belegung der Originalvariablen (Bit j = v_{j+1}) und erfüllte Kontexte."""

    assignment: int
    satisfied_count: int


@dataclass(frozen=True)
class SatOutcome:
    status: SatStatus
    model: Optional[SolverModel] = None
    reason: str = ""


@dataclass(frozen=True)
class DimacsEncoding:
    """CNF-Text plus Zuordnung der Original- und Indikatorvariablen."""

    problem: XorThresholdProblem
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]
    column_vars: tuple[int, ...]
    context_vars: tuple[int, ...]

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @property
    def text(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines.extend(" ".join(map(str, clause)) + " 0" for clause in self.clauses)
        return "\n".join(lines) + "\n"

    def dump_variable_map(self) -> str:
        lines = [f"v{j + 1} {var}" for j, var in enumerate(self.column_vars)]
        lines.extend(f"s{i + 1} {var}" for i, var in enumerate(self.context_vars))
        return "\n".join(lines) + "\n"


# === BC2CNF ===


def _row_columns(row: int) -> list[int]:
    cols = []
    while row:
        low = row & -row
        cols.append(low.bit_length() - 1)
        row ^= low
    return cols


def to_bc_text(prob: XorThresholdProblem) -> str:
    s = prob.system
    constraints = []
    for i, row in enumerate(s.rows):
        lhs = " ^ ".join(f"v{j + 1}" for j in _row_columns(row))
        rhs = "T" if s.valuation >> i & 1 else "F"
        constraints.append(f"{lhs} == {rhs}")
    body = ",\n".join(constraints)
    return f"BC1.1\nASSIGN[{prob.low},{prob.high}](\n{body}\n);\n"


_BC_PATTERN = re.compile(r"^\s*BC1\.1\s+ASSIGN\[(\d+),(\d+)\]\((.*)\)\s*;\s*$", re.DOTALL)
_BC_CONSTRAINT = re.compile(r"^v(\d+)(?:\s*\^\s*v(\d+))*\s*==\s*([TF])$")


def parse_bc_text(text: str, n_cols: Optional[int] = None) -> XorThresholdProblem:
    """Liest die von to_bc_text erzeugte Grammatik zurück.

    Ohne ``n_cols`` ist die Spaltenzahl der größte vorkommende Variablenindex.

    Raises:
        ValueError: Text entspricht nicht der Grammatik.
    """
    match = _BC_PATTERN.match(text)
    if not match:
        raise ValueError("Kein gültiger BC1.1-Text mit ASSIGN[low,high](...);")
    low, high, body = int(match.group(1)), int(match.group(2)), match.group(3)
    rows, valuation = [], 0
    parts = [p.strip() for p in body.split(",")] if body.strip() else []
    for i, part in enumerate(parts):
        if not _BC_CONSTRAINT.match(part):
            raise ValueError(f"Ungültige Bedingung {i + 1}: {part!r}")
        lhs, rhs = part.split("==")
        row = 0
        for var in lhs.split("^"):
            row ^= 1 << (int(var.strip()[1:]) - 1)
        rows.append(row)
        if rhs.strip() == "T":
            valuation |= 1 << i
    width = max((r.bit_length() for r in rows), default=0)
    if n_cols is None:
        n_cols = width
    elif n_cols < width:
        raise ValueError(f"Variable v{width} überschreitet {n_cols} Spalten")
    system = IncidenceSystem(len(rows), n_cols, tuple(rows), valuation)
    return XorThresholdProblem(system, low, high)


# === DIMACS ===


class _ClauseBuilder:
    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.clauses: list[tuple[int, ...]] = []

    def new_var(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def add(self, *literals: int):
        self.clauses.append(tuple(literals))

    def xor_def(self, y: int, a: int, b: int, negate: bool = False):
        """y <-> a XOR b (bzw. dessen Negation)."""
        if negate:
            y = -y
        self.add(-y, a, b)
        self.add(-y, -a, -b)
        self.add(y, -a, b)
        self.add(y, a, -b)

    def totalizer(self, inputs: list[int], cap: int) -> list[int]:
        """Unäre Zählvariablen r_1..r_m mit r_j <-> (sum inputs >= j), m = min(n, cap)."""
        if len(inputs) == 1:
            return inputs
        mid = len(inputs) // 2
        left = self.totalizer(inputs[:mid], cap)
        right = self.totalizer(inputs[mid:], cap)
        m = min(len(inputs), cap)
        out = [self.new_var() for _ in range(m)]
        na, nb = len(left), len(right)
        for i in range(na + 1):
            for j in range(nb + 1):
                if i + j >= 1:
                    clause = [out[min(i + j, m) - 1]]
                    if i:
                        clause.append(-left[i - 1])
                    if j:
                        clause.append(-right[j - 1])
                    self.add(*clause)
                if i + j + 1 <= m:
                    clause = [-out[i + j]]
                    if i < na:
                        clause.append(left[i])
                    if j < nb:
                        clause.append(right[j])
                    self.add(*clause)
        return out


def to_dimacs(prob: XorThresholdProblem) -> DimacsEncoding:
    """CNF, deren Modelle genau die Belegungen mit low <= #erfüllt <= high sind."""
    s = prob.system
    builder = _ClauseBuilder(s.n_cols)
    column_vars = tuple(range(1, s.n_cols + 1))
    context_vars = []
    for i, row in enumerate(s.rows):
        members = [column_vars[j] for j in _row_columns(row)]
        acc = members[0]
        for var in members[1:-1]:
            step = builder.new_var()
            builder.xor_def(step, acc, var)
            acc = step
        indicator = builder.new_var()
        # erfüllt <-> Parität == E_i, also s_i <-> acc ^ last ^ E_i ^ 1
        builder.xor_def(indicator, acc, members[-1], negate=not (s.valuation >> i & 1))
        context_vars.append(indicator)

    cap = max(prob.low, prob.high + 1 if prob.high < s.n_rows else 0)
    if cap and context_vars:
        counts = builder.totalizer(context_vars, cap)
        if prob.low:
            builder.add(counts[prob.low - 1])
        if prob.high < s.n_rows:
            builder.add(-counts[prob.high])

    encoding = DimacsEncoding(
        problem=prob,
        n_vars=builder.n_vars,
        clauses=tuple(builder.clauses),
        column_vars=column_vars,
        context_vars=tuple(context_vars),
    )
    logger.debug(f"DIMACS: {encoding.n_vars} Variablen, {encoding.n_clauses} Klauseln")
    return encoding


# === EXTERNER SOLVER ===


def parse_solver_output(output: str) -> tuple[SatStatus, Optional[frozenset[int]]]:
    """Wertet ``s``- und ``v``-Zeilen aus; liefert Status und wahre Variablen."""
    status = SatStatus.UNKNOWN
    literals: list[int] = []
    for line in output.splitlines():
        line = line.strip()
        if line.startswith("s "):
            verdict = line[2:].strip()
            if verdict == "SATISFIABLE":
                status = SatStatus.SAT
            elif verdict == "UNSATISFIABLE":
                status = SatStatus.UNSAT
        elif line.startswith("v "):
            try:
                literals.extend(int(tok) for tok in line.split()[1:])
            except ValueError:
                logger.warning(f"Unlesbare Modellzeile: {line[:60]!r}")
                return SatStatus.UNKNOWN, None
    if status != SatStatus.SAT:
        return status, None
    return status, frozenset(lit for lit in literals if lit > 0)


def n_match(model: SolverModel, s: IncidenceSystem) -> int:
    """Anzahl der Kontexte i mit (A x)_i = E_i."""
    if model.assignment < 0 or model.assignment >= 1 << s.n_cols:
        raise IncidenceError(f"Belegung passt nicht zu {s.n_cols} Variablen")
    return s.n_rows - (s.product(model.assignment) ^ s.valuation).bit_count()


def run_external(
    encoding: DimacsEncoding,
    command: Sequence[str],
    timeout: Optional[float] = None,
) -> SatOutcome:
    """Ruft den Solver mit der CNF-Datei als letztem Argument auf.

    Fehler (Programm fehlt, Zeitlimit, unlesbare Ausgabe) werden nie
    geworfen, sondern als UNKNOWN mit Grund gemeldet.
    """
    if not command:
        return SatOutcome(SatStatus.UNKNOWN, reason="kein Solver-Kommando")
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="context_")
    start = time.time()
    try:
        with os.fdopen(fd, "w") as f:
            f.write(encoding.text)
        try:
            process = subprocess.run(
                [*command, path],
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except OSError as e:
            logger.warning(f"Solver konnte nicht gestartet werden: {e}")
            return SatOutcome(SatStatus.UNKNOWN, reason=f"spawn failure: {e}")
        except subprocess.TimeoutExpired:
            logger.warning(f"Solver nach {timeout}s abgebrochen")
            return SatOutcome(SatStatus.UNKNOWN, reason="timeout")
    finally:
        try:
            os.remove(path)
        except OSError:
            pass

    logger.debug(f"Solver beendet in {time.time() - start:.2f}s (Exit-Code {process.returncode})")
    status, true_vars = parse_solver_output(process.stdout)
    if status == SatStatus.UNKNOWN:
        return SatOutcome(SatStatus.UNKNOWN, reason=f"keine Statuszeile (Exit-Code {process.returncode})")
    if status == SatStatus.UNSAT:
        return SatOutcome(SatStatus.UNSAT)

    system = encoding.problem.system
    assignment = 0
    for j, var in enumerate(encoding.column_vars):
        if var in true_vars:
            assignment |= 1 << j
    satisfied = system.n_rows - (system.product(assignment) ^ system.valuation).bit_count()
    model = SolverModel(assignment, satisfied)
    if not encoding.problem.low <= satisfied <= encoding.problem.high:
        logger.warning(f"Solver-Modell erfüllt {satisfied} Kontexte, außerhalb des Bands")
        return SatOutcome(SatStatus.UNKNOWN, model=model, reason="Modell verletzt das Band")
    return SatOutcome(SatStatus.SAT, model=model)


class ExternalSatOracle:
    """Schwellwert-Orakel über einen externen SAT-Solver (high = l)."""

    name = "external"

    def __init__(self, system: IncidenceSystem, command: Sequence[str], timeout: Optional[float] = None):
        self.system = system
        self.command = list(command)
        self.timeout = timeout

    def find(self, at_least: int) -> OracleAnswer:
        if at_least > self.system.n_rows:
            return OracleAnswer(OracleVerdict.NONE)
        prob = XorThresholdProblem(self.system, at_least, self.system.n_rows)
        outcome = run_external(to_dimacs(prob), self.command, self.timeout)
        if outcome.status == SatStatus.SAT:
            return OracleAnswer(OracleVerdict.FOUND, witness=outcome.model.assignment)
        if outcome.status == SatStatus.UNSAT:
            return OracleAnswer(OracleVerdict.NONE)
        return OracleAnswer(OracleVerdict.UNKNOWN, reason=outcome.reason)
