"""
Kontextualität und Kontextualitätsgrad

- is_contextual: Gauß-Elimination auf A x = E
- degree_exact: Schleife "mindestens i+1 Kontexte erfüllen" über ein
  austauschbares Schwellwert-Orakel (intern oder externer SAT-Solver)
- degree_upper_bound: Information-Set-Decoding
- cabello_bound: b = l - 2d
"""

import logging
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Sequence, Union

from pydantic import BaseModel, Field, field_validator

from coset_search import (
    SearchBudgetExceeded,
    exact_engine,
    information_set_decoding,
)
from gf2 import solve
from incidence import IncidenceError, IncidenceSystem, assignment_from_bits

logger = logging.getLogger(__name__)


class DegreeStatus(str, Enum):
    NON_CONTEXTUAL = "non_contextual"
    EXACT = "exact"
    UPPER_BOUND = "upper_bound"


class SolveMethod(str, Enum):
    """Verfahren einer Gradberechnung.

    ``exact`` ist die exakte Suche nach dem kleinsten Nebenklassengewicht;
    der ältere Name ``branch_bound`` wird weiter angenommen.
    """

    GAUSS_ONLY = "gauss_only"
    EXACT = "exact"
    HEURISTIC = "heuristic"
    EXTERNAL_SAT = "external_sat"

    @classmethod
    def _missing_(cls, value):
        if value in METHOD_ALIASES:
            return cls.EXACT
        return None


METHOD_ALIASES = ("branch_bound",)


class SolveBudget(BaseModel):
    """Verfahren und Grenzen einer Gradberechnung."""

    method: SolveMethod = SolveMethod.EXACT
    time_limit: float = Field(default=600.0, gt=0)
    iterations: int = Field(default=2000, gt=0)
    seed: int = Field(default=0, ge=0)
    threads: int = Field(default=1, gt=0)

    @field_validator("method", mode="before")
    @classmethod
    def _legacy_method(cls, value):
        return SolveMethod.EXACT if value in METHOD_ALIASES else value


@dataclass(frozen=True)
class DegreeResult:
    """Grad d mit Status und Zeugenbelegung.

    ``witness`` hat Bit j = x_{j+1}; ``trace`` ist die Folge der erreichten
    Anzahlen verletzter Kontexte (absteigend).
    """

    status: DegreeStatus
    d: int
    witness: int
    unsatisfied: tuple[int, ...]
    n_observables: int
    trace: tuple[int, ...] = ()
    method: str = ""

    def __post_init__(self):
        if len(self.unsatisfied) != self.d:
            raise ValueError(
                f"Zeuge verletzt {len(self.unsatisfied)} Kontexte, gemeldet wurde d={self.d}"
            )
        if self.status == DegreeStatus.NON_CONTEXTUAL and self.d != 0:
            raise ValueError("non_contextual verlangt d=0")

    def witness_string(self) -> str:
        return "".join(str(self.witness >> j & 1) for j in range(self.n_observables))


@dataclass(frozen=True)
class ContextualityCheck:
    """Ergebnis von is_contextual: Lösung x oder Widerspruchszertifikat."""

    contextual: bool
    solution: Optional[int] = None
    certificate: Optional[int] = None


class OracleVerdict(str, Enum):
    FOUND = "found"
    NONE = "none"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleAnswer:
    verdict: OracleVerdict
    witness: Optional[int] = None
    reason: str = ""


class ThresholdOracle(Protocol):
    """Findet eine Belegung, die mindestens ``at_least`` Kontexte erfüllt."""

    name: str

    def find(self, at_least: int) -> OracleAnswer: ...


# === ENTSCHEIDUNG ===


def is_contextual(s: IncidenceSystem) -> ContextualityCheck:
    result = solve(s.rows, s.valuation, s.n_cols)
    if result.consistent:
        return ContextualityCheck(False, solution=result.solution)
    return ContextualityCheck(True, certificate=result.certificate)


def _as_assignment(s: IncidenceSystem, x: Union[int, Sequence[int]]) -> int:
    if isinstance(x, int):
        if x < 0 or x >= 1 << s.n_cols:
            raise IncidenceError(f"Belegung passt nicht zu {s.n_cols} Observablen")
        return x
    return assignment_from_bits(list(x), s.n_cols)


def unsatisfied_contexts(s: IncidenceSystem, x: Union[int, Sequence[int]]) -> tuple[int, ...]:
    """Indizes i mit (A x)_i != E_i, aufsteigend."""
    residual = s.product(_as_assignment(s, x)) ^ s.valuation
    return tuple(i for i in range(s.n_rows) if residual >> i & 1)


def violated_count(s: IncidenceSystem, x: int) -> int:
    return (s.product(x) ^ s.valuation).bit_count()


def cabello_bound(l: int, d: int) -> int:
    """Klassische Schranke b = l - 2d der Cabello-Ungleichung."""
    if l < 0 or d < 0:
        raise ValueError(f"l und d müssen nichtnegativ sein: l={l}, d={d}")
    if d > l:
        raise ValueError(f"Grad d={d} größer als Kontextanzahl l={l}")
    return l - 2 * d


def _result(s: IncidenceSystem, status: DegreeStatus, x: int, trace, method: str) -> DegreeResult:
    unsat = unsatisfied_contexts(s, x)
    return DegreeResult(
        status=status,
        d=len(unsat),
        witness=x,
        unsatisfied=unsat,
        n_observables=s.n_cols,
        trace=tuple(trace),
        method=method,
    )


# === ORAKEL ===


class InternalThresholdOracle:
    """Schwellwert-Orakel auf Basis der exakten Nebenklassensuche."""

    name = "internal"

    def __init__(self, s: IncidenceSystem, budget: SolveBudget):
        self.system = s
        self.deadline = time.time() + budget.time_limit
        self._engine = exact_engine(s.columns(), s.valuation, s.n_rows)
        logger.debug(f"Internes Orakel: {type(self._engine).__name__}")

    def find(self, at_least: int) -> OracleAnswer:
        max_weight = self.system.n_rows - at_least
        if max_weight < 0:
            return OracleAnswer(OracleVerdict.NONE)
        try:
            e = self._engine.search(max_weight, self.deadline)
        except SearchBudgetExceeded as exc:
            return OracleAnswer(OracleVerdict.UNKNOWN, reason=str(exc))
        if e is None:
            return OracleAnswer(OracleVerdict.NONE)
        solution = solve(self.system.rows, self.system.valuation ^ e, self.system.n_cols)
        return OracleAnswer(OracleVerdict.FOUND, witness=solution.solution)


# === GRAD ===


def degree_exact(
    s: IncidenceSystem,
    budget: Optional[SolveBudget] = None,
    oracle: Optional[ThresholdOracle] = None,
    start: Optional[int] = None,
) -> DegreeResult:
    """Kontextualitätsgrad d = d_H(E, Im(A)).

    Beginnt bei i = |C+| (oder bei der von ``start`` erreichten Anzahl),
    fragt das Orakel wiederholt nach i+1 erfüllten Kontexten und setzt i auf
    die tatsächlich erreichte Anzahl. Antwortet das Orakel "keine Lösung",
    ist d = l - i exakt; bei "unbekannt" (Budget) bleibt eine obere Schranke.
    """
    budget = budget or SolveBudget()
    l = s.n_rows
    check = is_contextual(s)
    if not check.contextual:
        logger.info("System ist lösbar: nicht kontextuell")
        return _result(s, DegreeStatus.NON_CONTEXTUAL, check.solution, (0,), "gauss")

    if oracle is None:
        oracle = InternalThresholdOracle(s, budget)

    best = 0
    if start is not None and violated_count(s, start) < violated_count(s, best):
        best = start
    satisfied = l - violated_count(s, best)
    trace = [l - satisfied]
    logger.info(f"Start: {l - satisfied} verletzte Kontexte (Orakel {oracle.name})")

    status = DegreeStatus.EXACT
    while satisfied < l:
        answer = oracle.find(satisfied + 1)
        if answer.verdict == OracleVerdict.NONE:
            break
        if answer.verdict == OracleVerdict.UNKNOWN or answer.witness is None:
            logger.warning(f"Orakel ohne Antwort ({answer.reason}), Ergebnis ist nur eine obere Schranke")
            status = DegreeStatus.UPPER_BOUND
            break
        achieved = l - violated_count(s, answer.witness)
        if achieved <= satisfied:
            logger.warning(
                f"Orakel lieferte {achieved} statt mindestens {satisfied + 1} erfüllte Kontexte"
            )
            status = DegreeStatus.UPPER_BOUND
            break
        best, satisfied = answer.witness, achieved
        trace.append(l - satisfied)
        logger.info(f"Verbessert: {l - satisfied} verletzte Kontexte")

    result = _result(s, status, best, trace, oracle.name)
    logger.info(f"Grad {result.status.value}: d={result.d}")
    return result


def degree_upper_bound(s: IncidenceSystem, budget: Optional[SolveBudget] = None) -> DegreeResult:
    """Obere Schranke per randomisiertem Information-Set-Decoding (deterministisch je Seed)."""
    budget = budget or SolveBudget(method=SolveMethod.HEURISTIC)
    isd = information_set_decoding(
        s.columns(),
        s.valuation,
        s.n_rows,
        iterations=budget.iterations,
        seed=budget.seed,
        threads=budget.threads,
        deadline=time.time() + budget.time_limit,
    )
    x = solve(s.rows, s.valuation ^ isd.vector, s.n_cols).solution
    trace = [w for _, w in isd.trace]
    result = _result(s, DegreeStatus.UPPER_BOUND, x, trace, "heuristic")
    logger.info(f"Obere Schranke nach {isd.iterations} Iterationen: d<={result.d}")
    return result


def degree(
    s: IncidenceSystem,
    budget: Optional[SolveBudget] = None,
    oracle: Optional[ThresholdOracle] = None,
) -> DegreeResult:
    """Dispatch nach budget.method."""
    budget = budget or SolveBudget()
    if budget.method == SolveMethod.GAUSS_ONLY:
        check = is_contextual(s)
        if not check.contextual:
            return _result(s, DegreeStatus.NON_CONTEXTUAL, check.solution, (0,), "gauss")
        return _result(s, DegreeStatus.UPPER_BOUND, 0, (s.n_negative,), "gauss")
    if budget.method == SolveMethod.HEURISTIC:
        check = is_contextual(s)
        if not check.contextual:
            return _result(s, DegreeStatus.NON_CONTEXTUAL, check.solution, (0,), "gauss")
        return degree_upper_bound(s, budget)
    if budget.method == SolveMethod.EXTERNAL_SAT and oracle is None:
        raise ValueError("Methode external_sat benötigt einen konfigurierten SAT-Solver")
    return degree_exact(s, budget, oracle=oracle)


def degree_ladder(
    s: IncidenceSystem,
    budget: SolveBudget,
    max_exact_observables: int,
    oracle: Optional[ThresholdOracle] = None,
) -> DegreeResult:
    """Stufenfolge: Gauß, exakt intern (p klein genug), Heuristik, externer Solver."""
    check = is_contextual(s)
    if not check.contextual:
        logger.info("Gauß: nicht kontextuell")
        return _result(s, DegreeStatus.NON_CONTEXTUAL, check.solution, (0,), "gauss")
    if s.n_cols <= max_exact_observables:
        result = degree_exact(s, budget)
        if result.status == DegreeStatus.EXACT or oracle is None:
            return result
        return degree_exact(s, budget, oracle=oracle, start=result.witness)
    heuristic = degree_upper_bound(s, budget)
    if oracle is None:
        return heuristic
    logger.info(f"Externer Solver zertifiziert ab d<={heuristic.d}")
    exact = degree_exact(s, budget, oracle=oracle, start=heuristic.witness)
    return DegreeResult(
        status=exact.status,
        d=exact.d,
        witness=exact.witness,
        unsatisfied=exact.unsatisfied,
        n_observables=exact.n_observables,
        trace=heuristic.trace + exact.trace[1:],
        method=f"heuristic+{exact.method}",
    )
