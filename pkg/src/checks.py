"""
Eigenschaftsprüfungen hinter ``cli.py check``.

Jede Prüfung liefert einen CheckReport; die CLI gibt Exit-Code 1 zurück,
sobald eine Prüfung fehlschlägt.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

from geometry import (
    Configuration,
    QuadricType,
    all_quadrics,
    doily,
    grids,
    perpset,
    quadric_counts,
    spreads,
    subspace_census,
    two_spreads,
)
from incidence import build_incidence
from pauli import CountParams, all_points, subspace_count
from solver import DegreeStatus, SolveBudget, degree_exact, is_contextual

logger = logging.getLogger(__name__)

# (N, k) -> (Anzahl, davon negativ)
KNOWN_CENSUS = {
    (2, 1): (15, 3),
    (3, 1): (315, 90),
    (4, 1): (5355, 1908),
    (5, 1): (86955, 35400),
    (3, 2): (135, 54),
    (4, 2): (11475, 4752),
    (5, 2): (782595, 358560),
    (4, 3): (2295, 0),
    (5, 3): (782595, 0),
    (5, 4): (75735, 0),
}


@dataclass
class CheckReport:
    name: str
    passed: bool = True
    lines: list[str] = field(default_factory=list)

    def fail(self, message: str):
        self.passed = False
        self.lines.append(f"FAIL {message}")
        logger.error(f"[{self.name}] {message}")

    def note(self, message: str):
        self.lines.append(message)


def parity_obstruction(c: Configuration) -> bool:
    """Jeder Punkt liegt auf einer geraden Anzahl von Kontexten und die Zahl
    der negativen Kontexte ist ungerade. Dann ist die Summe aller Zeilen von
    A null, die Summe von E aber eins: A x = E ist unlösbar, d >= 1."""
    per_point = [0] * len(c.points)
    for ctx in c.contexts:
        for j in ctx.members:
            per_point[j] += 1
    return all(n % 2 == 0 for n in per_point) and c.n_negative % 2 == 1


def _degree(c: Configuration, budget: SolveBudget) -> tuple[DegreeStatus, int]:
    result = degree_exact(build_incidence(c), budget)
    return result.status, result.d


def check_perpsets(max_qubits: int, **_) -> CheckReport:
    report = CheckReport("perpsets")
    for n in range(2, max_qubits + 1):
        negatives = set()
        for p in all_points(n):
            c = perpset(n, p)
            negatives.add(c.n_negative)
            if is_contextual(build_incidence(c)).contextual:
                report.fail(f"Perpset N={n} p={p} ist kontextuell")
        report.note(f"N={n}: {4 ** n - 1} Perpsets nicht kontextuell, negativ={sorted(negatives)}")
    return report


def check_positivity(qubits: int, k: int, threads: int = 1, **_) -> CheckReport:
    report = CheckReport("positivity")
    if k < 3:
        report.fail(f"Positivität gilt nur für k >= 3, nicht k={k}")
        return report
    census = subspace_census(qubits, k, threads=threads)
    if census.negative:
        report.fail(f"{census.negative} negative Unterräume bei N={qubits}, k={k}")
    report.note(f"N={qubits} k={k}: {census.count} Unterräume, {census.negative} negativ")
    return report


def check_census(max_qubits: int, threads: int = 1, **_) -> CheckReport:
    report = CheckReport("census")
    for (n, k), (count, negative) in sorted(KNOWN_CENSUS.items()):
        if n > max_qubits:
            continue
        census = subspace_census(n, k, threads=threads)
        expected = subspace_count(CountParams(2, n, k))
        if census.count != expected or census.count != count:
            report.fail(f"N={n} k={k}: {census.count} Unterräume, erwartet {count}")
        if census.negative != negative:
            report.fail(f"N={n} k={k}: {census.negative} negativ, erwartet {negative}")
        report.note(f"N={n} k={k}: {census.count} Unterräume, {census.negative} negativ")
    return report


def check_doily(budget: SolveBudget, **_) -> CheckReport:
    report = CheckReport("doily")
    d = doily(2)
    status, deg = _degree(d, budget)
    if len(d.points) != 15 or len(d.contexts) != 15 or d.n_negative != 3:
        report.fail(f"Doily hat {len(d.points)} Punkte, {len(d.contexts)} Kontexte, {d.n_negative} negativ")
    if status != DegreeStatus.EXACT or deg != 3:
        report.fail(f"Doily: {status.value} d={deg}, erwartet exact d=3")
    report.note(f"Doily: {status.value} d={deg} b={len(d.contexts) - 2 * deg}")
    return report


def check_spreads(max_qubits: int, **_) -> CheckReport:
    report = CheckReport("spreads")
    for n in range(2, max_qubits + 1):
        d = doily(n)
        found = spreads(d)
        problems = []
        if len(found) != 6:
            problems.append(f"N={n}: {len(found)} Spreads statt 6")
        for spread in found:
            members = [j for i in spread for j in d.contexts[i].members]
            if sorted(members) != list(range(15)):
                problems.append(f"N={n}: Spread {spread} überdeckt nicht alle Punkte disjunkt")
            neg = sum(1 for i in spread if d.contexts[i].negative)
            if (neg % 2) == (d.n_negative % 2):
                problems.append(f"N={n}: Spread {spread} hat {neg} negative Geraden bei {d.n_negative} in der Doily")
        for problem in problems:
            report.fail(problem)
        if not problems:
            report.note(f"N={n}: 6 Spreads, Paritätsregel erfüllt")
    return report


def check_two_spreads(max_qubits: int, budget: SolveBudget, **_) -> CheckReport:
    report = CheckReport("two-spreads")
    for n in range(2, max_qubits + 1):
        negatives = []
        for ts in two_spreads(doily(n)):
            negatives.append(ts.n_negative)
            if len(ts.contexts) != 10 or len(ts.points) != 15:
                report.fail(f"N={n} {ts.label}: {len(ts.contexts)} Kontexte, {len(ts.points)} Punkte")
            if not parity_obstruction(ts):
                report.fail(f"N={n} {ts.label}: keine Paritätsobstruktion")
            status, deg = _degree(ts, budget)
            if status != DegreeStatus.EXACT or deg != 1:
                report.fail(f"N={n} {ts.label}: {status.value} d={deg}, erwartet d=1")
        report.note(f"N={n}: 6 Two-Spreads mit d=1, negativ={sorted(negatives)}")
    return report


def check_grids(budget: SolveBudget, **_) -> CheckReport:
    report = CheckReport("grids")
    found = grids(2)
    if len(found) != 10:
        report.fail(f"{len(found)} Gitter statt 10")
    for g in found:
        if len(g.contexts) != 6 or len(g.points) != 9:
            report.fail(f"Gitter {g.label}: {len(g.contexts)} Kontexte, {len(g.points)} Punkte")
        if g.n_negative not in (1, 3, 5):
            report.fail(f"Gitter {g.label}: {g.n_negative} negative Kontexte")
        status, deg = _degree(g, budget)
        if status != DegreeStatus.EXACT or deg != 1:
            report.fail(f"Gitter {g.label}: {status.value} d={deg}, erwartet d=1")
    report.note(f"{len(found)} Gitter, alle d=1")
    return report


def check_quadrics(max_qubits: int, **_) -> CheckReport:
    report = CheckReport("quadrics")
    for n in range(2, max_qubits + 1):
        counts = quadric_counts(n)
        hyp = 2 ** (2 * n - 1) + 2 ** (n - 1)
        ell = 2 ** (2 * n - 1) - 2 ** (n - 1)
        if counts[QuadricType.HYPERBOLIC] != hyp or counts[QuadricType.ELLIPTIC] != ell:
            report.fail(f"N={n}: {counts[QuadricType.HYPERBOLIC]}/{counts[QuadricType.ELLIPTIC]}, erwartet {hyp}/{ell}")
        report.note(f"N={n}: {hyp} hyperbolisch, {ell} elliptisch")
    if max_qubits >= 3:
        shapes = {QuadricType.HYPERBOLIC: (35, 105, {27, 39}), QuadricType.ELLIPTIC: (27, 45, {9, 13})}
        for c, kind in all_quadrics(3):
            points, lines, negatives = shapes[kind]
            if len(c.points) != points or len(c.contexts) != lines or c.n_negative not in negatives:
                report.fail(f"N=3 {c.label}: {len(c.points)} Punkte, {len(c.contexts)} Geraden, {c.n_negative} negativ")
        report.note("N=3: Punkt-, Geraden- und Vorzeichenzahlen stimmen")
    return report


SUITES: dict[str, Callable[..., CheckReport]] = {
    "perpsets": check_perpsets,
    "positivity": check_positivity,
    "census": check_census,
    "doily": check_doily,
    "spreads": check_spreads,
    "two-spreads": check_two_spreads,
    "grids": check_grids,
    "quadrics": check_quadrics,
}


def run_checks(
    selector: str,
    max_qubits: int = 3,
    qubits: int = 5,
    k: int = 3,
    threads: int = 1,
    budget: Optional[SolveBudget] = None,
) -> list[CheckReport]:
    """Führt eine Prüfung (oder ``all``) aus."""
    budget = budget or SolveBudget()
    names = list(SUITES) if selector == "all" else [selector]
    reports = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"Unbekannte Prüfung: {name}. Muss einer sein von: all, {', '.join(SUITES)}")
        logger.info(f"Prüfung {name} gestartet")
        reports.append(
            SUITES[name](max_qubits=max_qubits, qubits=qubits, k=k, threads=threads, budget=budget)
        )
    return reports
