"""
Minimaler DPLL-Solver für Tests der CNF-Kodierung (nur kleine Instanzen).
"""

from typing import Optional, Sequence


def _propagate(clauses, assignment: dict[int, bool]) -> bool:
    """Unit-Propagation; False bei Konflikt."""
    changed = True
    while changed:
        changed = False
        for clause in clauses:
            free = None
            n_free = 0
            satisfied = False
            for lit in clause:
                value = assignment.get(abs(lit))
                if value is None:
                    n_free += 1
                    free = lit
                elif value == (lit > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if n_free == 0:
                return False
            if n_free == 1:
                assignment[abs(free)] = free > 0
                changed = True
    return True


def solve(
    clauses: Sequence[Sequence[int]],
    n_vars: int,
    assumptions: Sequence[int] = (),
    order: Optional[Sequence[int]] = None,
) -> Optional[dict[int, bool]]:
    """Liefert ein Modell (Variable -> Wert) oder None.

    ``order`` legt die Verzweigungsreihenfolge fest (Standard 1..n_vars).
    """
    assignment = {abs(lit): lit > 0 for lit in assumptions}
    order = list(order) if order is not None else list(range(1, n_vars + 1))
    order += [v for v in range(1, n_vars + 1) if v not in set(order)]
    return _search(clauses, assignment, order)


def _search(clauses, assignment, order):
    if not _propagate(clauses, assignment):
        return None
    var = next((v for v in order if v not in assignment), None)
    if var is None:
        return assignment
    for value in (False, True):
        trial = dict(assignment)
        trial[var] = value
        model = _search(clauses, trial, order)
        if model is not None:
            return model
    return None


def satisfiable_with(clauses, n_vars: int, fixed: dict[int, bool]) -> bool:
    """Ist die CNF mit den festen Werten ``fixed`` erfüllbar?"""
    assumptions = [v if value else -v for v, value in fixed.items()]
    return solve(clauses, n_vars, assumptions) is not None
