"""
Pytest Konfiguration und gemeinsame Fixtures
"""

import os
import sys
import pytest

# src/ zum Python-Pfad hinzufügen (Module werden direkt importiert)
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(project_root, "src"))
sys.path.insert(0, os.path.join(project_root, "tests"))

# Mermin-Peres-Quadrat mit Variablen v1..v9 zeilenweise:
#   v1 v2 v3
#   v4 v5 v6
#   v7 v8 v9
# Zeilen und die ersten zwei Spalten positiv, dritte Spalte negativ
MERMIN_PERES_ROWS = [
    [1, 2, 3],
    [4, 5, 6],
    [7, 8, 9],
    [1, 4, 7],
    [2, 5, 8],
    [3, 6, 9],
]
MERMIN_PERES_NEGATIVE = [5]

# Explizite 10x15-Matrix eines Two-Spreads (Zeilen = Geraden, Spalten = Punkte 1..15)
TWO_SPREAD_ROWS = [
    [1, 2, 3],
    [3, 4, 5],
    [5, 6, 7],
    [7, 8, 9],
    [1, 9, 10],
    [2, 12, 15],
    [4, 11, 13],
    [6, 12, 14],
    [8, 13, 15],
    [10, 11, 14],
]


def system_from_rows(rows, negative, n_cols):
    """IncidenceSystem aus 1-basierten Variablenlisten je Zeile."""
    from incidence import IncidenceSystem

    packed = tuple(sum(1 << (v - 1) for v in row) for row in rows)
    valuation = sum(1 << i for i in negative)
    return IncidenceSystem(len(rows), n_cols, packed, valuation)


@pytest.fixture
def mermin_peres_system():
    """Fixture für das Mermin-Peres-System (6 Gleichungen, 9 Variablen)"""
    return system_from_rows(MERMIN_PERES_ROWS, MERMIN_PERES_NEGATIVE, 9)


@pytest.fixture
def two_spread_matrix_system():
    """Fixture für die explizite Two-Spread-Matrix (eine negative Gerade)"""
    return system_from_rows(TWO_SPREAD_ROWS, [0], 15)


@pytest.fixture
def doily_config():
    """Fixture für die Zwei-Qubit-Doily"""
    from geometry import doily

    return doily(2)


@pytest.fixture
def grid_configs():
    """Fixture für die 10 Mermin-Peres-Gitter von W_2"""
    from geometry import grids

    return grids(2)


@pytest.fixture
def tmp_run_log(tmp_path):
    """Fixture für ein Run-Log in einem temporären Verzeichnis"""
    import run_log

    path = tmp_path / "runs.db"
    run_log.configure(str(path))
    yield path
    run_log.configure("runs.db")


# Environment Variable Cleanup
@pytest.fixture(autouse=True)
def clean_env():
    """Bereinigt Environment-Variablen vor/nach jedem Test"""
    # Speichere originale Werte
    original_env = os.environ.copy()
    os.environ["CONTEXT_RUN_LOG"] = "none"

    yield

    # Stelle originale Werte wieder her
    os.environ.clear()
    os.environ.update(original_env)
