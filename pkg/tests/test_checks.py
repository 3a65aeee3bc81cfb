"""
Unit Tests für checks.py
Eigenschaftsprüfungen hinter dem check-Kommando
"""

from unittest.mock import patch

import pytest

from checks import (
    KNOWN_CENSUS,
    SUITES,
    CheckReport,
    check_census,
    check_doily,
    check_grids,
    check_perpsets,
    check_positivity,
    check_quadrics,
    check_spreads,
    check_two_spreads,
    parity_obstruction,
    run_checks,
)
from geometry import spreads, two_spreads
from solver import SolveBudget


@pytest.fixture
def budget():
    return SolveBudget(time_limit=60)


class TestSuites:
    """Tests der einzelnen Prüfungen für kleine N"""

    def test_perpsets(self):
        """Test: Perpsets bis N=3 sind nicht kontextuell"""
        report = check_perpsets(max_qubits=3)
        assert report.passed, report.lines

    def test_census(self):
        """Test: Bekannte Zählungen bis N=3"""
        report = check_census(max_qubits=3)
        assert report.passed, report.lines
        assert len(report.lines) == sum(1 for n, _ in KNOWN_CENSUS if n <= 3)

    def test_doily(self, budget):
        """Test: Doily d=3"""
        report = check_doily(budget=budget)
        assert report.passed, report.lines
        assert "d=3 b=9" in report.lines[-1]

    def test_spreads_and_two_spreads(self, budget):
        """Test: Spreads und Two-Spreads bis N=3"""
        assert check_spreads(max_qubits=3).passed
        assert check_two_spreads(max_qubits=3, budget=budget).passed

    def test_grids(self, budget):
        """Test: 10 Gitter mit d=1"""
        assert check_grids(budget=budget).passed

    def test_quadrics(self):
        """Test: Quadrikenzahlen und Formen bis N=3"""
        report = check_quadrics(max_qubits=3)
        assert report.passed, report.lines

    def test_positivity_small_k_fails(self):
        """Test: Positivität für k < 3 wird als Fehlschlag gemeldet"""
        report = check_positivity(qubits=3, k=2)
        assert not report.passed
        assert report.lines[0].startswith("FAIL")

    @pytest.mark.slow
    def test_positivity(self):
        """Test: Alle 3-Unterräume von W_4 sind positiv"""
        report = check_positivity(qubits=4, k=3)
        assert report.passed, report.lines

    @pytest.mark.slow
    def test_census_up_to_five_qubits(self):
        """Test: Alle bekannten Zählungen bis N=5, inklusive k=2,3,4"""
        report = check_census(max_qubits=5, threads=4)
        assert report.passed, report.lines
        assert "N=5 k=2: 782595 Unterräume, 358560 negativ" in report.lines
        assert "N=5 k=3: 782595 Unterräume, 0 negativ" in report.lines
        assert "N=5 k=4: 75735 Unterräume, 0 negativ" in report.lines

    @pytest.mark.slow
    def test_perpsets_up_to_five_qubits(self):
        """Test: Perpsets für N=4 und N=5 sind nicht kontextuell"""
        report = check_perpsets(max_qubits=5)
        assert report.passed, report.lines
        assert any(line.startswith("N=5: 1023 Perpsets") for line in report.lines)

    @pytest.mark.slow
    def test_padded_doilies_up_to_five_qubits(self, budget):
        """Test: Spreads und Two-Spreads eingebetteter Doilies für N=4 und N=5"""
        assert check_spreads(max_qubits=5).passed
        report = check_two_spreads(max_qubits=5, budget=budget)
        assert report.passed, report.lines
        assert len(report.lines) == 4

    @pytest.mark.slow
    def test_quadric_counts_five_qubits(self):
        """Test: 528 hyperbolische und 496 elliptische Quadriken bei N=5"""
        report = check_quadrics(max_qubits=5)
        assert report.passed, report.lines
        assert "N=5: 528 hyperbolisch, 496 elliptisch" in report.lines


class TestHelpers:
    """Tests für parity_obstruction, CheckReport und run_checks"""

    def test_parity_obstruction(self, doily_config, grid_configs):
        """Test: Two-Spreads und Gitter haben die Paritätsobstruktion, die Doily nicht"""
        assert not parity_obstruction(doily_config)
        assert all(parity_obstruction(ts) for ts in two_spreads(doily_config))
        assert all(parity_obstruction(g) for g in grid_configs)

    def test_report_fail(self):
        """Test: fail() markiert den Bericht"""
        report = CheckReport("x")
        report.note("ok")
        report.fail("kaputt")
        assert not report.passed
        assert report.lines == ["ok", "FAIL kaputt"]

    def test_spreads_note_only_when_passed(self):
        """Test: Fehlende Spreads ergeben FAIL ohne Erfolgsmeldung"""
        with patch("checks.spreads", side_effect=lambda d: spreads(d)[:5]):
            report = check_spreads(max_qubits=2)
        assert not report.passed
        assert report.lines == ["FAIL N=2: 5 Spreads statt 6"]
        assert not any("Paritätsregel erfüllt" in line for line in report.lines)

    def test_spreads_note_kept_for_passing_n(self):
        """Test: Ein Fehler bei N=3 unterdrückt nur die Meldung für N=3"""
        def broken_for_three(d):
            found = spreads(d)
            return found[:4] if d.qubits == 3 else found

        with patch("checks.spreads", side_effect=broken_for_three):
            report = check_spreads(max_qubits=3)
        assert not report.passed
        assert report.lines == ["N=2: 6 Spreads, Paritätsregel erfüllt", "FAIL N=3: 4 Spreads statt 6"]

    def test_run_single(self):
        """Test: Einzelne Prüfung über den Selektor"""
        [report] = run_checks("quadrics", max_qubits=2)
        assert report.name == "quadrics"
        assert report.passed

    def test_unknown_selector(self):
        """Test: Unbekannter Selektor ist ein ValueError"""
        with pytest.raises(ValueError):
            run_checks("magic")

    def test_all_suites_registered(self):
        """Test: all umfasst jede Prüfung"""
        assert set(SUITES) == {
            "perpsets", "positivity", "census", "doily", "spreads", "two-spreads", "grids", "quadrics",
        }
