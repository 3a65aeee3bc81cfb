"""
Tests für cli.py
Kommandos generate, degree, check und export über main(argv)
"""

import json
import os
from unittest.mock import patch

import pytest

import cli
from conftest import TWO_SPREAD_ROWS, system_from_rows
from formats import dump_incidence, parse_incidence, read_configuration
from geometry import doily


def run(*argv):
    """main() mit einem Worker-Prozess aufrufen"""
    return cli.main(["--threads", "1", *argv])


def parse_output(text: str) -> dict:
    """key=value-Zeilen von stdout (Kommentare ignoriert)"""
    values = {}
    for line in text.splitlines():
        if "=" in line and not line.startswith("#"):
            key, value = line.split("=", 1)
            values[key] = value
    return values


@pytest.fixture(autouse=True)
def no_dotenv():
    """Keine .env aus dem Arbeitsverzeichnis laden"""
    with patch("config.load_dotenv"):
        yield


class TestGenerate:
    """Tests für cli.py generate"""

    def test_doily(self, capsys):
        """Test: Doily mit 15 Punkten, 15 Geraden, 3 negativ"""
        assert run("generate", "--family", "doily", "--qubits", "2") == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["family"] == "doily"
        assert out["configurations"] == "1"
        assert out["contexts"] == "15"
        assert out["observables"] == "15"
        assert out["negative"] == "3"

    def test_grids(self, capsys):
        """Test: Zehn Gitter mit 6 Kontexten und 9 Observablen"""
        assert run("generate", "--family", "grid", "--qubits", "2") == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["configurations"] == "10"
        assert out["contexts"] == "6"
        assert out["observables"] == "9"
        assert set(out["negative"].split(",")) <= {"1", "3", "5"}

    def test_lines_alias(self, capsys):
        """Test: lines ist subspaces mit k=1"""
        assert run("generate", "--family", "lines", "--qubits", "3", "--count-only") == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["family"] == "subspaces"
        assert out["k"] == "1"
        assert out["contexts"] == "315"
        assert out["observables"] == "63"
        assert out["negative"] == "90"

    def test_generators_alias(self, capsys):
        """Test: generators ist subspaces mit k=N-1"""
        assert run("generate", "--family", "generators", "--qubits", "3", "--count-only") == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["k"] == "2"
        assert out["contexts"] == "135"
        assert out["negative"] == "54"

    def test_output_file(self, tmp_path, capsys):
        """Test: Eine Konfiguration wird in die Zieldatei geschrieben"""
        target = tmp_path / "doily.txt"
        assert run("generate", "--family", "doily", "--qubits", "2", "--output", str(target)) == cli.EXIT_OK
        assert parse_output(capsys.readouterr().out)["output"] == str(target)
        written = read_configuration(target)
        assert written.observables() == doily(2).observables()
        assert len(written.contexts) == 15
        assert written.n_negative == 3

    def test_output_directory(self, tmp_path):
        """Test: Mehrere Konfigurationen landen in einem Verzeichnis"""
        target = tmp_path / "grids"
        assert run("generate", "--family", "grid", "--qubits", "2", "--output", str(target)) == cli.EXIT_OK
        assert len(list(target.iterdir())) == 10

    @pytest.mark.parametrize(
        "argv",
        [
            ["generate", "--family", "doily", "--qubits", "1"],
            ["generate", "--family", "doily", "--qubits", "2", "--k", "1"],
            ["generate", "--family", "subspaces", "--qubits", "3"],
            ["generate", "--family", "perpset", "--qubits", "2", "--anchor", "II"],
            ["generate", "--family", "grid", "--qubits", "3", "--embedding", "a,b"],
            ["generate", "--family", "nonsense", "--qubits", "2"],
            ["generate", "--qubits", "2"],
        ],
    )
    def test_invalid_arguments(self, argv):
        """Test: Ungültige Familien-Parameter ergeben Exit-Code 2"""
        assert run(*argv) == cli.EXIT_USAGE

    def test_invalid_threads(self):
        """Test: --threads 0 ist ungültig"""
        assert cli.main(["--threads", "0", "generate", "--family", "doily", "--qubits", "2"]) == cli.EXIT_USAGE


class TestDegree:
    """Tests für cli.py degree"""

    def test_doily(self, capsys):
        """Test: Doily hat exakt d=3 und b=9"""
        assert run("degree", "--family", "doily", "--qubits", "2") == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["status"] == "exact"
        assert out["d"] == "3"
        assert out["b"] == "9"
        assert len(out["unsatisfied"].split(",")) == 3
        assert len(out["witness"]) == 15

    def test_grids(self, capsys):
        """Test: Jedes Gitter wird einzeln mit d=1 ausgegeben"""
        assert run("degree", "--family", "grid", "--qubits", "2") == cli.EXIT_OK
        text = capsys.readouterr().out
        assert text.count("configuration=") == 10
        assert text.count("d=1\n") == 10

    def test_input_file(self, tmp_path, capsys):
        """Test: Konfigurationsdatei als Eingabe"""
        source = tmp_path / "doily.txt"
        assert run("export", "--family", "doily", "--qubits", "2", "--format", "config", "--output", str(source)) == 0
        capsys.readouterr()

        assert run("degree", "--input", str(source), "--method", "branch_bound") == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["d"] == "3"

    def test_heuristic_is_upper_bound(self, capsys):
        """Test: Die Heuristik liefert eine obere Schranke mit d >= 3"""
        assert run("degree", "--family", "doily", "--qubits", "2", "--method", "heuristic", "--seed", "7") == 0
        out = parse_output(capsys.readouterr().out)
        assert out["status"] == "upper_bound"
        assert int(out["d"]) >= 3

    def test_unsat_out(self, tmp_path, capsys):
        """Test: Unerfüllte Kontexte werden als Konfiguration geschrieben"""
        target = tmp_path / "unsat.txt"
        assert run("degree", "--family", "doily", "--qubits", "2", "--unsat-out", str(target)) == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["unsat_out"] == str(target)
        unsat = read_configuration(target)
        assert len(unsat.contexts) == 3
        assert unsat.family == "doily-unsatisfied"

    def test_missing_input(self, tmp_path):
        """Test: Fehlende Datei ist ein I/O-Fehler"""
        assert run("degree", "--input", str(tmp_path / "fehlt.txt")) == cli.EXIT_IO

    def test_invalid_input(self, tmp_path):
        """Test: Kaputte Datei ist ungültige Eingabe"""
        source = tmp_path / "kaputt.txt"
        source.write_text("qubits=2 family=custom\nXX YY ZZ\n", encoding="utf-8")
        assert run("degree", "--input", str(source)) == cli.EXIT_USAGE

    def test_neither_input_nor_family(self):
        """Test: Ohne --input und --family ist der Aufruf ungültig"""
        assert run("degree") == cli.EXIT_USAGE

    def _incidence_file(self, tmp_path, capsys):
        source = tmp_path / "doily.inc"
        assert run("export", "--family", "doily", "--qubits", "2", "--output", str(source)) == cli.EXIT_OK
        capsys.readouterr()
        return source

    def test_incidence_file(self, tmp_path, capsys):
        """Test: Inzidenzdatei (A, E) als Eingabe ergibt denselben Grad wie die Doily"""
        source = self._incidence_file(tmp_path, capsys)
        assert run("degree", "--incidence", str(source), "--method", "exact") == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert (out["status"], out["d"], out["b"]) == ("exact", "3", "9")
        assert len(out["witness"]) == 15

    def test_incidence_two_spread_matrix(self, tmp_path, capsys):
        """Test: Explizite Two-Spread-Matrix hat d=1"""
        source = tmp_path / "two_spread.inc"
        source.write_text(dump_incidence(system_from_rows(TWO_SPREAD_ROWS, [0], 15)), encoding="utf-8")
        assert run("degree", "--incidence", str(source)) == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert (out["status"], out["d"], out["b"]) == ("exact", "1", "8")

    def test_incidence_unsat_out(self, tmp_path, capsys):
        """Test: Unerfüllte Zeilen werden als Teilsystem geschrieben"""
        source = self._incidence_file(tmp_path, capsys)
        target = tmp_path / "unsat.inc"
        assert run("degree", "--incidence", str(source), "--unsat-out", str(target)) == cli.EXIT_OK
        sub = parse_incidence(target.read_text(encoding="utf-8"))
        assert (sub.n_rows, sub.n_cols) == (3, 15)

    @pytest.mark.parametrize("extra", [["--family", "doily", "--qubits", "2"], ["--input", "x.txt"]])
    def test_incidence_excludes_other_inputs(self, tmp_path, capsys, extra):
        """Test: --incidence zusammen mit --input oder --family ist ungültig"""
        source = self._incidence_file(tmp_path, capsys)
        assert run("degree", "--incidence", str(source), *extra) == cli.EXIT_USAGE

    def test_malformed_incidence(self, tmp_path):
        """Test: Kaputte Inzidenzdatei ist ungültige Eingabe, fehlende ein I/O-Fehler"""
        source = tmp_path / "kaputt.inc"
        source.write_text("2 3\n110 1\n", encoding="utf-8")
        assert run("degree", "--incidence", str(source)) == cli.EXIT_USAGE
        assert run("degree", "--incidence", str(tmp_path / "fehlt.inc")) == cli.EXIT_IO


class TestCheck:
    """Tests für cli.py check"""

    def test_doily(self, capsys):
        """Test: Doily-Prüfung besteht"""
        assert run("check", "doily") == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "doily=pass" in out
        assert "# doily: Doily: exact d=3 b=9" in out

    def test_failed_check(self, capsys):
        """Test: Fehlgeschlagene Prüfung ergibt Exit-Code 1"""
        assert run("check", "positivity", "--qubits", "3", "--k", "2") == cli.EXIT_FAILED
        assert "positivity=fail" in capsys.readouterr().out

    def test_unknown_selector(self):
        """Test: Unbekannter Selektor wird von argparse abgelehnt"""
        assert run("check", "magic") == cli.EXIT_USAGE


class TestExport:
    """Tests für cli.py export"""

    def test_incidence_stdout(self, capsys):
        """Test: Inzidenztext auf stdout"""
        assert run("export", "--family", "doily", "--qubits", "2") == cli.EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "15 15"
        assert len(lines) == 16
        assert sum(int(line.split()[1]) for line in lines[1:]) == 3

    def test_bc(self, capsys):
        """Test: bc2cnf-Text mit Standardband [|C+|, l]"""
        assert run("export", "--family", "doily", "--qubits", "2", "--format", "bc") == cli.EXIT_OK
        text = capsys.readouterr().out
        assert text.startswith("BC1.1\nASSIGN[12,15](")

    def test_bc_band(self, capsys):
        """Test: --low und --high setzen das Band"""
        argv = ["export", "--family", "doily", "--qubits", "2", "--format", "bc", "--low", "9", "--high", "12"]
        assert run(*argv) == cli.EXIT_OK
        assert "ASSIGN[9,12](" in capsys.readouterr().out

    def test_dimacs_with_map(self, tmp_path, capsys):
        """Test: DIMACS-Datei mit Variablenzuordnung"""
        target = tmp_path / "doily.cnf"
        argv = ["export", "--family", "doily", "--qubits", "2", "--format", "dimacs", "--output", str(target)]
        assert run(*argv) == cli.EXIT_OK
        out = parse_output(capsys.readouterr().out)
        assert out["output"] == str(target)
        assert out["map"] == f"{target}.map"
        assert target.read_text(encoding="utf-8").startswith("p cnf ")
        mapping = (tmp_path / "doily.cnf.map").read_text(encoding="utf-8").splitlines()
        assert sum(1 for line in mapping if line.startswith("v")) == 15
        assert sum(1 for line in mapping if line.startswith("s")) == 15

    def test_family_with_many_configurations(self):
        """Test: export braucht genau eine Konfiguration"""
        assert run("export", "--family", "grid", "--qubits", "2") == cli.EXIT_USAGE

    def test_unwritable_output(self, tmp_path):
        """Test: Nicht schreibbares Ziel ist ein I/O-Fehler"""
        target = tmp_path / "fehlt" / "doily.txt"
        assert run("export", "--family", "doily", "--qubits", "2", "--output", str(target)) == cli.EXIT_IO

    def test_incidence_input(self, tmp_path, capsys):
        """Test: Inzidenzdatei lässt sich als DIMACS exportieren, aber nicht als Konfiguration"""
        source = tmp_path / "doily.inc"
        assert run("export", "--family", "doily", "--qubits", "2", "--output", str(source)) == cli.EXIT_OK
        capsys.readouterr()
        assert run("export", "--incidence", str(source), "--format", "bc") == cli.EXIT_OK
        assert capsys.readouterr().out.startswith("BC1.1\nASSIGN[12,15](")
        assert run("export", "--incidence", str(source), "--format", "config") == cli.EXIT_USAGE


class TestManifestAndRunLog:
    """Tests für Manifest und Run-Log der Läufe"""

    def test_manifest(self, tmp_path, capsys):
        """Test: --manifest schreibt Kommando, Parameter, Seed, Budget und Ergebnis"""
        target = tmp_path / "run.json"
        argv = ["--manifest", str(target), "degree", "--family", "doily", "--qubits", "2", "--seed", "5"]
        assert run(*argv) == cli.EXIT_OK
        assert parse_output(capsys.readouterr().out)["manifest"] == str(target)

        data = json.loads(target.read_text(encoding="utf-8"))
        assert data["command"] == "degree"
        assert data["parameters"]["family"] == "doily"
        assert data["seed"] == 5
        assert data["budget"]["seed"] == 5
        assert data["budget"]["method"] == "auto"
        assert data["result"]["results"][0]["d"] == 3
        assert data["success"] is True

    def test_manifest_on_failure(self, tmp_path):
        """Test: Auch fehlgeschlagene Läufe schreiben ein Manifest"""
        target = tmp_path / "run.json"
        assert run("--manifest", str(target), "degree", "--input", str(tmp_path / "fehlt.txt")) == cli.EXIT_IO
        data = json.loads(target.read_text(encoding="utf-8"))
        assert data["success"] is False
        assert "error" in data["result"]

    def test_run_log(self, tmp_path):
        """Test: CONTEXT_RUN_LOG aktiviert das SQLite Run-Log"""
        import run_log

        db = tmp_path / "runs.db"
        try:
            with patch.dict(os.environ, {"CONTEXT_RUN_LOG": str(db)}):
                assert run("generate", "--family", "doily", "--qubits", "2") == cli.EXIT_OK
            runs = run_log.get_recent_runs()
            assert [r["command"] for r in runs] == ["generate"]
            assert runs[0]["success"] == 1
        finally:
            run_log.configure("runs.db")

    def test_run_log_disabled(self, tmp_path, monkeypatch):
        """Test: CONTEXT_RUN_LOG=none schreibt keine Datenbank"""
        monkeypatch.chdir(tmp_path)
        assert run("generate", "--family", "doily", "--qubits", "2") == cli.EXIT_OK
        assert not (tmp_path / "runs.db").exists()

    def test_invalid_config(self):
        """Test: Ungültige Umgebung ergibt Exit-Code 2"""
        with patch.dict(os.environ, {"CONTEXT_TIME_LIMIT": "-1"}):
            assert run("check", "doily") == cli.EXIT_USAGE
