"""
Unit Tests für run_log.py
SQLite Run-Log und JSON-Manifeste
"""

import json
import sqlite3
from unittest.mock import patch

import run_log
from run_log import RunManifest


class TestRunManifest:
    """Tests für RunManifest"""

    def test_write_json(self, tmp_path):
        """Test: Manifest wird als JSON geschrieben"""
        manifest = RunManifest(
            command="degree",
            parameters={"family": "doily", "qubits": 2},
            seed=3,
            budget={"method": "branch_bound", "time_limit": 10.0},
            result={"d": 3},
        )
        path = tmp_path / "run.json"
        manifest.write(str(path))

        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["command"] == "degree"
        assert data["parameters"] == {"family": "doily", "qubits": 2}
        assert data["seed"] == 3
        assert data["result"] == {"d": 3}
        assert data["success"] is True
        assert "started" in data

    def test_defaults(self):
        """Test: Standardwerte eines leeren Manifests"""
        manifest = RunManifest(command="check")
        assert manifest.parameters == {}
        assert manifest.seed == 0
        assert manifest.duration == 0.0


class TestRunLog:
    """Tests für log_run und get_recent_runs"""

    def test_log_and_read(self, tmp_run_log):
        """Test: Läufe werden gespeichert und in umgekehrter Reihenfolge gelesen"""
        run_log.log_run(RunManifest(command="generate", parameters={"family": "grid"}))
        run_log.log_run(RunManifest(command="degree", result={"d": 1}, success=False))

        runs = run_log.get_recent_runs()
        assert [r["command"] for r in runs] == ["degree", "generate"]
        assert runs[0]["success"] == 0
        assert json.loads(runs[0]["result"]) == {"d": 1}
        assert json.loads(runs[1]["params"])["parameters"] == {"family": "grid"}
        assert tmp_run_log.exists()

    def test_limit(self, tmp_run_log):
        """Test: get_recent_runs begrenzt die Anzahl"""
        for i in range(5):
            run_log.log_run(RunManifest(command=f"cmd{i}"))
        assert len(run_log.get_recent_runs(limit=2)) == 2

    def test_errors_are_only_logged(self, tmp_run_log, caplog):
        """Test: DB-Fehler unterbrechen den Lauf nicht"""
        with patch("run_log.init_db", side_effect=sqlite3.OperationalError("disk I/O error")):
            run_log.log_run(RunManifest(command="degree"))
        assert "Run-Log Fehler" in caplog.text

    def test_configure_switches_database(self, tmp_path):
        """Test: configure() schließt die alte Verbindung und nutzt den neuen Pfad"""
        first, second = tmp_path / "a.db", tmp_path / "b.db"
        try:
            run_log.configure(str(first))
            run_log.log_run(RunManifest(command="one"))
            run_log.configure(str(second))
            run_log.log_run(RunManifest(command="two"))
            assert [r["command"] for r in run_log.get_recent_runs()] == ["two"]
        finally:
            run_log.configure("runs.db")
        assert first.exists() and second.exists()
