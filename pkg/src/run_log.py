"""SQLite Run-Log und Manifeste der CLI-Läufe."""

import sqlite3
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

DB_PATH = "runs.db"

_connection: Optional[sqlite3.Connection] = None


class RunManifest(BaseModel):
    """Alles, was nötig ist, um einen Lauf zu wiederholen."""

    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    budget: dict[str, Any] = Field(default_factory=dict)
    started: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    duration: float = 0.0
    result: dict[str, Any] = Field(default_factory=dict)
    success: bool = True

    def write(self, path: str):
        Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")


def configure(path: str):
    """Setzt den DB-Pfad (schließt eine offene Verbindung)."""
    global DB_PATH, _connection
    if _connection is not None:
        _connection.close()
        _connection = None
    DB_PATH = path


def _get_connection() -> sqlite3.Connection:
    """Geteilte DB-Verbindung (thread-safe)."""
    global _connection
    if _connection is None:
        _connection = sqlite3.connect(DB_PATH, check_same_thread=False)
        _connection.row_factory = sqlite3.Row
    return _connection


def init_db():
    """Erstellt Run-Tabelle falls nicht vorhanden."""
    conn = _get_connection()
    conn.execute("""
        CREATE TABLE IF NOT EXISTS run_log (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            timestamp TEXT NOT NULL,
            command TEXT NOT NULL,
            params TEXT,
            result TEXT,
            success INTEGER NOT NULL DEFAULT 1
        )
    """)
    conn.execute("""
        CREATE INDEX IF NOT EXISTS idx_run_timestamp ON run_log(timestamp)
    """)
    conn.commit()
    logger.debug("Run-Log DB initialisiert")


def log_run(manifest: RunManifest):
    """Schreibt einen Lauf ins Run-Log; Fehler werden nur geloggt."""
    try:
        init_db()
        conn = _get_connection()
        conn.execute(
            """
            INSERT INTO run_log (timestamp, command, params, result, success)
            VALUES (?, ?, ?, ?, ?)
            """,
            (
                manifest.started,
                manifest.command,
                json.dumps(
                    {"parameters": manifest.parameters, "seed": manifest.seed, "budget": manifest.budget},
                    ensure_ascii=False,
                    default=str,
                ),
                json.dumps(manifest.result, ensure_ascii=False, default=str),
                1 if manifest.success else 0,
            ),
        )
        conn.commit()
    except Exception as e:
        logger.error(f"Run-Log Fehler: {e}")


def get_recent_runs(limit: int = 50) -> list:
    """Letzte Run-Einträge als Liste von Dicts."""
    init_db()
    conn = _get_connection()
    cursor = conn.execute(
        "SELECT * FROM run_log ORDER BY id DESC LIMIT ?",
        (limit,),
    )
    return [dict(row) for row in cursor.fetchall()]
