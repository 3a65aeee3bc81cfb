"""
Konfiguration für das Kontextualitäts-Toolkit
Lädt Environment-Variablen und validiert Einstellungen
"""

import os
import shlex
import logging
from typing import Optional
from pathlib import Path
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Config:
    """Konfigurationsklasse für CLI und Solver"""

    def __init__(self, env_file: Optional[str] = ".env"):
        """
        Lädt Konfiguration aus .env Datei

        Args:
            env_file: Pfad zur .env Datei
        """
        # .env Datei laden (optional)
        if env_file and Path(env_file).exists():
            load_dotenv(env_file)
            logger.info(f"Konfiguration geladen aus: {env_file}")
        else:
            logger.debug(f".env Datei nicht gefunden: {env_file}")

        # Externer SAT-Solver (optional)
        solver = self._get_env("CONTEXT_SAT_SOLVER")
        self.sat_solver_cmd = shlex.split(solver) if solver else None

        # Rechenbudget
        self.threads = self._get_int("CONTEXT_THREADS", default=os.cpu_count() or 1)
        self.seed = self._get_int("CONTEXT_SEED", default=0)
        self.time_limit = self._get_float("CONTEXT_TIME_LIMIT", default=600.0)
        self.iterations = self._get_int("CONTEXT_ITERATIONS", default=2000)
        self.bb_max_observables = self._get_int("CONTEXT_BB_MAX_OBSERVABLES", default=40)

        # Run-Log (SQLite); "none" deaktiviert
        run_log = self._get_env("CONTEXT_RUN_LOG", default="runs.db")
        self.run_log_path = None if run_log.lower() == "none" else run_log

        # App Konfiguration
        self.debug_mode = self._get_env("DEBUG_MODE", default="false").lower() == "true"
        self.log_level = self._get_env("LOG_LEVEL", default="INFO").upper()
        if self.debug_mode:
            self.log_level = "DEBUG"

        # Validierung
        self._validate()

    def _get_env(self, key: str, required: bool = False, default: Optional[str] = None) -> Optional[str]:
        """
        Holt Environment-Variable

        Args:
            key: Variable-Name
            required: Ob Variable erforderlich ist
            default: Default-Wert

        Returns:
            Variable-Wert oder None

        Raises:
            ValueError: Wenn required=True und Variable nicht gesetzt
        """
        value = os.getenv(key, default)

        if required and not value:
            raise ValueError(
                f"Erforderliche Environment-Variable nicht gesetzt: {key}\n"
                f"Bitte in .env Datei eintragen oder als Environment-Variable setzen."
            )

        return value

    def _get_int(self, key: str, default: int) -> int:
        value = self._get_env(key)
        if value is None or value == "":
            return default
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"{key} muss eine ganze Zahl sein, nicht {value!r}") from None

    def _get_float(self, key: str, default: float) -> float:
        value = self._get_env(key)
        if value is None or value == "":
            return default
        try:
            return float(value)
        except ValueError:
            raise ValueError(f"{key} muss eine Zahl sein, nicht {value!r}") from None

    def _validate(self):
        """Validiert Konfiguration"""

        if self.threads < 1:
            raise ValueError(f"Ungültiger CONTEXT_THREADS: {self.threads}. Muss mindestens 1 sein.")

        if self.seed < 0:
            raise ValueError(f"Ungültiger CONTEXT_SEED: {self.seed}. Muss nichtnegativ sein.")

        if self.time_limit <= 0:
            raise ValueError(f"Ungültiges CONTEXT_TIME_LIMIT: {self.time_limit}. Muss positiv sein.")

        if self.iterations < 1:
            raise ValueError(f"Ungültige CONTEXT_ITERATIONS: {self.iterations}. Muss positiv sein.")

        if self.bb_max_observables < 1:
            raise ValueError(
                f"Ungültiges CONTEXT_BB_MAX_OBSERVABLES: {self.bb_max_observables}. Muss positiv sein."
            )

        if self.log_level not in VALID_LOG_LEVELS:
            raise ValueError(
                f"Ungültiges LOG_LEVEL: {self.log_level}\n"
                f"Muss einer sein von: {', '.join(VALID_LOG_LEVELS)}"
            )

        if self.sat_solver_cmd:
            logger.info(f"Externer SAT-Solver: {' '.join(self.sat_solver_cmd)}")

        logger.debug("Konfiguration validiert [OK]")

    def print_config(self):
        """Druckt Konfiguration (für Debugging)"""
        print("\n" + "="*60)
        print("KONFIGURATION")
        print("="*60)
        print(f"SAT-Solver:         {' '.join(self.sat_solver_cmd) if self.sat_solver_cmd else 'nicht gesetzt'}")
        print(f"Threads:            {self.threads}")
        print(f"Seed:               {self.seed}")
        print(f"Zeitlimit:          {self.time_limit}s")
        print(f"Iterationen:        {self.iterations}")
        print(f"B&B max. Observ.:   {self.bb_max_observables}")
        print(f"\nRun-Log:            {self.run_log_path or 'deaktiviert'}")
        print(f"Debug Mode:         {self.debug_mode}")
        print(f"Log Level:          {self.log_level}")
        print("="*60 + "\n")
