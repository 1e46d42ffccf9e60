"""
Settings Manager

Centralized configuration for numerical tolerances, output precision and
Monte Carlo sizing, read from the environment (and a .env file).
"""

import logging
import os
from typing import Optional, Tuple

from dotenv import load_dotenv

from .errors import InvalidParameterError

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

PROFILES = {
    # profile name -> (sample size n, replications R)
    "desk": (5000, 1000),
    "full": (10000, 5000),
}

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class SettingsManager:
    """Manages process-wide numerical settings"""

    def __init__(self) -> None:
        self._precision: int = 10
        self._quad_tol: float = 1e-8
        self._seed: int = 20210901
        self._profile: str = "desk"
        self._hist_bins: int = 60
        self._workers: int = 1
        self._log_level: str = "WARNING"
        self._load_config()

    def _load_config(self) -> None:
        """Load configuration from environment variables"""
        self._precision = self._env_int("VARMETRICS_PRECISION", self._precision, minimum=1)
        self._quad_tol = self._env_float("VARMETRICS_QUAD_TOL", self._quad_tol)
        self._seed = self._env_int("VARMETRICS_SEED", self._seed, minimum=0)
        self._hist_bins = self._env_int("VARMETRICS_HIST_BINS", self._hist_bins, minimum=1)
        self._workers = self._env_int("VARMETRICS_WORKERS", self._workers, minimum=1)

        profile = os.getenv("VARMETRICS_PROFILE", self._profile).strip().lower()
        if profile in PROFILES:
            self._profile = profile
        else:
            logger.warning("Unknown VARMETRICS_PROFILE %r, using %r", profile, self._profile)

        level = os.getenv("VARMETRICS_LOG_LEVEL", self._log_level).strip().upper()
        if level in _LOG_LEVELS:
            self._log_level = level
        else:
            logger.warning("Unknown VARMETRICS_LOG_LEVEL %r, using %r", level, self._log_level)

    @staticmethod
    def _env_int(name: str, default: int, minimum: int) -> int:
        raw = os.getenv(name)
        if raw is None or not raw.strip():
            return default
        try:
            value = int(raw)
        except ValueError:
            logger.warning("%s=%r is not an integer, using %d", name, raw, default)
            return default
        if value < minimum:
            logger.warning("%s=%d is below %d, using %d", name, value, minimum, default)
            return default
        return value

    @staticmethod
    def _env_float(name: str, default: float) -> float:
        raw = os.getenv(name)
        if raw is None or not raw.strip():
            return default
        try:
            value = float(raw)
        except ValueError:
            logger.warning("%s=%r is not a number, using %g", name, raw, default)
            return default
        if not value > 0:
            logger.warning("%s=%r must be positive, using %g", name, raw, default)
            return default
        return value

    @property
    def precision(self) -> int:
        """Significant digits used when printing results"""
        return self._precision

    @property
    def quad_tol(self) -> float:
        """Absolute tolerance per quadrature block"""
        return self._quad_tol

    @property
    def seed(self) -> int:
        """Master seed used when a command does not receive one"""
        return self._seed

    @property
    def profile(self) -> str:
        return self._profile

    @property
    def hist_bins(self) -> int:
        return self._hist_bins

    @property
    def workers(self) -> int:
        return self._workers

    @property
    def log_level(self) -> str:
        return self._log_level

    def profile_sizes(self, profile: Optional[str] = None) -> Tuple[int, int]:
        """Return (n, replications) for the named or the configured profile"""
        name = profile or self._profile
        if name not in PROFILES:
            raise InvalidParameterError(f"Unknown profile '{name}', expected one of {sorted(PROFILES)}")
        return PROFILES[name]

    def update_config(self,
                      precision: Optional[int] = None,
                      quad_tol: Optional[float] = None,
                      seed: Optional[int] = None,
                      profile: Optional[str] = None,
                      hist_bins: Optional[int] = None,
                      workers: Optional[int] = None,
                      log_level: Optional[str] = None) -> None:
        """Update configuration, validating every supplied value"""
        if precision is not None:
            if precision < 1:
                raise InvalidParameterError(f"precision must be >= 1, got {precision}")
            self._precision = precision
        if quad_tol is not None:
            if not quad_tol > 0:
                raise InvalidParameterError(f"quad_tol must be positive, got {quad_tol}")
            self._quad_tol = quad_tol
        if seed is not None:
            if seed < 0:
                raise InvalidParameterError(f"seed must be non-negative, got {seed}")
            self._seed = seed
        if profile is not None:
            if profile not in PROFILES:
                raise InvalidParameterError(f"Unknown profile '{profile}'")
            self._profile = profile
        if hist_bins is not None:
            if hist_bins < 1:
                raise InvalidParameterError(f"hist_bins must be >= 1, got {hist_bins}")
            self._hist_bins = hist_bins
        if workers is not None:
            if workers < 1:
                raise InvalidParameterError(f"workers must be >= 1, got {workers}")
            self._workers = workers
        if log_level is not None:
            if log_level.upper() not in _LOG_LEVELS:
                raise InvalidParameterError(f"Unknown log level '{log_level}'")
            self._log_level = log_level.upper()


# Global settings instance
settings = SettingsManager()
