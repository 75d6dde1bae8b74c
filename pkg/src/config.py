"""
Runtime configuration for the TMA capacity toolkit.

Process-level settings come from the environment (optionally a `.env` file),
solver tunables from a pydantic model that callers can override per run.
"""

import logging
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field


LOG_ENV_VAR = "TMA_CAP_LOG"
DEFAULT_LOG_LEVEL = "WARNING"

_LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
_handler_installed = False


class SolverOptions(BaseModel):
    """Tunables for the minimum initial-spacing solver."""
    tolerance: float = Field(1e-6, gt=0, description="Bisection tolerance on t0 (min)")
    max_iterations: int = Field(200, gt=0, description="Bisection iteration cap")
    max_doublings: int = Field(64, gt=0, description="Upper-bracket doubling cap")
    replay_step: float = Field(1e-3, gt=0, description="Dense replay step (min)")
    replay_tolerance: float = Field(1e-4, ge=0, description="Replay slack on separations (NM)")
    verify: bool = Field(True, description="Re-check each solution with a dense replay")


def resolve_log_level(value: str | None = None) -> int:
    """Map a level name (or the TMA_CAP_LOG variable) to a logging level."""
    name = (value if value is not None else os.getenv(LOG_ENV_VAR, DEFAULT_LOG_LEVEL)).strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        return logging.getLevelName(DEFAULT_LOG_LEVEL)
    return level


def configure_logging(level: str | None = None) -> logging.Logger:
    """
    Install the package log handler on stderr.

    Safe to call repeatedly; only the level is updated after the first call.

    Args:
        level: Level name; defaults to the TMA_CAP_LOG environment variable

    Returns:
        The package root logger
    """
    global _handler_installed
    load_dotenv()

    root = logging.getLogger("src")
    root.setLevel(resolve_log_level(level))
    if not _handler_installed:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_LOG_FORMAT))
        root.addHandler(handler)
        root.propagate = False
        _handler_installed = True
    return root
