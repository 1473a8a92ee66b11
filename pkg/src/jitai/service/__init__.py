"""Live decision loop: sessions, suggestions, posterior updates, replay."""

from .config import EngineConfig, load_engine_config
from .engine import (
    EngineError,
    InterventionEngine,
    NoPendingError,
    PendingConflictError,
    SessionNotFoundError,
    SnapshotError,
)
from .api import create_app

__all__ = [
    "EngineConfig",
    "load_engine_config",
    "EngineError",
    "InterventionEngine",
    "NoPendingError",
    "PendingConflictError",
    "SessionNotFoundError",
    "SnapshotError",
    "create_app",
]
