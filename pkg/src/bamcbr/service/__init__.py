"""HTTP control plane for a running BAMCBR loop."""

from bamcbr.service.app import create_app
from bamcbr.service.session import (
    ConflictError,
    NotFoundError,
    PendingRevision,
    SimulationSession,
)

__all__ = ["create_app", "SimulationSession", "PendingRevision",
           "ConflictError", "NotFoundError"]
