from .recovery import router as recovery_router
from .system import router as system_router

__all__ = [
    "recovery_router",
    "system_router",
]
