from .app import router as app_router

__all__ = ["app_router"]
