from .schemas import DemoRequest, DemoResponse, SolveRequest, SolveResponse
from .service import run_demo, solve_recovery

__all__ = [
    "SolveRequest",
    "SolveResponse",
    "DemoRequest",
    "DemoResponse",
    "solve_recovery",
    "run_demo",
]
