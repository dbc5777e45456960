from __future__ import annotations

import asyncio

from fastapi import APIRouter

from modules.recovery import (
    DemoRequest,
    DemoResponse,
    SolveRequest,
    SolveResponse,
    run_demo,
    solve_recovery,
)

router = APIRouter()


@router.post("/api/v1/recovery/solve", response_model=SolveResponse, summary="TV-SBL / M-SBL recovery")
async def recovery_solve(payload: SolveRequest):
    return await asyncio.to_thread(solve_recovery, payload)


@router.post("/api/v1/recovery/demo", response_model=DemoResponse, summary="Generate and solve one trial")
async def recovery_demo(payload: DemoRequest):
    return await asyncio.to_thread(run_demo, payload)
