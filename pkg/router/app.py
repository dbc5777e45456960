from fastapi import APIRouter

from router.domains import recovery_router, system_router

router = APIRouter()
router.include_router(system_router)
router.include_router(recovery_router)
