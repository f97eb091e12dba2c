# backend/api/theorems.py
from typing import Dict

from fastapi import APIRouter, Depends, Query

from backend.api.errors import simulation_errors
from backend.services.lab_service import LabService, get_lab_service

router = APIRouter(
    prefix="/theorems",
    tags=["Theorems"],
    responses={422: {"description": "Parameter out of range"}},
)


@router.get("/waiting", response_model=Dict[str, float])
def waiting(
    m: int = Query(..., description="작업 수"),
    k: int = Query(..., description="최대 진입 차수"),
    p: float = Query(..., description="의존성 미해결 확률"),
    service: LabService = Depends(get_lab_service),
):
    """기대 대기 시간 m·(1 − (1−p)^k)"""
    with simulation_errors():
        return service.waiting(m, k, p)


@router.get("/fully-connected", response_model=Dict[str, float])
def fully_connected(
    m: int = Query(...),
    p: float = Query(...),
    service: LabService = Depends(get_lab_service),
):
    with simulation_errors():
        return service.fully_connected(m, p)
