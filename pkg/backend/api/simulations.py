# backend/api/simulations.py
from typing import Any, Dict, List, Optional
import logging

from fastapi import APIRouter, Depends, Path
from pydantic import BaseModel, Field

from backend.api.errors import simulation_errors
from backend.schemas.experiment import ExperimentResult
from backend.schemas.report import SimulationReport
from backend.schemas.scenario_config import ScenarioConfig
from backend.services.lab_service import LabService, get_lab_service

logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/simulations",
    tags=["Simulations"],
    responses={404: {"description": "Not found"}, 422: {"description": "Invalid scenario"}},
)


class CompareControlsRequest(BaseModel):
    task_counts: List[int] = Field(min_length=1)
    replications: int = Field(default=1, ge=1, le=100)
    seed: Optional[int] = None


@router.post("/run", response_model=SimulationReport)
def run_scenario(
    config: ScenarioConfig,
    service: LabService = Depends(get_lab_service),
):
    """
    시나리오 설정(JSON)으로 시뮬레이션 한 번을 실행합니다.
    graph.file 은 번들 그래프 이름만 받습니다 (서버 경로 불가).
    """
    with simulation_errors():
        report = service.run_scenario(config.model_dump(mode="json", exclude_none=True), bundled_only=True)
    logger.info(f"API 실행 완료: ET={report.et_system:.4f}")
    return report


@router.post("/compare-controls", response_model=ExperimentResult)
def compare_controls(
    request: CompareControlsRequest,
    service: LabService = Depends(get_lab_service),
):
    with simulation_errors():
        return service.compare_controls(
            task_counts=request.task_counts,
            replications=request.replications,
            seed=request.seed,
            workers=1,
        )


@router.get("/graphs/{name}", response_model=Dict[str, Any])
def get_graph(
    name: str = Path(..., pattern=r"^[A-Za-z0-9_.-]+$"),
    service: LabService = Depends(get_lab_service),
):
    """번들 그래프의 작업 수, 간선 수, 최대 진입 차수"""
    with simulation_errors():
        return service.graph_info(name)
