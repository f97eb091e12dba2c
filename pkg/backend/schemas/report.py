from typing import Dict

from pydantic import BaseModel, ConfigDict

from backend.simulation.control import ControlMode


class SimulationReport(BaseModel):
    """실행 결과 지표 (ET, ET(g_k), TWT, TWT(g_k), 그룹별 할당/완료 수)"""
    model_config = ConfigDict(frozen=True)

    et_system: float
    et_group: Dict[int, float]
    twt_group: Dict[int, float]
    twt_system: float
    tasks_assigned: Dict[int, int]
    tasks_completed: Dict[int, int]
    rewards: Dict[str, int]
    event_count: int
    event_digest: str
    m: int
    l: int
    control: ControlMode
    master_seed: int
    validation_failures: int = 0
    inferred_completions: int = 0
    cross_edges: int = 0

    @property
    def et_group_max(self) -> float:
        return max(self.et_group.values())

    @property
    def total_completed(self) -> int:
        return sum(self.tasks_completed.values())


class ControlComparisonRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int
    seed: int
    et_centralized: float
    et_decentralized: float

    @property
    def difference(self) -> float:
        return self.et_centralized - self.et_decentralized
