from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from backend.config.settings import get_settings
from backend.simulation.control import ControlMode
from backend.simulation.taskgraph import PartitionMode, TaskGraph


def _default(name: str):
    return lambda: getattr(get_settings(), name)


class Overheads(BaseModel):
    """제어 오버헤드 (추상 시간 단위)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    assignment: float = Field(default_factory=_default("ASSIGNMENT_OVERHEAD"), ge=0)  # δ
    pull_per_agent: float = Field(default_factory=_default("PULL_CONTENTION_PER_AGENT"), ge=0)  # γ
    sync_per_agent: float = Field(default_factory=_default("BOARD_SYNC_PER_AGENT"), ge=0)  # σ
    split: float = Field(default_factory=_default("SPLIT_OVERHEAD"), ge=0)
    collect: float = Field(default_factory=_default("COLLECT_OVERHEAD"), ge=0)


class Scenario(BaseModel):
    """한 번의 시뮬레이션 실행에 필요한 전체 설정"""
    model_config = ConfigDict(frozen=True)

    graph: TaskGraph
    l: int = Field(ge=1)
    agents_per_group: Optional[int] = Field(default=None, ge=1)
    total_agents: Optional[int] = Field(default=None, ge=1)
    control: ControlMode = ControlMode.DECENTRALIZED
    partition_mode: PartitionMode = PartitionMode.BALANCED
    maze_size: Tuple[int, int] = Field(default_factory=lambda: get_settings().maze_size)
    speeds: Union[float, Dict[str, float]] = Field(default_factory=_default("AGENT_SPEED"))
    inference_q: Optional[float] = Field(default=None, ge=0, le=1)
    validation_fail_p: float = Field(default_factory=_default("VALIDATION_FAIL_P"), ge=0, lt=1)
    overheads: Overheads = Field(default_factory=Overheads)
    master_seed: int = Field(default_factory=_default("DEFAULT_SEED"))

    @field_validator("maze_size")
    @classmethod
    def check_maze_size(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if value[0] < 2 or value[1] < 2:
            raise ValueError(f"maze dimensions must be >= 2, got {value[0]}x{value[1]}")
        return value

    @model_validator(mode="after")
    def check_counts(self) -> "Scenario":
        if self.agents_per_group is not None and self.total_agents is not None:
            raise ValueError("give either agents_per_group or total_agents, not both")
        if self.agents_per_group is None and self.total_agents is None:
            # 그룹당 5명 기본값
            object.__setattr__(self, "agents_per_group", 5)
        if self.l > self.graph.m:
            raise ValueError(f"group count l={self.l} exceeds task count m={self.graph.m}")
        if self.n < self.l:
            raise ValueError(f"total agents n={self.n} is below group count l={self.l}")

        if isinstance(self.speeds, dict):
            missing = [a for a in self.agent_ids() if a not in self.speeds]
            if missing:
                raise ValueError(f"speeds missing for agents: {', '.join(missing)}")
            if any(v <= 0 for v in self.speeds.values()):
                raise ValueError("agent speeds must be positive")
        elif self.speeds <= 0:
            raise ValueError("agent speed must be positive")
        return self

    @property
    def n(self) -> int:
        if self.total_agents is not None:
            return self.total_agents
        return self.agents_per_group * self.l

    def group_sizes(self) -> List[int]:
        """앞쪽 n % l 개 그룹이 한 명씩 더 갖습니다."""
        base, extra = divmod(self.n, self.l)
        return [base + (1 if g < extra else 0) for g in range(self.l)]

    def agent_ids(self) -> List[str]:
        return [f"a{i}" for i in range(self.n)]

    def speed_of(self, agent_id: str) -> float:
        if isinstance(self.speeds, dict):
            return self.speeds[agent_id]
        return float(self.speeds)

    def replace(self, **update) -> "Scenario":
        """필드를 바꾼 새 Scenario (검증 포함)"""
        data = {name: getattr(self, name) for name in type(self).model_fields}
        if "total_agents" in update:
            data["agents_per_group"] = None
        if "agents_per_group" in update:
            data["total_agents"] = None
        data.update(update)
        return type(self)(**data)
