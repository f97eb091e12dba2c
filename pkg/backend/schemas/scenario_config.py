from typing import Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from backend.simulation.control import ControlMode
from backend.simulation.taskgraph import PartitionMode


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeneratorConfig(_Strict):
    """생성 그래프 (lds/hds 는 평균 진입 차수 유지, random 은 density 직접 지정)"""
    kind: Literal["lds", "hds", "random"] = "lds"
    n_tasks: int = Field(ge=1)
    density: Optional[float] = Field(default=None, ge=0, le=1)
    seed: int = 0
    reward_min: Optional[int] = Field(default=None, ge=0)
    reward_max: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_density(self) -> "GeneratorConfig":
        if self.kind == "random" and self.density is None:
            raise ValueError("density is required for the random generator")
        if self.kind != "random" and self.density is not None:
            raise ValueError(f"density is fixed for the {self.kind} generator")
        return self


class GraphConfig(_Strict):
    file: Optional[str] = None
    generator: Optional[GeneratorConfig] = None
    preset: Optional[str] = None

    @model_validator(mode="after")
    def exactly_one(self) -> "GraphConfig":
        given = [name for name in ("file", "generator", "preset") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError("graph needs exactly one of file, generator, preset")
        return self


class MazeConfig(_Strict):
    width: int = Field(ge=2)
    height: int = Field(ge=2)


class OverheadsConfig(_Strict):
    assignment: Optional[float] = Field(default=None, ge=0)
    pull_per_agent: Optional[float] = Field(default=None, ge=0)
    sync_per_agent: Optional[float] = Field(default=None, ge=0)
    split: Optional[float] = Field(default=None, ge=0)
    collect: Optional[float] = Field(default=None, ge=0)


class ScenarioConfig(_Strict):
    """
    시나리오 설정 파일(JSON) 스키마. 지정하지 않은 값은 Settings 기본값을 사용합니다.

    예:
        {"graph": {"file": "g10.graph"}, "l": 2, "control": "decentralized"}
    """
    graph: GraphConfig
    l: int = Field(ge=1)
    agents_per_group: Optional[int] = Field(default=None, ge=1)
    total_agents: Optional[int] = Field(default=None, ge=1)
    control: ControlMode = ControlMode.DECENTRALIZED
    partition_mode: PartitionMode = PartitionMode.BALANCED
    maze: Optional[MazeConfig] = None
    speeds: Optional[Union[float, Dict[str, float]]] = None
    inference_q: Optional[float] = Field(default=None, ge=0, le=1)
    validation_fail_p: Optional[float] = Field(default=None, ge=0, lt=1)
    overheads: Optional[OverheadsConfig] = None
    seed: Optional[int] = None
