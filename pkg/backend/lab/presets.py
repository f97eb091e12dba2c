"""
실험 프리셋

저밀도/고밀도 기준 그래프는 같은 평균 진입 차수를 갖는 LDS/HDS 생성 그래프로 대신하고,
시간은 추상 단위로 축소되어 있어 결과는 절대값이 아닌 추세로 비교합니다.
"""
from typing import Callable, Dict, Optional, Tuple

from backend.config.settings import get_settings
from backend.schemas.scenario import Scenario
from backend.simulation.control import ControlMode
from backend.simulation.errors import InvalidParameterError
from backend.simulation.taskgraph import PartitionMode, TaskGraph, generate_hds_graph, generate_lds_graph
from backend.utils.seeding import derive_seed

CONTROL_TASK_COUNTS = (20, 40, 80, 120, 160, 200, 240)
DISTRIBUTION_TASK_COUNTS = (40, 80, 120, 160, 200, 240)
GROUP_COUNTS = (1, 2, 4, 6, 8, 10)
SPEED_FACTORS = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)

SWEEP_TASKS = 500
SWEEP_TOTAL_AGENTS = 50
CONTROL_STUDY_TASKS = 90
CONTROL_STUDY_GROUPS = 5
PARTITION_STUDY_TASKS = 240
PARTITION_STUDY_GROUPS = 3
AGENTS_PER_GROUP = 5


def _seed(seed: Optional[int]) -> int:
    return get_settings().DEFAULT_SEED if seed is None else seed


def _lds(name: str, n_tasks: int, seed: Optional[int]) -> TaskGraph:
    return generate_lds_graph(
        n_tasks, seed=derive_seed(_seed(seed), "preset", name), reward_range=get_settings().reward_range
    )


def _hds(name: str, n_tasks: int, seed: Optional[int]) -> TaskGraph:
    return generate_hds_graph(
        n_tasks, seed=derive_seed(_seed(seed), "preset", name), reward_range=get_settings().reward_range
    )


def control_base(seed: Optional[int] = None) -> Scenario:
    """제어 방식 비교: 2개 그룹, 그룹당 5명, LDS. 그래프는 작업 수마다 다시 만들어집니다."""
    return Scenario(
        graph=_lds("control", CONTROL_TASK_COUNTS[0], seed),
        l=2,
        agents_per_group=AGENTS_PER_GROUP,
        control=ControlMode.DECENTRALIZED,
        master_seed=_seed(seed),
    )


def per_group_sweep_base(seed: Optional[int] = None) -> Scenario:
    """그룹당 5명 고정, HDS 500개 작업"""
    return Scenario(
        graph=_hds("sweep", SWEEP_TASKS, seed),
        l=1,
        agents_per_group=AGENTS_PER_GROUP,
        control=ControlMode.DECENTRALIZED,
        master_seed=_seed(seed),
    )


def fixed_team_sweep_base(seed: Optional[int] = None) -> Scenario:
    """전체 50명 고정, HDS 500개 작업"""
    return Scenario(
        graph=_hds("sweep", SWEEP_TASKS, seed),
        l=1,
        total_agents=SWEEP_TOTAL_AGENTS,
        control=ControlMode.DECENTRALIZED,
        master_seed=_seed(seed),
    )


def control_study_graph(seed: Optional[int] = None) -> TaskGraph:
    return _lds("control-study", CONTROL_STUDY_TASKS, seed)


def partition_study_graphs(seed: Optional[int] = None) -> Tuple[TaskGraph, TaskGraph]:
    """(LDS, HDS) 각 240개 작업 (3개 그룹 × 80개)"""
    return (
        _lds("partition-lds", PARTITION_STUDY_TASKS, seed),
        _hds("partition-hds", PARTITION_STUDY_TASKS, seed),
    )


def speed_base(seed: Optional[int] = None) -> Scenario:
    return Scenario(
        graph=_lds("speed", CONTROL_STUDY_TASKS, seed),
        l=PARTITION_STUDY_GROUPS,
        agents_per_group=AGENTS_PER_GROUP,
        control=ControlMode.DECENTRALIZED,
        partition_mode=PartitionMode.BALANCED,
        master_seed=_seed(seed),
    )


PRESET_GRAPHS: Dict[str, Callable[[Optional[int]], TaskGraph]] = {
    "control": lambda seed: control_base(seed).graph,
    "sweep": lambda seed: _hds("sweep", SWEEP_TASKS, seed),
    "control-study": control_study_graph,
    "partition-lds": lambda seed: _lds("partition-lds", PARTITION_STUDY_TASKS, seed),
    "partition-hds": lambda seed: _hds("partition-hds", PARTITION_STUDY_TASKS, seed),
}


def preset_graph(name: str, seed: Optional[int] = None) -> TaskGraph:
    if name not in PRESET_GRAPHS:
        raise InvalidParameterError(
            f"unknown preset graph {name!r}; choose one of {', '.join(sorted(PRESET_GRAPHS))}"
        )
    return PRESET_GRAPHS[name](seed)
