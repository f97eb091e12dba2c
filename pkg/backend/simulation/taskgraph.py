"""
작업 그래프: 보상과 의존성을 가진 작업 집합, 프로그램 그래프 생성기, 그룹별 분할
"""
import logging
import math
import re
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from backend.simulation.errors import (
    CycleError,
    DanglingDependencyError,
    InvalidParameterError,
    ParseError,
    UnknownTaskError,
)

logger = logging.getLogger(__name__)

GRAPH_DIR = Path(__file__).resolve().parent.parent / "data" / "graphs"

# 프로그램 그래프 대용 밀도: 18개 노드/밀도 0.1, 40개 노드/밀도 0.6 의 평균 진입 차수
LDS_MEAN_IN_DEGREE = 0.1 * 17 / 2
HDS_MEAN_IN_DEGREE = 0.6 * 39 / 2

_DIGITS = re.compile(r"(\d+)")


def task_sort_key(task_id: str) -> tuple:
    """자연 정렬 키: 숫자 구간은 숫자로 비교 ("2" < "10", "a2" < "a10")"""
    return tuple(int(part) if part.isdigit() else part for part in _DIGITS.split(task_id))


class PartitionMode(str, Enum):
    BALANCED = "balanced"
    INDEPENDENT = "independent"


class Task(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    reward: int = Field(ge=0)
    deps: FrozenSet[str] = frozenset()
    inference_class: str = ""

    @model_validator(mode="before")
    @classmethod
    def default_class(cls, data):
        # 클래스가 없으면 자기 자신만 속한 클래스
        if isinstance(data, dict) and not data.get("inference_class"):
            data = dict(data)
            data["inference_class"] = str(data.get("id", ""))
        return data

    @model_validator(mode="after")
    def no_self_dependency(self) -> "Task":
        if self.id in self.deps:
            raise ValueError(f"task {self.id} depends on itself")
        return self


class TaskSubset(BaseModel):
    model_config = ConfigDict(frozen=True)

    group_id: int
    task_ids: FrozenSet[str]

    def __len__(self) -> int:
        return len(self.task_ids)


class TaskGraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    tasks: Dict[str, Task]

    @field_validator("tasks")
    @classmethod
    def keys_match_ids(cls, tasks: Dict[str, Task]) -> Dict[str, Task]:
        for key, task in tasks.items():
            if key != task.id:
                raise ValueError(f"key {key} does not match task id {task.id}")
        return tasks

    @model_validator(mode="after")
    def check_structure(self) -> "TaskGraph":
        for task_id in sorted(self.tasks, key=task_sort_key):
            for dep in sorted(self.tasks[task_id].deps, key=task_sort_key):
                if dep not in self.tasks:
                    raise DanglingDependencyError(task_id, dep)
        graph = self.to_networkx()
        if not nx.is_directed_acyclic_graph(graph):
            cycle = [edge[0] for edge in nx.find_cycle(graph)]
            raise CycleError(f"dependency cycle: {' -> '.join(cycle)}", cycle)
        return self

    @property
    def m(self) -> int:
        return len(self.tasks)

    def ids(self) -> List[str]:
        return sorted(self.tasks, key=task_sort_key)

    def to_networkx(self) -> nx.DiGraph:
        """의존 작업 -> 후속 작업 방향의 DiGraph"""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.tasks)
        for task in self.tasks.values():
            graph.add_edges_from((dep, task.id) for dep in task.deps)
        return graph

    def topological_order(self) -> List[str]:
        return list(nx.lexicographical_topological_sort(self.to_networkx(), key=task_sort_key))

    def dependents(self) -> Dict[str, Set[str]]:
        reverse: Dict[str, Set[str]] = {task_id: set() for task_id in self.tasks}
        for task in self.tasks.values():
            for dep in task.deps:
                reverse[dep].add(task.id)
        return reverse

    def in_degrees(self) -> Dict[str, int]:
        return {task_id: len(task.deps) for task_id, task in self.tasks.items()}

    def max_in_degree(self) -> int:
        return max(self.in_degrees().values(), default=0)

    def edge_count(self) -> int:
        return sum(self.in_degrees().values())

    def total_reward(self) -> int:
        return sum(task.reward for task in self.tasks.values())


# ---------------------------------------------------------------------------
# 그래프 파일 입출력
# ---------------------------------------------------------------------------

def load_task_graph(source: str) -> TaskGraph:
    """
    줄 단위 그래프 텍스트를 읽어 검증된 TaskGraph 를 만듭니다.

    형식:
        tasks <m>
        task <id> reward <int> deps <id,id,...|none> class <classid>

    Raises:
        ParseError: 형식 오류, 중복 id, 작업 수 불일치
        CycleError: 순환 의존성 (자기 자신 포함)
        DanglingDependencyError: 존재하지 않는 작업으로의 의존성
    """
    declared: Optional[int] = None
    tasks: Dict[str, Task] = {}

    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()

        if declared is None:
            if len(tokens) != 2 or tokens[0] != "tasks":
                raise ParseError("expected header 'tasks <m>'", line_no)
            try:
                declared = int(tokens[1])
            except ValueError:
                raise ParseError(f"task count is not an integer: {tokens[1]}", line_no)
            if declared < 0:
                raise ParseError("task count must be non-negative", line_no)
            continue

        if (len(tokens) != 8 or tokens[0] != "task" or tokens[2] != "reward"
                or tokens[4] != "deps" or tokens[6] != "class"):
            raise ParseError(
                "expected 'task <id> reward <int> deps <ids|none> class <classid>'", line_no
            )
        task_id, reward_text, deps_text, class_id = tokens[1], tokens[3], tokens[5], tokens[7]
        if task_id in tasks:
            raise ParseError(f"duplicate task id {task_id}", line_no)
        try:
            reward = int(reward_text)
        except ValueError:
            raise ParseError(f"reward is not an integer: {reward_text}", line_no)
        if reward < 0:
            raise ParseError(f"negative reward for task {task_id}", line_no)

        deps: FrozenSet[str] = frozenset()
        if deps_text != "none":
            parts = deps_text.split(",")
            if any(not part for part in parts):
                raise ParseError(f"malformed dependency list: {deps_text}", line_no)
            deps = frozenset(parts)
        if task_id in deps:
            raise CycleError(f"task {task_id} depends on itself", [task_id])

        tasks[task_id] = Task(id=task_id, reward=reward, deps=deps, inference_class=class_id)

    if declared is None:
        raise ParseError("missing header 'tasks <m>'")
    if declared != len(tasks):
        raise ParseError(f"header declares {declared} tasks but {len(tasks)} were listed")

    graph = TaskGraph(tasks=tasks)
    logger.debug(f"그래프 로드 완료: m={graph.m}, edges={graph.edge_count()}")
    return graph


def dump_task_graph(graph: TaskGraph) -> str:
    lines = [f"tasks {graph.m}"]
    for task_id in graph.ids():
        task = graph.tasks[task_id]
        deps = ",".join(sorted(task.deps, key=task_sort_key)) or "none"
        lines.append(
            f"task {task.id} reward {task.reward} deps {deps} class {task.inference_class}"
        )
    return "\n".join(lines) + "\n"


def bundled_graph_path(name: str) -> Path:
    """번들 그래프 디렉터리 안의 경로 (확장자 생략 가능)"""
    path = GRAPH_DIR / Path(name).name
    if path.suffix != ".graph" and not path.is_file():
        path = path.with_name(f"{path.name}.graph")
    return path


def resolve_graph_path(name: Union[str, Path], base_dir: Optional[Path] = None) -> Path:
    """경로를 그대로, base_dir 기준으로, 마지막으로 번들 그래프 디렉터리에서 찾습니다."""
    path = Path(name)
    candidates = [path]
    if base_dir is not None and not path.is_absolute():
        candidates.append(Path(base_dir) / path)
    candidates.append(bundled_graph_path(path.name))
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    raise FileNotFoundError(f"graph file not found: {name}")


def load_task_graph_file(name: Union[str, Path], base_dir: Optional[Path] = None) -> TaskGraph:
    path = resolve_graph_path(name, base_dir)
    return load_task_graph(path.read_text(encoding="utf-8"))


def load_bundled_graph(name: str) -> TaskGraph:
    """번들 그래프 디렉터리 안의 그래프만 읽습니다. 디렉터리 구분자가 들어간 이름은 거부합니다."""
    if not name or Path(name).name != name:
        raise FileNotFoundError(f"bundled graph not found: {name}")
    path = bundled_graph_path(name)
    if not path.is_file():
        raise FileNotFoundError(f"bundled graph not found: {name}")
    return load_task_graph(path.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# 생성기
# ---------------------------------------------------------------------------

def _check_reward_range(reward_range: Tuple[int, int]) -> Tuple[int, int]:
    lo, hi = int(reward_range[0]), int(reward_range[1])
    if lo > hi:
        raise InvalidParameterError(f"empty reward range [{lo}, {hi}]")
    if lo < 0:
        raise InvalidParameterError(f"rewards must be non-negative, got lower bound {lo}")
    return lo, hi


def generate_program_graph(
    n_tasks: int,
    density: float,
    reward_range: Tuple[int, int] = (1, 10),
    seed: int = 0,
) -> TaskGraph:
    """
    시드 기반 무작위 순서를 따라 앞선 작업 -> 뒤 작업 간선을 density 확률로 넣어
    비순환 프로그램 그래프를 만듭니다. 작업 id 는 "1".."n_tasks".

    Args:
        n_tasks: 작업 수 (>= 1)
        density: 각 잠재 간선의 포함 확률 [0, 1]
        reward_range: 보상 정수 범위 [lo, hi]
        seed: 난수 시드

    Returns:
        TaskGraph: 시드가 같으면 간선 단위로 동일한 그래프
    """
    if n_tasks < 1:
        raise InvalidParameterError(f"n_tasks must be >= 1, got {n_tasks}")
    if not 0.0 <= density <= 1.0:
        raise InvalidParameterError(f"density must be in [0, 1], got {density}")
    lo, hi = _check_reward_range(reward_range)

    rng = np.random.default_rng(seed)
    order = rng.permutation(n_tasks)
    edges = rng.random((n_tasks, n_tasks)) < density
    rewards = rng.integers(lo, hi + 1, size=n_tasks)

    deps: Dict[int, Set[int]] = {i: set() for i in range(n_tasks)}
    for b in range(1, n_tasks):
        for a in np.flatnonzero(edges[:b, b]):
            deps[int(order[b])].add(int(order[a]))

    tasks = {
        str(i + 1): Task(
            id=str(i + 1),
            reward=int(rewards[i]),
            deps=frozenset(str(d + 1) for d in deps[i]),
        )
        for i in range(n_tasks)
    }
    return TaskGraph(tasks=tasks)


def density_for_mean_in_degree(n_tasks: int, mean_in_degree: float) -> float:
    if n_tasks < 2:
        return 0.0
    return min(1.0, 2.0 * mean_in_degree / (n_tasks - 1))


def generate_lds_graph(n_tasks: int, seed: int = 0, reward_range: Tuple[int, int] = (1, 10)) -> TaskGraph:
    """희소 의존성 시스템(LDS) 대용 그래프. 18개 작업에서 밀도 0.1"""
    density = density_for_mean_in_degree(n_tasks, LDS_MEAN_IN_DEGREE)
    return generate_program_graph(n_tasks, density, reward_range, seed)


def generate_hds_graph(n_tasks: int, seed: int = 0, reward_range: Tuple[int, int] = (1, 10)) -> TaskGraph:
    """고밀도 의존성 시스템(HDS) 대용 그래프. 40개 작업에서 밀도 0.6"""
    density = density_for_mean_in_degree(n_tasks, HDS_MEAN_IN_DEGREE)
    return generate_program_graph(n_tasks, density, reward_range, seed)


def assign_inference_classes(
    graph: TaskGraph,
    q: float,
    seed: int,
    class_size: int = 3,
) -> TaskGraph:
    """
    각 작업이 확률 q 로 공유 추론 클래스에 참여하도록 클래스를 다시 배정합니다.
    참여 작업은 ceil(참여 수 / class_size) 개 클래스에 무작위로 흩어지고,
    나머지는 자기 id 를 클래스로 가집니다.
    """
    if not 0.0 <= q <= 1.0:
        raise InvalidParameterError(f"inference q must be in [0, 1], got {q}")
    if class_size < 1:
        raise InvalidParameterError(f"class_size must be >= 1, got {class_size}")

    rng = np.random.default_rng(seed)
    ids = graph.ids()
    joins = rng.random(len(ids)) < q
    members = [task_id for task_id, joined in zip(ids, joins) if joined]
    n_classes = math.ceil(len(members) / class_size) if members else 0
    labels = rng.integers(0, n_classes, size=len(members)) if n_classes else []
    classes = {task_id: f"class{int(label)}" for task_id, label in zip(members, labels)}

    tasks = {
        task_id: graph.tasks[task_id].model_copy(
            update={"inference_class": classes.get(task_id, task_id)}
        )
        for task_id in ids
    }
    return TaskGraph(tasks=tasks)


# ---------------------------------------------------------------------------
# 분할
# ---------------------------------------------------------------------------

def _size_bounds(m: int, l: int, tolerance: float) -> Tuple[int, int]:
    target = m / l
    cap = max(math.ceil(target), math.floor(target * (1 + tolerance) + 1e-9))
    floor_ = max(1, min(math.floor(target), math.ceil(target * (1 - tolerance) - 1e-9)))
    return floor_, cap


def partition_tasks(
    graph: TaskGraph,
    l: int,
    mode: Union[PartitionMode, str] = PartitionMode.BALANCED,
    seed: int = 0,
    tolerance: float = 0.1,
) -> List[TaskSubset]:
    """
    작업을 l 개의 서로소 부분집합으로 나눕니다.

    balanced: 보상 내림차순(동률은 id 오름차순) 작업을 시드로 섞은 그룹 순서에 라운드 로빈 배분
    independent: 위상 순서로 각 작업을 의존 작업이 가장 많은 그룹에 배치한 뒤
        크기를 목표치 ±tolerance 로 재조정 (그룹 간 의존 간선 최소화)
    """
    mode = PartitionMode(mode)
    m = graph.m
    if l < 1 or l > m:
        raise InvalidParameterError(f"group count must satisfy 1 <= l <= m ({m}), got {l}")

    if mode is PartitionMode.BALANCED:
        members = _balanced(graph, l, seed)
    else:
        members = _independent(graph, l, tolerance)

    subsets = [TaskSubset(group_id=g, task_ids=frozenset(members[g])) for g in range(l)]
    logger.debug(
        f"분할 완료 ({mode.value}): sizes={[len(s) for s in subsets]}, "
        f"cross_edges={cross_group_edges(graph, subsets)}"
    )
    return subsets


def _balanced(graph: TaskGraph, l: int, seed: int) -> List[Set[str]]:
    rng = np.random.default_rng(seed)
    group_order = [int(g) for g in rng.permutation(l)]
    ordered = sorted(graph.tasks.values(), key=lambda t: (-t.reward, task_sort_key(t.id)))
    members: List[Set[str]] = [set() for _ in range(l)]
    for i, task in enumerate(ordered):
        members[group_order[i % l]].add(task.id)
    return members


def _independent(graph: TaskGraph, l: int, tolerance: float) -> List[Set[str]]:
    floor_, cap = _size_bounds(graph.m, l, tolerance)
    members: List[Set[str]] = [set() for _ in range(l)]
    owner: Dict[str, int] = {}

    for task_id in graph.topological_order():
        open_groups = [g for g in range(l) if len(members[g]) < cap]
        counts = {g: 0 for g in open_groups}
        for dep in graph.tasks[task_id].deps:
            if owner.get(dep) in counts:
                counts[owner[dep]] += 1
        # 의존 작업이 많은 그룹 > 작은 그룹 > 낮은 그룹 id
        best = min(open_groups, key=lambda g: (-counts[g], len(members[g]), g))
        members[best].add(task_id)
        owner[task_id] = best

    dependents = graph.dependents()

    def connections(task_id: str, group: int) -> int:
        linked = graph.tasks[task_id].deps | dependents[task_id]
        return sum(1 for other in linked if owner[other] == group)

    while True:
        smallest = min(range(l), key=lambda g: (len(members[g]), g))
        if len(members[smallest]) >= floor_:
            break
        largest = min(range(l), key=lambda g: (-len(members[g]), g))
        moved = min(
            members[largest],
            key=lambda t: (connections(t, largest), task_sort_key(t)),
        )
        members[largest].remove(moved)
        members[smallest].add(moved)
        owner[moved] = smallest

    return members


def cross_group_edges(graph: TaskGraph, subsets: Iterable[TaskSubset]) -> int:
    owner = {task_id: s.group_id for s in subsets for task_id in s.task_ids}
    return sum(
        1
        for task in graph.tasks.values()
        for dep in task.deps
        if owner[dep] != owner[task.id]
    )


# ---------------------------------------------------------------------------
# 준비 상태 / 의존성 갱신
# ---------------------------------------------------------------------------

def ready_tasks(graph: TaskGraph, completed: Set[str], assigned: Set[str]) -> Set[str]:
    """완료/할당되지 않았고 모든 의존 작업이 완료된 작업 집합"""
    done = set(completed)
    return {
        task_id
        for task_id, task in graph.tasks.items()
        if task_id not in done and task_id not in assigned and task.deps <= done
    }


def update_dependencies(graph: TaskGraph, completed_task: str) -> TaskGraph:
    """완료된 작업을 모든 작업의 의존성 목록에서 제거한 새 그래프를 반환합니다."""
    if completed_task not in graph.tasks:
        raise UnknownTaskError(completed_task)
    tasks = {
        task_id: (
            task.model_copy(update={"deps": task.deps - {completed_task}})
            if completed_task in task.deps
            else task
        )
        for task_id, task in graph.tasks.items()
    }
    return TaskGraph(tasks=tasks)
