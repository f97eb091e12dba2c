"""
그룹 단위 제어: 작업 할당(중앙 집중형), 작업 pull(분산형), 검증/보상/의존성 갱신/지식 공유
"""
import heapq
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Optional, Set, Tuple

from backend.simulation.errors import StateError, UnknownGroupError
from backend.simulation.knowledge import KnowledgeBase, lookup, share_knowledge
from backend.simulation.maze import Solution
from backend.simulation.taskgraph import TaskGraph, TaskSubset, task_sort_key
from backend.utils.event_log import EventLog, SimEvent

logger = logging.getLogger(__name__)


class ControlMode(str, Enum):
    CENTRALIZED = "centralized"
    DECENTRALIZED = "decentralized"


class AgentState(str, Enum):
    IDLE = "idle"
    WAITING = "waiting"
    EXPLORING = "exploring"


@dataclass
class Agent:
    id: str
    group_id: int
    speed: float
    state: AgentState = AgentState.IDLE
    current_task: Optional[str] = None
    finish_time: Optional[float] = None
    total_wait: float = 0.0
    rewards_earned: int = 0
    wait_since: Optional[float] = field(default=None, repr=False)

    def begin_waiting(self, now: float) -> None:
        if self.state is not AgentState.IDLE:
            raise StateError(f"agent {self.id} cannot wait from state {self.state.value}")
        self.state = AgentState.WAITING
        self.wait_since = now

    def stop_waiting(self, now: float) -> None:
        if self.state is not AgentState.WAITING:
            raise StateError(f"agent {self.id} is not waiting")
        if now < self.wait_since:
            raise StateError(f"agent {self.id} stops waiting before it started")
        self.total_wait += now - self.wait_since
        self.state = AgentState.IDLE
        self.wait_since = None

    def accrue_wait(self, delay: float) -> None:
        """코디네이터/잠금 대기열에서 보낸 시간 (상태 변화 없음)"""
        if delay < 0:
            raise StateError(f"negative queueing delay {delay} for agent {self.id}")
        self.total_wait += delay

    def begin_exploring(self, task: str, finish_time: float) -> None:
        if self.state is not AgentState.IDLE:
            raise StateError(f"agent {self.id} cannot explore from state {self.state.value}")
        self.state = AgentState.EXPLORING
        self.current_task = task
        self.finish_time = finish_time

    def finish_exploring(self) -> None:
        if self.state is not AgentState.EXPLORING:
            raise StateError(f"agent {self.id} is not exploring")
        self.state = AgentState.IDLE
        self.current_task = None
        self.finish_time = None


class Assignment(NamedTuple):
    agent_id: str
    task_id: str
    inferred: bool
    solution: Optional[Solution] = None


class DependencyBoard:
    """
    시스템 전역 완료 게시판. 솔루션은 공유하지 않고 완료 사실만 모든 그룹에 알립니다.
    """

    def __init__(self, graph: TaskGraph, owner: Dict[str, int]):
        self.owner = owner
        self.unresolved: Dict[str, Set[str]] = {t: set(task.deps) for t, task in graph.tasks.items()}
        self.dependents = {t: sorted(d, key=task_sort_key) for t, d in graph.dependents().items()}
        self.completed: Set[str] = set()
        self._groups: Dict[int, "GroupState"] = {}

    def register(self, group: "GroupState") -> None:
        self._groups[group.id] = group

    def group(self, group_id: int) -> "GroupState":
        if group_id not in self._groups:
            raise UnknownGroupError(group_id)
        return self._groups[group_id]

    def seed_ready(self, now: float = 0.0) -> Set[int]:
        touched = set()
        for task_id in sorted(self.unresolved, key=task_sort_key):
            if not self.unresolved[task_id]:
                self.group(self.owner[task_id]).release(task_id, now)
                touched.add(self.owner[task_id])
        return touched

    def publish_completion(self, task: str, now: float) -> Set[int]:
        """
        완료된 작업을 모든 후속 작업의 미해결 목록에서 지웁니다.

        Returns:
            Set[int]: 새로 준비된 작업을 받은 그룹 id
        """
        if task in self.completed:
            return set()
        self.completed.add(task)
        touched = set()
        for dependent in self.dependents[task]:
            remaining = self.unresolved[dependent]
            remaining.discard(task)
            if not remaining:
                group_id = self.owner[dependent]
                self.group(group_id).release(dependent, now)
                touched.add(group_id)
        return touched


@dataclass
class GroupState:
    id: int
    agents: List[Agent]
    assigned: TaskSubset
    kb: KnowledgeBase
    graph: TaskGraph
    board: DependencyBoard
    validator: Callable[[str, Solution], bool]
    events: EventLog
    completed: Set[str] = field(default_factory=set)
    pending: Dict[str, str] = field(default_factory=dict)
    validation_failures: int = 0
    inferred_completions: int = 0
    last_completion: float = 0.0
    _ready: List[Tuple[int, tuple, str]] = field(default_factory=list, repr=False)
    _ready_set: Set[str] = field(default_factory=set, repr=False)

    def __post_init__(self):
        self.agents = sorted(self.agents, key=lambda a: task_sort_key(a.id))
        self.board.register(self)

    def agent(self, agent_id: str) -> Agent:
        for agent in self.agents:
            if agent.id == agent_id:
                return agent
        raise StateError(f"agent {agent_id} is not in group {self.id}")

    def emit(self, time: float, kind: str, agent: Optional[str] = None,
             task: Optional[str] = None, detail: str = "") -> None:
        self.events.send(SimEvent(time=time, kind=kind, group=self.id, agent=agent, task=task, detail=detail))

    def release(self, task: str, now: float) -> None:
        """준비된 작업을 보상 우선순위 대기열에 넣습니다."""
        if task in self.completed or task in self.pending or task in self._ready_set:
            return
        heapq.heappush(self._ready, (-self.graph.tasks[task].reward, task_sort_key(task), task))
        self._ready_set.add(task)
        self.emit(now, "ready", task=task)

    def pop_ready(self) -> Optional[str]:
        if not self._ready:
            return None
        _, _, task = heapq.heappop(self._ready)
        self._ready_set.discard(task)
        return task

    def ready_ids(self) -> Set[str]:
        return set(self._ready_set)

    def ready_count(self) -> int:
        return len(self._ready)

    def has_unassigned_work(self) -> bool:
        return len(self.completed) + len(self.pending) < len(self.assigned.task_ids)

    def is_done(self) -> bool:
        return len(self.completed) == len(self.assigned.task_ids)

    def settle_waiting(self, now: float) -> None:
        """더 이상 할당할 작업이 없으면 대기 중인 에이전트를 유휴 상태로 돌립니다."""
        if self.has_unassigned_work():
            return
        for agent in self.agents:
            if agent.state is AgentState.WAITING:
                agent.stop_waiting(now)

    def total_wait(self) -> float:
        return sum(agent.total_wait for agent in self.agents)


def assign_tasks(group: GroupState, now: float) -> List[Assignment]:
    """
    중앙 집중형 배정: 유휴/대기 에이전트(id 순)에 준비 작업을 보상 내림차순으로 짝지어 줍니다.
    지식 베이스에 솔루션이 있는 작업은 inferred 배정으로 솔루션과 함께 돌려주며,
    탐색 없이 코디네이터 큐(건당 δ)를 거쳐 완료됩니다.
    """
    assignments: List[Assignment] = []
    holders = set(group.pending.values())

    for agent in group.agents:
        if agent.state is AgentState.EXPLORING or agent.id in holders:
            continue
        task = group.pop_ready()
        if task is None:
            if agent.state is AgentState.IDLE and group.has_unassigned_work():
                agent.begin_waiting(now)
                group.emit(now, "wait", agent.id)
            continue
        if agent.state is AgentState.WAITING:
            agent.stop_waiting(now)
        group.pending[task] = agent.id
        solution = lookup(group.kb, task)
        if solution is not None:
            group.emit(now, "assign", agent.id, task, "inferred")
            assignments.append(Assignment(agent.id, task, True, solution))
        else:
            group.emit(now, "assign", agent.id, task)
            assignments.append(Assignment(agent.id, task, False))

    group.settle_waiting(now)
    return assignments


def pull_task(agent: Agent, group: GroupState, now: float) -> Optional[str]:
    """분산형: 에이전트가 그룹의 준비 작업 중 보상이 가장 큰 것을 직접 가져옵니다."""
    if agent.state is AgentState.EXPLORING:
        raise StateError(f"agent {agent.id} is exploring and cannot pull")

    task = group.pop_ready()
    if task is None:
        if agent.state is AgentState.IDLE and group.has_unassigned_work():
            agent.begin_waiting(now)
            group.emit(now, "wait", agent.id)
        return None

    if agent.state is AgentState.WAITING:
        agent.stop_waiting(now)
    group.pending[task] = agent.id
    group.emit(now, "pull", agent.id, task)
    group.settle_waiting(now)
    return task


def complete_task(
    group: GroupState,
    agent: Agent,
    task: str,
    solution: Solution,
    now: float,
    inferred: bool = False,
) -> GroupState:
    """
    검증 -> 보상 지급 -> 의존성 갱신(게시판) -> 그룹 내 지식 공유.
    검증에 실패하면 보상 없이 작업을 준비 대기열로 되돌립니다.
    """
    if group.pending.get(task) != agent.id:
        raise StateError(f"task {task} is not pending for agent {agent.id} in group {group.id}")
    if agent.state is AgentState.EXPLORING:
        if agent.current_task != task:
            raise StateError(f"agent {agent.id} is exploring {agent.current_task}, not {task}")
        agent.finish_exploring()

    del group.pending[task]

    if not group.validator(task, solution):
        group.validation_failures += 1
        group.emit(now, "reject", agent.id, task)
        group.release(task, now)
        return group

    agent.rewards_earned += group.graph.tasks[task].reward
    group.completed.add(task)
    group.last_completion = max(group.last_completion, now)
    if inferred:
        group.inferred_completions += 1
    group.emit(now, "complete", agent.id, task, "inferred" if inferred else "explored")

    group.board.publish_completion(task, now)

    share_knowledge(group.kb, task, solution, now, agent.id)
    group.emit(now, "share", agent.id, task, group.kb.inference_class(task))
    return group
