"""
이산 사건 시뮬레이션 엔진

모든 그룹의 시계를 하나의 우선순위 큐((시각, 그룹, 에이전트, 순번) 정렬)로 진행합니다.
시각 0 은 작업 분할 직후이며, 분할/수집 오버헤드는 시스템 ET 에만 더해집니다.
"""
import heapq
import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, TextIO, Tuple

from more_itertools import chunked

from backend.config.settings import get_settings
from backend.schemas.report import ControlComparisonRow, SimulationReport
from backend.schemas.scenario import Scenario
from backend.simulation.control import (
    Agent,
    AgentState,
    ControlMode,
    DependencyBoard,
    GroupState,
    assign_tasks,
    complete_task,
    pull_task,
)
from backend.simulation.errors import DeadlockError, InvalidParameterError, UnknownGroupError
from backend.simulation.knowledge import KnowledgeBase, lookup
from backend.simulation.maze import Maze, Solution, explore, generate_maze, validate_solution
from backend.simulation.taskgraph import (
    TaskGraph,
    assign_inference_classes,
    cross_group_edges,
    generate_lds_graph,
    partition_tasks,
    task_sort_key,
)
from backend.utils.event_log import EventLog, SimEvent
from backend.utils.seeding import derive_seed, make_random

logger = logging.getLogger(__name__)

Listener = Callable[[SimEvent, "Simulation"], None]

# 이벤트 종류
_SYNC = "sync"
_FINISH = "finish"


class Simulation:
    """
    한 번의 시뮬레이션 실행.

    Args:
        scenario: 검증된 시나리오
        trace: 이벤트 로그를 한 줄씩 기록할 텍스트 스트림 (선택)
        listeners: 이벤트마다 (event, simulation) 으로 호출되는 콜백
    """

    def __init__(
        self,
        scenario: Scenario,
        trace: Optional[TextIO] = None,
        listeners: Iterable[Listener] = (),
    ):
        self.scenario = scenario
        self.seed = scenario.master_seed
        self.events = EventLog(trace)
        self.now = 0.0

        graph = scenario.graph
        if scenario.inference_q is not None:
            graph = assign_inference_classes(
                graph,
                scenario.inference_q,
                derive_seed(self.seed, "classes"),
                class_size=get_settings().INFERENCE_CLASS_SIZE,
            )
        self.graph: TaskGraph = graph

        subsets = partition_tasks(
            graph,
            scenario.l,
            scenario.partition_mode,
            seed=derive_seed(self.seed, "partition"),
            tolerance=get_settings().PARTITION_TOLERANCE,
        )
        owner = {task_id: s.group_id for s in subsets for task_id in s.task_ids}
        self.board = DependencyBoard(graph, owner)
        self.cross_edges = cross_group_edges(graph, subsets)
        class_of = {task_id: task.inference_class for task_id, task in graph.tasks.items()}

        agent_ids = iter(scenario.agent_ids())
        self.groups: Dict[int, GroupState] = {}
        for subset, size in zip(subsets, scenario.group_sizes()):
            agents = []
            for _ in range(size):
                agent_id = next(agent_ids)
                agents.append(Agent(id=agent_id, group_id=subset.group_id, speed=scenario.speed_of(agent_id)))
            kb = KnowledgeBase(
                group_id=subset.group_id,
                class_of=class_of,
                members=frozenset(a.id for a in agents),
            )
            self.groups[subset.group_id] = GroupState(
                id=subset.group_id,
                agents=agents,
                assigned=subset,
                kb=kb,
                graph=graph,
                board=self.board,
                validator=self._validate,
                events=self.events,
            )

        self._queue: List[tuple] = []
        self._seq = 0
        self._dirty: Set[int] = set()
        self._server_free: Dict[int, float] = {g: 0.0 for g in self.groups}
        self._synced: Set[int] = set()
        self._explorations: Dict[str, int] = {}
        self._validations: Dict[str, int] = {}

        self.events.subscribe(self._mark_ready)
        for listener in listeners:
            self.events.subscribe(lambda event, fn=listener: fn(event, self))

    # ------------------------------------------------------------------
    # 솔루션 공간
    # ------------------------------------------------------------------

    def maze_for(self, task_id: str) -> Maze:
        width, height = self.scenario.maze_size
        return generate_maze(width, height, derive_seed(self.seed, "maze", task_id))

    def _explore(self, agent: Agent, task_id: str) -> Tuple[Solution, float]:
        attempt = self._explorations.get(task_id, 0)
        self._explorations[task_id] = attempt + 1
        return explore(
            self.maze_for(task_id),
            agent.speed,
            derive_seed(self.seed, "explore", task_id, attempt),
            task_id=task_id,
        )

    def _validate(self, task_id: str, solution: Solution) -> bool:
        # 추론으로 얻은 솔루션은 그것을 학습한 작업의 미로 기준으로 검증
        source = solution.task_id or task_id
        if not validate_solution(self.maze_for(source), solution):
            return False
        p = self.scenario.validation_fail_p
        if p <= 0:
            return True
        attempt = self._validations.get(task_id, 0)
        self._validations[task_id] = attempt + 1
        return make_random(self.seed, "validate", task_id, attempt).random() >= p

    # ------------------------------------------------------------------
    # 이벤트 큐
    # ------------------------------------------------------------------

    def _push(self, time: float, group_id: int, agent: Optional[Agent], kind: str, payload=None) -> None:
        agent_key = task_sort_key(agent.id) if agent is not None else ()
        heapq.heappush(self._queue, (time, group_id, agent_key, self._seq, kind, agent, payload))
        self._seq += 1

    def _mark_ready(self, event: SimEvent) -> None:
        if event.kind == "ready":
            self._dirty.add(event.group)

    def _drain(self, now: float) -> None:
        """새 준비 작업이나 유휴 에이전트가 생긴 그룹을 그룹 id 순으로 처리합니다."""
        while self._dirty:
            group_id = min(self._dirty)
            self._dirty.discard(group_id)
            if self.scenario.control is ControlMode.CENTRALIZED:
                self._dispatch(self.groups[group_id], now)
            else:
                self._offer_pulls(self.groups[group_id], now)

    # ------------------------------------------------------------------
    # 중앙 집중형: 그룹 코디네이터가 FIFO 로 할당 (건당 δ)
    # ------------------------------------------------------------------

    def _dispatch(self, group: GroupState, now: float) -> None:
        delta = self.scenario.overheads.assignment
        for assignment in assign_tasks(group, now):
            agent = group.agent(assignment.agent_id)
            start = max(now, self._server_free[group.id])
            agent.accrue_wait(start - now)
            ready_at = start + delta
            self._server_free[group.id] = ready_at
            if assignment.inferred:
                # 탐색 없이 배정이 끝나는 시각에 완료
                agent.begin_exploring(assignment.task_id, ready_at)
                self._push(ready_at, group.id, agent, _FINISH, (assignment.task_id, assignment.solution, True))
            else:
                self._start_exploring(group, agent, assignment.task_id, ready_at)

    # ------------------------------------------------------------------
    # 분산형: 각 에이전트가 그룹 작업 풀에서 직접 pull (건당 γ·|그룹|, 에이전트 본인 비용)
    # ------------------------------------------------------------------

    def _offer_pulls(self, group: GroupState, now: float) -> None:
        if group.id not in self._synced:
            return
        pull_cost = self.scenario.overheads.pull_per_agent * len(group.agents)
        holders = set(group.pending.values())
        for agent in group.agents:
            if agent.state is AgentState.EXPLORING or agent.id in holders:
                continue
            task_id = pull_task(agent, group, now)
            if task_id is None:
                continue
            ready_at = now + pull_cost
            solution = lookup(group.kb, task_id)
            if solution is not None:
                # 탐색 없이 pull 이 끝나는 시각에 완료
                agent.begin_exploring(task_id, ready_at)
                self._push(ready_at, group.id, agent, _FINISH, (task_id, solution, True))
            else:
                self._start_exploring(group, agent, task_id, ready_at)
        group.settle_waiting(now)

    # ------------------------------------------------------------------
    # 공통
    # ------------------------------------------------------------------

    def _start_exploring(self, group: GroupState, agent: Agent, task_id: str, start: float) -> None:
        solution, duration = self._explore(agent, task_id)
        finish = start + duration
        agent.begin_exploring(task_id, finish)
        group.emit(start, "explore", agent.id, task_id, f"steps={solution.steps_explored}")
        self._push(finish, group.id, agent, _FINISH, (task_id, solution, False))

    def _on_finish(self, group: GroupState, agent: Agent, payload, now: float) -> None:
        task_id, solution, inferred = payload
        complete_task(group, agent, task_id, solution, now, inferred=inferred)
        self._dirty.add(group.id)

    def run(self) -> SimulationReport:
        scenario = self.scenario
        logger.info(
            f"시뮬레이션 시작: m={self.graph.m}, l={scenario.l}, n={scenario.n}, "
            f"control={scenario.control.value}, partition={scenario.partition_mode.value}, "
            f"seed={self.seed}"
        )
        for group in self.groups.values():
            group.emit(0.0, "split", detail=f"tasks={len(group.assigned)} agents={len(group.agents)}")

        self.board.seed_ready(0.0)
        if scenario.control is ControlMode.CENTRALIZED:
            self._dirty.update(self.groups)
            self._drain(0.0)
        else:
            self._dirty.clear()
            for group in self.groups.values():
                sync_done = scenario.overheads.sync_per_agent * len(group.agents)
                self._push(sync_done, group.id, None, _SYNC)

        while self._queue:
            time, group_id, _, _, kind, agent, payload = heapq.heappop(self._queue)
            self.now = time
            group = self.groups[group_id]
            if kind == _SYNC:
                self._synced.add(group_id)
                group.emit(time, "sync")
                self._dirty.add(group_id)
            else:
                self._on_finish(group, agent, payload, time)
            self._drain(time)

        unfinished = [t for g in self.groups.values() for t in g.assigned.task_ids if t not in g.completed]
        if unfinished:
            unfinished.sort(key=task_sort_key)
            raise DeadlockError(
                f"{len(unfinished)} tasks can never become ready: {', '.join(unfinished[:10])}",
                unfinished,
            )

        report = self._report()
        logger.info(
            f"시뮬레이션 종료: ET={report.et_system:.4f}, TWT={report.twt_system:.4f}, "
            f"events={report.event_count}"
        )
        return report

    def _report(self) -> SimulationReport:
        overheads = self.scenario.overheads
        et_group = {g: group.last_completion for g, group in self.groups.items()}
        twt_group = {g: group.total_wait() for g, group in self.groups.items()}
        et_max = max(et_group.values())
        et_system = overheads.split + et_max + overheads.collect
        for group in self.groups.values():
            group.emit(et_max, "collect", detail=f"completed={len(group.completed)}")
        self.events.flush()
        return SimulationReport(
            et_system=et_system,
            et_group=et_group,
            twt_group=twt_group,
            twt_system=sum(twt_group.values()),
            tasks_assigned={g: len(group.assigned) for g, group in self.groups.items()},
            tasks_completed={g: len(group.completed) for g, group in self.groups.items()},
            rewards={a.id: a.rewards_earned for group in self.groups.values() for a in group.agents},
            event_count=len(self.events),
            event_digest=self.events.digest(),
            m=self.graph.m,
            l=self.scenario.l,
            control=self.scenario.control,
            master_seed=self.seed,
            validation_failures=sum(g.validation_failures for g in self.groups.values()),
            inferred_completions=sum(g.inferred_completions for g in self.groups.values()),
            cross_edges=self.cross_edges,
        )


def run_simulation(
    scenario: Scenario,
    trace: Optional[TextIO] = None,
    listeners: Iterable[Listener] = (),
) -> SimulationReport:
    return Simulation(scenario, trace=trace, listeners=listeners).run()


def default_graph_factory(m: int, seed: int) -> TaskGraph:
    return generate_lds_graph(m, seed=derive_seed(seed, "graph", m), reward_range=get_settings().reward_range)


def compare_controls(
    scenario_base: Scenario,
    task_counts: Sequence[int],
    replications: int = 1,
    graph_factory: Optional[Callable[[int, int], TaskGraph]] = None,
    seeds: Optional[Sequence[int]] = None,
    runner: Optional[Callable[[List[Scenario]], List[SimulationReport]]] = None,
) -> List[ControlComparisonRow]:
    """
    작업 수별로 중앙 집중형/분산형 ET 를 같은 시드에서 짝지어 비교합니다.
    시드는 seeds 가 없으면 scenario_base.master_seed + r (r = 0..replications-1).
    runner 는 시나리오 목록을 입력 순서대로 실행합니다 (기본: 순차 실행).
    """
    if not task_counts:
        raise InvalidParameterError("task_counts must not be empty")
    if seeds is None:
        if replications < 1:
            raise InvalidParameterError(f"replications must be >= 1, got {replications}")
        seeds = [scenario_base.master_seed + r for r in range(replications)]
    factory = graph_factory or default_graph_factory

    cells: List[Tuple[int, int]] = []
    scenarios: List[Scenario] = []
    for m in task_counts:
        for seed in seeds:
            graph = factory(m, seed)
            cells.append((m, seed))
            for control in (ControlMode.CENTRALIZED, ControlMode.DECENTRALIZED):
                scenarios.append(scenario_base.replace(graph=graph, control=control, master_seed=seed))

    reports = runner(scenarios) if runner is not None else [run_simulation(s) for s in scenarios]
    rows = []
    for (m, seed), (centralized, decentralized) in zip(cells, chunked(reports, 2)):
        rows.append(ControlComparisonRow(
            m=m,
            seed=seed,
            et_centralized=centralized.et_system,
            et_decentralized=decentralized.et_system,
        ))
        logger.info(
            f"제어 방식 비교 m={m} seed={seed}: "
            f"centralized={centralized.et_system:.4f}, decentralized={decentralized.et_system:.4f}"
        )
    return rows


def collect_task_distribution(report: SimulationReport, g_k: int, g_l: int) -> Tuple[int, int]:
    for group_id in (g_k, g_l):
        if group_id not in report.tasks_completed:
            raise UnknownGroupError(group_id)
    return report.tasks_completed[g_k], report.tasks_completed[g_l]
