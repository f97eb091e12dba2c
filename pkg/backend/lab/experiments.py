"""
실험 셀 실행기

각 셀과 반복 실행은 자기 Scenario 사본을 갖고 독립적으로 실행되므로
workers > 1 이면 프로세스 풀로 나눠 실행하고, 결과는 입력 순서대로 직렬 병합합니다.
"""
import logging
from enum import Enum
from functools import partial
from multiprocessing import Pool
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Union

from scipy.stats import kendalltau

from backend.config.settings import get_settings
from backend.schemas.experiment import ExperimentResult
from backend.schemas.report import SimulationReport
from backend.schemas.scenario import Overheads, Scenario
from backend.simulation.control import ControlMode
from backend.simulation.engine import collect_task_distribution, compare_controls, run_simulation
from backend.simulation.errors import InvalidParameterError
from backend.simulation.taskgraph import PartitionMode, TaskGraph, generate_hds_graph, generate_lds_graph
from backend.lab.presets import AGENTS_PER_GROUP, CONTROL_STUDY_GROUPS, PARTITION_STUDY_GROUPS
from backend.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

Row = Dict[str, Union[int, float, str]]


class FixedCount(str, Enum):
    PER_GROUP = "agents-per-group"
    TOTAL = "total-agents"


class TrendTest(NamedTuple):
    tau: float
    p_value: float


def seed_list(seeds: Union[int, Sequence[int]], master_seed: Optional[int] = None) -> List[int]:
    """정수면 master_seed + r (r = 0..seeds-1), 시퀀스면 그대로"""
    if isinstance(seeds, int):
        if seeds < 1:
            raise InvalidParameterError(f"seed count must be >= 1, got {seeds}")
        base = get_settings().DEFAULT_SEED if master_seed is None else master_seed
        return [base + r for r in range(seeds)]
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InvalidParameterError("seed list must not be empty")
    return seeds


def run_many(scenarios: Sequence[Scenario], workers: int = 1) -> List[SimulationReport]:
    if workers > 1 and len(scenarios) > 1:
        with Pool(min(workers, len(scenarios))) as pool:
            return pool.map(run_simulation, scenarios)
    return [run_simulation(s) for s in scenarios]


# ---------------------------------------------------------------------------
# 그룹 수 변화
# ---------------------------------------------------------------------------

def group_sweep(
    base: Scenario,
    group_counts: Sequence[int],
    fixed: Union[FixedCount, str] = FixedCount.PER_GROUP,
    seeds: Union[int, Sequence[int]] = 1,
    workers: int = 1,
) -> ExperimentResult:
    """
    그룹 수 l 을 바꿔가며 같은 그래프를 실행합니다.

    fixed=agents-per-group 이면 그룹당 인원을 base 값으로 유지하고,
    fixed=total-agents 이면 base 의 전체 인원을 l 개 그룹에 나눕니다.
    """
    fixed = FixedCount(fixed)
    if not group_counts:
        raise InvalidParameterError("group_counts must not be empty")
    seeds = seed_list(seeds, base.master_seed)

    cells = []
    for l in group_counts:
        for seed in seeds:
            if fixed is FixedCount.PER_GROUP:
                per_group = base.agents_per_group or max(1, base.n // base.l)
                scenario = base.replace(l=l, agents_per_group=per_group, master_seed=seed)
            else:
                scenario = base.replace(l=l, total_agents=base.n, master_seed=seed)
            cells.append((l, seed, scenario))

    reports = run_many([scenario for _, _, scenario in cells], workers)
    rows: List[Row] = []
    for (l, seed, scenario), report in zip(cells, reports):
        rows.append({
            "l": l,
            "seed": seed,
            "n": scenario.n,
            "et_system": report.et_system,
            "et_group_max": report.et_group_max,
            "twt_system": report.twt_system,
        })
    result = ExperimentResult.build("sweep-groups", rows, notes={"fixed": fixed.value, "m": str(base.graph.m)})
    for l, et in result.mean_by("l", "et_system").items():
        logger.info(f"그룹 수 l={l}: 평균 ET={et:.4f}")
    return result


def group_size_trend(result: ExperimentResult) -> TrendTest:
    """(l, ET) 의 Kendall tau. 음수면 그룹을 늘릴수록 ET 가 줄어드는 방향"""
    tau, p_value = kendalltau(result.column("l"), result.column("et_system"))
    return TrendTest(tau=float(tau), p_value=float(p_value))


# ---------------------------------------------------------------------------
# 제어 방식 비교
# ---------------------------------------------------------------------------

def compare_controls_result(
    base: Scenario,
    task_counts: Sequence[int],
    seeds: Union[int, Sequence[int]] = 1,
    workers: int = 1,
) -> ExperimentResult:
    """작업 수 × 시드마다 LDS 그래프를 만들고 두 제어 방식을 같은 시드로 실행합니다."""
    if not task_counts:
        raise InvalidParameterError("task_counts must not be empty")
    comparison = compare_controls(
        base,
        task_counts,
        seeds=seed_list(seeds, base.master_seed),
        runner=partial(run_many, workers=workers),
    )
    rows: List[Row] = [
        {
            "m": row.m,
            "seed": row.seed,
            "et_centralized": row.et_centralized,
            "et_decentralized": row.et_decentralized,
            "difference": row.difference,
        }
        for row in comparison
    ]
    return ExperimentResult.build("compare-controls", rows)


# ---------------------------------------------------------------------------
# 의존성 연구
# ---------------------------------------------------------------------------

def dependency_study(
    graph_lds: TaskGraph,
    graph_hds: TaskGraph,
    seeds: Union[int, Sequence[int]] = 1,
    master_seed: Optional[int] = None,
    overheads: Optional[Overheads] = None,
    graph_control: Optional[TaskGraph] = None,
    workers: int = 1,
) -> ExperimentResult:
    """
    두 가지 설계를 실행해 그룹별 ET 와 TWT 를 보고합니다.

    partition: {LDS, HDS} × {balanced(그룹 간 의존), independent} 분할,
        분산형, 3개 그룹, 그룹당 5명
    control: graph_control(없으면 graph_lds), 5개 그룹, 그룹당 5명, 중앙 집중형과 분산형

    notes 의 hds_et_inversion 은 HDS 에서 independent 분할의 평균 ET 가
    balanced 보다 큰지(yes/no) 를 나타냅니다.
    """
    seeds = seed_list(seeds, master_seed)
    extra = {"overheads": overheads} if overheads is not None else {}

    cells = []
    for system, graph in (("lds", graph_lds), ("hds", graph_hds)):
        for partition in (PartitionMode.BALANCED, PartitionMode.INDEPENDENT):
            for seed in seeds:
                scenario = Scenario(
                    graph=graph,
                    l=PARTITION_STUDY_GROUPS,
                    agents_per_group=AGENTS_PER_GROUP,
                    control=ControlMode.DECENTRALIZED,
                    partition_mode=partition,
                    master_seed=seed,
                    **extra,
                )
                cells.append(("partition", system, partition.value, ControlMode.DECENTRALIZED.value, seed, scenario))
    for control in (ControlMode.CENTRALIZED, ControlMode.DECENTRALIZED):
        for seed in seeds:
            scenario = Scenario(
                graph=graph_control or graph_lds,
                l=CONTROL_STUDY_GROUPS,
                agents_per_group=AGENTS_PER_GROUP,
                control=control,
                partition_mode=PartitionMode.BALANCED,
                master_seed=seed,
                **extra,
            )
            cells.append(("control", "lds", PartitionMode.BALANCED.value, control.value, seed, scenario))

    reports = run_many([cell[-1] for cell in cells], workers)
    rows: List[Row] = []
    for (study, system, partition, control, seed, _), report in zip(cells, reports):
        for group_id in sorted(report.et_group):
            rows.append({
                "study": study,
                "system": system,
                "partition": partition,
                "control": control,
                "seed": seed,
                "group": group_id,
                "et_system": report.et_system,
                "et_group": report.et_group[group_id],
                "twt_group": report.twt_group[group_id],
                "twt_system": report.twt_system,
                "cross_edges": report.cross_edges,
            })

    result = ExperimentResult.build("dependency-study", rows)
    et = result.mean_by(("study", "system", "partition"), "et_system")
    inverted = et[("partition", "hds", "independent")] > et[("partition", "hds", "balanced")]
    result.notes["hds_et_inversion"] = "yes" if inverted else "no"
    logger.info(f"의존성 연구 완료: seeds={len(seeds)}, hds_et_inversion={result.notes['hds_et_inversion']}")
    return result


# ---------------------------------------------------------------------------
# 속도 차이 / 작업 분포
# ---------------------------------------------------------------------------

def speed_sweep(
    base: Scenario,
    speed_factors: Iterable[float],
    seeds: Union[int, Sequence[int]] = 1,
    workers: int = 1,
) -> ExperimentResult:
    """그룹 0 에이전트의 속도만 factor 배로 바꿉니다. 판정 기준은 없습니다."""
    seeds = seed_list(seeds, base.master_seed)
    factors = [float(f) for f in speed_factors]
    if not factors or any(f <= 0 for f in factors):
        raise InvalidParameterError("speed factors must be a non-empty list of positive numbers")

    fast_group = set(base.agent_ids()[: base.group_sizes()[0]])
    cells = []
    for factor in factors:
        speeds = {
            agent_id: base.speed_of(agent_id) * (factor if agent_id in fast_group else 1.0)
            for agent_id in base.agent_ids()
        }
        for seed in seeds:
            cells.append((factor, seed, base.replace(speeds=speeds, master_seed=seed)))

    reports = run_many([scenario for _, _, scenario in cells], workers)
    rows: List[Row] = []
    for (factor, seed, _), report in zip(cells, reports):
        row: Row = {"factor": factor, "seed": seed, "et_system": report.et_system, "twt_system": report.twt_system}
        for group_id in sorted(report.et_group):
            row[f"et_g{group_id}"] = report.et_group[group_id]
        rows.append(row)
    return ExperimentResult.build("speed-sweep", rows)


def task_distribution_study(
    task_counts: Sequence[int],
    seeds: Union[int, Sequence[int]] = 1,
    master_seed: Optional[int] = None,
    workers: int = 1,
) -> ExperimentResult:
    """
    LDS/HDS 그래프를 independent 분할로 2개 그룹에 나누고
    두 그룹이 완료한 작업 수와 그 차이 |Δ| 를 기록합니다.
    """
    if not task_counts:
        raise InvalidParameterError("task_counts must not be empty")
    seeds = seed_list(seeds, master_seed)
    reward_range = get_settings().reward_range
    generators = (("lds", generate_lds_graph), ("hds", generate_hds_graph))

    cells = []
    for system, generate in generators:
        for m in task_counts:
            for seed in seeds:
                graph = generate(m, seed=derive_seed(seed, "graph", system, m), reward_range=reward_range)
                scenario = Scenario(
                    graph=graph,
                    l=2,
                    agents_per_group=AGENTS_PER_GROUP,
                    control=ControlMode.DECENTRALIZED,
                    partition_mode=PartitionMode.INDEPENDENT,
                    master_seed=seed,
                )
                cells.append((system, m, seed, scenario))

    reports = run_many([cell[-1] for cell in cells], workers)
    rows: List[Row] = []
    for (system, m, seed, _), report in zip(cells, reports):
        first, second = collect_task_distribution(report, 0, 1)
        rows.append({
            "system": system,
            "m": m,
            "seed": seed,
            "count_g0": first,
            "count_g1": second,
            "delta": abs(first - second),
        })
    return ExperimentResult.build("task-distribution", rows)
