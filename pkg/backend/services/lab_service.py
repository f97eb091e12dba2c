from typing import Any, Dict, Optional, Sequence, TextIO, Union
from pathlib import Path
import logging

from backend.config.settings import Settings, get_settings
from backend.lab import experiments, presets, theorems
from backend.lab.scenario_config import load_scenario, load_scenario_file
from backend.schemas.experiment import ExperimentResult
from backend.schemas.report import SimulationReport
from backend.simulation.engine import run_simulation
from backend.simulation.taskgraph import load_bundled_graph

logger = logging.getLogger(__name__)


class LabService:
    """
    실험 서비스 클래스
    CLI 와 HTTP API 가 공유하는 시뮬레이션/실험 실행 기능 제공
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def _seed(self, seed: Optional[int]) -> int:
        return self.settings.DEFAULT_SEED if seed is None else seed

    def _replications(self, replications: Optional[int]) -> int:
        return self.settings.DEFAULT_REPLICATIONS if replications is None else replications

    def _workers(self, workers: Optional[int]) -> int:
        return self.settings.DEFAULT_WORKERS if workers is None else workers

    # ==================== 단일 실행 ====================

    def run_scenario(
        self,
        source: Union[str, Path, Dict[str, Any]],
        trace: Optional[TextIO] = None,
        seed: Optional[int] = None,
        bundled_only: bool = False,
    ) -> SimulationReport:
        """
        설정 파일 경로, JSON 텍스트 또는 dict 로 시나리오 하나를 실행합니다.
        seed 를 주면 설정의 seed 를 덮어씁니다.
        bundled_only 면 graph.file 은 번들 그래프 이름만 받습니다.
        """
        try:
            if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
                scenario = load_scenario_file(source)
            else:
                scenario = load_scenario(source, bundled_only=bundled_only)
            if seed is not None:
                scenario = scenario.replace(master_seed=seed)
            return run_simulation(scenario, trace=trace)
        except Exception as e:
            logger.error(f"시나리오 실행 실패: {e}", exc_info=True)
            raise

    def graph_info(self, name: str) -> Dict[str, Any]:
        graph = load_bundled_graph(name)
        return {
            "name": name,
            "tasks": graph.m,
            "edges": graph.edge_count(),
            "max_in_degree": graph.max_in_degree(),
            "total_reward": graph.total_reward(),
        }

    # ==================== 실험 ====================

    def sweep_groups(
        self,
        fixed: Union[experiments.FixedCount, str] = experiments.FixedCount.TOTAL,
        group_counts: Sequence[int] = presets.GROUP_COUNTS,
        replications: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> ExperimentResult:
        fixed = experiments.FixedCount(fixed)
        seed = self._seed(seed)
        base = presets.per_group_sweep_base(seed) if fixed is experiments.FixedCount.PER_GROUP else presets.fixed_team_sweep_base(seed)
        result = experiments.group_sweep(
            base, group_counts, fixed=fixed, seeds=self._replications(replications), workers=self._workers(workers)
        )
        trend = experiments.group_size_trend(result)
        result.notes["kendall_tau"] = f"{trend.tau:.6f}"
        result.notes["kendall_p"] = f"{trend.p_value:.6g}"
        return result

    def compare_controls(
        self,
        task_counts: Sequence[int] = presets.CONTROL_TASK_COUNTS,
        replications: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> ExperimentResult:
        base = presets.control_base(self._seed(seed))
        return experiments.compare_controls_result(
            base, task_counts, seeds=self._replications(replications), workers=self._workers(workers)
        )

    def dependency_study(
        self,
        replications: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> ExperimentResult:
        seed = self._seed(seed)
        graph_lds, graph_hds = presets.partition_study_graphs(seed)
        return experiments.dependency_study(
            graph_lds,
            graph_hds,
            seeds=self._replications(replications),
            master_seed=seed,
            graph_control=presets.control_study_graph(seed),
            workers=self._workers(workers),
        )

    def task_distribution(
        self,
        task_counts: Sequence[int] = presets.DISTRIBUTION_TASK_COUNTS,
        replications: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> ExperimentResult:
        return experiments.task_distribution_study(
            task_counts,
            seeds=self._replications(replications),
            master_seed=self._seed(seed),
            workers=self._workers(workers),
        )

    def speed_sweep(
        self,
        factors: Sequence[float] = presets.SPEED_FACTORS,
        replications: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> ExperimentResult:
        base = presets.speed_base(self._seed(seed))
        return experiments.speed_sweep(
            base, factors, seeds=self._replications(replications), workers=self._workers(workers)
        )

    def check_theorems(self, seed: Optional[int] = None, trials: int = 100_000) -> ExperimentResult:
        return theorems.check_theorems(self._seed(seed), trials=trials)

    # ==================== 해석식 ====================

    def waiting(self, m: int, k: int, p: float) -> Dict[str, float]:
        return {"m": m, "k": k, "p": p, "expected_waiting": theorems.expected_waiting_time(m, k, p)}

    def fully_connected(self, m: int, p: float) -> Dict[str, float]:
        closed = theorems.fully_connected_waiting(m, p)
        return {"m": m, "p": p, "exact": closed.exact, "proxy": closed.proxy}

    # ==================== 출력 ====================

    def save(self, result: ExperimentResult, out: Optional[Union[str, Path]], stream: Optional[TextIO] = None) -> str:
        """out 이 있으면 파일로, 없으면 stream 으로 CSV 를 씁니다."""
        text = result.to_csv(out if out is not None else stream)
        if out is not None:
            logger.info(f"{result.name} 결과 저장: {out} ({len(result.rows)} rows)")
        return text


def get_lab_service() -> LabService:
    return LabService()
