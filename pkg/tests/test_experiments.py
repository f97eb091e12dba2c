#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
실험 실행기 테스트
- 결과 표 (CSV, 그룹 평균)
- 그룹 수 변화, 제어 방식 비교, 의존성 연구, 작업 분포
- slow: 기본 프리셋으로 경향 확인
"""

import io

import pytest
from pydantic import ValidationError

from backend.lab.experiments import (
    FixedCount,
    compare_controls_result,
    dependency_study,
    group_size_trend,
    group_sweep,
    seed_list,
    speed_sweep,
    task_distribution_study,
)
from backend.lab.presets import (
    DISTRIBUTION_TASK_COUNTS,
    GROUP_COUNTS,
    control_base,
    preset_graph,
    fixed_team_sweep_base,
    control_study_graph,
    partition_study_graphs,
)
from backend.schemas.experiment import ExperimentResult
from backend.schemas.scenario import Scenario
from backend.simulation.errors import InvalidParameterError
from backend.simulation.knowledge import transitivity_check
from backend.simulation.engine import compare_controls, run_simulation
from backend.simulation.taskgraph import generate_lds_graph
from tests.test_utils import make_edgeless, print_means


# --- 결과 표 ---

def test_result_requires_seed_on_every_row():
    with pytest.raises(ValidationError):
        ExperimentResult(name="x", rows=[{"l": 1, "et": 2.0}])


def test_result_summary_and_group_means():
    rows = [
        {"l": 1, "seed": 1, "et": 2.0, "tag": "a"},
        {"l": 1, "seed": 2, "et": 4.0, "tag": "a"},
        {"l": 2, "seed": 1, "et": 1.0, "tag": "b"},
    ]
    result = ExperimentResult.build("demo", rows, notes={"m": "10"})
    assert result.seeds_used == [1, 2]
    assert result.columns == ["l", "seed", "et", "tag"]
    assert result.mean_by("l", "et") == {1: 3.0, 2: 1.0}
    assert result.mean_by(("l", "tag"), "et") == {(1, "a"): 3.0, (2, "b"): 1.0}
    assert result.summary["et"].mean == pytest.approx(7 / 3)
    assert "seed" not in result.summary
    assert "tag" not in result.summary


def test_result_csv_keeps_name_notes_and_values(tmp_path):
    result = ExperimentResult.build(
        "demo",
        [{"m": 20, "seed": 3, "difference": -0.125, "system": "lds"}],
        notes={"fixed": "total-agents"},
    )
    path = tmp_path / "out" / "demo.csv"
    text = result.to_csv(path)
    assert path.read_text(encoding="utf-8") == text
    assert text.splitlines()[0] == "# experiment: demo"

    stream = io.StringIO()
    result.to_csv(stream)
    loaded = ExperimentResult.from_csv(stream.getvalue())
    assert loaded.name == "demo"
    assert loaded.notes == {"fixed": "total-agents"}
    assert loaded.rows == result.rows


def test_seed_list():
    assert seed_list(3, 10) == [10, 11, 12]
    assert seed_list([5, 1]) == [5, 1]
    with pytest.raises(InvalidParameterError):
        seed_list(0)
    with pytest.raises(InvalidParameterError):
        seed_list([])


# --- 실험 셀 ---

def test_group_sweep_fixed_total_keeps_agent_count():
    base = Scenario(graph=generate_lds_graph(40, seed=2), l=1, total_agents=6, master_seed=4)
    result = group_sweep(base, [1, 2, 3], fixed=FixedCount.TOTAL, seeds=2)
    assert [(row["l"], row["seed"]) for row in result.rows] == [(1, 4), (1, 5), (2, 4), (2, 5), (3, 4), (3, 5)]
    assert {row["n"] for row in result.rows} == {6}
    assert result.notes == {"fixed": "total-agents", "m": "40"}


def test_group_sweep_fixed_per_group_grows_team():
    base = Scenario(graph=generate_lds_graph(30, seed=2), l=1, agents_per_group=2, master_seed=1)
    result = group_sweep(base, [1, 3], fixed="agents-per-group")
    assert result.column("n") == [2, 6]
    assert -1.0 <= group_size_trend(result).tau <= 1.0
    with pytest.raises(InvalidParameterError):
        group_sweep(base, [])


def test_compare_controls_result_pairs_runs_by_seed():
    base = Scenario(graph=make_edgeless(5), l=1, agents_per_group=2, master_seed=11)
    result = compare_controls_result(base, [10, 15], seeds=2)
    assert [(row["m"], row["seed"]) for row in result.rows] == [(10, 11), (10, 12), (15, 11), (15, 12)]
    for row in result.rows:
        assert row["difference"] == pytest.approx(row["et_centralized"] - row["et_decentralized"])

    # 엔진 비교 연산과 같은 짝
    engine_rows = compare_controls(base, [10, 15], replications=2)
    assert [(r.m, r.seed, r.et_centralized, r.et_decentralized) for r in engine_rows] == [
        (row["m"], row["seed"], row["et_centralized"], row["et_decentralized"]) for row in result.rows
    ]


def test_dependency_study_on_edgeless_graphs_has_no_partition_waiting():
    edgeless = make_edgeless(15)
    result = dependency_study(edgeless, edgeless, seeds=[1], graph_control=make_edgeless(20))
    partition_rows = [row for row in result.rows if row["study"] == "partition"]
    control_rows = [row for row in result.rows if row["study"] == "control"]
    # 시스템 2 × 분할 2 × 그룹 3, 제어 2 × 그룹 5
    assert len(partition_rows) == 12
    assert len(control_rows) == 10
    assert all(row["twt_group"] == 0.0 for row in partition_rows)
    assert {row["cross_edges"] for row in result.rows} == {0}
    assert result.notes["hds_et_inversion"] in {"yes", "no"}


def test_speed_sweep_only_changes_first_group():
    base = Scenario(graph=generate_lds_graph(30, seed=5), l=2, agents_per_group=2, master_seed=2)
    result = speed_sweep(base, [0.5, 4.0])
    slow, fast = result.rows
    assert slow["factor"] == 0.5 and fast["factor"] == 4.0
    assert {"et_g0", "et_g1"} <= set(fast)
    with pytest.raises(InvalidParameterError):
        speed_sweep(base, [0.0])


def test_task_distribution_counts_cover_graph():
    result = task_distribution_study([40], seeds=2, master_seed=3)
    assert len(result.rows) == 4
    for row in result.rows:
        assert row["count_g0"] + row["count_g1"] == 40
        assert row["delta"] == abs(row["count_g0"] - row["count_g1"])


def test_preset_graphs_are_seeded():
    assert preset_graph("control-study", 1) == preset_graph("control-study", 1)
    assert preset_graph("partition-hds", 1).m == 240
    with pytest.raises(InvalidParameterError):
        preset_graph("nope")


# --- 경향 확인 (기본 프리셋) ---

@pytest.mark.slow
def test_centralized_control_loses_on_large_graphs():
    result = compare_controls_result(control_base(), [20, 240], seeds=20)
    difference = print_means(result, "m", "difference", "centralized - decentralized")
    assert difference[20] < 0
    assert difference[240] > 0


@pytest.mark.slow
def test_more_groups_with_fixed_team_is_faster():
    result = group_sweep(fixed_team_sweep_base(), GROUP_COUNTS, fixed=FixedCount.TOTAL, seeds=20)
    means = print_means(result, "l", "et_system", "ET by group count")
    values = [means[l] for l in GROUP_COUNTS]
    assert all(later <= earlier for earlier, later in zip(values, values[1:]))
    assert means[10] <= 0.9 * means[1]
    assert group_size_trend(result).tau < 0


@pytest.mark.slow
def test_dependency_study_orderings():
    lds, hds = partition_study_graphs()
    result = dependency_study(lds, hds, seeds=20, graph_control=control_study_graph())

    per_group = print_means(result, ("study", "control", "group"), "twt_group", "TWT by group")
    for group in range(5):
        assert per_group[("control", "decentralized", group)] < per_group[("control", "centralized", group)]

    twt = print_means(result, ("study", "system", "partition"), "twt_system", "TWT by partition")
    print_means(result, ("study", "system", "partition"), "et_system", "ET by partition")
    for system in ("lds", "hds"):
        assert twt[("partition", system, "independent")] < twt[("partition", system, "balanced")]


@pytest.mark.slow
def test_hds_independent_split_is_more_lopsided():
    result = task_distribution_study([DISTRIBUTION_TASK_COUNTS[-1]], seeds=30)
    delta = print_means(result, "system", "delta", "|count(g0) - count(g1)|")
    assert delta["hds"] > delta["lds"]


@pytest.mark.slow
def test_knowledge_stays_transitive_across_seeds():
    graph = generate_lds_graph(40, seed=8)
    failures = []

    def check(event, sim):
        if event.kind == "share":
            group = sim.groups[event.group]
            if not transitivity_check(group.kb, [a.id for a in group.agents]):
                failures.append((sim.scenario.master_seed, event.time))

    for seed in range(100):
        scenario = Scenario(graph=graph, l=2, agents_per_group=3, inference_q=0.3, master_seed=seed)
        run_simulation(scenario, listeners=[check])
    assert failures == []
