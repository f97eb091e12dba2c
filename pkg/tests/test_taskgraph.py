#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
작업 그래프 테스트
- 그래프 파일 파싱/오류
- 생성기 결정성
- 분할 (balanced / independent)
- 준비 작업 및 의존성 갱신
"""

import pytest

from backend.simulation.errors import (
    CycleError,
    DanglingDependencyError,
    InvalidParameterError,
    ParseError,
    UnknownTaskError,
)
from backend.simulation.taskgraph import (
    HDS_MEAN_IN_DEGREE,
    LDS_MEAN_IN_DEGREE,
    PartitionMode,
    assign_inference_classes,
    bundled_graph_path,
    cross_group_edges,
    density_for_mean_in_degree,
    dump_task_graph,
    generate_hds_graph,
    generate_lds_graph,
    generate_program_graph,
    load_bundled_graph,
    load_task_graph,
    load_task_graph_file,
    partition_tasks,
    ready_tasks,
    task_sort_key,
    update_dependencies,
)
from tests.test_utils import make_edgeless, make_graph


# --- 파싱 ---

def test_bundled_graph_shape(g10_graph):
    print("\n===== 번들 그래프 로드 =====")
    assert g10_graph.m == 10
    assert g10_graph.edge_count() == 12
    assert g10_graph.max_in_degree() == 2
    assert g10_graph.tasks["4"].deps == frozenset({"2", "3"})
    assert g10_graph.tasks["3"].inference_class == "shared-a"
    assert g10_graph.tasks["9"].inference_class == "shared-a"
    assert g10_graph.tasks["1"].inference_class == "1"
    assert g10_graph.total_reward() == 48


def test_bundled_graph_path_accepts_bare_name():
    assert bundled_graph_path("g10") == bundled_graph_path("g10.graph")
    assert bundled_graph_path("g10").is_file()
    assert load_task_graph_file("g10").m == 10
    with pytest.raises(FileNotFoundError):
        load_task_graph_file("no-such-graph")


def test_load_bundled_graph_rejects_paths(tmp_path):
    assert load_bundled_graph("g10").m == 10
    outside = tmp_path / "outside.graph"
    outside.write_text("tasks 1\ntask x reward 1 deps none class x\n", encoding="utf-8")
    for name in (str(outside), "../graphs/g10.graph", "", "."):
        with pytest.raises(FileNotFoundError):
            load_bundled_graph(name)


def test_topological_order_breaks_ties_by_id(g10_graph):
    assert g10_graph.topological_order() == ["1", "2", "3", "4", "6", "7", "5", "8", "9", "10"]


def test_dump_then_load_preserves_graph(g10_graph):
    assert load_task_graph(dump_task_graph(g10_graph)) == g10_graph


def test_comments_and_blank_lines_are_ignored():
    graph = load_task_graph("# header comment\n\ntasks 1\n\ntask a reward 0 deps none class a\n")
    assert graph.m == 1
    assert graph.tasks["a"].reward == 0


@pytest.mark.parametrize("text, line_no", [
    ("task 1 reward 1 deps none class 1\n", 1),
    ("tasks two\n", 1),
    ("tasks 1\ntask 1 reward x deps none class 1\n", 2),
    ("tasks 1\ntask 1 reward -1 deps none class 1\n", 2),
    ("tasks 1\ntask 1 reward 1 deps none\n", 2),
    ("tasks 2\ntask 1 reward 1 deps none class 1\ntask 1 reward 2 deps none class 1\n", 3),
    ("tasks 2\ntask 1 reward 1 deps none class 1\ntask 2 reward 1 deps 1,,3 class 2\n", 3),
])
def test_malformed_lines_report_line_number(text, line_no):
    with pytest.raises(ParseError) as exc_info:
        load_task_graph(text)
    assert exc_info.value.line_no == line_no
    assert str(exc_info.value).startswith(f"line {line_no}:")


def test_count_mismatch_and_missing_header():
    with pytest.raises(ParseError):
        load_task_graph("tasks 2\ntask 1 reward 1 deps none class 1\n")
    with pytest.raises(ParseError):
        load_task_graph("# nothing here\n")


def test_self_dependency_is_a_cycle():
    with pytest.raises(CycleError):
        load_task_graph("tasks 1\ntask 1 reward 1 deps 1 class 1\n")


def test_two_task_cycle_is_rejected():
    text = "tasks 2\ntask 1 reward 1 deps 2 class 1\ntask 2 reward 1 deps 1 class 2\n"
    with pytest.raises(CycleError) as exc_info:
        load_task_graph(text)
    assert set(exc_info.value.cycle) == {"1", "2"}


def test_dangling_dependency_is_rejected():
    with pytest.raises(DanglingDependencyError) as exc_info:
        load_task_graph("tasks 1\ntask 1 reward 1 deps 9 class 1\n")
    assert exc_info.value.missing == "9"


def test_natural_sort_key():
    assert sorted(["10", "2", "1"], key=task_sort_key) == ["1", "2", "10"]
    assert sorted(["a10", "a2"], key=task_sort_key) == ["a2", "a10"]


# --- 생성기 ---

def test_generator_is_deterministic_in_seed():
    first = generate_program_graph(30, 0.2, (1, 10), seed=11)
    again = generate_program_graph(30, 0.2, (1, 10), seed=11)
    other = generate_program_graph(30, 0.2, (1, 10), seed=12)
    assert first == again
    assert first != other


def test_generator_density_extremes():
    assert generate_program_graph(12, 0.0, seed=1).edge_count() == 0
    assert generate_program_graph(12, 1.0, seed=1).edge_count() == 12 * 11 // 2


def test_generator_mean_in_degree_tracks_density():
    n, density = 50, 0.1
    means = [generate_program_graph(n, density, seed=seed).edge_count() / n for seed in range(100)]
    expected = density * (n - 1) / 2
    assert sum(means) / len(means) == pytest.approx(expected, rel=0.1)


def test_generator_rewards_stay_in_range():
    graph = generate_program_graph(50, 0.1, (3, 4), seed=5)
    assert {task.reward for task in graph.tasks.values()} <= {3, 4}
    assert graph.ids() == [str(i) for i in range(1, 51)]


@pytest.mark.parametrize("kwargs", [
    {"n_tasks": 0, "density": 0.1},
    {"n_tasks": 5, "density": 1.5},
    {"n_tasks": 5, "density": 0.1, "reward_range": (5, 1)},
    {"n_tasks": 5, "density": 0.1, "reward_range": (-1, 1)},
])
def test_generator_rejects_bad_parameters(kwargs):
    with pytest.raises(InvalidParameterError):
        generate_program_graph(**kwargs)


def test_lds_and_hds_keep_reference_densities():
    assert density_for_mean_in_degree(18, LDS_MEAN_IN_DEGREE) == pytest.approx(0.1)
    assert density_for_mean_in_degree(40, HDS_MEAN_IN_DEGREE) == pytest.approx(0.6)
    assert density_for_mean_in_degree(1, HDS_MEAN_IN_DEGREE) == 0.0
    lds = generate_lds_graph(200, seed=3)
    hds = generate_hds_graph(200, seed=3)
    assert lds.edge_count() < hds.edge_count()


def test_inference_classes():
    graph = generate_program_graph(30, 0.1, seed=2)
    none = assign_inference_classes(graph, 0.0, seed=1)
    assert all(task.inference_class == task.id for task in none.tasks.values())

    everyone = assign_inference_classes(graph, 1.0, seed=1, class_size=3)
    classes = {task.inference_class for task in everyone.tasks.values()}
    assert len(classes) <= 10
    assert all(name.startswith("class") for name in classes)
    assert assign_inference_classes(graph, 1.0, seed=1, class_size=3) == everyone

    with pytest.raises(InvalidParameterError):
        assign_inference_classes(graph, 1.5, seed=1)


# --- 분할 ---

@pytest.mark.parametrize("mode", list(PartitionMode))
def test_partition_is_disjoint_and_complete(mode):
    graph = generate_lds_graph(60, seed=9)
    subsets = partition_tasks(graph, 4, mode, seed=1)
    assert [s.group_id for s in subsets] == [0, 1, 2, 3]
    union = set()
    for subset in subsets:
        assert not union & subset.task_ids
        union |= subset.task_ids
    assert union == set(graph.tasks)
    assert all(len(s) >= 1 for s in subsets)


def test_balanced_partition_sizes_differ_by_at_most_one():
    graph = make_edgeless(11)
    sizes = sorted(len(s) for s in partition_tasks(graph, 3, PartitionMode.BALANCED, seed=4))
    assert sizes == [3, 4, 4]


def test_independent_partition_keeps_chains_together():
    graph = make_graph({
        "1": [], "2": ["1"], "3": ["2"], "4": ["3"],
        "5": [], "6": ["5"], "7": ["6"], "8": ["7"],
    })
    subsets = partition_tasks(graph, 2, PartitionMode.INDEPENDENT)
    assert cross_group_edges(graph, subsets) == 0
    assert {frozenset(s.task_ids) for s in subsets} == {
        frozenset({"1", "2", "3", "4"}), frozenset({"5", "6", "7", "8"})
    }


def test_independent_partition_cuts_fewer_edges_than_balanced():
    graph = generate_lds_graph(120, seed=21)
    balanced = partition_tasks(graph, 3, PartitionMode.BALANCED, seed=1)
    independent = partition_tasks(graph, 3, PartitionMode.INDEPENDENT)
    assert cross_group_edges(graph, independent) < cross_group_edges(graph, balanced)


def test_independent_partition_respects_size_tolerance():
    graph = generate_hds_graph(240, seed=8)
    sizes = [len(s) for s in partition_tasks(graph, 2, PartitionMode.INDEPENDENT, tolerance=0.1)]
    assert sum(sizes) == 240
    assert min(sizes) >= 108
    assert max(sizes) <= 132


def test_partition_rejects_bad_group_count(chain_graph):
    with pytest.raises(InvalidParameterError):
        partition_tasks(chain_graph, 0)
    with pytest.raises(InvalidParameterError):
        partition_tasks(chain_graph, 4)


# --- 준비 작업 / 의존성 갱신 ---

def test_ready_tasks(diamond_graph):
    assert ready_tasks(diamond_graph, set(), set()) == {"1"}
    assert ready_tasks(diamond_graph, {"1"}, {"2"}) == {"3"}
    assert ready_tasks(diamond_graph, {"1", "2", "3"}, set()) == {"4"}


def test_update_dependencies(diamond_graph):
    updated = update_dependencies(diamond_graph, "1")
    assert updated.tasks["2"].deps == frozenset()
    assert updated.tasks["4"].deps == frozenset({"2", "3"})
    # 원본은 변하지 않음
    assert diamond_graph.tasks["2"].deps == frozenset({"1"})
    with pytest.raises(UnknownTaskError):
        update_dependencies(diamond_graph, "99")
