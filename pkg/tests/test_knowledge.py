"""그룹 지식 베이스 테스트"""

import pytest

from backend.simulation.errors import InvalidParameterError
from backend.simulation.knowledge import (
    KnowledgeBase,
    KnowledgeEntry,
    lookup,
    share_knowledge,
    transitivity_check,
)
from backend.simulation.maze import Solution

PATH_A = ((0, 0), (0, 1))
PATH_B = ((1, 1), (1, 2), (2, 2))


@pytest.fixture
def kb() -> KnowledgeBase:
    return KnowledgeBase(
        group_id=0,
        class_of={"1": "c", "2": "c", "3": "3"},
        members=frozenset({"a0", "a1"}),
    )


def test_class_members_look_up_the_representative(kb):
    solution = Solution("1", PATH_A, 2)
    share_knowledge(kb, "1", solution, 1.0, "a0")

    assert lookup(kb, "1") == solution
    assert lookup(kb, "2") == solution
    assert lookup(kb, "3") is None
    assert kb.known_tasks() == frozenset({"1", "2"})
    assert transitivity_check(kb, ["a0", "a1"])


def test_earliest_entry_becomes_representative(kb):
    late = Solution("1", PATH_A, 2)
    early = Solution("2", PATH_B, 3)
    share_knowledge(kb, "1", late, 2.0, "a0")
    share_knowledge(kb, "2", early, 0.5, "a1")

    assert kb.class_index["c"].task_id == "2"
    # 자기 항목이 있으면 자기 솔루션
    assert lookup(kb, "1") == late
    assert lookup(kb, "2") == early
    assert transitivity_check(kb, ["a0"])


def test_resharing_keeps_the_earliest_entry(kb):
    first = Solution("3", PATH_A, 2)
    second = Solution("3", PATH_B, 3)
    share_knowledge(kb, "3", first, 1.0, "a0")
    share_knowledge(kb, "3", second, 4.0, "a1")
    assert kb.entries["3"].solution == first
    assert kb.entries["3"].source_agent == "a0"


def test_transitivity_rejects_foreign_agents_and_entries(kb):
    share_knowledge(kb, "1", Solution("1", PATH_A, 2), 1.0, "a0")
    assert not transitivity_check(kb, ["a0", "a9"])

    kb.entries["3"] = KnowledgeEntry(
        task_id="3", solution=Solution("3", PATH_B, 3), learned_at=1.0, source_agent="b0", group_id=1
    )
    assert not transitivity_check(kb, ["a0"])


def test_negative_times_are_rejected(kb):
    with pytest.raises(InvalidParameterError):
        share_knowledge(kb, "1", Solution("1", PATH_A, 2), -1.0, "a0")
    with pytest.raises(InvalidParameterError):
        KnowledgeEntry(task_id="1", solution=Solution("1", PATH_A, 2), learned_at=-0.5, source_agent="a0", group_id=0)


def test_empty_knowledge_base_is_transitive(kb):
    assert lookup(kb, "1") is None
    assert transitivity_check(kb, ["a0", "a1"])
