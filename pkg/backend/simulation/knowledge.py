"""
그룹 단위 지식 베이스: (작업, 솔루션) 기록과 추론 클래스 조회
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional

from backend.simulation.errors import InvalidParameterError
from backend.simulation.maze import Solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KnowledgeEntry:
    task_id: str
    solution: Solution
    learned_at: float
    source_agent: str
    group_id: int

    def __post_init__(self):
        if self.learned_at < 0:
            raise InvalidParameterError(f"learned_at must be >= 0, got {self.learned_at}")


@dataclass
class KnowledgeBase:
    """
    그룹 전체가 공유하는 지식 베이스.
    class_index 는 추론 클래스마다 가장 먼저 학습된 항목(대표 솔루션)을 가리킵니다.
    """
    group_id: int
    class_of: Mapping[str, str]
    members: FrozenSet[str] = frozenset()
    entries: Dict[str, KnowledgeEntry] = field(default_factory=dict)
    class_index: Dict[str, KnowledgeEntry] = field(default_factory=dict)

    def inference_class(self, task_id: str) -> str:
        return self.class_of.get(task_id, task_id)

    def known_tasks(self) -> FrozenSet[str]:
        """조회가 성공하는 작업 집합"""
        known = set(self.entries)
        for task_id, cls in self.class_of.items():
            if cls in self.class_index:
                known.add(task_id)
        return frozenset(known)


def share_knowledge(
    kb: KnowledgeBase,
    task: str,
    solution: Solution,
    now: float,
    source: str,
) -> KnowledgeBase:
    """
    검증된 솔루션을 그룹 지식 베이스에 기록합니다.
    같은 작업을 다시 공유하면 가장 이른 learned_at 항목이 유지됩니다.
    """
    if now < 0:
        raise InvalidParameterError(f"now must be >= 0, got {now}")

    entry = KnowledgeEntry(
        task_id=task, solution=solution, learned_at=now, source_agent=source, group_id=kb.group_id
    )
    current = kb.entries.get(task)
    if current is None or entry.learned_at < current.learned_at:
        kb.entries[task] = entry

    cls = kb.inference_class(task)
    representative = kb.class_index.get(cls)
    if representative is None or entry.learned_at < representative.learned_at:
        kb.class_index[cls] = kb.entries[task]
    return kb


def lookup(kb: KnowledgeBase, task: str) -> Optional[Solution]:
    entry = kb.entries.get(task)
    if entry is not None:
        return entry.solution
    representative = kb.class_index.get(kb.inference_class(task))
    if representative is not None:
        return representative.solution
    return None


def transitivity_check(kb: KnowledgeBase, group_agents: Iterable[str]) -> bool:
    """
    그룹의 모든 에이전트가 학습된 솔루션과 같은 클래스의 작업을 조회할 수 있는지 확인합니다.

    Args:
        kb: 그룹 지식 베이스
        group_agents: 그룹 에이전트 id 목록

    Returns:
        bool: 위반이 하나도 없으면 True
    """
    if any(agent not in kb.members for agent in group_agents):
        return False

    for entry in kb.entries.values():
        if entry.group_id != kb.group_id:
            return False
        representative = kb.class_index.get(kb.inference_class(entry.task_id))
        if representative is None:
            return False

    for task_id, cls in kb.class_of.items():
        representative = kb.class_index.get(cls)
        if representative is None or task_id in kb.entries:
            continue
        if lookup(kb, task_id) != representative.solution:
            return False
    return True
