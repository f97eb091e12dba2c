import hashlib
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, TextIO

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimEvent:
    """이벤트 로그 한 줄: `time kind group agent task detail`"""
    time: float
    kind: str
    group: int
    agent: Optional[str] = None
    task: Optional[str] = None
    detail: str = ""

    def to_line(self) -> str:
        agent = self.agent if self.agent is not None else "-"
        task = self.task if self.task is not None else "-"
        detail = self.detail or "-"
        return f"{self.time!r} {self.kind} {self.group} {agent} {task} {detail}"


class EventLog:
    """시뮬레이션 이벤트 프로듀서 (메모리 보관 + 구독자 전달 + 트레이스 출력)"""

    def __init__(self, trace: Optional[TextIO] = None):
        self.messages: List[SimEvent] = []
        self._subscribers: List[Callable[[SimEvent], None]] = []
        self._trace = trace
        self._digest = hashlib.sha256()

    def subscribe(self, callback: Callable[[SimEvent], None]) -> None:
        self._subscribers.append(callback)

    def send(self, event: SimEvent) -> int:
        """이벤트를 기록하고 구독자에게 전달합니다. 기록된 오프셋을 반환합니다."""
        self.messages.append(event)
        line = event.to_line()
        self._digest.update(line.encode("utf-8") + b"\n")
        if self._trace is not None:
            self._trace.write(line + "\n")
        logger.debug(f"이벤트: {line}")
        for callback in self._subscribers:
            callback(event)
        return len(self.messages) - 1

    def flush(self) -> None:
        if self._trace is not None:
            self._trace.flush()
        logger.debug(f"이벤트 로그 플러시: {len(self.messages)}개 이벤트")

    def get_messages(self, kind: Optional[str] = None) -> List[SimEvent]:
        if kind is None:
            return list(self.messages)
        return [e for e in self.messages if e.kind == kind]

    def digest(self) -> str:
        return self._digest.hexdigest()

    def __len__(self) -> int:
        return len(self.messages)
