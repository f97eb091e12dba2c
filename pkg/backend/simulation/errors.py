"""시뮬레이션 전반에서 사용하는 예외 계층"""
from typing import Optional


class SimulationError(Exception):
    """시뮬레이터 예외의 최상위 클래스"""


class ParseError(SimulationError):
    """그래프 파일 또는 시나리오 설정 텍스트의 형식 오류"""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class CycleError(SimulationError):
    """의존성 관계에 순환이 존재함"""

    def __init__(self, message: str, cycle: Optional[list] = None):
        self.cycle = cycle or []
        super().__init__(message)


class DanglingDependencyError(SimulationError):
    """존재하지 않는 작업을 가리키는 의존성"""

    def __init__(self, task_id: str, missing: str):
        self.task_id = task_id
        self.missing = missing
        super().__init__(f"task {task_id} depends on unknown task {missing}")


class InvalidParameterError(SimulationError, ValueError):
    """범위를 벗어난 파라미터"""


class UnknownTaskError(SimulationError, KeyError):
    def __init__(self, task_id: str):
        self.task_id = task_id
        super().__init__(f"unknown task: {task_id}")

    def __str__(self) -> str:
        return self.args[0]


class UnknownGroupError(SimulationError, KeyError):
    def __init__(self, group_id: int):
        self.group_id = group_id
        super().__init__(f"unknown group: {group_id}")

    def __str__(self) -> str:
        return self.args[0]


class StateError(SimulationError):
    """에이전트/그룹 상태 전이 규칙 위반"""


class DeadlockError(SimulationError):
    """대기 중인 이벤트 없이 미완료 작업이 남은 상태"""

    def __init__(self, message: str, remaining: Optional[list] = None):
        self.remaining = remaining or []
        super().__init__(message)


class SchemaError(SimulationError):
    """시나리오 설정 스키마 위반 (key_path 는 점으로 구분된 키 경로)"""

    def __init__(self, message: str, key_path: str = ""):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}" if key_path else message)
