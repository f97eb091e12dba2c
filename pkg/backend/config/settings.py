from functools import lru_cache
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Tuple


class Settings(BaseSettings):
    # 일반 설정
    DEBUG: bool = False
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"

    # 실험 기본값
    DEFAULT_SEED: int = 2024
    DEFAULT_REPLICATIONS: int = 20
    DEFAULT_WORKERS: int = 1

    # 제어 오버헤드 (추상 시간 단위)
    ASSIGNMENT_OVERHEAD: float = 0.05  # 중앙 코디네이터의 할당 1건당 비용 (δ)
    PULL_CONTENTION_PER_AGENT: float = 0.002  # 분산 pull 1건당 그룹 인원 비례 비용 (γ)
    BOARD_SYNC_PER_AGENT: float = 0.2  # 분산 그룹의 최초 보드 동기화 비용 (σ)
    SPLIT_OVERHEAD: float = 0.5
    COLLECT_OVERHEAD: float = 0.5

    # 솔루션 공간 (미로) 설정
    MAZE_WIDTH: int = 12
    MAZE_HEIGHT: int = 12
    AGENT_SPEED: float = 400.0

    # 작업 그래프 설정
    REWARD_MIN: int = 1
    REWARD_MAX: int = 10
    INFERENCE_CLASS_SIZE: int = 3
    PARTITION_TOLERANCE: float = 0.1
    VALIDATION_FAIL_P: float = 0.0

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="allow"
    )

    @property
    def reward_range(self) -> Tuple[int, int]:
        return (self.REWARD_MIN, self.REWARD_MAX)

    @property
    def maze_size(self) -> Tuple[int, int]:
        return (self.MAZE_WIDTH, self.MAZE_HEIGHT)


@lru_cache()
def get_settings() -> Settings:
    """
    시뮬레이션 설정을 가져옵니다. lru_cache는 환경 변수가 바뀌지 않는 한
    설정을 한 번만 로드하도록 보장합니다.
    """
    return Settings()

# 환경변수 기본값 설정
settings = get_settings()
