"""
대기 시간 법칙 검증기

의존성 모델(작업마다 최대 k 개의 의존성이 각각 확률 p 로 미해결)에서
기대 대기 시간 E[W] = m·(1 − (1−p)^k) 를 정확식, 몬테카를로 추정, 전수 열거로 비교합니다.
미로 시간과는 무관한 추상 모델 위의 검증입니다.
"""
import itertools
import logging
import math
from typing import Dict, List, NamedTuple, Sequence, Union

import numpy as np
from scipy.stats import binom

from backend.schemas.experiment import ExperimentResult
from backend.simulation.errors import InvalidParameterError
from backend.utils.seeding import derive_seed, make_rng

logger = logging.getLogger(__name__)

WAITING_GRID_M = (100, 1000)
WAITING_GRID_K = (1, 2, 5)
WAITING_GRID_P = (0.01, 0.1, 0.3)
FULLY_CONNECTED_M = tuple(range(2, 13))
FULLY_CONNECTED_P = (0.1, 0.5, 0.9)


class WaitingEstimate(NamedTuple):
    mean: float
    standard_error: float
    trials: int


class FullyConnectedWaiting(NamedTuple):
    exact: float
    proxy: float


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise InvalidParameterError(f"probability must be in [0, 1], got {p}")


def expected_waiting_time(m: int, k: int, p: float) -> float:
    """m·(1 − (1−p)^k). 0 <= k < m"""
    _check_probability(p)
    if m < 1:
        raise InvalidParameterError(f"task count must be >= 1, got {m}")
    if not 0 <= k < m:
        raise InvalidParameterError(f"max degree must satisfy 0 <= k < m ({m}), got {k}")
    return m * (1.0 - (1.0 - p) ** k)


def monte_carlo_waiting(m: int, k: int, p: float, trials: int, seed: int) -> WaitingEstimate:
    """
    W = Σ X_i, X_i = 1[k 개의 Bernoulli(p) 의존성 중 하나라도 미해결] 를 i.i.d. 로 표본 추출합니다.

    의존성 슬롯마다 아직 막히지 않은 작업 수에 대한 이항 표본을 뽑아 W 를 누적합니다.
    시행끼리 독립이므로 표준오차는 표본 표준편차(ddof=1) / sqrt(trials) 입니다.

    Returns:
        WaitingEstimate: (평균, 표준오차, 시행 수)
    """
    expected_waiting_time(m, k, p)  # 파라미터 검증
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")

    if p == 0.0 or k == 0:
        return WaitingEstimate(mean=0.0, standard_error=0.0, trials=trials)
    if p == 1.0:
        return WaitingEstimate(mean=float(m), standard_error=0.0, trials=trials)

    rng = make_rng(seed, "monte-carlo", m, k, p)
    remaining = np.full(trials, m, dtype=np.int64)
    for _ in range(k):
        remaining = remaining - binom.rvs(remaining, p, random_state=rng)

    waiting = (m - remaining).astype(float)
    mean = float(waiting.mean())
    se = float(waiting.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return WaitingEstimate(mean=mean, standard_error=se, trials=trials)


def fully_connected_waiting(m: int, p: float) -> FullyConnectedWaiting:
    """
    완전 연결 그래프(d = m−1)의 정확한 E[W] 와 점근 대용값 m·p^(m−1)
    """
    if m < 2:
        raise InvalidParameterError(f"task count must be >= 2, got {m}")
    if not 0.0 < p < 1.0:
        raise InvalidParameterError(f"probability must be in (0, 1), got {p}")
    d = m - 1
    return FullyConnectedWaiting(exact=m * (1.0 - (1.0 - p) ** d), proxy=m * p ** d)


def brute_force_fully_connected(m: int, p: float) -> float:
    """작업 하나의 의존성 결과 2^(m−1) 가지를 모두 열거해 E[W] 를 계산합니다."""
    if m < 2:
        raise InvalidParameterError(f"task count must be >= 2, got {m}")
    _check_probability(p)
    d = m - 1
    blocked = 0.0
    for outcome in itertools.product((0, 1), repeat=d):
        hits = sum(outcome)
        if hits:
            blocked += p ** hits * (1.0 - p) ** (d - hits)
    return m * blocked


def check_theorems(
    seed: int,
    trials: int = 100_000,
    grid_m: Sequence[int] = WAITING_GRID_M,
    grid_k: Sequence[int] = WAITING_GRID_K,
    grid_p: Sequence[float] = WAITING_GRID_P,
    fully_connected_m: Sequence[int] = FULLY_CONNECTED_M,
    fully_connected_p: Sequence[float] = FULLY_CONNECTED_P,
) -> ExperimentResult:
    """
    대기 시간 법칙 격자(몬테카를로 vs 정확식)와 완전 연결 표(정확식 vs 전수 열거)를
    하나의 결과로 묶습니다. 격자점마다 시드는 (seed, m, k, p) 에서 유도됩니다.
    """
    rows: List[Dict[str, Union[int, float, str]]] = []
    violations = 0
    for m, k, p in itertools.product(grid_m, grid_k, grid_p):
        point_seed = derive_seed(seed, "waiting", m, k, p)
        exact = expected_waiting_time(m, k, p)
        estimate = monte_carlo_waiting(m, k, p, trials, point_seed)
        within = abs(estimate.mean - exact) <= 3 * estimate.standard_error
        violations += 0 if within else 1
        rows.append({
            "law": "waiting",
            "m": m,
            "k": k,
            "p": p,
            "seed": point_seed,
            "exact": exact,
            "estimate": estimate.mean,
            "standard_error": estimate.standard_error,
            "within_3se": int(within),
        })
        logger.info(
            f"대기 법칙 m={m} k={k} p={p}: exact={exact:.4f}, "
            f"estimate={estimate.mean:.4f} ± {estimate.standard_error:.4f}"
        )

    for m, p in itertools.product(fully_connected_m, fully_connected_p):
        closed = fully_connected_waiting(m, p)
        rows.append({
            "law": "fully_connected",
            "m": m,
            "p": p,
            "seed": seed,
            "exact": closed.exact,
            "brute_force": brute_force_fully_connected(m, p),
            "proxy": closed.proxy,
        })

    if violations:
        logger.warning(f"3 표준오차를 벗어난 격자점 {violations}개")
    return ExperimentResult.build(
        "check-theorems",
        rows,
        notes={"trials": str(trials), "violations": str(violations)},
    )
