import hashlib
import random

import numpy as np


def derive_seed(master_seed: int, *parts) -> int:
    """
    (master_seed, 엔티티 식별자...) 로부터 안정적인 하위 시드를 만듭니다.
    파이썬 hash() 와 달리 프로세스 간에도 값이 같습니다.

    Args:
        master_seed: 시나리오 마스터 시드
        *parts: 엔티티 식별자 (작업 id, 그룹 id, 용도 문자열 등)

    Returns:
        int: 63비트 양의 정수 시드
    """
    key = ":".join([str(master_seed)] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], byteorder="big") & ((1 << 63) - 1)


def make_rng(master_seed: int, *parts) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *parts))


def make_random(master_seed: int, *parts) -> random.Random:
    return random.Random(derive_seed(master_seed, *parts))
