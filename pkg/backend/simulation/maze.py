"""
솔루션 공간: 작업별 무작위 미로와 탐색
"""
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import FrozenSet, List, Tuple

import numpy as np

from backend.simulation.errors import InvalidParameterError

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]  # (x, y)

_STEPS = ((0, -1), (1, 0), (0, 1), (-1, 0))


@dataclass(frozen=True, eq=False)
class Maze:
    """walls[y, x] 가 True 이면 막힌 칸"""
    width: int
    height: int
    walls: np.ndarray
    start: Cell
    target: Cell
    open_cells: FrozenSet[Cell] = field(init=False, repr=False)

    def __post_init__(self):
        if self.walls.shape != (self.height, self.width):
            raise InvalidParameterError(
                f"wall grid shape {self.walls.shape} does not match {self.height}x{self.width}"
            )
        ys, xs = np.nonzero(~self.walls)
        object.__setattr__(self, "open_cells", frozenset(zip(xs.tolist(), ys.tolist())))
        for name in ("start", "target"):
            if not self.is_open(getattr(self, name)):
                raise InvalidParameterError(f"maze {name} {getattr(self, name)} is blocked")

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_open(self, cell: Cell) -> bool:
        return cell in self.open_cells

    def neighbors(self, cell: Cell) -> List[Cell]:
        """열린 4방향 이웃 (상, 우, 하, 좌 순서)"""
        x, y = cell
        result = []
        for dx, dy in _STEPS:
            nxt = (x + dx, y + dy)
            if nxt in self.open_cells:
                result.append(nxt)
        return result

    @property
    def open_count(self) -> int:
        return len(self.open_cells)


@dataclass(frozen=True)
class Solution:
    task_id: str
    path: Tuple[Cell, ...]
    steps_explored: int

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(tuple(c) for c in self.path))
        if self.path and self.steps_explored < len(self.path) - 1:
            raise InvalidParameterError(
                f"steps_explored {self.steps_explored} is below path length {len(self.path)}"
            )


@lru_cache(maxsize=8192)
def generate_maze(width: int, height: int, seed: int) -> Maze:
    """
    칸 단위 재귀 백트래커로 완전 미로(루프 없는 트리)를 만듭니다.
    막힌 칸 중 열린 이웃이 정확히 하나인 칸만 뚫으므로 열린 칸은 항상 연결되어 있습니다.

    Args:
        width: 가로 칸 수 (>= 2)
        height: 세로 칸 수 (>= 2)
        seed: 난수 시드

    Returns:
        Maze: 시작과 목표가 서로 다른 열린 칸에 무작위 배치된 미로
    """
    if width < 2 or height < 2:
        raise InvalidParameterError(f"maze dimensions must be >= 2, got {width}x{height}")

    rng = random.Random(seed)
    grid = bytearray(width * height)  # 1 = 열림

    def is_open(x: int, y: int) -> bool:
        return 0 <= x < width and 0 <= y < height and grid[y * width + x] == 1

    def carvable(x: int, y: int) -> bool:
        if not (0 <= x < width and 0 <= y < height) or grid[y * width + x]:
            return False
        return sum(is_open(x + dx, y + dy) for dx, dy in _STEPS) == 1

    origin = (rng.randrange(width), rng.randrange(height))
    grid[origin[1] * width + origin[0]] = 1
    stack = [origin]
    while stack:
        x, y = stack[-1]
        candidates = [(x + dx, y + dy) for dx, dy in _STEPS if carvable(x + dx, y + dy)]
        if not candidates:
            stack.pop()
            continue
        nx_, ny_ = rng.choice(candidates)
        grid[ny_ * width + nx_] = 1
        stack.append((nx_, ny_))

    opened = np.frombuffer(bytes(grid), dtype=np.uint8).reshape(height, width).astype(bool)
    walls = ~opened
    walls.setflags(write=False)

    open_cells = sorted(
        ((x, y) for y in range(height) for x in range(width) if opened[y, x]),
        key=lambda c: (c[1], c[0]),
    )
    start, target = rng.sample(open_cells, 2)
    return Maze(width=width, height=height, walls=walls, start=start, target=target)


def explore(maze: Maze, speed: float, seed: int, task_id: str = "") -> Tuple[Solution, float]:
    """
    시작 칸에서 목표를 찾을 때까지 무작위 깊이 우선 탐색을 수행합니다.
    steps_explored 는 방문한 서로 다른 칸 수(시작 포함), duration = steps_explored / speed.
    """
    if speed <= 0:
        raise InvalidParameterError(f"speed must be positive, got {speed}")

    rng = random.Random(seed)
    stack = [maze.start]
    visited = {maze.start}
    while stack[-1] != maze.target:
        unvisited = [n for n in maze.neighbors(stack[-1]) if n not in visited]
        if unvisited:
            nxt = rng.choice(unvisited)
            visited.add(nxt)
            stack.append(nxt)
        else:
            stack.pop()
            if not stack:
                # 생성기 미로에서는 도달 불가
                raise InvalidParameterError("target is unreachable from start")

    steps = len(visited)
    return Solution(task_id=task_id, path=tuple(stack), steps_explored=steps), steps / speed


def validate_solution(maze: Maze, solution: Solution) -> bool:
    path = solution.path
    if not path:
        return maze.start == maze.target
    if path[0] != maze.start or path[-1] != maze.target:
        return False
    if any(not maze.is_open(cell) for cell in path):
        return False
    for (x1, y1), (x2, y2) in zip(path, path[1:]):
        if abs(x1 - x2) + abs(y1 - y2) != 1:
            return False
    return True


def render_maze(maze: Maze) -> str:
    rows = []
    for y in range(maze.height):
        row = []
        for x in range(maze.width):
            if (x, y) == maze.start:
                row.append("S")
            elif (x, y) == maze.target:
                row.append("T")
            else:
                row.append("#" if maze.walls[y, x] else ".")
        rows.append("".join(row))
    return "\n".join(rows)
