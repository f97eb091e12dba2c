#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
미로(솔루션 공간) 테스트
"""

from collections import deque

import numpy as np
import pytest

from backend.simulation.errors import InvalidParameterError
from backend.simulation.maze import (
    Maze,
    Solution,
    explore,
    generate_maze,
    render_maze,
    validate_solution,
)


def reachable(maze: Maze):
    seen = {maze.start}
    queue = deque([maze.start])
    while queue:
        for nxt in maze.neighbors(queue.popleft()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


@pytest.mark.parametrize("seed", [0, 1, 2, 99])
def test_generated_maze_is_connected(seed):
    maze = generate_maze(12, 12, seed)
    assert maze.start != maze.target
    assert maze.is_open(maze.start) and maze.is_open(maze.target)
    assert reachable(maze) == set(maze.open_cells)


def test_generation_is_deterministic():
    first = generate_maze(9, 7, 123)
    generate_maze.cache_clear()
    again = generate_maze(9, 7, 123)
    assert np.array_equal(first.walls, again.walls)
    assert (first.start, first.target) == (again.start, again.target)
    assert first.walls.shape == (7, 9)


def test_maze_walls_are_read_only():
    maze = generate_maze(5, 5, 4)
    with pytest.raises(ValueError):
        maze.walls[0, 0] = not maze.walls[0, 0]


@pytest.mark.parametrize("width, height", [(1, 5), (5, 1), (0, 0)])
def test_maze_dimensions_must_be_at_least_two(width, height):
    with pytest.raises(InvalidParameterError):
        generate_maze(width, height, 1)


def test_blocked_start_is_rejected():
    walls = np.zeros((3, 3), dtype=bool)
    walls[0, 0] = True
    with pytest.raises(InvalidParameterError):
        Maze(width=3, height=3, walls=walls, start=(0, 0), target=(2, 2))


@pytest.mark.parametrize("seed", [3, 4, 5])
def test_exploration_finds_a_valid_path(seed):
    maze = generate_maze(12, 12, seed)
    solution, duration = explore(maze, speed=50.0, seed=seed, task_id="t")
    assert solution.task_id == "t"
    assert validate_solution(maze, solution)
    assert len(solution.path) - 1 <= solution.steps_explored <= maze.open_count
    assert duration == pytest.approx(solution.steps_explored / 50.0)


def test_exploration_is_deterministic_and_speed_scales_duration():
    maze = generate_maze(10, 10, 8)
    slow, slow_time = explore(maze, speed=10.0, seed=1)
    fast, fast_time = explore(maze, speed=20.0, seed=1)
    assert slow == fast
    assert slow_time == pytest.approx(2 * fast_time)


def test_exploration_stays_well_below_twice_the_grid():
    steps = [explore(generate_maze(50, 50, seed), speed=1.0, seed=seed)[0].steps_explored for seed in range(100)]
    assert sum(steps) / len(steps) < 2 * 50 * 50


@pytest.mark.slow
def test_largest_maze_is_solvable():
    maze = generate_maze(400, 400, 2024)
    assert maze.walls.shape == (400, 400)
    solution, duration = explore(maze, speed=400.0, seed=1)
    assert validate_solution(maze, solution)
    assert duration == pytest.approx(solution.steps_explored / 400.0)


def test_exploration_rejects_non_positive_speed():
    maze = generate_maze(4, 4, 1)
    with pytest.raises(InvalidParameterError):
        explore(maze, speed=0.0, seed=1)


def test_validation_rejects_broken_paths():
    maze = generate_maze(12, 12, 17)
    solution, _ = explore(maze, speed=1.0, seed=2)
    truncated = Solution(task_id="", path=solution.path[:-1], steps_explored=solution.steps_explored)
    assert not validate_solution(maze, truncated)

    jump = Solution(task_id="", path=(maze.start, maze.target), steps_explored=solution.steps_explored)
    start, target = maze.start, maze.target
    adjacent = abs(start[0] - target[0]) + abs(start[1] - target[1]) == 1
    assert validate_solution(maze, jump) == adjacent

    assert not validate_solution(maze, Solution(task_id="", path=(), steps_explored=0))


def test_solution_steps_cannot_be_shorter_than_path():
    with pytest.raises(InvalidParameterError):
        Solution(task_id="x", path=((0, 0), (0, 1), (0, 2)), steps_explored=1)


def test_render_maze():
    maze = generate_maze(6, 5, 2)
    text = render_maze(maze)
    rows = text.splitlines()
    assert len(rows) == 5
    assert all(len(row) == 6 for row in rows)
    assert text.count("S") == 1
    assert text.count("T") == 1
    assert set(text) <= set("#.ST\n")
