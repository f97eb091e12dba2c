#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
시뮬레이터 테스트 실행 스크립트
주요 기능:
- 빠른 테스트만 실행 (기본)
- 통계적 재현 테스트(slow) 포함 실행
- 특정 영역만 선택적 실행

실행:
  빠른 테스트: python tests/run_tests.py
  전체 테스트: python tests/run_tests.py --all
  slow 테스트만: python tests/run_tests.py --slow
  엔진 테스트만: python tests/run_tests.py --engine
  API/CLI 테스트만: python tests/run_tests.py --api
"""

import argparse
import os
import sys

import pytest

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))

# 영역별 테스트 모듈
SUITES = {
    "engine": ["test_taskgraph.py", "test_maze.py", "test_knowledge.py", "test_control.py", "test_engine.py"],
    "lab": ["test_theorems.py", "test_experiments.py", "test_scenario_config.py"],
    "api": ["test_api.py", "test_cli.py"],
}


def build_args(options: argparse.Namespace) -> list:
    selected = [name for name in SUITES if getattr(options, name)]
    files = [os.path.join(TESTS_DIR, f) for name in selected for f in SUITES[name]] or [TESTS_DIR]

    args = ["-v"] if options.verbose else ["-q"]
    if options.slow:
        args += ["-m", "slow", "-s"]
    elif not options.all:
        args += ["-m", "not slow"]
    return args + files


def main() -> int:
    parser = argparse.ArgumentParser(description="시뮬레이터 테스트 실행")
    parser.add_argument("--all", action="store_true", help="slow 테스트 포함 전체 실행")
    parser.add_argument("--slow", action="store_true", help="slow 테스트만 실행")
    parser.add_argument("--verbose", "-v", action="store_true", help="상세 출력")
    for name in SUITES:
        parser.add_argument(f"--{name}", action="store_true", help=f"{name} 테스트만 실행")
    options = parser.parse_args()

    args = build_args(options)
    print(f"pytest {' '.join(args)}")
    return pytest.main(args)


if __name__ == "__main__":
    sys.exit(main())
