#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
그룹 작업 시뮬레이터 명령줄 도구

실행:
  시나리오 한 번 실행: python -m backend.cli run scenario.json
  그룹 수 변화 실험: python -m backend.cli sweep-groups --fixed total-agents --out sweep.csv
  제어 방식 비교: python -m backend.cli compare-controls --task-counts 20 240
  의존성 연구: python -m backend.cli dependency-study
  대기 시간 법칙 검증: python -m backend.cli check-theorems --trials 100000
  작업 분포: python -m backend.cli task-distribution --task-counts 240
  속도 차이: python -m backend.cli speed-sweep --factors 0.5 1 2
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from backend.config.settings import get_settings
from backend.lab import presets
from backend.lab.experiments import FixedCount
from backend.services.lab_service import LabService
from backend.simulation.errors import (
    CycleError,
    DanglingDependencyError,
    InvalidParameterError,
    ParseError,
    SchemaError,
    SimulationError,
)

logger = logging.getLogger(__name__)

EXIT_SIMULATION_ERROR = 1
EXIT_INPUT_ERROR = 2

_INPUT_ERRORS = (SchemaError, ParseError, InvalidParameterError, CycleError, DanglingDependencyError, FileNotFoundError)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="마스터 시드 (기본: DEFAULT_SEED)")
    common.add_argument("--replications", type=int, default=None, help="셀당 반복 횟수 (기본: DEFAULT_REPLICATIONS)")
    common.add_argument("--out", default=None, help="결과 CSV 경로 (없으면 표준 출력)")
    common.add_argument("--trace", default=None, help="이벤트 로그 파일 경로 (run 전용)")
    common.add_argument("--workers", type=int, default=None, help="반복 실행 프로세스 수")

    parser = argparse.ArgumentParser(prog="backend.cli", description="그룹 작업 시뮬레이터")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="시나리오 설정 파일 하나 실행")
    run.add_argument("config", help="시나리오 JSON 파일")

    sweep = sub.add_parser("sweep-groups", parents=[common], help="그룹 수 변화 실험")
    sweep.add_argument("--fixed", choices=[f.value for f in FixedCount], default=FixedCount.TOTAL.value)
    sweep.add_argument("--groups", type=int, nargs="+", default=list(presets.GROUP_COUNTS))

    compare = sub.add_parser("compare-controls", parents=[common], help="중앙 집중형/분산형 비교")
    compare.add_argument("--task-counts", type=int, nargs="+", default=list(presets.CONTROL_TASK_COUNTS))

    sub.add_parser("dependency-study", parents=[common], help="분할 방식/제어 방식별 대기 시간")

    theorems = sub.add_parser("check-theorems", parents=[common], help="대기 시간 법칙 검증")
    theorems.add_argument("--trials", type=int, default=100_000)

    distribution = sub.add_parser("task-distribution", parents=[common], help="그룹별 작업 수 분포")
    distribution.add_argument("--task-counts", type=int, nargs="+", default=list(presets.DISTRIBUTION_TASK_COUNTS))

    speed = sub.add_parser("speed-sweep", parents=[common], help="한 그룹의 속도 변화")
    speed.add_argument("--factors", type=float, nargs="+", default=list(presets.SPEED_FACTORS))

    return parser


def _run(service: LabService, args: argparse.Namespace) -> None:
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as trace:
            report = service.run_scenario(args.config, trace=trace, seed=args.seed)
    else:
        report = service.run_scenario(args.config, seed=args.seed)

    text = json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def dispatch(service: LabService, args: argparse.Namespace) -> None:
    if args.command == "run":
        _run(service, args)
        return

    options = {"replications": args.replications, "seed": args.seed, "workers": args.workers}
    if args.command == "sweep-groups":
        result = service.sweep_groups(fixed=args.fixed, group_counts=args.groups, **options)
    elif args.command == "compare-controls":
        result = service.compare_controls(task_counts=args.task_counts, **options)
    elif args.command == "dependency-study":
        result = service.dependency_study(**options)
    elif args.command == "check-theorems":
        result = service.check_theorems(seed=args.seed, trials=args.trials)
    elif args.command == "task-distribution":
        result = service.task_distribution(task_counts=args.task_counts, **options)
    else:
        result = service.speed_sweep(factors=args.factors, **options)
    service.save(result, args.out, stream=sys.stdout)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        dispatch(LabService(settings), args)
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except SimulationError as e:
        print(f"simulation error: {e}", file=sys.stderr)
        return EXIT_SIMULATION_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
