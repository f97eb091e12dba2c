"""시나리오 설정 파일(JSON) 읽기"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from backend.config.settings import get_settings
from backend.lab.presets import preset_graph
from backend.schemas.scenario import Overheads, Scenario
from backend.schemas.scenario_config import GraphConfig, ScenarioConfig
from backend.simulation.errors import InvalidParameterError, ParseError, SchemaError
from backend.simulation.taskgraph import (
    TaskGraph,
    generate_hds_graph,
    generate_lds_graph,
    generate_program_graph,
    load_bundled_graph,
    load_task_graph_file,
)

logger = logging.getLogger(__name__)


def _key_path(error: ValidationError) -> str:
    loc = error.errors()[0]["loc"]
    return ".".join(str(part) for part in loc)


def _first_message(error: ValidationError) -> str:
    return error.errors()[0]["msg"]


def _build_graph(
    config: GraphConfig, seed: Optional[int], base_dir: Optional[Path], bundled_only: bool
) -> TaskGraph:
    if config.file is not None:
        try:
            if bundled_only:
                return load_bundled_graph(config.file)
            return load_task_graph_file(config.file, base_dir)
        except FileNotFoundError as e:
            raise SchemaError(str(e), "graph.file")
    if config.preset is not None:
        try:
            return preset_graph(config.preset, seed)
        except InvalidParameterError as e:
            raise SchemaError(str(e), "graph.preset")

    gen = config.generator
    settings = get_settings()
    reward_range = (
        settings.REWARD_MIN if gen.reward_min is None else gen.reward_min,
        settings.REWARD_MAX if gen.reward_max is None else gen.reward_max,
    )
    try:
        if gen.kind == "lds":
            return generate_lds_graph(gen.n_tasks, seed=gen.seed, reward_range=reward_range)
        if gen.kind == "hds":
            return generate_hds_graph(gen.n_tasks, seed=gen.seed, reward_range=reward_range)
        return generate_program_graph(gen.n_tasks, gen.density, reward_range, gen.seed)
    except InvalidParameterError as e:
        raise SchemaError(str(e), "graph.generator")


def config_to_scenario(
    config: ScenarioConfig, base_dir: Optional[Path] = None, bundled_only: bool = False
) -> Scenario:
    graph = _build_graph(config.graph, config.seed, base_dir, bundled_only)

    # 그래프가 있어야 알 수 있는 교차 검증은 해당 키로 보고
    if config.l > graph.m:
        raise SchemaError(f"group count l={config.l} exceeds task count m={graph.m}", "l")
    if config.agents_per_group is not None and config.total_agents is not None:
        raise SchemaError("give either agents_per_group or total_agents, not both", "total_agents")
    if config.total_agents is not None and config.total_agents < config.l:
        raise SchemaError(f"total agents n={config.total_agents} is below group count l={config.l}", "total_agents")

    fields: Dict[str, Any] = {
        "graph": graph,
        "l": config.l,
        "agents_per_group": config.agents_per_group,
        "total_agents": config.total_agents,
        "control": config.control,
        "partition_mode": config.partition_mode,
        "inference_q": config.inference_q,
    }
    if config.maze is not None:
        fields["maze_size"] = (config.maze.width, config.maze.height)
    if config.speeds is not None:
        fields["speeds"] = config.speeds
    if config.validation_fail_p is not None:
        fields["validation_fail_p"] = config.validation_fail_p
    if config.overheads is not None:
        fields["overheads"] = Overheads(**config.overheads.model_dump(exclude_none=True))
    if config.seed is not None:
        fields["master_seed"] = config.seed

    try:
        return Scenario(**fields)
    except ValidationError as e:
        raise SchemaError(_first_message(e), _key_path(e) or "scenario")


def load_scenario(
    source: Union[str, Dict[str, Any]],
    base_dir: Optional[Union[str, Path]] = None,
    bundled_only: bool = False,
) -> Scenario:
    """
    JSON 설정 텍스트(또는 이미 파싱된 dict)를 검증된 Scenario 로 만듭니다.

    Args:
        source: 설정 텍스트 또는 dict
        base_dir: 상대 그래프 경로의 기준 디렉터리
        bundled_only: True 면 graph.file 은 번들 그래프 이름만 허용 (외부 입력용)

    Raises:
        ParseError: JSON 문법 오류
        SchemaError: 스키마 위반 (key_path 에 위치 기록, 알 수 없는 키 포함)
    """
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.lineno)
    else:
        data = source
    if not isinstance(data, dict):
        raise SchemaError("scenario config must be a JSON object", "(root)")

    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise SchemaError(_first_message(e), _key_path(e) or "(root)")

    scenario = config_to_scenario(config, Path(base_dir) if base_dir is not None else None, bundled_only)
    logger.info(f"시나리오 로드: m={scenario.graph.m}, l={scenario.l}, control={scenario.control.value}")
    return scenario


def load_scenario_file(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    return load_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)
