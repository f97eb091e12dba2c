import sys
import os
import pytest
from fastapi.testclient import TestClient

# 테스트 실행 전에 프로젝트 루트 경로를 sys.path에 추가
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, project_root)

from backend.schemas.scenario import Scenario
from backend.simulation.control import ControlMode
from backend.simulation.taskgraph import TaskGraph, load_task_graph_file

# 공통 유틸리티 임포트
from tests.test_utils import make_graph


@pytest.fixture
def chain_graph() -> TaskGraph:
    """1 -> 2 -> 3"""
    return make_graph({"1": [], "2": ["1"], "3": ["2"]}, {"1": 3, "2": 2, "3": 1})


@pytest.fixture
def diamond_graph() -> TaskGraph:
    """1 -> (2, 3) -> 4"""
    return make_graph({"1": [], "2": ["1"], "3": ["1"], "4": ["2", "3"]}, {"1": 1, "2": 5, "3": 2, "4": 4})


@pytest.fixture(scope="session")
def g10_graph() -> TaskGraph:
    return load_task_graph_file("g10.graph")


@pytest.fixture
def g10_scenario(g10_graph) -> Scenario:
    return Scenario(graph=g10_graph, l=2, agents_per_group=2, control=ControlMode.DECENTRALIZED, master_seed=7)


# 세션 스코프 TestClient
@pytest.fixture(scope="session")
def client():
    from backend.main import app
    with TestClient(app) as c:
        print("\nSession-scoped TestClient created.")
        yield c
    print("Session-scoped TestClient closed.")
