from pathlib import Path

import pytest

from aisensei.kgraph import load_graph

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"


@pytest.fixture(scope="session")
def algebra_graph():
    return load_graph(DATA / "algebra2.kg.json")


@pytest.fixture(scope="session")
def data_dir():
    return DATA
