from pathlib import Path

import pytest

from src.model.pairwise import solve_all_pairs
from src.scenario import load_scenario


SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture(scope="session")
def jeju07():
    return load_scenario(SCENARIO_DIR / "jeju_rwy07.json")


@pytest.fixture(scope="session")
def jeju25():
    return load_scenario(SCENARIO_DIR / "jeju_rwy25.json")


@pytest.fixture(scope="session")
def jeju07_pairs(jeju07):
    return solve_all_pairs(jeju07)


@pytest.fixture(scope="session")
def jeju25_pairs(jeju25):
    return solve_all_pairs(jeju25)
