"""
Shared fixtures: shipped models and a seeded random generator
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import settings
from src.model.parser import load_model

MODEL_NAMES = ["pendulum", "double_pendulum", "arm2", "arm6", "slider", "quad18"]


@pytest.fixture(scope="session")
def models_dir() -> Path:
    return settings.MODELS_DIR


@pytest.fixture(scope="session")
def problems_dir() -> Path:
    return settings.PROBLEMS_DIR


@pytest.fixture(scope="session")
def load():
    """Cached model loader by fixture name"""
    cache = {}

    def _load(name: str):
        if name not in cache:
            cache[name] = load_model(settings.MODELS_DIR / f"{name}.rbd")
        return cache[name]

    return _load


@pytest.fixture(scope="session")
def pendulum(load):
    return load("pendulum")


@pytest.fixture(scope="session")
def double_pendulum(load):
    return load("double_pendulum")


@pytest.fixture(scope="session")
def arm2(load):
    return load("arm2")


@pytest.fixture(scope="session")
def arm6(load):
    return load("arm6")


@pytest.fixture(scope="session")
def slider(load):
    return load("slider")


@pytest.fixture(scope="session")
def quad18(load):
    return load("quad18")


@pytest.fixture(params=["pendulum", "double_pendulum", "arm6", "quad18"])
def fixture_model(request, load):
    """The four dynamics fixtures"""
    return load(request.param)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(settings.RANDOM_SEED)
