"""
Pytest Configuration and Fixtures

Provides structure-function fixtures for the reference models, config
factories and settings isolation.
"""

import json
import math
import os
from collections.abc import Callable, Generator
from pathlib import Path
from typing import Any

import pytest

# Set environment variables BEFORE importing Settings
os.environ.setdefault("SPECTRALFIELD_LOG_LEVEL", "DEBUG")
os.environ.setdefault("SPECTRALFIELD_LOG_FORMAT", "console")
os.environ.setdefault("SPECTRALFIELD_WORKERS", "1")

from src.config import get_settings
from src.engine.spectral_models import make_structure_function
from src.models.spectrum import CosineTerm, StructureFamily, StructureFunction, StructureFunctionSpec


# =============================================================================
# Settings Fixtures
# =============================================================================

@pytest.fixture(autouse=True)
def clear_settings_cache() -> Generator[None, None, None]:
    """Drop cached settings so monkeypatched environment variables apply."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# =============================================================================
# Structure Function Fixtures
# =============================================================================

@pytest.fixture(scope="session")
def white_noise_1d() -> StructureFunction:
    """S ≡ 1 in d = 1."""
    return make_structure_function(StructureFunctionSpec(family=StructureFamily.CONSTANT))


@pytest.fixture(scope="session")
def white_noise_2d() -> StructureFunction:
    return make_structure_function(StructureFunctionSpec(family=StructureFamily.CONSTANT, dimension=2))


@pytest.fixture(scope="session")
def stealthy_1d() -> StructureFunction:
    """Stealthy gap of half-width π/2 in d = 1 (c = 2)."""
    return make_structure_function(
        StructureFunctionSpec(family=StructureFamily.STEALTHY_GAP, delta=math.pi / 2)
    )


@pytest.fixture(scope="session")
def axes_stealthy_2d() -> StructureFunction:
    """Slabs of half-width π/2 around both axes (c = 4)."""
    return make_structure_function(
        StructureFunctionSpec(family=StructureFamily.AXES_STEALTHY, dimension=2, delta=math.pi / 2)
    )


@pytest.fixture(scope="session")
def radial_power_1d() -> StructureFunction:
    """|2 sin(θ/2)|^{1/2}, normalized."""
    return make_structure_function(
        StructureFunctionSpec(family=StructureFamily.RADIAL_POWER, alpha=0.5)
    )


@pytest.fixture(scope="session")
def cosine_1d() -> StructureFunction:
    """S = 1 + 0.5 cos θ."""
    return make_structure_function(
        StructureFunctionSpec(
            family=StructureFamily.COSINE_SERIES,
            terms=(CosineTerm(frequency=(1,), amplitude=0.5),),
        )
    )


# =============================================================================
# Config Factories
# =============================================================================

@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[dict[str, Any]], Path]:
    """Write a config document to a temporary file and return its path."""

    def _write(document: dict[str, Any], name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def kernel_config() -> dict[str, Any]:
    return {
        "command": "kernel",
        "structure": {"family": "stealthy-gap", "delta": math.pi / 2},
        "radius": 4,
    }


@pytest.fixture
def sample_config() -> dict[str, Any]:
    return {
        "command": "sample",
        "structure": {"family": "stealthy-gap", "delta": math.pi / 2},
        "seed": 7,
        "torus_side": 64,
        "samples": 3,
    }
