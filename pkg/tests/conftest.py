import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[1]


@pytest.fixture
def scenario_dir():
    return ROOT / "scenarios"
