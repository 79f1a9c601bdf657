import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from velopad import ReadoutConfig, SensorGeometry, VelostatModel


@pytest.fixture
def pad16():
    return SensorGeometry.writing_pad()


@pytest.fixture
def grid5():
    return SensorGeometry(rows=5, cols=5, pitch=4e-3, line_width=0.254e-3)


@pytest.fixture
def model():
    return VelostatModel()


@pytest.fixture
def readout():
    return ReadoutConfig()
