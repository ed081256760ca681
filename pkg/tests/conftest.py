from pathlib import Path

import numpy as np
import pytest

from tma import build_uniform_geometry, gaussian_taper

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


@pytest.fixture
def configs_dir():
    return CONFIGS


@pytest.fixture
def ula20():
    return build_uniform_geometry(20, 0.5)


@pytest.fixture
def gauss20():
    return gaussian_taper(20, 2 / 3)


@pytest.fixture
def rng():
    return np.random.default_rng(20180125)
