import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hiqlip import Network, SolverConfig


@pytest.fixture
def cfg_exhaustive():
    return SolverConfig(backend="exhaustive", seed=0)


@pytest.fixture
def cfg_annealing_fast():
    return SolverConfig(backend="annealing", seed=0, num_reads=8, sweeps=200)


@pytest.fixture
def tiny_net():
    """The hand-checkable two-layer net: W=[[1],[-1]], u=(1,1)."""
    return Network(layers=[np.array([[1.0], [-1.0]]), np.array([[1.0, 1.0]])])
