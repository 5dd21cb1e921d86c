"""
Test configuration and fixtures for the fourier_haar package.
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from fourier_haar.models import LevelStructure, SparsityPattern
from fourier_haar.sampling import BandPlan, build_bands, draw_omega
from fourier_haar.transforms import BuildMode, MeasurementOperator, build_U


@pytest.fixture
def rng():
    """Fixture providing a seeded numpy Generator."""
    return np.random.default_rng(20240611)


@pytest.fixture
def levels_8():
    """Fixture providing the level structure of n = 8."""
    return LevelStructure(r=3)


@pytest.fixture
def dense_u(levels_8):
    """Fixture providing the analytic change-of-basis matrix for n = 8."""
    return build_U(levels_8, BuildMode.ANALYTIC)


@pytest.fixture
def full_plan_16():
    """Fixture providing a plan sampling every frequency for n = 16."""
    return BandPlan.full(4)


@pytest.fixture
def random_plan_16():
    """Fixture providing a partial multilevel plan for n = 16."""
    return draw_omega(build_bands(4), [2, 1, 3, 5], seed=7)


@pytest.fixture
def small_problem():
    """
    Fixture providing a sparse-in-levels recovery instance at n = 32:
    (coefficients, operator, clean measurements).
    """
    from fourier_haar.levels import random_sparse_in_levels

    k = SparsityPattern(k=(1, 1, 1, 1, 1))
    c = random_sparse_in_levels(k, seed=3)
    plan = draw_omega(build_bands(5), [2, 2, 4, 8, 10], seed=11)
    operator = MeasurementOperator.from_plan(plan)
    return c, operator, operator.forward(c.values)
