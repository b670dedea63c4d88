import os
import sys

import pytest

# modules import each other as top-level names, as when run from src/
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from services.geometry import PhysicalParams  # noqa: E402


@pytest.fixture
def base_params():
    """m = 1, omega = 0.1, no torsion: rho0 = 10."""
    return PhysicalParams(mass=1.0, omega=0.1)


@pytest.fixture
def torsion_params():
    return PhysicalParams(mass=1.0, omega=0.5, zeta=1.2, k=0.7)
