import cmath

import pytest

from src.elliptic_core.elliptic_core import TWO_PI_I, SeriesBudget, Tau
from src.szego_genus1.szego_genus1 import SewingConfig, TwistConfig

BASE_TAU = complex(0.1, 1.1)
BASE_W = complex(0.6, 1.7)
BASE_RHO = cmath.rect(1e-3, 0.4)


@pytest.fixture(scope="session")
def tau() -> Tau:
    return Tau(BASE_TAU)


@pytest.fixture(scope="session")
def budget() -> SeriesBudget:
    return SeriesBudget()


@pytest.fixture(scope="session")
def sew() -> SewingConfig:
    return SewingConfig.at(BASE_TAU, BASE_W, BASE_RHO)


@pytest.fixture(scope="session")
def tw() -> TwistConfig:
    return TwistConfig(alpha1=0.2, beta1=0.3, beta2=0.15, kappa=0.1)


@pytest.fixture(scope="session")
def generic_points() -> tuple[complex, complex]:
    """穴 0, w とその格子の像から十分に離れた二点"""
    x = TWO_PI_I * (0.3 * BASE_TAU + 0.7)
    y = TWO_PI_I * (0.5 * BASE_TAU + 0.3)
    return complex(x), complex(y)
