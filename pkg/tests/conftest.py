import sys
from pathlib import Path

import pytest

root_dir = Path(__file__).resolve().parents[1]
if str(root_dir) not in sys.path:
    sys.path.append(str(root_dir))

from cinfty.config import FixtureName  # noqa: E402
from cinfty import fixtures  # noqa: E402


@pytest.fixture(scope="session")
def interval_model():
    return fixtures.simplex_model(1)


@pytest.fixture(scope="session")
def triangle_model():
    return fixtures.simplex_model(2)


@pytest.fixture(scope="session")
def interval_transfer():
    """Ω(Δ¹) → C*(Δ¹) transferred to arity 4."""
    return fixtures.transfer_fixture(FixtureName.INTERVAL, 4)


@pytest.fixture(scope="session")
def interval_cumulants():
    """Ω(Δ¹) → Q, a C∞ morphism between dgcas, to arity 4."""
    return fixtures.cumulant_fixture(FixtureName.INTERVAL, 4)


@pytest.fixture(scope="session")
def exterior_xy():
    return fixtures.exterior_algebra(("x", "y"))


@pytest.fixture(scope="session")
def triangle_transfer():
    """Ω(Δ²) → C*(Δ²) transferred to arity 4."""
    return fixtures.transfer_fixture(FixtureName.DELTA2, 4)


@pytest.fixture(scope="session")
def triangle_cumulants():
    """Ω(Δ²) → Q to arity 3."""
    return fixtures.cumulant_fixture(FixtureName.DELTA2, 3)


@pytest.fixture(scope="session")
def circle_model():
    return fixtures.circle_model()
