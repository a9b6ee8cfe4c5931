import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fixtures import fixture_pp, make_fixture  # noqa: E402


@pytest.fixture(scope="session")
def pp():
    return fixture_pp()


@pytest.fixture(scope="session")
def small_fixture():
    """m=16, s=2 blob model plus its float mirror."""
    return make_fixture(m=16, s=2, k=4, seed=11)


@pytest.fixture(scope="session")
def multi_fixture():
    """m=16, s=4 blob model."""
    return make_fixture(m=16, s=4, k=4, sv_per_class=2, seed=12)


@pytest.fixture(scope="session")
def large_fixture():
    """m=64, s=4 blob model."""
    return make_fixture(m=64, s=4, k=8, sv_per_class=3, seed=13)
