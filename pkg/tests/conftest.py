import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from util import suite_trees  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def random_suite():
    """200 seeded random trees with up to 60 vertices, shared across tests."""
    return suite_trees(200, 60)


@pytest.fixture(scope="session")
def small_suite():
    """A cheaper 40-tree slice for the more expensive per-tree checks."""
    return suite_trees(40, 60, base_seed=0xBEE)
