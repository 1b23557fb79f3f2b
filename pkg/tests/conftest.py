from pathlib import Path

import pytest

from liecert.config import Settings
from liecert.services.grading import contact_grading
from liecert.services.liealg import build_chevalley
from liecert.services.rootsys import build_root_system


@pytest.fixture(scope="session")
def a2():
    return build_chevalley(build_root_system("A", 2))


@pytest.fixture(scope="session")
def g2():
    return build_chevalley(build_root_system("G", 2))


@pytest.fixture(scope="session")
def a2_grading(a2):
    return contact_grading(a2)


@pytest.fixture(scope="session")
def g2_grading(g2):
    return contact_grading(g2)


@pytest.fixture
def settings(tmp_path: Path) -> Settings:
    return Settings(
        cache_dir=tmp_path / "cache",
        ledger=False,
        timestamps=False,
        seed=0,
        mode="auto",
    )
