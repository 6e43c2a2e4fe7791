import pytest

from modhtan.datasets import make_heart_fixture


@pytest.fixture(scope="session")
def heart_file(tmp_path_factory):
    """Statlog-format heart data file (offline stand-in, 270 rows)."""
    path = tmp_path_factory.mktemp("data") / "heart.dat"
    make_heart_fixture(path)
    return path
