import pytest

from nsbox.boxes import make_pr_box, make_tsirelson_box, make_uniform_box
from nsbox.store import MemoryStore, SQLiteStore


@pytest.fixture(scope="session")
def pr():
    return make_pr_box()


@pytest.fixture(scope="session")
def tsirelson():
    return make_tsirelson_box()


@pytest.fixture(scope="session")
def uniform():
    return make_uniform_box()


@pytest.fixture(params=["memory", "sqlite"])
def store(request, tmp_path):
    """Each store implementation behind the shared contract."""
    if request.param == "memory":
        yield MemoryStore()
    else:
        s = SQLiteStore(tmp_path / "db")
        yield s
        s.close()
