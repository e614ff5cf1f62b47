import os

import pytest

from dlimit.raster import GridSpec


@pytest.fixture
def small_grid():
    return GridSpec.square(2.0, 128)


@pytest.fixture
def tmp_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def have_cython() -> bool:
    try:
        from dlimit import _ckernels  # noqa: F401
    except ImportError:
        return False
    return not os.environ.get("DLIMIT_PURE")
