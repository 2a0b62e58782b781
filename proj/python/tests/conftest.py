import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def root():
    return ROOT


@pytest.fixture(scope="session")
def cli():
    exe = os.environ.get("ROTMHD_CLI") or shutil.which("rotmhd")
    if not exe:
        pytest.skip("rotmhd executable not available (set ROTMHD_CLI)")
    return exe
