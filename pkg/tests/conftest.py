from __future__ import annotations

from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
SNAPSHOTS = Path(__file__).parent / "snapshots"


@pytest.fixture
def data_dir() -> Path:
    return DATA
