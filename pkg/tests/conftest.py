import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Point the default cache at a per-test directory."""
    root = tmp_path / "cache"
    monkeypatch.setenv("HIGHERWP_CACHE", str(root))
    return root
