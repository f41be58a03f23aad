from __future__ import annotations

import pytest

from mirrorsim.config import config_from_mapping


@pytest.fixture
def make_config():
    """Build an ExperimentConfig from partial schema overrides."""

    def _make(**mapping):
        return config_from_mapping(mapping)

    return _make
