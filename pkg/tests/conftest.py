"""Shared fixtures for the test suite."""

import pytest

from scriptshift import translit


@pytest.fixture(scope="session")
def registry():
    return translit.default_registry()
