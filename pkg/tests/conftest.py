from __future__ import annotations

from pathlib import Path

import pytest

import sample_states

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def rights_basic():
    return sample_states.rights_basic()


@pytest.fixture(scope="session")
def blocked_chain():
    return sample_states.blocked_chain()


@pytest.fixture(scope="session")
def revocation_base():
    return sample_states.revocation_base()


@pytest.fixture(scope="session")
def empty_six():
    return sample_states.empty_six()


@pytest.fixture(scope="session")
def scheme_snapshots():
    return sample_states.scheme_snapshots()
