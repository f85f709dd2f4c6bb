"""Shared pytest fixtures"""

import pytest

from qpalign.Circuit_Builder import ProfitPlan
from qpalign.QSim_Engine import make_rng


WORKED_PAIR = ("ATGGTCAGC", "ACGGTC")


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def worked_pair():
    return WORKED_PAIR


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep tests away from a user's ~/.qpalign_config.json and width overrides"""
    monkeypatch.setenv("QPALIGN_CONFIG", str(tmp_path / "qpalign_config.json"))
    monkeypatch.delenv("QPALIGN_MAX_QUBITS", raising=False)


@pytest.fixture
def plan_aa():
    return ProfitPlan.create("A", "A")
