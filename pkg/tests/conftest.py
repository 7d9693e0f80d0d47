import pytest

from qreduce.codes import LinearCode
from qreduce.reduction import PRESETS


@pytest.fixture
def repetition3():
    """Binary repetition code of length 3."""
    return LinearCode.from_rows(2, PRESETS['repetition3']['generator'])


@pytest.fixture(autouse=True)
def default_budget(monkeypatch):
    monkeypatch.delenv('REDUCE_BUDGET', raising=False)
