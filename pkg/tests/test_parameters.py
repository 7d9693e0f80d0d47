import numpy as np
import pytest

from qreduce.parameters import (
    Configurable, IntParameter, OptionalIntParameter, FloatParameter, SelectionParameter, BooleanParameter,
    PatternParameter, PathParameter, BudgetExceededError, BUDGET_ENV, DEFAULT_BUDGET, check_budget, default_budget
)
from qreduce.rng import task_rng, run_tasks


class Settings(Configurable):
    size = IntParameter(min=1, max=10, default=3)
    limit = OptionalIntParameter(min=0, default=None)
    ratio = FloatParameter(min=0, max=1, default=0.5)
    kind = SelectionParameter(('a', 'b'), default='a')
    flag = BooleanParameter(default=False)
    decoder = PatternParameter(r'exhaustive|unreliable:\d+', default='exhaustive')
    out = PathParameter(default=None)

    def __init__(self, **values):
        for name, value in values.items():
            setattr(self, name, value)


def test_defaults():
    settings = Settings()
    assert settings.to_dict() == {
        'size': 3, 'limit': None, 'ratio': 0.5, 'kind': 'a', 'flag': False, 'decoder': 'exhaustive', 'out': None
    }


@pytest.mark.parametrize('name, value', [
    ('size', 0), ('size', 11), ('size', 2.0), ('size', True), ('limit', -1), ('ratio', 1.5), ('ratio', '0.1'),
    ('kind', 'c'), ('flag', 1), ('decoder', 'unreliable:'), ('decoder', 'exhaustive2'), ('out', 3),
])
def test_invalid_values(name, value):
    with pytest.raises(ValueError, match=name):
        Settings(**{name: value})


def test_round_trip():
    settings = Settings(size=7, limit=2, kind='b', flag=True, decoder='unreliable:3', out='x.csv')
    assert Settings.from_dict(settings.to_dict()) == settings
    assert Settings(size=2) != settings
    assert 'size=7' in repr(settings)


def test_from_dict_rejects_unknown():
    with pytest.raises(ValueError, match='colour'):
        Settings.from_dict({'colour': 'blue'})


def test_int_parameter_range():
    with pytest.raises(ValueError):
        IntParameter(min=3, max=2)


def test_default_budget(monkeypatch):
    assert default_budget() == DEFAULT_BUDGET
    monkeypatch.setenv(BUDGET_ENV, '1e3')
    assert default_budget() == 1000
    monkeypatch.setenv(BUDGET_ENV, '0')
    with pytest.raises(ValueError):
        default_budget()
    monkeypatch.setenv(BUDGET_ENV, 'lots')
    with pytest.raises(ValueError):
        default_budget()


def test_check_budget(monkeypatch):
    check_budget('statevector', 10, 10)
    with pytest.raises(BudgetExceededError) as info:
        check_budget('decoding table', 11, 10)
    assert info.value.dimension == 'decoding table'
    assert isinstance(info.value, ValueError)
    monkeypatch.setenv(BUDGET_ENV, '5')
    with pytest.raises(BudgetExceededError):
        check_budget('statevector', 6)


def test_task_rng_is_reproducible():
    a = task_rng(1, 2).integers(0, 1 << 30, size=5)
    b = task_rng(1, 2).integers(0, 1 << 30, size=5)
    c = task_rng(1, 3).integers(0, 1 << 30, size=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_task_rng_rejects_negative_seed():
    with pytest.raises(ValueError):
        task_rng(-1)
    with pytest.raises(ValueError):
        task_rng(0, -1)


def draw(task_id):
    return int(task_rng(4, task_id).integers(1 << 30))


def test_run_tasks():
    assert run_tasks(abs, [-1, 2, -3]) == [1, 2, 3]
    with pytest.raises(ValueError):
        run_tasks(abs, [1], workers=0)


@pytest.mark.slow
def test_run_tasks_in_pool():
    assert run_tasks(draw, range(6), workers=2) == run_tasks(draw, range(6))
