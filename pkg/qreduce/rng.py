"""Reproducible randomness for Monte Carlo experiments.

Each task draws from its own counter-based Philox stream keyed by
(seed, task id), so results do not depend on how tasks are scheduled.
"""

import multiprocessing as mp

import numpy as np

from typing import Any, Callable, Iterable, List

import logging

_LOGGER = logging.getLogger(__name__)


def task_rng(seed: int, task_id: int = 0) -> np.random.Generator:
    """Independent generator for one task.

    :param seed: experiment seed
    :param task_id: index of the task inside the experiment
    """
    if seed < 0 or task_id < 0:
        raise ValueError(f"seed ({seed}) and task_id ({task_id}) must be nonnegative.")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, task_id])))


def run_tasks(fn: Callable[[Any], Any], tasks: Iterable[Any], workers: int = 1) -> List[Any]:
    """Map fn over tasks, in a process pool when workers > 1.

    fn must be picklable (a module level function) when workers > 1.
    Results keep the order of the tasks.
    """
    tasks = list(tasks)
    if workers < 1:
        raise ValueError(f"workers ({workers}) must be >= 1.")

    if workers == 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]

    _LOGGER.info(f'dispatching {len(tasks)} tasks to {workers} processes')
    with mp.Pool(processes=workers) as pool:
        return pool.map(fn, tasks)
