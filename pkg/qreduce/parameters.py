"""Validated configuration parameters.

Parameters are data descriptors declared as class attributes of a configuration
class; assignment validates the value against the declared domain and raises a
ValueError naming the admissible range.
"""

import os
import re
from abc import ABC, abstractmethod

from typing import Any, Dict, Optional, Sequence

DEFAULT_BUDGET = 10 ** 6
BUDGET_ENV = 'REDUCE_BUDGET'


class BudgetExceededError(ValueError):
    """An enumeration or a statevector would exceed the configured budget."""

    def __init__(self, dimension: str, required: int, budget: int):
        self.dimension = dimension
        self.required = required
        self.budget = budget
        super().__init__(
            f"{dimension} needs {required} basis states, budget is {budget}."
        )


def default_budget() -> int:
    """Budget from the REDUCE_BUDGET environment variable, or the default."""
    value = os.environ.get(BUDGET_ENV)
    if value is None:
        return DEFAULT_BUDGET
    try:
        budget = int(float(value))
    except ValueError:
        raise ValueError(f"{BUDGET_ENV} ({value}) must be a number.")
    if budget <= 0:
        raise ValueError(f"{BUDGET_ENV} ({value}) must be positive.")
    return budget


def check_budget(dimension: str, required: int, budget: Optional[int] = None) -> None:
    budget = default_budget() if budget is None else budget
    if required > budget:
        raise BudgetExceededError(dimension, required, budget)


class Parameter(ABC):
    """Base class for all validated parameters."""

    def __init__(self, default=None):
        self.default = default

    def __set_name__(self, owner, name):
        # save name of the descriptor
        self.public_name = name
        # name of the attribute saved in the instance
        self.private_name = '__' + name

    def __get__(self, instance, owner):
        if instance is None:
            return self
        return getattr(instance, self.private_name, self.default)

    def __set__(self, instance, value):
        self.validate(value)
        setattr(instance, self.private_name, value)

    @abstractmethod
    def validate(self, value) -> None:
        """Raise ValueError if value is outside the parameter domain."""
        pass


class IntParameter(Parameter):

    def __init__(self, min=None, max=None, default=None):
        if min is not None and max is not None and min > max:
            raise ValueError(f'min ({min}) cannot be > max ({max}).')
        super().__init__(default)
        self.min = min
        self.max = max

    def validate(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(
                f"{self.public_name} ({value}) must be an integer: got a {type(value)}."
            )
        if self.min is not None and value < self.min:
            raise ValueError(f"{self.public_name} ({value}) must be >= {self.min}.")
        if self.max is not None and value > self.max:
            raise ValueError(f"{self.public_name} ({value}) must be <= {self.max}.")


class OptionalIntParameter(IntParameter):

    def validate(self, value):
        if value is not None:
            super().validate(value)


class FloatParameter(Parameter):

    def __init__(self, min=None, max=None, default=None):
        if min is not None and max is not None and min > max:
            raise ValueError(f'min ({min}) cannot be > max ({max}).')
        super().__init__(default)
        self.min = min
        self.max = max

    def validate(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(
                f"{self.public_name} ({value}) must be a number: got a {type(value)}."
            )
        if not (
                (self.min is None or self.min <= value)
                and (self.max is None or value <= self.max)
        ):
            raise ValueError(
                f"{self.public_name} ({value}) must be between min ({self.min}) and max ({self.max})."
            )


class SelectionParameter(Parameter):

    def __init__(self, options: Sequence[Any], default=None):
        super().__init__(default)
        self.options = tuple(options)

    def validate(self, value):
        if value not in self.options:
            raise ValueError(
                f"{self.public_name} ({value}) must be one of {self.options}."
            )


class BooleanParameter(Parameter):

    def validate(self, value):
        if type(value) != bool:
            raise ValueError(
                f"{self.public_name} ({value}) must be a boolean: got a {type(value)}."
            )


class Configurable:
    """Mixin serializing the Parameter descriptors of a class to a dict."""

    @classmethod
    def parameter_names(cls):
        names = []
        for klass in reversed(cls.__mro__):
            for key, val in vars(klass).items():
                if isinstance(val, Parameter) and key not in names:
                    names.append(key)
        return names

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in self.parameter_names()}

    @classmethod
    def from_dict(cls, values: Dict[str, Any]):
        unknown = set(values) - set(cls.parameter_names())
        if unknown:
            raise ValueError(f"unknown parameters for {cls.__name__}: {sorted(unknown)}")
        return cls(**values)

    def __repr__(self):
        fields = ', '.join(f'{k}={v!r}' for k, v in self.to_dict().items())
        return f'{self.__class__.__name__}({fields})'

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()


class PatternParameter(Parameter):
    """String parameter matching a regular expression."""

    def __init__(self, pattern: str, default=None):
        super().__init__(default)
        self.pattern = re.compile(pattern)

    def validate(self, value):
        if not isinstance(value, str) or not self.pattern.fullmatch(value):
            raise ValueError(
                f"{self.public_name} ({value}) must match {self.pattern.pattern}."
            )


class PathParameter(Parameter):
    """Optional filesystem path; None stands for the standard output."""

    def validate(self, value):
        if value is not None and not isinstance(value, str):
            raise ValueError(
                f"{self.public_name} ({value}) must be a path string: got a {type(value)}."
            )
