import pandas as pd

from typing import Generator, Iterator, List, Sequence

import logging

_LOGGER = logging.getLogger(__name__)


class Stream:
    """Row producer for tables emitted by scans and reports.

    We can both instantiate it by passing to it a generator function (along with
    its call arguments) or subclassing it and overriding the datagen method;
    this is similar to how threading.Thread behaves with respect to the target
    argument and the run method.

    The first item yielded by the generator is the header containing the column
    labels, the following ones are rows of the same length.
    """

    def __init__(self, name: str, datagen=None, args=(), kwargs=None):
        """
        :param name: name of the table, used in log messages
        :param datagen: data generator function
        :param args: arguments to pass to datagen at invocation
        :param kwargs: keyword arguments to pass to datagen at invocation
        """
        if kwargs is None:
            kwargs = {}

        self.name = name

        self._datagen = datagen
        self._args = args
        self._kwargs = kwargs

        self._header = None

    def datagen(self, *args, **kwargs) -> Generator:
        """Generator method.

        :param args: arguments specified in the constructor
        :param kwargs: keyword arguments specified in the constructor
        :return: Generator object yielding the header, then the rows
        """
        if self._datagen:
            return self._datagen(*args, **kwargs)

        raise ValueError("Define datagen constructor argument or override datagen method.")

    @property
    def header(self) -> List[str]:
        if self._header is None:
            self._header = list(next(iter(self.datagen(*self._args, **self._kwargs))))
        return self._header

    def __iter__(self) -> Iterator[Sequence]:
        """Iterate over the rows, validating their length against the header."""
        gen = self.datagen(*self._args, **self._kwargs)

        header = list(next(gen))
        self._header = header

        count = 0
        for row in gen:
            row = list(row)
            if len(row) != len(header):
                raise ValueError(
                    f"{self.name}: row {count} has {len(row)} fields, header has {len(header)}."
                )
            count += 1
            yield row

        _LOGGER.info(f'{self.name}: {count} rows generated')

    def to_frame(self) -> pd.DataFrame:
        rows = list(self)
        return pd.DataFrame(rows, columns=self.header)
