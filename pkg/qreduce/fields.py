"""Exact arithmetic over prime fields and the linear algebra built on it.

Vectors and matrices are ``galois.FieldArray`` instances: entries are exact
residues, arithmetic is carried out modulo q. Only prime fields are accepted,
extension fields would need trace characters that the simulator does not model.
"""

import itertools
from functools import lru_cache

import numpy as np
import galois

from typing import List, Tuple

import logging

_LOGGER = logging.getLogger(__name__)


class ExtensionFieldError(ValueError):
    """Raised when a non-prime field order reaches exact arithmetic."""


@lru_cache(maxsize=None)
def prime_field(q: int) -> type:
    """Return the galois field class of the prime order q.

    :param q: field order
    :return: FieldArray subclass for F_q
    """
    if not isinstance(q, (int, np.integer)) or q < 2:
        raise ValueError(f"q ({q}) must be an integer >= 2.")
    if not galois.is_prime(int(q)):
        raise ExtensionFieldError(
            f"q ({q}) is not prime: extension fields unsupported in simulator."
        )
    return galois.GF(int(q))


def field_of(array: galois.FieldArray) -> type:
    """Field class of a FieldArray, rejecting extension fields."""
    field = type(array)
    if field.degree != 1:
        raise ExtensionFieldError(
            f"{field.name} is an extension field: extension fields unsupported in simulator."
        )
    return field


def vector(q: int, entries) -> galois.FieldArray:
    """Build a vector (or matrix) over F_q from integers.

    Integers are reduced modulo q, so negative entries are accepted.
    """
    return prime_field(q)(np.mod(np.asarray(entries, dtype=np.int64), q))


def hamming_weight(v) -> int:
    """Number of nonzero coordinates."""
    return int(np.count_nonzero(np.asarray(v)))


def rref(matrix: galois.FieldArray) -> Tuple[galois.FieldArray, int, List[int]]:
    """Reduced row echelon form.

    :param matrix: nonempty matrix over a prime field
    :return: (reduced matrix, rank, pivot columns)
    """
    field_of(matrix)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValueError(f"rref needs a nonempty 2d matrix, got shape {matrix.shape}.")

    reduced = matrix.row_reduce()

    pivots = []
    for row in reduced:
        nonzero = np.flatnonzero(row)
        if nonzero.size == 0:
            # zero rows are sorted at the bottom
            break
        pivots.append(int(nonzero[0]))

    return reduced, len(pivots), pivots


def rank(matrix: galois.FieldArray) -> int:
    return rref(matrix)[1]


def kernel_basis(matrix: galois.FieldArray) -> galois.FieldArray:
    """Basis of {x : M x^T = 0}, one vector per row.

    The row count is cols - rank(M); an empty (0, cols) matrix is returned for
    a trivial kernel.
    """
    field = field_of(matrix)
    if matrix.ndim != 2:
        raise ValueError(f"kernel_basis needs a 2d matrix, got shape {matrix.shape}.")

    cols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return field.Identity(cols)

    basis = matrix.null_space()
    return basis.reshape(-1, cols)


def solve(matrix: galois.FieldArray, rhs: galois.FieldArray) -> galois.FieldArray:
    """One particular solution x of M x^T = b, free variables set to zero.

    :raises ValueError: if the system is inconsistent
    """
    field = field_of(matrix)
    rows, cols = matrix.shape
    augmented = np.hstack((matrix, field(rhs).reshape(rows, 1)))
    reduced, _, pivots = rref(augmented)

    if cols in pivots:
        raise ValueError("Inconsistent linear system over the prime field.")

    solution = field.Zeros(cols)
    for row, pivot in enumerate(pivots):
        solution[pivot] = reduced[row, cols]
    return solution


def inner_product(x: galois.FieldArray, y: galois.FieldArray):
    """Standard inner product sum_i x_i y_i computed in F_q."""
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if type(x) is not type(y):
        raise ValueError(f"vectors live in different fields: {type(x).name} and {type(y).name}")
    return x @ y


def character(y: galois.FieldArray, x: galois.FieldArray) -> complex:
    """Additive character chi_y(x) = exp(2 i pi (x . y) / q) of F_q^n."""
    field = field_of(y)
    product = int(inner_product(x, y))
    return complex(np.exp(2j * np.pi * product / field.order))


# mixed-radix bijection F_q^n <-> [0, q^n), first coordinate most significant

def all_vectors(q: int, n: int) -> np.ndarray:
    """Every vector of F_q^n as rows of an integer array, in index order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)


def vector_index(v, q: int) -> int:
    index = 0
    for digit in np.asarray(v, dtype=np.int64):
        index = index * q + int(digit)
    return index


def index_vector(index: int, q: int, n: int) -> np.ndarray:
    digits = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        index, digits[i] = divmod(index, q)
    return digits


def vectors_to_indices(vectors: np.ndarray, q: int) -> np.ndarray:
    """Vectorised ``vector_index`` over the rows of an integer array."""
    vectors = np.asarray(vectors, dtype=np.int64)
    n = vectors.shape[-1]
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return vectors @ powers


def weights_table(q: int, n: int) -> np.ndarray:
    """Hamming weight of every basis index of F_q^n."""
    return np.count_nonzero(all_vectors(q, n), axis=1)


def _pairwise_index_table(q: int, n: int, op) -> np.ndarray:
    """table[a, b] = index of op(vec a, vec b) mod q, built one coordinate at a time."""
    vectors = all_vectors(q, n)
    table = np.zeros((q ** n, q ** n), dtype=np.int64)
    for i in range(n):
        table = table * q + op(vectors[:, None, i], vectors[None, :, i]) % q
    return table


def addition_table(q: int, n: int) -> np.ndarray:
    """table[a, b] = index of a + b."""
    return _pairwise_index_table(q, n, np.add)


def subtraction_table(q: int, n: int) -> np.ndarray:
    """table[a, b] = index of a - b."""
    return _pairwise_index_table(q, n, np.subtract)
