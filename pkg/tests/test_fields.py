import cmath

import numpy as np
import galois
import pytest

from qreduce.fields import (
    ExtensionFieldError, prime_field, field_of, vector, hamming_weight, rref, rank, kernel_basis,
    solve, inner_product, character, all_vectors, vector_index, index_vector, vectors_to_indices,
    weights_table, addition_table, subtraction_table
)


def test_prime_field():
    assert prime_field(5).order == 5
    assert prime_field(5) is prime_field(5)


@pytest.mark.parametrize('q', [4, 8, 9])
def test_prime_field_rejects_prime_powers(q):
    with pytest.raises(ExtensionFieldError, match='extension fields unsupported'):
        prime_field(q)


def test_prime_field_rejects_small_orders():
    with pytest.raises(ValueError):
        prime_field(1)


def test_field_of_rejects_extension_fields():
    with pytest.raises(ExtensionFieldError):
        field_of(galois.GF(4)([1, 2, 3]))


def test_vector_reduces_entries():
    v = vector(3, [4, -1, 0])
    assert v.tolist() == [1, 2, 0]


def test_hamming_weight():
    assert hamming_weight([0, 1, 2, 0]) == 2
    assert hamming_weight(vector(3, [0, 0, 0])) == 0


def test_rref():
    reduced, r, pivots = rref(vector(2, [[1, 1, 0], [0, 1, 1]]))
    assert reduced.tolist() == [[1, 0, 1], [0, 1, 1]]
    assert r == 2
    assert pivots == [0, 1]


def test_rref_zero_matrix():
    _, r, pivots = rref(prime_field(3).Zeros((2, 3)))
    assert r == 0
    assert pivots == []


def test_rref_rejects_empty_matrix():
    with pytest.raises(ValueError):
        rref(prime_field(2).Zeros((0, 3)))


@pytest.mark.parametrize('q', [2, 3, 5])
@pytest.mark.parametrize('shape', [(2, 4), (3, 3), (4, 6)])
def test_rref_is_idempotent(q, shape):
    rng = np.random.default_rng(q)
    for _ in range(10):
        reduced, r, pivots = rref(vector(q, rng.integers(0, q, size=shape)))
        again, r_again, pivots_again = rref(reduced)
        assert np.array_equal(again, reduced)
        assert (r_again, pivots_again) == (r, pivots)


def test_rank_dependent_rows():
    assert rank(vector(3, [[1, 2, 0], [2, 1, 0], [0, 0, 1]])) == 2


@pytest.mark.parametrize('q, rows', [
    (2, [[1, 1, 1]]),
    (3, [[1, 2, 0, 1], [0, 1, 1, 2]]),
    (5, [[1, 2, 3, 4, 0]]),
])
def test_kernel_basis(q, rows):
    matrix = vector(q, rows)
    basis = kernel_basis(matrix)
    assert basis.shape == (matrix.shape[1] - rank(matrix), matrix.shape[1])
    assert not np.any(matrix @ basis.T)
    assert rank(basis) == basis.shape[0]


def test_kernel_basis_full_rank_square():
    basis = kernel_basis(prime_field(3).Identity(3))
    assert basis.shape == (0, 3)


def test_kernel_basis_of_no_rows_is_whole_space():
    basis = kernel_basis(prime_field(2).Zeros((0, 3)))
    assert basis.tolist() == np.eye(3, dtype=int).tolist()


def test_solve():
    matrix = vector(2, [[1, 1, 0], [0, 1, 1]])
    rhs = vector(2, [1, 0])
    x = solve(matrix, rhs)
    assert (matrix @ x).tolist() == [1, 0]


def test_solve_inconsistent():
    with pytest.raises(ValueError, match='Inconsistent'):
        solve(vector(2, [[1, 1], [1, 1]]), vector(2, [0, 1]))


def test_inner_product():
    assert int(inner_product(vector(3, [1, 2, 0]), vector(3, [2, 2, 1]))) == 0
    assert int(inner_product(vector(5, [1, 2]), vector(5, [3, 4]))) == 1


def test_inner_product_length_mismatch():
    with pytest.raises(ValueError):
        inner_product(vector(2, [1, 0]), vector(2, [1, 0, 1]))


def test_character():
    assert character(vector(2, [1]), vector(2, [1])) == pytest.approx(-1)
    assert character(vector(3, [1]), vector(3, [1])) == pytest.approx(cmath.exp(2j * cmath.pi / 3))
    assert character(vector(3, [0, 0]), vector(3, [1, 2])) == pytest.approx(1)


@pytest.mark.parametrize('q, n', [(2, 3), (3, 2), (5, 1)])
def test_character_is_multiplicative(q, n):
    vectors = prime_field(q)(all_vectors(q, n))
    for y in vectors:
        for a in vectors:
            for b in vectors:
                assert character(y, a + b) == pytest.approx(character(y, a) * character(y, b))


@pytest.mark.parametrize('q, n', [(2, 1), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_character_orthogonality(q, n):
    vectors = prime_field(q)(all_vectors(q, n))
    for y in vectors:
        total = sum(character(y, x) for x in vectors)
        expected = q ** n if hamming_weight(y) == 0 else 0
        assert total == pytest.approx(expected, abs=1e-9)


def test_mixed_radix_bijection():
    assert index_vector(5, 2, 3).tolist() == [1, 0, 1]
    assert vector_index([1, 0, 1], 2) == 5
    assert index_vector(7, 3, 2).tolist() == [2, 1]
    assert vectors_to_indices(all_vectors(3, 2), 3).tolist() == list(range(9))


def test_all_vectors_order():
    assert all_vectors(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_weights_table():
    assert weights_table(2, 2).tolist() == [0, 1, 1, 2]
    assert weights_table(3, 1).tolist() == [0, 1, 1]


def test_addition_table():
    table = addition_table(3, 2)
    # [1, 2] + [2, 2] = [0, 1]
    assert table[5, 8] == 1
    assert addition_table(3, 1)[2, 2] == 1


def test_subtraction_table():
    table = subtraction_table(2, 2)
    assert np.all(np.diag(table) == 0)
    # over F_2 subtraction is addition
    assert np.array_equal(table, addition_table(2, 2))
    # [0, 1] - [0, 2] = [0, 2] over F_3
    assert subtraction_table(3, 2)[1, 2] == 2
