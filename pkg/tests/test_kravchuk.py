from fractions import Fraction

import pytest

from qreduce.kravchuk import KrawtchoukContext, RootList


@pytest.fixture
def binary4():
    return KrawtchoukContext(2, 4)


def test_rows(binary4):
    assert binary4.row(0) == (1, 1, 1, 1, 1)
    assert binary4.row(1) == (4, 2, 0, -2, -4)
    assert binary4.row(2) == (6, 0, -2, 0, 6)
    assert binary4.eval(1, 3) == -2


def test_rows_reject_out_of_range(binary4):
    with pytest.raises(ValueError):
        binary4.row(5)
    with pytest.raises(ValueError):
        binary4.eval(1, -1)


@pytest.mark.parametrize('q, n', [(2, 7), (3, 5), (5, 4)])
def test_degree_recurrence_matches_sum(q, n):
    context = KrawtchoukContext(q, n)
    table = context.degree_recurrence_table()
    assert [tuple(row) for row in table] == [context.row(t) for t in range(n + 1)]


@pytest.mark.parametrize('q, n', [(2, 6), (3, 5)])
def test_recurrence_in_x(q, n):
    context = KrawtchoukContext(q, n)
    for t in range(n + 1):
        for x in range(1, n):
            assert context.recurrence_residual(t, x) == 0


@pytest.mark.parametrize('q, n', [(2, 5), (3, 4)])
def test_orthogonality(q, n):
    context = KrawtchoukContext(q, n)
    for s in range(n + 1):
        for t in range(n + 1):
            expected = context.norm(t) if s == t else 0
            assert context.orthogonality_check(s, t) == expected


def test_measure_sums_to_one():
    context = KrawtchoukContext(3, 5)
    assert sum(context.measure(j) for j in range(6)) == 1


def test_evaluate_real(binary4):
    assert binary4.evaluate_real(1, Fraction(1, 2)) == 3
    assert binary4.evaluate_real(0, Fraction(7, 3)) == 1
    for x in range(5):
        assert binary4.evaluate_real(2, x) == binary4.eval(2, x)


def test_integer_roots(binary4):
    roots = binary4.roots(2)
    assert roots.roots == (1.0, 3.0)
    assert roots.residuals == (0.0, 0.0)
    assert roots.min_gap() == 2
    assert binary4.first_root(1) == 2.0


@pytest.mark.parametrize('t, expected', [(10, 26.495), (25, 11.017), (40, 3.442)])
def test_first_root_binary_100(t, expected):
    assert KrawtchoukContext(2, 100).first_root(t) == pytest.approx(expected, abs=0.01)


def test_roots_are_refined():
    context = KrawtchoukContext(2, 5)
    roots = context.roots(2)
    assert len(roots) == 2
    for root, residual in zip(roots, roots.residuals):
        assert residual <= 1e-9
        assert abs(float(context.evaluate_real(2, Fraction(root)))) < 1e-6


def test_roots_reject_large_degree(binary4):
    with pytest.raises(ValueError):
        binary4.roots(3)
    with pytest.raises(ValueError):
        binary4.roots(0)


@pytest.mark.parametrize('q, n', [(2, 12), (3, 9), (5, 10)])
def test_root_count_and_spacing(q, n):
    context = KrawtchoukContext(q, n)
    for t in range(1, n // q + 1):
        roots = context.roots(t)
        assert len(roots) == t
        assert all(0 < r < n for r in roots)
        assert context.root_spacing_certificate(t)


def test_root_list_rejects_overlap():
    with pytest.raises(ValueError):
        RootList(2, [(Fraction(1), Fraction(3)), (Fraction(2), Fraction(4))])


def test_krasikov_coefficients(binary4):
    b, c = binary4.krasikov_coefficients(1, 1)
    assert (b, c) == (Fraction(2, 3), Fraction(1, 3))
    # K_1(2) = b K_1(1) - c K_1(0)
    assert b * binary4.eval(1, 1) - c * binary4.eval(1, 0) == binary4.eval(1, 2)
    with pytest.raises(ValueError):
        binary4.krasikov_coefficients(1, 4)


def test_krasikov_positive(binary4):
    assert binary4.krasikov_positive(1)
    # b vanishes identically at t = n / 2
    assert not binary4.krasikov_positive(2)
    assert KrawtchoukContext(3, 9).krasikov_positive(3)


def test_mass_between_roots(binary4):
    # (x_1, n] = (2, 4], ties go to the smaller u
    assert binary4.mass_between_roots(1) == (3, Fraction(1, 4))
    assert binary4.bracket_integers(2) == [2]
    assert binary4.bracket_integers(1) == [3, 4]


@pytest.mark.parametrize('q, n, expected', [(2, 4, [3, 4]), (2, 7, [4, 5, 6, 7]), (3, 6, [5, 6])])
def test_bracket_for_degree_one_includes_n(q, n, expected):
    # K_1 is linear, its only root leaves the half-open interval (x_1, n]
    context = KrawtchoukContext(q, n)
    candidates = context.bracket_integers(1)
    assert candidates == expected
    assert candidates[-1] == n
    assert context.mass_between_roots(1)[0] in candidates


def test_mass_above_threshold():
    context = KrawtchoukContext(2, 12)
    for t in range(1, 7):
        for k in range(max(t - 1, 1)):
            _, mass = context.mass_between_roots(t, k)
            assert mass >= context.mass_threshold()


def test_bracket_index_range(binary4):
    with pytest.raises(ValueError):
        binary4.bracket_integers(2, 1)


def test_ratio_bound():
    context = KrawtchoukContext(3, 6)
    assert context.ratio_bound() == 12
    for j in range(6):
        ratio = context.measure(j) / context.measure(j + 1)
        assert Fraction(1, context.ratio_bound()) <= ratio <= context.ratio_bound()


def test_report(binary4):
    frame = binary4.report().to_frame()
    assert list(frame.columns) == ['t', 'root_index', 'root', 'gap', 'u_star', 'mass']
    assert len(frame) == 3
    assert frame['root'].tolist() == [2.0, 1.0, 3.0]


def test_report_rejects_t_max(binary4):
    with pytest.raises(ValueError):
        binary4.report(3)
