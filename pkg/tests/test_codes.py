from fractions import Fraction

import numpy as np
import pytest

from qreduce.codes import (
    LinearCode, WeightDistribution, DecodingInstance, ExhaustiveDecoder, UnreliableDecoder, ConstantDecoder,
    make_decoder, sphere_size, ball_size, gv_distance, gv_distance_plus, sphere_vectors, sample_sphere,
    sample_code_G_model, sample_code_H_model, sample_decoding_instance, rank_deficiency_rate,
    weight_distribution, empirical_epsilon, joint_epsilon, verify_scp_solution, zero_forcing_codeword,
    canonical_form, iter_matrices
)
from qreduce.fields import prime_field
from qreduce.parameters import BudgetExceededError
from qreduce.rng import task_rng


def test_sphere_and_ball_sizes():
    assert sphere_size(2, 3, 1) == 3
    assert sphere_size(3, 4, 2) == 24
    assert sphere_size(2, 3, 4) == 0
    assert ball_size(2, 10, 1) == 11
    assert ball_size(2, 5, 5) == 32


def test_gv_distance():
    assert gv_distance(2, 10, 5) == 1
    assert gv_distance(2, 5, 0) == 5
    assert gv_distance(3, 4, 0) == 4
    assert gv_distance(2, 5, 5) == 0


def test_gv_distance_rejects_k_above_n():
    with pytest.raises(ValueError):
        gv_distance(2, 5, 6)


def test_gv_distance_plus():
    # largest t with C(10, t) >= 32
    assert gv_distance_plus(2, 10, 5) == 8
    assert gv_distance_plus(2, 4, 0) == 4
    assert gv_distance_plus(2, 4, 4) == -1


def test_sphere_vectors():
    vectors = sphere_vectors(3, 3, 2)
    assert vectors.shape == (sphere_size(3, 3, 2), 3)
    assert np.all(np.count_nonzero(vectors, axis=1) == 2)
    assert len({tuple(v) for v in vectors}) == len(vectors)


def test_sample_sphere():
    rng = task_rng(1)
    for _ in range(20):
        e = sample_sphere(5, 7, 3, rng)
        assert np.count_nonzero(e) == 3
        assert e.max() < 5


def test_repetition_code(repetition3):
    assert (repetition3.q, repetition3.n, repetition3.k) == (2, 3, 1)
    assert repetition3.codewords().tolist() == [[0, 0, 0], [1, 1, 1]]
    assert repetition3.weight_distribution() == [1, 0, 0, 1]
    assert repetition3.dual().weight_distribution() == [1, 0, 3, 0]
    assert repetition3.min_distance() == 3
    assert repetition3.unique_decoding_radius() == 1
    assert repetition3.contains([1, 1, 1])
    assert not repetition3.contains([1, 0, 0])


def test_parity_check_annihilates_generator():
    code = sample_code_G_model(3, 5, 2, task_rng(4))
    assert code.parity_check.shape == (3, 5)
    assert not np.any(code.generator @ code.parity_check.T)
    assert all(code.contains(word) for word in code.codewords())


def test_codewords_sorted():
    code = sample_code_G_model(2, 6, 3, task_rng(0))
    words = code.codewords()
    assert len(words) == 8
    assert [tuple(w) for w in words] == sorted(tuple(w) for w in words)


def test_codewords_budget(repetition3):
    with pytest.raises(BudgetExceededError) as info:
        repetition3.codewords(budget=1)
    assert info.value.dimension == 'codeword enumeration'


def test_from_generator_rejects_rank_deficiency():
    with pytest.raises(ValueError, match='rank'):
        LinearCode.from_rows(2, [[1, 1, 0], [1, 1, 0]])


def test_json_round_trip():
    code = sample_code_G_model(3, 4, 2, task_rng(2))
    assert LinearCode.from_json(code.to_json()) == code


def test_weight_distribution_as_series(repetition3):
    series = weight_distribution(repetition3.dual()).as_series()
    assert series.sum() == 4
    assert series.index.name == 'weight'


def test_weight_distribution_equality():
    assert WeightDistribution([1, 0, 3]) == WeightDistribution([1, 0, 3])
    assert WeightDistribution([1, 0, 3]).n == 2
    assert WeightDistribution([1, 0, 3]).total == 4


def test_g_model_is_reproducible():
    a = sample_code_G_model(2, 6, 3, task_rng(7, 1))
    b = sample_code_G_model(2, 6, 3, task_rng(7, 1))
    assert a == b
    assert a.k == 3


def test_g_model_dimension_range():
    with pytest.raises(ValueError):
        sample_code_G_model(2, 4, 0, task_rng(0))
    with pytest.raises(ValueError):
        sample_code_G_model(2, 4, 4, task_rng(0))


def test_h_model():
    code = sample_code_H_model(2, 6, 3, task_rng(3))
    assert code.k == 3
    assert code.parity_check.shape == (3, 6)
    assert sample_code_H_model(2, 4, 0, task_rng(3)).k == 0


def test_rank_deficiency_rate():
    # a single row is deficient iff it is zero
    assert rank_deficiency_rate(2, 3, 1, 2000, task_rng(5)) == pytest.approx(1 / 8, abs=0.04)


def test_exhaustive_decoder(repetition3):
    decoder = ExhaustiveDecoder(1)
    assert decoder.decode(repetition3, [1, 1, 0]).tolist() == [0, 0, 1]
    assert decoder.decode(repetition3, [1, 1, 1]).tolist() == [0, 0, 0]
    assert decoder.decode(repetition3, [0, 1, 0]).tolist() == [0, 1, 0]


def test_exhaustive_decoder_ties_go_to_smallest_codeword():
    code = LinearCode.from_rows(2, [[1, 1, 0, 0], [0, 0, 1, 1]])
    # 0000 and 1100 are both at distance 1
    assert ExhaustiveDecoder(1).decode(code, [1, 0, 0, 0]).tolist() == [1, 0, 0, 0]


def test_exhaustive_decoder_failure_is_zero_error(repetition3):
    assert ExhaustiveDecoder(0).decode(repetition3, [1, 0, 0]).tolist() == [0, 0, 0]


def test_decode_rejects_bad_input(repetition3):
    with pytest.raises(ValueError):
        ExhaustiveDecoder(1).decode(repetition3, [1, 0])
    with pytest.raises(ValueError):
        ExhaustiveDecoder(1, coin_bits=1).decode(repetition3, [1, 0, 0], coins=2)


def test_decode_table(repetition3):
    table = ExhaustiveDecoder(1).decode_table(repetition3)
    assert table.shape == (8, 3)
    assert table[6].tolist() == [0, 0, 1]


def test_unreliable_decoder_gate():
    decoder = UnreliableDecoder(1, 0.3)
    assert decoder.gate_bits == 2
    assert decoder.coin_bits == 2
    assert decoder.effective_epsilon == Fraction(1, 4)


def test_unreliable_decoder_needs_coins():
    with pytest.raises(ValueError):
        UnreliableDecoder(1, 0.25, coin_bits=1)
    with pytest.raises(ValueError):
        UnreliableDecoder(1, 0.0)


def test_unreliable_decoder_answers_on_zero_coins(repetition3):
    decoder = UnreliableDecoder(1, 0.5, coin_bits=2)
    # the first coin bit is the most significant one
    assert decoder.decode(repetition3, [1, 1, 0], coins=1).tolist() == [0, 0, 1]
    assert decoder.decode(repetition3, [1, 1, 0], coins=2).tolist() == [0, 0, 0]


def test_make_decoder():
    assert isinstance(make_decoder('exhaustive', 1), ExhaustiveDecoder)
    assert isinstance(make_decoder('constant', 1), ConstantDecoder)
    unreliable = make_decoder('unreliable:0.5', 1)
    assert isinstance(unreliable, UnreliableDecoder)
    assert unreliable.coin_bits == 1
    assert unreliable.describe() == 'unreliable:0.5'


@pytest.mark.parametrize('description', ['bogus', 'unreliable:x', 'exhaustive:2'])
def test_make_decoder_rejects_unknown(description):
    with pytest.raises(ValueError):
        make_decoder(description, 1)


def test_empirical_epsilon(repetition3):
    assert empirical_epsilon(ExhaustiveDecoder(1), repetition3) == 1
    assert empirical_epsilon(UnreliableDecoder(1, 0.25), repetition3) == Fraction(1, 4)
    assert empirical_epsilon(ConstantDecoder(1), repetition3) == 0


def test_empirical_epsilon_beyond_unique_decoding():
    code = LinearCode.from_rows(2, [[1, 1, 0]])
    # 010 and 100 are at distance 1 from both codewords, ties go to 000
    assert empirical_epsilon(ExhaustiveDecoder(1), code) == Fraction(2, 3)


def test_empirical_epsilon_monte_carlo_fallback(repetition3):
    estimate = empirical_epsilon(ExhaustiveDecoder(1), repetition3, budget=2, rng=task_rng(0), samples=200)
    assert not estimate.exact
    assert float(estimate) == 1.0


def test_joint_epsilon():
    assert joint_epsilon(ExhaustiveDecoder(0), 2, 3, 1, 0, codes=5, seed=0) == 1.0


def test_sample_decoding_instance(repetition3):
    instance = sample_decoding_instance(repetition3, 1, task_rng(0))
    assert isinstance(instance, DecodingInstance)
    assert np.count_nonzero(instance.planted_error) == 1
    assert repetition3.contains((instance.received - instance.planted_error) % 2)


def test_decoding_instance_checks_planted_error(repetition3):
    with pytest.raises(ValueError):
        DecodingInstance(repetition3, [1, 0, 0], [0, 1, 0])


def test_verify_scp_solution(repetition3):
    # codewords of the dual: its parity-check matrix is the generator of the code
    dual_check = repetition3.generator
    assert verify_scp_solution(dual_check, [1, 1, 0], 2)
    assert not verify_scp_solution(dual_check, [1, 1, 0], 1)
    assert not verify_scp_solution(dual_check, [1, 0, 0], 3)
    assert not verify_scp_solution(dual_check, [0, 0, 0], 3)


def test_zero_forcing_codeword(repetition3):
    dual = repetition3.dual()
    rng = task_rng(9)
    for _ in range(5):
        word = zero_forcing_codeword(dual, rng)
        assert dual.contains(word)
        assert np.count_nonzero(word) > 0


def test_canonical_form_identifies_subspaces():
    a = LinearCode.from_rows(2, [[1, 1, 0], [0, 1, 1]])
    b = LinearCode.from_rows(2, [[1, 0, 1], [0, 1, 1]])
    c = LinearCode.from_rows(2, [[1, 0, 0], [0, 1, 1]])
    assert canonical_form(a) == canonical_form(b)
    assert canonical_form(a) != canonical_form(c)


def test_iter_matrices():
    matrices = list(iter_matrices(2, 1, 2))
    assert len(matrices) == 4
    assert matrices[-1].tolist() == [[1, 1]]
    assert prime_field(3)(next(iter_matrices(3, 2, 2))).shape == (2, 2)
