import numpy as np
import pytest

from qreduce.codes import ConstantDecoder, ExhaustiveDecoder, UnreliableDecoder, sample_code_G_model
from qreduce.fields import ExtensionFieldError
from qreduce.parameters import BudgetExceededError
from qreduce.quantum import RadialErrorDistribution, StateVector
from qreduce.reduction import (
    STRICT, PRESETS, ReductionParams, PipelineBuilder, PipelineTranscript, preset, select_u,
    build_ideal_state, collision_sum, lemma_measure_prediction, run_pipeline, theorem_bound
)
from qreduce.rng import task_rng


@pytest.fixture
def sphere3():
    return RadialErrorDistribution.sphere(2, 3, 1)


def test_params_validation():
    with pytest.raises(ValueError):
        ReductionParams(2, 3, 4, 1)
    with pytest.raises(ValueError):
        ReductionParams(2, 3, 1, 1, bogus=1)
    with pytest.raises(ValueError):
        ReductionParams(2, 3, 1, 1, coin_bits=5)
    with pytest.raises(ValueError):
        ReductionParams(2, 3, 1, 1, decoder='magic')
    with pytest.raises(ExtensionFieldError):
        ReductionParams(4, 3, 1, 1)


def test_strict_mode_rejects_tiny_codes():
    # floor(0.9 d_GV) = 0 for the repetition code
    with pytest.raises(ValueError, match='strict'):
        ReductionParams(2, 3, 1, 1, mode=STRICT)


def test_strict_mode_accepts_theorem_range():
    params = ReductionParams(2, 20, 4, 2, mode=STRICT)
    assert params.t_max() >= 2


def test_params_round_trip():
    params = ReductionParams(2, 6, 3, 1, coin_bits=1, decoder='unreliable:0.5')
    assert ReductionParams.from_dict(params.to_dict()) == params


def test_preset(repetition3):
    params, code = preset('repetition3')
    assert (params.q, params.n, params.k, params.t) == (2, 3, 1, 1)
    assert code == repetition3
    params, code = preset('repetition3', shots=10, t=0)
    assert (params.shots, params.t) == (10, 0)
    assert code == repetition3


def test_preset_without_fixed_code():
    _, code = preset('small-random')
    assert code is None
    _, code = preset('repetition3', n=4)
    assert code is None
    with pytest.raises(ValueError):
        preset('hamming7')
    assert set(PRESETS) == {'repetition3', 'small-random', 'ternary'}


def test_select_u_without_code():
    u, report = select_u(2, 4, 2, 1)
    # S_3 K_1(3)^2 = S_4 K_1(4)^2, ties go to the smaller weight
    assert u == 3
    assert report.u == 3


def test_select_u_with_dual_weights(repetition3):
    u, report = select_u(2, 3, 1, 1, repetition3.dual().weight_distribution())
    assert u == 2
    assert report.mass == pytest.approx(3 / 24)
    assert report.threshold == pytest.approx(1 / 243)


def test_select_u_strict_failure():
    # q^k exceeds S_3 = 4
    with pytest.raises(ValueError, match="assumptions"):
        select_u(2, 4, 3, 1, strict=True)


def test_select_u_strict_success(repetition3):
    u, report = select_u(2, 3, 1, 1, repetition3.dual().weight_distribution(), strict=True)
    assert report.holds


def test_ideal_state(repetition3, sphere3):
    state, Z, X = build_ideal_state(repetition3, sphere3)
    assert Z == pytest.approx(2)
    assert X == pytest.approx(0)
    assert collision_sum(repetition3, sphere3) == pytest.approx(X)
    assert state.marginal('e')[0] == pytest.approx(1)
    # the word register is uniform on the six words at distance 1 from the code
    assert np.allclose(state.marginal('y'), [0, 1, 1, 1, 1, 1, 1, 0] / np.float64(6))


def test_collision_sum_matches_Z():
    code = sample_code_G_model(2, 5, 2, task_rng(11))
    dist = RadialErrorDistribution.sphere(2, 5, 2)
    _, Z, X = build_ideal_state(code, dist)
    assert X == pytest.approx(collision_sum(code, dist))


def test_lemma_measure_prediction(repetition3, sphere3):
    _, Z, _ = build_ideal_state(repetition3, sphere3)
    predicted = lemma_measure_prediction(repetition3, sphere3, Z)
    assert np.allclose(predicted, [0.75, 0, 0.25, 0])


def test_pipeline_builder_is_unitary(repetition3, sphere3):
    builder = PipelineBuilder(repetition3, sphere3, UnreliableDecoder(1, 0.5), 2)
    rng = task_rng(2)
    amplitudes = rng.normal(size=(8, 8, 2)) + 0j
    state = StateVector(amplitudes / np.linalg.norm(amplitudes), builder.registers, 2, 3)
    image = builder.forward(state)
    assert image.is_normalized()
    assert np.allclose(builder.inverse(image).amplitudes, state.amplitudes)


def test_pipeline_builder_prepares_psi0(repetition3, sphere3):
    builder = PipelineBuilder(repetition3, sphere3, ExhaustiveDecoder(1), 2)
    prepared = builder.prepare(builder.initial_state())
    assert np.allclose(prepared.amplitudes, builder.prepared)


def test_pipeline_builder_budget(repetition3, sphere3):
    with pytest.raises(BudgetExceededError):
        PipelineBuilder(repetition3, sphere3, ExhaustiveDecoder(1), 2, budget=10)


def test_repetition_pipeline(repetition3):
    params, code = preset('repetition3', shots=200)
    transcript = run_pipeline(params, code=code)
    assert transcript.u == 2
    assert transcript.Z == pytest.approx(2)
    assert transcript.epsilon_G == 1.0
    assert transcript.trace_distance == pytest.approx(0, abs=1e-7)
    assert transcript.trace_distance_bound == pytest.approx(0, abs=1e-7)
    assert np.allclose(transcript.weights_before, [0.75, 0, 0.25, 0])
    assert transcript.q_est == pytest.approx(0.25)
    assert (transcript.iterations, transcript.alpha) == (1, pytest.approx(1))
    assert transcript.weights_after[2] == pytest.approx(1)
    assert transcript.success_rate == 1.0
    assert transcript.zero_forcing_weight == 2
    assert transcript.verify_samples()


def test_pipeline_without_amplification(repetition3):
    params = ReductionParams(2, 3, 1, 1, amplify=False, shots=100)
    transcript = run_pipeline(params, code=repetition3)
    assert transcript.q_est is None
    assert transcript.iterations == 0
    assert transcript.weights_after == transcript.weights_before


def test_pipeline_analytic_estimate(repetition3):
    params = ReductionParams(2, 3, 1, 1, estimate='analytic', shots=0)
    transcript = run_pipeline(params, code=repetition3)
    assert transcript.q_est == pytest.approx(0.125)


def test_estimate_and_delta_defaults(repetition3):
    params = ReductionParams(2, 3, 1, 1, shots=0)
    assert (params.estimate, params.delta) == ('exact', 0.1)
    with pytest.raises(ValueError):
        ReductionParams(2, 3, 1, 1, delta=1.5)
    with pytest.raises(ValueError):
        ReductionParams(2, 3, 1, 1, estimate='sampled')
    # the exact estimate is the predicted weight-u probability before amplification
    transcript = run_pipeline(params, code=repetition3)
    assert transcript.q_est == pytest.approx(transcript.weights_before[transcript.u])


def test_pipeline_no_shots(repetition3):
    params = ReductionParams(2, 3, 1, 1, shots=0)
    transcript = run_pipeline(params, code=repetition3)
    assert transcript.samples == []
    assert transcript.success_rate is None


def test_constant_decoder_is_far_from_ideal(repetition3):
    params = ReductionParams(2, 3, 1, 1, shots=0)
    transcript = run_pipeline(params, oracle=ConstantDecoder(1), code=repetition3)
    assert transcript.epsilon_G == 0
    assert transcript.trace_distance == pytest.approx(1)
    assert transcript.trace_distance_bound == pytest.approx(1)


@pytest.mark.parametrize('decoder', ['exhaustive', 'unreliable:0.5', 'constant'])
def test_decoded_state_within_bound(decoder):
    params, _ = preset('small-random', decoder=decoder, shots=50, seed=4)
    transcript = run_pipeline(params)
    assert transcript.trace_distance <= transcript.trace_distance_bound + 1e-9
    assert transcript.verify_samples()


def test_pipeline_is_deterministic():
    params, _ = preset('small-random', shots=100, seed=7)
    assert run_pipeline(params).to_dict() == run_pipeline(params).to_dict()


def test_pipeline_code_mismatch(repetition3):
    with pytest.raises(ValueError):
        run_pipeline(ReductionParams(2, 4, 1, 1), code=repetition3)


def test_pipeline_budget(repetition3):
    params, code = preset('repetition3')
    with pytest.raises(BudgetExceededError) as info:
        run_pipeline(params, code=code, budget=10)
    assert info.value.dimension == 'statevector'


def test_transcript_rejects_unknown_fields():
    with pytest.raises(ValueError):
        PipelineTranscript(q=2, colour='blue')


def test_transcript_document(repetition3):
    params = ReductionParams(2, 3, 1, 1, shots=10)
    document = run_pipeline(params, code=repetition3).to_dict()
    assert document['schema_version'] == 1
    assert document['code']['dual_weights'] == [1, 0, 3, 0]
    assert document['params']['decoder'] == 'exhaustive'
    assert sum(sample['count'] for sample in document['samples']) == 10


def test_theorem_bound():
    assert theorem_bound(1.0, 1.0) == pytest.approx(1 / 16)
    assert theorem_bound(0.5, 0.5) == pytest.approx(0.25 * 0.125 / 16)
