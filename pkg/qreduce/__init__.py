"""Desk-scale laboratory for the quantum reduction from short dual codewords to decoding.

Exact finite-field linear algebra, random linear codes and decoders, Krawtchouk
polynomials, the closed-form parameter maps of the reduction, a dense
statevector simulator of the whole pipeline, and executable checks of the
inequalities the reduction rests on.
"""

from .fields import ExtensionFieldError, prime_field, rref, kernel_basis, inner_product, character
from .codes import (
    LinearCode, WeightDistribution, DecodingInstance,
    DecoderOracle, ExhaustiveDecoder, UnreliableDecoder, ConstantDecoder, make_decoder,
    sample_code_G_model, sample_code_H_model, weight_distribution, gv_distance, gv_distance_plus,
    empirical_epsilon, joint_epsilon, verify_scp_solution
)
from .kravchuk import KrawtchoukContext, RootList, EmptyBracketError
from .analytic import (
    ParamPoint, BernoulliProfile, entropy, entropy_inverse, tau_perp, omega_easy, usefulness_scan,
    bernoulli_dual, bernoulli_obstruction, gv_lemma_exponent
)
from .quantum import (
    StateVector, RadialErrorDistribution, AmplificationPlan, UnitaryBuilder,
    qft_register, dual_profile, trace_distance, stat_distance, hellinger,
    measure_weight_distribution, amplify
)
from .reduction import (
    ReductionParams, PipelineTranscript, AssumptionReport, PRESETS,
    build_ideal_state, run_pipeline, select_u, preset
)
from .verifiers import VerificationReport, VERIFIERS, run_verifier
from .parameters import BudgetExceededError
from .streams import Stream


__all__ = [
    'ExtensionFieldError', 'prime_field', 'rref', 'kernel_basis', 'inner_product', 'character',
    'LinearCode', 'WeightDistribution', 'DecodingInstance',
    'DecoderOracle', 'ExhaustiveDecoder', 'UnreliableDecoder', 'ConstantDecoder', 'make_decoder',
    'sample_code_G_model', 'sample_code_H_model', 'weight_distribution', 'gv_distance', 'gv_distance_plus',
    'empirical_epsilon', 'joint_epsilon', 'verify_scp_solution',
    'KrawtchoukContext', 'RootList', 'EmptyBracketError',
    'ParamPoint', 'BernoulliProfile', 'entropy', 'entropy_inverse', 'tau_perp', 'omega_easy',
    'usefulness_scan', 'bernoulli_dual', 'bernoulli_obstruction', 'gv_lemma_exponent',
    'StateVector', 'RadialErrorDistribution', 'AmplificationPlan', 'UnitaryBuilder',
    'qft_register', 'dual_profile', 'trace_distance', 'stat_distance', 'hellinger',
    'measure_weight_distribution', 'amplify',
    'ReductionParams', 'PipelineTranscript', 'AssumptionReport', 'PRESETS',
    'build_ideal_state', 'run_pipeline', 'select_u', 'preset',
    'VerificationReport', 'VERIFIERS', 'run_verifier',
    'BudgetExceededError',
    'Stream',
]
