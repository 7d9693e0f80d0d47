"""End-to-end simulation of the quantum reduction from short dual codewords to decoding.

    prepare   sum_e pi_e |e> (x) q^(-k/2) sum_c |c> (x) 2^(-l/2) sum_w |w>
    add       |e>|c>|w>     -> |e>|c + e>|w>
    decode    |e>|y>|w>     -> |e - A(G, y, w)>|y>|w>
    QFT       on the word register
    amplify   toward dual words of weight u (optional)
    measure   the word register, shots times
"""

import math

import numpy as np
import pandas as pd
from IPython.display import display

from typing import Any, Dict, List, Optional, Tuple

from .analytic import hard_band, tau_perp
from .codes import (
    LinearCode, DecoderOracle, WeightDistribution, make_decoder, sample_code_G_model,
    sphere_size, gv_distance, empirical_epsilon, weight_distribution, zero_forcing_codeword
)
from .fields import addition_table, subtraction_table, weights_table, index_vector, prime_field
from .kravchuk import KrawtchoukContext
from .parameters import (
    Configurable, IntParameter, OptionalIntParameter, FloatParameter, SelectionParameter,
    BooleanParameter, PatternParameter, check_budget
)
from .quantum import (
    StateVector, RadialErrorDistribution, UnitaryBuilder, AmplificationPlan,
    pipeline_registers, trace_distance, measure_weight_distribution, amplify, plan_amplification
)
from .rng import task_rng

import logging

_LOGGER = logging.getLogger(__name__)

STRICT = 'strict'
EXPLORATORY = 'exploratory'

SCHEMA_VERSION = 1

DECODER_PATTERN = r'exhaustive|constant|unreliable:[0-9.eE+-]+'

PRESETS: Dict[str, Dict[str, Any]] = {
    'repetition3': {'q': 2, 'n': 3, 'k': 1, 't': 1, 'generator': [[1, 1, 1]]},
    'small-random': {'q': 2, 'n': 6, 'k': 3, 't': 1, 'generator': None},
    'ternary': {'q': 3, 'n': 4, 'k': 2, 't': 1, 'generator': None},
}


class ReductionParams(Configurable):
    """Parameters of one pipeline run."""

    q = IntParameter(min=2)
    n = IntParameter(min=1)
    k = IntParameter(min=0)
    t = IntParameter(min=0)
    coin_bits = IntParameter(min=0, max=4, default=0)
    u = OptionalIntParameter(min=1, default=None)
    decoder = PatternParameter(DECODER_PATTERN, default='exhaustive')
    shots = IntParameter(min=0, default=1000)
    seed = IntParameter(min=0, default=0)
    mode = SelectionParameter((STRICT, EXPLORATORY), default=EXPLORATORY)
    amplify = BooleanParameter(default=True)
    # exact: predicted weight-u probability of the simulated state, analytic: S_u |f_perp(u)|^2
    estimate = SelectionParameter(('exact', 'analytic'), default='exact')
    # amplification tolerance and the (1 - delta) d_GV slack of strict mode
    delta = FloatParameter(min=0.0, max=1.0, default=0.1)

    def __init__(self, q: int, n: int, k: int, t: int, **options):
        self.q = q
        self.n = n
        self.k = k
        self.t = t
        for name, value in options.items():
            if name not in self.parameter_names():
                raise ValueError(f"unknown parameter '{name}' for {self.__class__.__name__}.")
            setattr(self, name, value)

        if self.k > self.n:
            raise ValueError(f"k ({self.k}) must be <= n ({self.n}).")
        if self.t > self.n:
            raise ValueError(f"t ({self.t}) must be <= n ({self.n}).")
        if self.u is not None and self.u > self.n:
            raise ValueError(f"u ({self.u}) must be <= n ({self.n}).")
        prime_field(self.q)

        if self.mode == STRICT:
            self.check_hypotheses()

    def t_max(self) -> int:
        """min(n/q, (1 - delta) d_GV(n, k)), the largest t covered by the theorem."""
        return min(self.n // self.q, math.floor(gv_distance(self.q, self.n, self.k) * (1 - self.delta)))

    def check_hypotheses(self) -> None:
        bound = self.t_max()
        if not 1 <= self.t <= bound:
            raise ValueError(f"t ({self.t}) must be between 1 and {bound} in strict mode.")

    def oracle(self) -> DecoderOracle:
        return make_decoder(self.decoder, self.t, self.coin_bits)

    def required_states(self, coin_bits: Optional[int] = None) -> int:
        """Statevector size q^(2n) 2^l, doubled by the amplification ancilla."""
        coin_bits = self.coin_bits if coin_bits is None else coin_bits
        return self.q ** (2 * self.n) * 2 ** coin_bits * (2 if self.amplify else 1)


def preset(name: str, **overrides) -> Tuple[ReductionParams, Optional[LinearCode]]:
    """Parameters of a named preset and its fixed code, if it has one."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset '{name}': must be one of {sorted(PRESETS)}.")
    original = PRESETS[name]
    values = dict(original)
    generator = values.pop('generator')
    values.update({k: v for k, v in overrides.items() if v is not None})
    params = ReductionParams(**values)
    code = None
    if generator is not None and (params.q, params.n, params.k) == (original['q'], original['n'], original['k']):
        code = LinearCode.from_rows(params.q, generator)
    return params, code


class AssumptionReport:
    """Quantities the theorem asks to be exponentially small or polynomially large."""

    def __init__(self, q: int, n: int, k: int, u: int, overlap_exponent: float,
                 count_exponent: float, mass: float, threshold: float):
        self.q = q
        self.n = n
        self.k = k
        self.u = u
        # log_q(<pi|1>^2 / q^(n-k))
        self.overlap_exponent = overlap_exponent
        # log_q(q^k / S_u)
        self.count_exponent = count_exponent
        # S_u |f_perp(u)|^2
        self.mass = mass
        self.threshold = threshold

    @property
    def holds(self) -> bool:
        return self.overlap_exponent < 0 and self.count_exponent < 0 and self.mass >= self.threshold

    def to_dict(self) -> Dict[str, Any]:
        return {
            'u': self.u,
            'overlap_exponent': self.overlap_exponent,
            'count_exponent': self.count_exponent,
            'mass': self.mass,
            'threshold': self.threshold,
            'holds': self.holds,
        }

    def __repr__(self):
        return f'AssumptionReport({self.to_dict()})'


def assumption_report(dist: RadialErrorDistribution, k: int, u: int) -> AssumptionReport:
    q, n = dist.q, dist.n
    log_q = math.log(q)
    overlap = dist.overlap_with_ones()
    overlap_exponent = (2 * math.log(overlap) / log_q if overlap > 0 else -math.inf) - (n - k)
    count_exponent = k - math.log(sphere_size(q, n, u)) / log_q
    mass = float(sphere_size(q, n, u)) * float(dist.dual_profile()[u]) ** 2
    threshold = 1 / ((q - 1) * n ** 5)
    return AssumptionReport(q, n, k, u, overlap_exponent, count_exponent, mass, threshold)


def select_u(q: int, n: int, k: int, t: int, dual_weights: Optional[WeightDistribution] = None,
             strict: bool = False) -> Tuple[int, AssumptionReport]:
    """Target dual weight for an error sphere of weight t.

    u maximizes S_u |f_perp(u)|^2 among the integers just above the first root of
    K_t (between the first two roots when t >= 2). When the dual weight
    distribution of the actual code is given, N_perp_u |f_perp(u)|^2 is
    maximized instead, so that u is a weight the code does have. For t > n/q,
    outside the root-based range, every u in [1, n] is a candidate.

    :raises EmptyBracketError: if the bracket holds no integer
    :raises ValueError: in strict mode, if the assumptions fail at u
    """
    dist = RadialErrorDistribution.sphere(q, n, t)
    profile = dist.dual_profile()

    if 1 <= t <= n // q:
        candidates = KrawtchoukContext(q, n).bracket_integers(t, 0)
    else:
        candidates = list(range(1, n + 1))

    def score(u: int) -> float:
        count = sphere_size(q, n, u) if dual_weights is None else dual_weights[u]
        return float(count) * profile[u] ** 2

    if dual_weights is not None and not any(score(u) > 0 for u in candidates):
        _LOGGER.warning(f'no dual codeword with weight in {candidates}: searching all weights')
        candidates = list(range(1, n + 1))

    u = max(candidates, key=lambda x: (score(x), -x))
    report = assumption_report(dist, k, u)
    if strict and not report.holds:
        raise ValueError(f"assumptions fail at u={u}: {report.to_dict()}")
    if t / n <= (q - 1) / q:
        _LOGGER.info(f'selected u={u} (tau_perp n = {tau_perp(q, t / n) * n:.3f})')
    return u, report


def build_ideal_state(code: LinearCode, dist: RadialErrorDistribution, coin_bits: int = 0,
                      budget: Optional[int] = None) -> Tuple[StateVector, float, float]:
    """|psi_ideal> = Z^(-1/2) sum_{e, c, w} pi_e |0>|c + e>|w>.

    :return: (state, Z, X) with Z = 2^l q^k (1 + X)
    """
    q, n, k = code.q, code.n, code.k
    check_budget('statevector', q ** (2 * n) * 2 ** coin_bits, budget)

    pi = dist.amplitudes()
    words = _codeword_indices(code)
    # a(y) = sum_c pi(y - c)
    coset_amplitudes = pi[subtraction_table(q, n)[:, words]].sum(axis=1)

    Z = 2 ** coin_bits * float(np.sum(coset_amplitudes ** 2))
    X = Z / (2 ** coin_bits * q ** k) - 1

    amplitudes = np.zeros((q ** n, q ** n, 2 ** coin_bits), dtype=np.complex128)
    amplitudes[0] = (coset_amplitudes / math.sqrt(Z))[:, None]
    state = StateVector(amplitudes, pipeline_registers(q, n, coin_bits), q, n)
    return state, Z, X


def collision_sum(code: LinearCode, dist: RadialErrorDistribution) -> float:
    """X = sum of pi_e pi_e' over pairs e != e' with e - e' in C."""
    pi = dist.amplitudes()
    words = _codeword_indices(code)[1:]
    shifted = pi[subtraction_table(code.q, code.n)[:, words]]
    return float(np.sum(pi[:, None] * shifted))


def lemma_measure_prediction(code: LinearCode, dist: RadialErrorDistribution, Z: float,
                             coin_bits: int = 0, budget: Optional[int] = None) -> np.ndarray:
    """p_u = (2^l q^(2k) / Z) N_perp_u |f_perp(u)|^2 for u = 0..n."""
    dual_weights = np.array(weight_distribution(code.dual(), budget).counts, dtype=float)
    profile = dist.dual_profile()
    return 2 ** coin_bits * code.q ** (2 * code.k) / Z * dual_weights * profile ** 2


def _codeword_indices(code: LinearCode) -> np.ndarray:
    powers = code.q ** np.arange(code.n - 1, -1, -1, dtype=np.int64)
    return code.codewords() @ powers


class PipelineBuilder(UnitaryBuilder):
    """Unitary preparing psi_0 then adding, decoding and applying the QFT.

    The preparation is the Householder reflection exchanging |0> and psi_0; add
    and decode are basis permutations.
    """

    def __init__(self, code: LinearCode, dist: RadialErrorDistribution, oracle: DecoderOracle,
                 u: int, budget: Optional[int] = None):
        self.code = code
        self.dist = dist
        self.oracle = oracle
        self.u = u
        self.q = code.q
        self.n = code.n
        self.coin_bits = oracle.coin_bits

        q, n = self.q, self.n
        size = q ** n
        check_budget('statevector', size * size * 2 ** self.coin_bits, budget)

        # psi_0
        pi = dist.amplitudes()
        words = np.zeros(size)
        words[_codeword_indices(code)] = q ** (-code.k / 2)
        coins = np.full(2 ** self.coin_bits, 2 ** (-self.coin_bits / 2))
        self.prepared = np.einsum('e,y,w->eyw', pi, words, coins).astype(np.complex128)

        householder = -self.prepared.copy()
        householder.flat[0] += 1
        norm = np.linalg.norm(householder)
        self._householder = householder / norm if norm > 1e-15 else None

        shape = (size, size, 2 ** self.coin_bits)
        e, y, w = np.indices(shape)
        # add: |e>|y>|w> -> |e>|y + e>|w>
        self._add = np.ravel_multi_index((e, addition_table(q, n)[y, e], w), shape).ravel()
        # decode: |e>|y>|w> -> |e - A(y, w)>|y>|w>
        errors = np.stack([
            _error_indices(oracle, code, coins_value, budget) for coins_value in range(2 ** self.coin_bits)
        ], axis=-1)
        self._decode = np.ravel_multi_index((subtraction_table(q, n)[e, errors[y, w]], y, w), shape).ravel()

        self._add_inverse = _inverse_permutation(self._add)
        self._decode_inverse = _inverse_permutation(self._decode)

    @property
    def registers(self):
        return pipeline_registers(self.q, self.n, self.coin_bits)

    def prepare(self, state: StateVector) -> StateVector:
        if self._householder is None:
            return state.copy()
        v = self._householder
        amplitudes = state.amplitudes - 2 * v * np.vdot(v, state.amplitudes)
        return StateVector(amplitudes, self.registers, self.q, self.n, check=False)

    def add(self, state: StateVector) -> StateVector:
        return state.permute(self._add)

    def decode(self, state: StateVector) -> StateVector:
        return state.permute(self._decode)

    def forward(self, state):
        return self.decode(self.add(self.prepare(state))).qft('y')

    def inverse(self, state):
        state = state.inverse_qft('y').permute(self._decode_inverse).permute(self._add_inverse)
        return self.prepare(state)

    def good(self):
        weights = weights_table(self.q, self.n)
        mask = weights == self.u
        return np.broadcast_to(mask[None, :, None], (self.q ** self.n,) * 2 + (2 ** self.coin_bits,)).copy()


def _error_indices(oracle: DecoderOracle, code: LinearCode, coins: int, budget: Optional[int]) -> np.ndarray:
    table = oracle.decode_table(code, coins, budget)
    powers = code.q ** np.arange(code.n - 1, -1, -1, dtype=np.int64)
    return table @ powers


def _inverse_permutation(permutation: np.ndarray) -> np.ndarray:
    inverse = np.empty_like(permutation)
    inverse[permutation] = np.arange(permutation.size)
    return inverse


class PipelineTranscript:
    """Everything recorded during one pipeline run."""

    SCALARS = (
        'q', 'n', 'k', 't', 'l', 'u', 'decoder', 'Z', 'X', 'epsilon_G', 'p_t',
        'trace_distance', 'trace_distance_bound', 'q_est', 'iterations', 'alpha',
        'shots', 'success_rate', 'relaxed_success_rate', 'zero_forcing_weight',
    )

    def __init__(self, **fields):
        for name in self.SCALARS:
            setattr(self, name, fields.pop(name, None))
        self.params: Dict[str, Any] = fields.pop('params', {})
        self.code: Dict[str, Any] = fields.pop('code', {})
        self.assumptions: Dict[str, Any] = fields.pop('assumptions', {})
        self.trace_distances: Dict[str, float] = fields.pop('trace_distances', {})
        self.weights_before: List[float] = fields.pop('weights_before', [])
        self.weights_after: List[float] = fields.pop('weights_after', [])
        self.weights_predicted: List[float] = fields.pop('weights_predicted', [])
        self.samples: List[Dict[str, Any]] = fields.pop('samples', [])
        if fields:
            raise ValueError(f"unknown transcript fields: {sorted(fields)}")

    def verify_samples(self) -> bool:
        """Re-check every successful sample against the generator matrix."""
        code = LinearCode.from_json(self.code['json'])
        dual = code.dual()
        for sample in self.samples:
            if sample['success']:
                if not dual.contains(sample['codeword']) or sample['weight'] != self.u:
                    return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        document = {name: getattr(self, name) for name in self.SCALARS}
        document.update({
            'schema_version': SCHEMA_VERSION,
            'params': self.params,
            'code': self.code,
            'assumptions': self.assumptions,
            'trace_distances': self.trace_distances,
            'weights_before': list(self.weights_before),
            'weights_after': list(self.weights_after),
            'weights_predicted': list(self.weights_predicted),
            'samples': self.samples,
        })
        return document

    def summary(self) -> pd.Series:
        return pd.Series({name: getattr(self, name) for name in self.SCALARS}, name='transcript')

    def _ipython_display_(self):
        display(self.summary())


def run_pipeline(params: ReductionParams, oracle: Optional[DecoderOracle] = None,
                 code: Optional[LinearCode] = None, budget: Optional[int] = None,
                 task_id: int = 0) -> PipelineTranscript:
    """Run the reduction on one code and measure ``params.shots`` times.

    :param params: run parameters
    :param oracle: decoder, by default the one described by ``params.decoder``
    :param code: fixed code, by default sampled in the G-model from the seed
    :param budget: enumeration and statevector budget
    :param task_id: substream index, for runs over many sampled codes
    :raises BudgetExceededError: if the statevector does not fit the budget
    """
    q, n, k, t = params.q, params.n, params.k, params.t
    if oracle is None:
        oracle = params.oracle()
    coin_bits = oracle.coin_bits
    check_budget('statevector', params.required_states(coin_bits), budget)

    if code is None:
        code = sample_code_G_model(q, n, k, task_rng(params.seed, 3 * task_id))
    elif (code.q, code.n, code.k) != (q, n, k):
        raise ValueError(f"code {code} does not match (q, n, k) = ({q}, {n}, {k}).")

    _LOGGER.info(f'pipeline on {code} with {oracle!r}')
    dist = RadialErrorDistribution.sphere(q, n, t)
    p_t = dist.p(t)

    epsilon = empirical_epsilon(oracle, code, t, budget=budget, rng=task_rng(params.seed, 3 * task_id + 1))
    dual_weights = weight_distribution(code.dual(), budget)

    if params.u is None:
        u, report = select_u(q, n, k, t, dual_weights, strict=params.mode == STRICT)
    else:
        u, report = params.u, assumption_report(dist, k, params.u)

    builder = PipelineBuilder(code, dist, oracle, u, budget)

    _LOGGER.info('prepare')
    prepared = builder.prepare(builder.initial_state())
    _LOGGER.info('add')
    added = builder.add(prepared)
    _LOGGER.info('decode')
    decoded = builder.decode(added)
    _LOGGER.info('QFT')
    transformed = decoded.qft('y')

    ideal, Z, X = build_ideal_state(code, dist, coin_bits, budget)
    ideal_transformed = ideal.qft('y')

    distance = trace_distance(decoded, ideal)
    bound = math.sqrt(max(1 - 2 ** coin_bits * q ** k * p_t ** 2 * float(epsilon) ** 2 / Z, 0.0))

    weights_before = measure_weight_distribution(transformed, 'y')
    predicted = lemma_measure_prediction(code, dist, Z, coin_bits, budget)

    final = transformed
    plan: Optional[AmplificationPlan] = None
    q_est = None
    if params.amplify:
        if params.estimate == 'exact':
            q_est = float(predicted[u])
        else:
            q_est = report.mass
        if 0 < q_est < 1:
            _LOGGER.info(f'amplify toward weight {u} with q_est={q_est}')
            plan = plan_amplification(q_est)
            final, plan = amplify(builder, q_est, params.delta, plan)
        else:
            _LOGGER.warning(f'q_est={q_est} outside (0, 1): no amplification')
    weights_after = measure_weight_distribution(final, 'y')

    _LOGGER.info(f'measure {params.shots} shots')
    samples, successes, relaxed = _measure(final, code, u, params.shots, task_rng(params.seed, 3 * task_id + 2))

    zero_forcing_weight = None
    if n - k >= 1:
        baseline = zero_forcing_codeword(code.dual(), task_rng(params.seed, 3 * task_id + 2 + 10 ** 6))
        zero_forcing_weight = int(np.count_nonzero(baseline))

    return PipelineTranscript(
        q=q, n=n, k=k, t=t, l=coin_bits, u=u,
        decoder=oracle.describe(),
        Z=Z, X=X,
        epsilon_G=float(epsilon),
        p_t=p_t,
        trace_distance=distance,
        trace_distance_bound=bound,
        q_est=q_est,
        iterations=plan.iterations if plan else 0,
        alpha=plan.alpha if plan else None,
        shots=params.shots,
        success_rate=successes / params.shots if params.shots else None,
        relaxed_success_rate=relaxed / params.shots if params.shots else None,
        zero_forcing_weight=zero_forcing_weight,
        params=params.to_dict(),
        code={'json': code.to_json(), 'dual_weights': list(dual_weights.counts)},
        assumptions=report.to_dict(),
        trace_distances={
            'decoded_vs_ideal': distance,
            'transformed_vs_ideal': trace_distance(transformed, ideal_transformed),
            'prepared_vs_ideal': trace_distance(prepared, ideal),
        },
        weights_before=weights_before.tolist(),
        weights_after=weights_after.tolist(),
        weights_predicted=predicted.tolist(),
        samples=samples,
    )


def _measure(state: StateVector, code: LinearCode, u: int, shots: int,
             rng: np.random.Generator) -> Tuple[List[Dict[str, Any]], int, int]:
    """Sample the word register; successes are dual codewords of weight exactly u."""
    if shots == 0:
        return [], 0, 0

    q, n, k = code.q, code.n, code.k
    dual = code.dual()
    outcomes, counts = np.unique(state.sample('y', shots, rng), return_counts=True)

    low, high = (0.0, 0.0)
    if 0 < k < n:
        low, high = hard_band(q, k / n)

    samples = []
    successes, relaxed = 0, 0
    for index, count in zip(outcomes, counts):
        word = index_vector(int(index), q, n)
        weight = int(np.count_nonzero(word))
        in_dual = dual.contains(word)
        success = in_dual and weight == u
        in_band = in_dual and low * n <= weight < high * n
        successes += int(count) * success
        relaxed += int(count) * in_band
        samples.append({
            'codeword': word.tolist(),
            'weight': weight,
            'count': int(count),
            'in_dual': bool(in_dual),
            'success': bool(success),
        })
    return samples, successes, relaxed


def theorem_bound(p_t: float, epsilon: float) -> float:
    """Leading term p_t^2 eps^3 / 16 of the success probability of the reduction."""
    return p_t ** 2 * epsilon ** 3 / 16
