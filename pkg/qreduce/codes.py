"""Linear codes over prime fields, random code ensembles and decoder oracles.

A ``LinearCode`` keeps both its generator view G (k x n) and its parity-check
view H ((n-k) x n) with G H^T = 0. Codewords are enumerated exhaustively, so
every quantity here is exact as long as the enumeration fits the budget.
"""

import itertools
import json
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from functools import cached_property

import numpy as np
import pandas as pd
import galois

from typing import Iterator, Optional, Sequence, Union

from .fields import (
    prime_field, field_of, kernel_basis, rank, rref, hamming_weight,
    all_vectors, vectors_to_indices
)
from .parameters import check_budget
from .rng import task_rng, run_tasks

import logging

_LOGGER = logging.getLogger(__name__)


# sphere and ball sizes, exact integers

def sphere_size(q: int, n: int, t: int) -> int:
    """S_t = C(n, t) (q-1)^t."""
    if not 0 <= t <= n:
        return 0
    return math.comb(n, t) * (q - 1) ** t


def ball_size(q: int, n: int, t: int) -> int:
    """B_t = sum_{i <= t} S_i."""
    return sum(sphere_size(q, n, i) for i in range(min(t, n) + 1))


def gv_distance(q: int, n: int, k: int) -> int:
    """Largest t with q^k B_t <= q^n."""
    if not 0 <= k <= n:
        raise ValueError(f"k ({k}) must be between 0 and n ({n}).")
    t = 0
    total = q ** n
    while t < n and q ** k * ball_size(q, n, t + 1) <= total:
        t += 1
    return t


def gv_distance_plus(q: int, n: int, k: int) -> int:
    """Largest t with q^(n-k) S_t >= q^n, or -1 when no weight qualifies."""
    if not 0 <= k <= n:
        raise ValueError(f"k ({k}) must be between 0 and n ({n}).")
    for t in range(n, -1, -1):
        if q ** (n - k) * sphere_size(q, n, t) >= q ** n:
            return t
    return -1


def sphere_vectors(q: int, n: int, t: int) -> np.ndarray:
    """All vectors of F_q^n of Hamming weight t, as integer rows."""
    rows = []
    for support in itertools.combinations(range(n), t):
        for values in itertools.product(range(1, q), repeat=t):
            row = np.zeros(n, dtype=np.int64)
            row[list(support)] = values
            rows.append(row)
    if not rows:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def sample_sphere(q: int, n: int, t: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform vector of weight t."""
    e = np.zeros(n, dtype=np.int64)
    support = rng.choice(n, size=t, replace=False)
    e[support] = rng.integers(1, q, size=t)
    return e


class WeightDistribution:
    """Exact weight counts N_0..N_n of a code."""

    def __init__(self, counts: Sequence[int]):
        self.counts = tuple(int(c) for c in counts)

    @property
    def n(self) -> int:
        return len(self.counts) - 1

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __getitem__(self, w: int) -> int:
        return self.counts[w]

    def __len__(self):
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __eq__(self, other):
        if isinstance(other, WeightDistribution):
            return self.counts == other.counts
        return self.counts == tuple(other)

    def __repr__(self):
        return f'WeightDistribution({list(self.counts)})'

    def as_series(self) -> pd.Series:
        return pd.Series(self.counts, index=pd.RangeIndex(len(self.counts), name='weight'), name='count')


class LinearCode:
    """k-dimensional linear code of length n over a prime field.

    Build it with ``from_generator`` or ``from_parity_check``; the other view is
    derived with a kernel computation.
    """

    def __init__(self, generator: galois.FieldArray, parity_check: galois.FieldArray):
        """
        :param generator: full-rank k x n generator matrix
        :param parity_check: full-rank (n - k) x n parity-check matrix
        """
        field = field_of(generator)
        if type(parity_check) is not field:
            raise ValueError("generator and parity-check matrices live in different fields.")
        if generator.shape[1] != parity_check.shape[1]:
            raise ValueError(
                f"length mismatch: G has {generator.shape[1]} columns, H has {parity_check.shape[1]}."
            )
        n = generator.shape[1]
        if generator.shape[0] + parity_check.shape[0] != n:
            raise ValueError(
                f"dimensions {generator.shape[0]} + {parity_check.shape[0]} do not add up to n ({n})."
            )
        if generator.shape[0] and parity_check.shape[0] and np.any(generator @ parity_check.T):
            raise ValueError("G H^T != 0.")

        self._generator = generator
        self._parity_check = parity_check
        # number of rank-deficient draws rejected by the sampler
        self.resamples = 0

    @classmethod
    def from_generator(cls, generator: galois.FieldArray) -> 'LinearCode':
        field = field_of(generator)
        generator = generator.reshape(-1, generator.shape[-1])
        k = generator.shape[0]
        if k and rank(generator) != k:
            raise ValueError(f"generator matrix has rank {rank(generator)} < {k}.")
        if k == 0:
            return cls(generator, field.Identity(generator.shape[1]))
        return cls(generator, kernel_basis(generator))

    @classmethod
    def from_parity_check(cls, parity_check: galois.FieldArray) -> 'LinearCode':
        field = field_of(parity_check)
        parity_check = parity_check.reshape(-1, parity_check.shape[-1])
        r = parity_check.shape[0]
        if r and rank(parity_check) != r:
            raise ValueError(f"parity-check matrix has rank {rank(parity_check)} < {r}.")
        if r == 0:
            return cls(field.Identity(parity_check.shape[1]), parity_check)
        return cls(kernel_basis(parity_check), parity_check)

    @classmethod
    def from_rows(cls, q: int, rows) -> 'LinearCode':
        """Code generated by integer rows over F_q."""
        return cls.from_generator(prime_field(q)(np.mod(np.asarray(rows, dtype=np.int64), q)))

    @property
    def field(self) -> type:
        return type(self._generator)

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def n(self) -> int:
        return self._generator.shape[1]

    @property
    def k(self) -> int:
        return self._generator.shape[0]

    @property
    def generator(self) -> galois.FieldArray:
        return self._generator

    @property
    def parity_check(self) -> galois.FieldArray:
        return self._parity_check

    def dual(self) -> 'LinearCode':
        return LinearCode(self._parity_check, self._generator)

    def codewords(self, budget: Optional[int] = None) -> np.ndarray:
        """All q^k codewords as integer rows, sorted lexicographically."""
        check_budget('codeword enumeration', self.q ** self.k, budget)
        return self._codewords

    @cached_property
    def _codewords(self) -> np.ndarray:
        messages = all_vectors(self.q, self.k)
        words = (messages @ self._generator.view(np.ndarray).astype(np.int64)) % self.q
        order = np.lexsort(words.T[::-1])
        return words[order]

    def contains(self, v) -> bool:
        v = self.field(np.mod(np.asarray(v, dtype=np.int64), self.q))
        if self._parity_check.shape[0] == 0:
            return True
        return not np.any(self._parity_check @ v)

    def weight_distribution(self, budget: Optional[int] = None) -> WeightDistribution:
        return weight_distribution(self, budget)

    def min_distance(self, budget: Optional[int] = None) -> int:
        """Minimum nonzero codeword weight, n + 1 for the zero code."""
        counts = weight_distribution(self, budget).counts
        for w in range(1, len(counts)):
            if counts[w]:
                return w
        return self.n + 1

    def unique_decoding_radius(self, budget: Optional[int] = None) -> int:
        return (self.min_distance(budget) - 1) // 2

    def to_json(self) -> str:
        return json.dumps({
            'q': self.q,
            'n': self.n,
            'k': self.k,
            'generator': self._generator.view(np.ndarray).astype(int).ravel().tolist(),
        }, sort_keys=True)

    @classmethod
    def from_json(cls, document: str) -> 'LinearCode':
        data = json.loads(document)
        q, n, k = data['q'], data['n'], data['k']
        entries = np.asarray(data['generator'], dtype=np.int64).reshape(k, n)
        return cls.from_generator(prime_field(q)(entries))

    def __eq__(self, other):
        return (
            isinstance(other, LinearCode)
            and self.field is other.field
            and np.array_equal(self._generator, other._generator)
        )

    def __repr__(self):
        return f'LinearCode(q={self.q}, n={self.n}, k={self.k})'


class DecodingInstance:
    """Noisy codeword with an optional planted error, for verification."""

    def __init__(self, code: LinearCode, received, planted_error=None):
        self.code = code
        self.received = np.mod(np.asarray(received, dtype=np.int64), code.q)
        self.planted_error = None
        if planted_error is not None:
            self.planted_error = np.mod(np.asarray(planted_error, dtype=np.int64), code.q)
            if not code.contains(self.received - self.planted_error):
                raise ValueError("received - planted_error is not a codeword.")


def sample_decoding_instance(code: LinearCode, t: int, rng: np.random.Generator) -> DecodingInstance:
    """Uniform codeword plus a uniform error of weight t."""
    message = rng.integers(0, code.q, size=code.k)
    codeword = (message @ code.generator.view(np.ndarray).astype(np.int64)) % code.q
    error = sample_sphere(code.q, code.n, t, rng)
    return DecodingInstance(code, codeword + error, error)


# random code ensembles

def _check_dimensions(n: int, k: int, min_k: int) -> None:
    if not min_k <= k < n:
        raise ValueError(f"k ({k}) must be between {min_k} and n - 1 ({n - 1}).")


def sample_code_G_model(q: int, n: int, k: int, rng: np.random.Generator) -> LinearCode:
    """Code spanned by a uniform k x n generator matrix of full rank."""
    _check_dimensions(n, k, 1)
    field = prime_field(q)

    resamples = 0
    while True:
        generator = field(rng.integers(0, q, size=(k, n)))
        if rank(generator) == k:
            break
        resamples += 1

    _LOGGER.debug(f'G-model ({q}, {n}, {k}): {resamples} rank-deficient draws rejected')
    code = LinearCode.from_generator(generator)
    code.resamples = resamples
    return code


def sample_code_H_model(q: int, n: int, k: int, rng: np.random.Generator) -> LinearCode:
    """Code defined by a uniform (n - k) x n parity-check matrix of full rank."""
    _check_dimensions(n, k, 0)
    field = prime_field(q)

    resamples = 0
    while True:
        parity_check = field(rng.integers(0, q, size=(n - k, n)))
        if rank(parity_check) == n - k:
            break
        resamples += 1

    _LOGGER.debug(f'H-model ({q}, {n}, {k}): {resamples} rank-deficient draws rejected')
    code = LinearCode.from_parity_check(parity_check)
    code.resamples = resamples
    return code


def rank_deficiency_rate(q: int, n: int, k: int, samples: int, rng: np.random.Generator) -> float:
    """Fraction of uniform k x n matrices with rank < k."""
    field = prime_field(q)
    deficient = sum(
        rank(field(rng.integers(0, q, size=(k, n)))) < k for _ in range(samples)
    )
    return deficient / samples


def weight_distribution(code: LinearCode, budget: Optional[int] = None) -> WeightDistribution:
    """Exact weight distribution by enumeration of all uG.

    :raises BudgetExceededError: if q^k exceeds the enumeration budget
    """
    words = code.codewords(budget)
    weights = np.count_nonzero(words, axis=1)
    return WeightDistribution(np.bincount(weights, minlength=code.n + 1))


# decoders playing the role of the decoding algorithm

class DecoderOracle(ABC):
    """Deterministic decoder A(G, y, w) with radius t and l internal coin bits.

    Coins w in {0,1}^l are passed as the integer whose binary expansion (first
    bit most significant) is w. A decoder is total: when it fails it returns
    the zero error, i.e. it gives the received word back as its codeword
    estimate.
    """

    kind = None

    def __init__(self, radius: int, coin_bits: int = 0):
        if radius < 0:
            raise ValueError(f"radius ({radius}) must be nonnegative.")
        if coin_bits < 0:
            raise ValueError(f"coin_bits ({coin_bits}) must be nonnegative.")
        self.radius = radius
        self.coin_bits = coin_bits

    def decode(self, code: LinearCode, received, coins: int = 0) -> np.ndarray:
        """Error estimate for one received word."""
        received = np.mod(np.asarray(received, dtype=np.int64), code.q).reshape(1, -1)
        if received.shape[1] != code.n:
            raise ValueError(f"received word has length {received.shape[1]}, code has n = {code.n}.")
        if not 0 <= coins < 2 ** self.coin_bits:
            raise ValueError(f"coins ({coins}) must be between 0 and {2 ** self.coin_bits - 1}.")
        return self._decode_batch(code, received, coins)[0]

    def decode_table(self, code: LinearCode, coins: int = 0, budget: Optional[int] = None) -> np.ndarray:
        """Error estimates for every received word of F_q^n, in index order."""
        check_budget('decoding table', code.q ** code.n * code.q ** code.k, budget)
        return self._decode_batch(code, all_vectors(code.q, code.n), coins)

    @abstractmethod
    def _decode_batch(self, code: LinearCode, received: np.ndarray, coins: int) -> np.ndarray:
        pass

    def describe(self) -> str:
        return self.kind

    def __repr__(self):
        return f'{self.__class__.__name__}(radius={self.radius}, coin_bits={self.coin_bits})'


def _closest_within(code: LinearCode, received: np.ndarray, radius: int) -> np.ndarray:
    """Bounded-distance exhaustive decoding of a batch of received words.

    The closest codeword within the radius wins; ties go to the
    lexicographically smallest codeword. Failures yield the zero error.
    """
    words = code.codewords()
    # (batch, q^k, n) differences
    differences = (received[:, None, :] - words[None, :, :]) % code.q
    distances = np.count_nonzero(differences, axis=2)
    # argmin returns the first minimum, codewords are sorted
    best = np.argmin(distances, axis=1)
    rows = np.arange(received.shape[0])
    errors = differences[rows, best]
    errors[distances[rows, best] > radius] = 0
    return errors


class ExhaustiveDecoder(DecoderOracle):
    """Bounded-distance decoder enumerating all q^k codewords."""

    kind = 'exhaustive'

    def _decode_batch(self, code, received, coins):
        return _closest_within(code, received, self.radius)


class UnreliableDecoder(DecoderOracle):
    """Exhaustive decoder that only answers when its first coins are zero.

    It uses m = ceil(log2(1 / epsilon)) coin bits, so its success probability is
    2^-m times that of the exhaustive decoder (exactly epsilon for powers of 1/2).
    """

    kind = 'unreliable'

    def __init__(self, radius: int, epsilon: float, coin_bits: Optional[int] = None):
        if not 0 < epsilon <= 1:
            raise ValueError(f"epsilon ({epsilon}) must be in (0, 1].")
        self.epsilon = epsilon
        self.gate_bits = math.ceil(math.log2(1 / epsilon) - 1e-12)
        if coin_bits is None:
            coin_bits = self.gate_bits
        if coin_bits < self.gate_bits:
            raise ValueError(
                f"epsilon ({epsilon}) needs {self.gate_bits} coin bits, only {coin_bits} available."
            )
        super().__init__(radius, coin_bits)

    @property
    def effective_epsilon(self) -> Fraction:
        return Fraction(1, 2 ** self.gate_bits)

    def _decode_batch(self, code, received, coins):
        # first gate_bits bits of coins are zero
        if coins >> (self.coin_bits - self.gate_bits):
            return np.zeros_like(received)
        return _closest_within(code, received, self.radius)

    def describe(self):
        return f'unreliable:{self.epsilon}'


class ConstantDecoder(DecoderOracle):
    """Always answers the zero error, a negative control."""

    kind = 'constant'

    def _decode_batch(self, code, received, coins):
        return np.zeros_like(received)


DECODERS = ('exhaustive', 'unreliable:EPS', 'constant')


def make_decoder(description: str, radius: int, coin_bits: int = 0) -> DecoderOracle:
    """Decoder from its command-line description.

    :param description: 'exhaustive', 'unreliable:EPS' or 'constant'
    :param radius: decoding radius t
    :param coin_bits: number of coin bits l
    """
    kind, _, argument = description.partition(':')
    if kind == 'exhaustive' and not argument:
        return ExhaustiveDecoder(radius, coin_bits)
    if kind == 'constant' and not argument:
        return ConstantDecoder(radius, coin_bits)
    if kind == 'unreliable':
        try:
            epsilon = float(argument)
        except ValueError:
            raise ValueError(f"unreliable decoder needs a numeric epsilon, got '{argument}'.")
        return UnreliableDecoder(radius, epsilon, coin_bits or None)
    raise ValueError(f"unknown decoder '{description}': must be one of {DECODERS}.")


class EpsilonEstimate:
    """Decoder success probability, exact or Monte Carlo."""

    def __init__(self, value: Union[Fraction, float], half_width: float = 0.0, exact: bool = True):
        self.value = value
        self.half_width = half_width
        self.exact = exact

    def __float__(self):
        return float(self.value)

    def __eq__(self, other):
        if isinstance(other, EpsilonEstimate):
            return (self.value, self.half_width, self.exact) == (other.value, other.half_width, other.exact)
        return self.value == other

    def __repr__(self):
        if self.exact:
            return f'EpsilonEstimate({self.value})'
        return f'EpsilonEstimate({float(self.value):.6g} +/- {self.half_width:.2g})'


def empirical_epsilon(
        oracle: DecoderOracle,
        code: LinearCode,
        t: Optional[int] = None,
        budget: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
        samples: int = 10000
) -> EpsilonEstimate:
    """Probability over (c, e, w) that the oracle returns e, at fixed G.

    Exact enumeration over C x S_t x {0,1}^l when it fits the budget, else a
    Monte Carlo estimate with a 95% normal confidence half-width.

    :param oracle: decoder under test
    :param code: fixed code
    :param t: error weight, defaults to the oracle radius
    :param budget: enumeration budget
    :param rng: generator for the Monte Carlo fallback
    :param samples: Monte Carlo sample count
    """
    t = oracle.radius if t is None else t
    q, n = code.q, code.n
    coin_count = 2 ** oracle.coin_bits
    required = q ** code.k * sphere_size(q, n, t) * coin_count

    try:
        check_budget('epsilon enumeration', required, budget)
        check_budget('decoding table', q ** n * q ** code.k, budget)
    except ValueError:
        _LOGGER.warning(f'epsilon enumeration needs {required} triples: Monte Carlo fallback')
        return _monte_carlo_epsilon(oracle, code, t, rng or task_rng(0), samples)

    words = code.codewords()
    errors = sphere_vectors(q, n, t)
    received = vectors_to_indices((words[:, None, :] + errors[None, :, :]) % q, q)

    successes = 0
    for coins in range(coin_count):
        table = oracle.decode_table(code, coins, budget=budget)
        decoded = table[received]
        successes += int(np.all(decoded == errors[None, :, :], axis=2).sum())

    return EpsilonEstimate(Fraction(successes, required))


def _monte_carlo_epsilon(oracle, code, t, rng, samples) -> EpsilonEstimate:
    successes = 0
    for _ in range(samples):
        instance = sample_decoding_instance(code, t, rng)
        coins = int(rng.integers(0, 2 ** oracle.coin_bits))
        if np.array_equal(oracle.decode(code, instance.received, coins), instance.planted_error):
            successes += 1
    p = successes / samples
    half_width = 1.96 * math.sqrt(max(p * (1 - p), 1 / samples) / samples)
    return EpsilonEstimate(p, half_width, exact=False)


def _code_epsilon_task(task):
    oracle, q, n, k, t, seed, index, budget = task
    code = sample_code_G_model(q, n, k, task_rng(seed, index))
    return float(empirical_epsilon(oracle, code, t, budget=budget, rng=task_rng(seed, index + 1_000_000)))


def joint_epsilon(
        oracle: DecoderOracle,
        q: int, n: int, k: int, t: int,
        codes: int, seed: int,
        workers: int = 1,
        budget: Optional[int] = None
) -> float:
    """Success probability averaged over sampled G as well as (c, e, w)."""
    tasks = [(oracle, q, n, k, t, seed, i, budget) for i in range(codes)]
    return float(np.mean(run_tasks(_code_epsilon_task, tasks, workers)))


def verify_scp_solution(parity_check: galois.FieldArray, c, w: int) -> bool:
    """True iff H c^T = 0 and 0 < |c| <= w."""
    field = field_of(parity_check)
    c = field(np.mod(np.asarray(c, dtype=np.int64), field.order))
    weight = hamming_weight(c)
    if not 0 < weight <= w:
        return False
    if parity_check.shape[0] == 0:
        return True
    return not np.any(parity_check @ c)


def zero_forcing_codeword(code: LinearCode, rng: np.random.Generator) -> np.ndarray:
    """Nonzero codeword vanishing on k - 1 random coordinates.

    Such words are found in polynomial time and have weight about
    (q-1)/q (n - k + 1): the easy regime of short codewords.
    """
    k, n, q = code.k, code.n, code.q
    if k == 0:
        raise ValueError("the zero code has no nonzero codeword.")
    zeros = np.sort(rng.choice(n, size=k - 1, replace=False))
    field = code.field

    if k == 1:
        message = field.Ones(1)
    else:
        # u G[:, zeros] = 0 has a nonzero solution since it has k unknowns
        constraints = code.generator[:, zeros].T
        solutions = kernel_basis(constraints)
        coefficients = field(rng.integers(0, q, size=solutions.shape[0]))
        while not np.any(coefficients):
            coefficients = field(rng.integers(0, q, size=solutions.shape[0]))
        message = coefficients @ solutions
    return (message @ code.generator).view(np.ndarray).astype(np.int64)


def canonical_form(code: LinearCode) -> tuple:
    """Hashable invariant identifying the code as a subspace."""
    if code.k == 0:
        return ()
    reduced, _, _ = rref(code.generator)
    return tuple(reduced.view(np.ndarray).astype(int).ravel().tolist())


def iter_matrices(q: int, rows: int, cols: int) -> Iterator[np.ndarray]:
    """Every rows x cols matrix over F_q (integer arrays)."""
    for entries in itertools.product(range(q), repeat=rows * cols):
        yield np.array(entries, dtype=np.int64).reshape(rows, cols)


__all__ = [
    'sphere_size', 'ball_size', 'gv_distance', 'gv_distance_plus',
    'sphere_vectors', 'sample_sphere',
    'WeightDistribution', 'LinearCode', 'DecodingInstance', 'sample_decoding_instance',
    'sample_code_G_model', 'sample_code_H_model', 'rank_deficiency_rate', 'weight_distribution',
    'DecoderOracle', 'ExhaustiveDecoder', 'UnreliableDecoder', 'ConstantDecoder', 'make_decoder',
    'EpsilonEstimate', 'empirical_epsilon', 'joint_epsilon',
    'verify_scp_solution', 'zero_forcing_codeword', 'canonical_form', 'iter_matrices',
]
