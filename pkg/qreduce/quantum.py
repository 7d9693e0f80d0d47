"""Dense statevector simulation of the reduction.

A ``StateVector`` is a complex array shaped by its registers. Registers of size
q^n hold vectors of F_q^n through the mixed-radix bijection of
``qreduce.fields`` (first coordinate most significant); the flat basis index is
row-major over the registers, first register most significant.
"""

import json
import math
from abc import ABC, abstractmethod

import numpy as np

from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .analytic import bernoulli_dual, hellinger_distance
from .codes import sphere_size
from .fields import prime_field, weights_table
from .kravchuk import KrawtchoukContext
from .parameters import check_budget

import logging

_LOGGER = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-9
ALPHA_TOLERANCE = 1e-12
MAX_AMPLIFICATION_ITERATIONS = 10 ** 5

Register = Tuple[str, int]


class StateVector:
    """Pure state over named registers."""

    def __init__(self, amplitudes: np.ndarray, registers: Sequence[Register], q: Optional[int] = None,
                 n: Optional[int] = None, check: bool = True):
        """
        :param amplitudes: complex amplitudes, flat or shaped by the registers
        :param registers: (name, size) pairs, most significant first
        :param q: field order of the F_q^n registers
        :param n: length of the F_q^n registers
        :param check: verify that the state has unit norm
        """
        self.registers = tuple((str(name), int(size)) for name, size in registers)
        names = [name for name, _ in self.registers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}.")

        shape = tuple(size for _, size in self.registers)
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.size != math.prod(shape):
            raise ValueError(f"{amplitudes.size} amplitudes do not fit registers {self.registers}.")
        self.amplitudes = amplitudes.reshape(shape)
        self.q = q
        self.n = n

        if check and not self.is_normalized():
            raise ValueError(f"state norm is {self.norm()}, expected 1.")

    @classmethod
    def basis(cls, registers: Sequence[Register], index: Union[int, Sequence[int]] = 0,
              q: Optional[int] = None, n: Optional[int] = None, budget: Optional[int] = None) -> 'StateVector':
        """Computational basis state, from a flat index or one index per register."""
        shape = tuple(size for _, size in registers)
        size = math.prod(shape)
        check_budget('statevector', size, budget)
        if not isinstance(index, (int, np.integer)):
            index = int(np.ravel_multi_index(tuple(index), shape))
        if not 0 <= index < size:
            raise ValueError(f"index ({index}) must be between 0 and {size - 1}.")
        amplitudes = np.zeros(size, dtype=np.complex128)
        amplitudes[index] = 1
        return cls(amplitudes, registers, q, n)

    @classmethod
    def pipeline_zero(cls, q: int, n: int, coin_bits: int, budget: Optional[int] = None) -> 'StateVector':
        """|0>|0>|0> on the error, word and coin registers."""
        return cls.basis(pipeline_registers(q, n, coin_bits), 0, q, n, budget)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.amplitudes.shape

    @property
    def size(self) -> int:
        return self.amplitudes.size

    def register_axis(self, name: str) -> int:
        for axis, (register, _) in enumerate(self.registers):
            if register == name:
                return axis
        raise ValueError(f"unknown register '{name}': must be one of {[r for r, _ in self.registers]}.")

    def copy(self) -> 'StateVector':
        return StateVector(self.amplitudes.copy(), self.registers, self.q, self.n, check=False)

    def _like(self, amplitudes: np.ndarray) -> 'StateVector':
        return StateVector(amplitudes, self.registers, self.q, self.n, check=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self) -> bool:
        return abs(self.norm() - 1) <= NORM_TOLERANCE

    def inner(self, other: 'StateVector') -> complex:
        """<self|other>."""
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        """Flat measurement distribution in basis-index order."""
        return np.abs(self.amplitudes.ravel()) ** 2

    def marginal(self, name: str) -> np.ndarray:
        """Distribution of the outcome of measuring one register."""
        axis = self.register_axis(name)
        others = tuple(i for i in range(len(self.registers)) if i != axis)
        return np.sum(np.abs(self.amplitudes) ** 2, axis=others)

    def sample(self, name: str, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Outcomes of measuring one register on ``shots`` copies of the state."""
        probabilities = self.marginal(name)
        probabilities = probabilities / probabilities.sum()
        return rng.choice(probabilities.size, size=shots, p=probabilities)

    def permute(self, destination: np.ndarray) -> 'StateVector':
        """Basis permutation: the amplitude of flat index i moves to destination[i]."""
        destination = np.asarray(destination).ravel()
        if destination.size != self.size or np.any(np.bincount(destination, minlength=self.size) != 1):
            raise ValueError("destination is not a permutation of the basis.")
        amplitudes = np.empty(self.size, dtype=np.complex128)
        amplitudes[destination] = self.amplitudes.ravel()
        return self._like(amplitudes)

    def _field_axes(self, name: str) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """Expanded shape with the register split into n coordinate axes, and those axes."""
        if self.q is None or self.n is None:
            raise ValueError("state has no F_q^n registers.")
        prime_field(self.q)
        axis = self.register_axis(name)
        if self.shape[axis] != self.q ** self.n:
            raise ValueError(f"register '{name}' has size {self.shape[axis]}, expected q^n = {self.q ** self.n}.")
        expanded = self.shape[:axis] + (self.q,) * self.n + self.shape[axis + 1:]
        return expanded, tuple(range(axis, axis + self.n))

    def qft(self, name: str) -> 'StateVector':
        """QFT over F_q^n on one register.

        amp'(y) = q^(-n/2) sum_x exp(2 i pi x.y / q) amp(x), a product of n
        single-coordinate q-point transforms.

        :raises ExtensionFieldError: if q is not prime
        """
        expanded, axes = self._field_axes(name)
        transformed = np.fft.ifftn(self.amplitudes.reshape(expanded), axes=axes, norm='ortho')
        return self._like(transformed.reshape(self.shape))

    def inverse_qft(self, name: str) -> 'StateVector':
        expanded, axes = self._field_axes(name)
        transformed = np.fft.fftn(self.amplitudes.reshape(expanded), axes=axes, norm='ortho')
        return self._like(transformed.reshape(self.shape))

    def with_ancilla(self, name: str = 'a') -> 'StateVector':
        """Append a qubit register in |0>."""
        amplitudes = np.zeros(self.shape + (2,), dtype=np.complex128)
        amplitudes[..., 0] = self.amplitudes
        return StateVector(amplitudes, self.registers + ((name, 2),), self.q, self.n, check=False)

    def dump(self, path: str) -> None:
        """Write a JSON header line then little-endian float64 (re, im) pairs."""
        header = {
            'q': self.q,
            'n': self.n,
            'registers': [list(r) for r in self.registers],
            'shape': list(self.shape),
        }
        pairs = np.stack([self.amplitudes.real.ravel(), self.amplitudes.imag.ravel()], axis=-1)
        with open(path, 'wb') as f:
            f.write((json.dumps(header, sort_keys=True) + '\n').encode())
            f.write(pairs.astype('<f8').tobytes())

    @classmethod
    def load(cls, path: str) -> 'StateVector':
        with open(path, 'rb') as f:
            header = json.loads(f.readline().decode())
            pairs = np.frombuffer(f.read(), dtype='<f8').reshape(-1, 2)
        amplitudes = pairs[:, 0] + 1j * pairs[:, 1]
        return cls(amplitudes, [tuple(r) for r in header['registers']], header['q'], header['n'])

    def __repr__(self):
        return f'StateVector(registers={self.registers}, q={self.q}, n={self.n})'


def pipeline_registers(q: int, n: int, coin_bits: int) -> Tuple[Register, ...]:
    return ('e', q ** n), ('y', q ** n), ('w', 2 ** coin_bits)


def qft_register(state: StateVector, register: str) -> StateVector:
    return state.qft(register)


# distances

def trace_distance(a: StateVector, b: StateVector) -> float:
    """sqrt(1 - |<a|b>|^2) for pure states."""
    overlap = abs(a.inner(b)) ** 2
    return math.sqrt(max(1 - overlap, 0.0))


def _check_distributions(p, r) -> Tuple[np.ndarray, np.ndarray]:
    p, r = np.asarray(p, dtype=float), np.asarray(r, dtype=float)
    if p.shape != r.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {r.shape}")
    return p, r


def stat_distance(p, r) -> float:
    """Total variation distance (1/2) sum |p - r|."""
    p, r = _check_distributions(p, r)
    return float(np.sum(np.abs(p - r)) / 2)


def hellinger(p, r) -> float:
    p, r = _check_distributions(p, r)
    return hellinger_distance(p, r)


def measure_weight_distribution(state: StateVector, register: str) -> np.ndarray:
    """Probability of each Hamming weight 0..n when measuring an F_q^n register."""
    marginal = state.marginal(register)
    weights = weights_table(state.q, state.n)
    if marginal.size != weights.size:
        raise ValueError(f"register '{register}' is not an F_q^n register.")
    return np.bincount(weights, weights=marginal, minlength=state.n + 1)


# radial error distributions

class RadialErrorDistribution:
    """Nonnegative amplitude profile f depending only on the Hamming weight.

    |pi> = sum_e f(|e|) |e>, with sum_w S_w f(w)^2 = 1.
    """

    KINDS = ('sphere', 'bernoulli', 'radial')

    def __init__(self, q: int, n: int, profile: Sequence[float], kind: str = 'radial', parameter=None):
        """
        :param q: field order
        :param n: code length
        :param profile: f(0), ..., f(n)
        :param kind: 'sphere', 'bernoulli' or 'radial'
        :param parameter: t for a sphere, p for a Bernoulli profile
        """
        if kind not in self.KINDS:
            raise ValueError(f"kind ({kind}) must be one of {self.KINDS}.")
        profile = np.asarray(profile, dtype=float)
        if profile.shape != (n + 1,):
            raise ValueError(f"profile needs {n + 1} entries, got {profile.shape}.")
        if np.any(profile < 0):
            raise ValueError("profile must be nonnegative.")
        self.q = q
        self.n = n
        self.profile = profile
        self.kind = kind
        self.parameter = parameter

        total = float(np.sum(self.sphere_sizes() * profile ** 2))
        if abs(total - 1) > NORM_TOLERANCE:
            raise ValueError(f"sum_w S_w f(w)^2 = {total}, expected 1.")

    @classmethod
    def sphere(cls, q: int, n: int, t: int) -> 'RadialErrorDistribution':
        """Uniform superposition over the vectors of weight t."""
        if not 0 <= t <= n:
            raise ValueError(f"t ({t}) must be between 0 and {n}.")
        profile = np.zeros(n + 1)
        profile[t] = 1 / math.sqrt(sphere_size(q, n, t))
        return cls(q, n, profile, 'sphere', t)

    @classmethod
    def bernoulli(cls, q: int, n: int, p: float) -> 'RadialErrorDistribution':
        """Amplitudes of the q-ary symmetric channel with crossover p."""
        channel = bernoulli_dual(q, p)
        profile = [channel.amplitude(n, w) for w in range(n + 1)]
        return cls(q, n, profile, 'bernoulli', p)

    def sphere_sizes(self) -> np.ndarray:
        return np.array([float(sphere_size(self.q, self.n, w)) for w in range(self.n + 1)])

    def weight_probabilities(self) -> np.ndarray:
        """p_w = S_w f(w)^2."""
        return self.sphere_sizes() * self.profile ** 2

    def p(self, w: int) -> float:
        return float(self.weight_probabilities()[w])

    def amplitudes(self) -> np.ndarray:
        """pi_e for every e of F_q^n, in index order."""
        return self.profile[weights_table(self.q, self.n)]

    def overlap_with_ones(self) -> float:
        """<pi|1> = sum_w S_w f(w)."""
        return float(np.sum(self.sphere_sizes() * self.profile))

    def dual_profile(self) -> np.ndarray:
        return dual_profile(self)

    def __repr__(self):
        return f'RadialErrorDistribution(q={self.q}, n={self.n}, kind={self.kind}, parameter={self.parameter})'


def dual_profile(dist: RadialErrorDistribution) -> np.ndarray:
    """Radial profile f_perp(0..n) of the QFT of |pi>.

    sphere of weight t: K_t(u) / sqrt(q^n S_t); Bernoulli p: Bernoulli p_perp;
    any other radial profile: q^(-n/2) sum_w f(w) K_w(u).
    """
    q, n = dist.q, dist.n
    if dist.kind == 'sphere':
        t = dist.parameter
        values = KrawtchoukContext(q, n).row(t)
        return np.array([float(v) for v in values]) / math.sqrt(q ** n * sphere_size(q, n, t))
    if dist.kind == 'bernoulli':
        channel = bernoulli_dual(q, dist.parameter)
        return np.array([channel.dual_amplitude(n, u) for u in range(n + 1)])
    if dist.kind == 'radial':
        context = KrawtchoukContext(q, n)
        table = np.array([[float(v) for v in context.row(w)] for w in range(n + 1)])
        return dist.profile @ table / math.sqrt(q ** n)
    raise ValueError(f"unsupported profile kind '{dist.kind}'.")


# amplitude amplification

class UnitaryBuilder(ABC):
    """Unitary A, applicable forward and backward, building a state from |0>.

    ``good`` marks the basis states of the subspace to amplify.
    """

    @property
    @abstractmethod
    def registers(self) -> Tuple[Register, ...]:
        pass

    q = None
    n = None

    def initial_state(self) -> StateVector:
        return StateVector.basis(self.registers, 0, self.q, self.n)

    @abstractmethod
    def forward(self, state: StateVector) -> StateVector:
        pass

    @abstractmethod
    def inverse(self, state: StateVector) -> StateVector:
        pass

    @abstractmethod
    def good(self) -> np.ndarray:
        """Boolean mask over the register shape."""
        pass

    def build(self) -> StateVector:
        return self.forward(self.initial_state())


class TwoLevelBuilder(UnitaryBuilder):
    """One qubit rotated to sqrt(1-p)|0> + sqrt(p)|1>, with |1> good."""

    def __init__(self, p: float):
        if not 0 <= p <= 1:
            raise ValueError(f"p ({p}) must be between 0 and 1.")
        self.p = p
        self._rotation = np.array([
            [math.sqrt(1 - p), -math.sqrt(p)],
            [math.sqrt(p), math.sqrt(1 - p)],
        ])

    @property
    def registers(self):
        return ('x', 2),

    def forward(self, state):
        return StateVector(self._rotation @ state.amplitudes, self.registers, check=False)

    def inverse(self, state):
        return StateVector(self._rotation.T @ state.amplitudes, self.registers, check=False)

    def good(self):
        return np.array([False, True])


class AmplificationPlan(NamedTuple):
    """T rotations by 2 rho with (2T + 1) rho = pi/2, rho = arcsin sqrt(alpha q_est)."""
    q_est: float
    alpha: float
    rho: float
    iterations: int

    def success_probability(self, p_true: float) -> float:
        """Probability of the good subspace after the iterations if its true weight is p_true."""
        theta = math.asin(math.sqrt(min(self.alpha * p_true, 1.0)))
        return math.sin((2 * self.iterations + 1) * theta) ** 2

    def worst_case_success(self, delta: float) -> float:
        """Minimum success over p_true in [(1 - delta) q_est, (1 + delta) q_est]."""
        return min(
            self.success_probability(self.q_est * (1 - delta)),
            self.success_probability(min(self.q_est * (1 + delta), 1.0)),
        )


def plan_amplification(q_est: float, max_iterations: int = MAX_AMPLIFICATION_ITERATIONS) -> AmplificationPlan:
    """Largest alpha in [0, 1] making pi/(4 rho) - 1/2 a nonnegative integer.

    T is scanned upwards from 0 and the first alpha = sin^2(pi / (2(2T+1))) / q_est
    not above 1 is taken.
    """
    if not 0 < q_est < 1:
        raise ValueError(f"q_est ({q_est}) must be in (0, 1).")

    for iterations in range(max_iterations + 1):
        rho = math.pi / (2 * (2 * iterations + 1))
        alpha = math.sin(rho) ** 2 / q_est
        if alpha <= 1 + ALPHA_TOLERANCE:
            alpha = min(alpha, 1.0)
            _LOGGER.debug(f'amplification plan: T={iterations}, alpha={alpha}')
            return AmplificationPlan(q_est, alpha, rho, iterations)

    _LOGGER.warning(f'no feasible amplification with at most {max_iterations} iterations: identity')
    return AmplificationPlan(q_est, 1.0, math.asin(math.sqrt(q_est)), 0)


class _AncillaBuilder(UnitaryBuilder):
    """A tensor R_alpha, with R_alpha|0> = sqrt(alpha)|0> + sqrt(1-alpha)|1> on an ancilla."""

    def __init__(self, builder: UnitaryBuilder, alpha: float):
        self.builder = builder
        self.q = builder.q
        self.n = builder.n
        self._rotation = np.array([
            [math.sqrt(alpha), -math.sqrt(1 - alpha)],
            [math.sqrt(1 - alpha), math.sqrt(alpha)],
        ])

    @property
    def registers(self):
        return tuple(self.builder.registers) + (('a', 2),)

    def _split(self, state: StateVector) -> Tuple[StateVector, StateVector]:
        inner = self.builder.registers
        zero = StateVector(state.amplitudes[..., 0], inner, self.q, self.n, check=False)
        one = StateVector(state.amplitudes[..., 1], inner, self.q, self.n, check=False)
        return zero, one

    def _join(self, zero: StateVector, one: StateVector, rotation: np.ndarray) -> StateVector:
        stacked = np.stack([zero.amplitudes, one.amplitudes], axis=-1)
        return StateVector(stacked @ rotation.T, self.registers, self.q, self.n, check=False)

    def forward(self, state):
        zero, one = self._split(state)
        return self._join(self.builder.forward(zero), self.builder.forward(one), self._rotation)

    def inverse(self, state):
        # R_alpha^-1 first, then A^-1 on both branches
        rotated = StateVector(state.amplitudes @ self._rotation, self.registers, self.q, self.n, check=False)
        zero, one = self._split(rotated)
        identity = np.eye(2)
        return self._join(self.builder.inverse(zero), self.builder.inverse(one), identity)

    def good(self):
        good = np.zeros(self.builder.good().shape + (2,), dtype=bool)
        good[..., 0] = self.builder.good()
        return good


def amplify(builder: UnitaryBuilder, q_est: float, delta: float = 0.0,
            plan: Optional[AmplificationPlan] = None) -> Tuple[StateVector, AmplificationPlan]:
    """Amplitude amplification of the good subspace of the built state, without measurement.

    One ancilla qubit scales the good amplitude by sqrt(alpha) so that the
    rotation angle closes exactly on pi/2 when q_est is the true probability.

    :param builder: unitary building the state
    :param q_est: estimate of the probability of the good subspace
    :param delta: relative error of the estimate, used for the logged worst case
    :param plan: precomputed plan, by default ``plan_amplification(q_est)``
    :return: (final state with the ancilla as last register, plan)
    """
    if plan is None:
        plan = plan_amplification(q_est)

    extended = _AncillaBuilder(builder, plan.alpha)
    good = extended.good()
    state = extended.build()

    for i in range(plan.iterations):
        # reflect about the good subspace
        amplitudes = state.amplitudes.copy()
        amplitudes[good] *= -1
        # reflect about the built state: A (2|0><0| - I) A^-1
        back = extended.inverse(StateVector(amplitudes, extended.registers, extended.q, extended.n, check=False))
        reflected = -back.amplitudes
        reflected.flat[0] += 2 * back.amplitudes.flat[0]
        state = extended.forward(StateVector(reflected, extended.registers, extended.q, extended.n, check=False))
        _LOGGER.debug(f'amplification iteration {i + 1}: good weight {good_probability(state, good)}')

    if delta:
        _LOGGER.info(f'amplification worst case over +/-{delta}: {plan.worst_case_success(delta)}')
    return state, plan


def good_probability(state: StateVector, good: np.ndarray) -> float:
    return float(np.sum(np.abs(state.amplitudes[good]) ** 2))
