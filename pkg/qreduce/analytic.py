"""Closed-form parameter maps of the reduction and the usefulness analysis.

Everything here works with real rates R = k/n and relative distances, for any
integer q >= 2; no field arithmetic is involved.
"""

import math

import numpy as np
import pandas as pd
from scipy import optimize

from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Tuple

from .codes import gv_distance
from .fields import weights_table
from .streams import Stream

import logging

_LOGGER = logging.getLogger(__name__)

USEFUL = 'useful'
EASY = 'easy'
VACUOUS = 'vacuous'

TAU_STEP = 1e-3
RATE_STEP = 0.05
ENTROPY_TOLERANCE = 1e-12


def _check_q(q: int):
    if q < 2:
        raise ValueError(f"q ({q}) must be >= 2.")


def _check_relative(name: str, q: int, x: float):
    # small tolerance for grid points computed in floating point
    if not -1e-15 <= x <= (q - 1) / q + 1e-15:
        raise ValueError(f"{name} ({x}) must be between 0 and {(q - 1) / q}.")


def entropy(q: int, x: float) -> float:
    """q-ary entropy h_q(x) = -x log_q(x / (q-1)) - (1-x) log_q(1-x)."""
    _check_q(q)
    _check_relative('x', q, x)
    x = min(max(x, 0.0), (q - 1) / q)
    if x == 0:
        return 0.0
    return (-x * math.log(x / (q - 1)) - (1 - x) * math.log(1 - x)) / math.log(q)


def entropy_inverse(q: int, y: float) -> float:
    """Inverse of h_q on [0, (q-1)/q], by bracketing root finding."""
    _check_q(q)
    if not 0 <= y <= 1:
        raise ValueError(f"y ({y}) must be between 0 and 1.")
    top = (q - 1) / q
    if y == 0:
        return 0.0
    if y >= 1:
        return top
    return optimize.brentq(lambda x: entropy(q, x) - y, 0.0, top, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _dual_parameter(q: int, x: float) -> float:
    return (math.sqrt((q - 1) * (1 - x)) - math.sqrt(x)) ** 2 / q


def tau_perp(q: int, tau: float) -> float:
    """Relative weight of the dual codewords produced from decoding at distance tau n.

    tau_perp = (sqrt((q-1)(1-tau)) - sqrt(tau))^2 / q
    """
    _check_q(q)
    _check_relative('tau', q, tau)
    return _dual_parameter(q, min(max(tau, 0.0), (q - 1) / q))


def omega_easy(q: int, n: int, dim: int) -> float:
    """Relative weight (q-1)/q (1 - dim/n) reached in polynomial time."""
    if not 0 <= dim <= n:
        raise ValueError(f"dim ({dim}) must be between 0 and n ({n}).")
    return (q - 1) / q * (1 - dim / n)


def omega_easy_rate(q: int, rate: float) -> float:
    """omega_easy of a code of rate ``rate``."""
    return (q - 1) / q * (1 - rate)


def _check_rate(R: float):
    if not 0 < R < 1:
        raise ValueError(f"R ({R}) must be in (0, 1).")


def delta_gv(q: int, R: float) -> float:
    """Asymptotic relative GV distance h_q^-1(1 - R) of a rate R code."""
    _check_rate(R)
    return entropy_inverse(q, 1 - R)


def delta_gv_dual(q: int, R: float) -> float:
    """h_q^-1(R), relative GV distance of the dual of a rate R code."""
    _check_rate(R)
    return entropy_inverse(q, R)


def hard_band(q: int, R: float) -> Tuple[float, float]:
    """[delta_GV_dual, omega_easy_dual): dual weights neither vacuous nor easy."""
    return delta_gv_dual(q, R), omega_easy_rate(q, 1 - R)


class BernoulliProfile(NamedTuple):
    """q-ary symmetric channel of crossover p and its Fourier dual p_perp."""
    q: int
    p: float
    p_perp: float

    def amplitude(self, n: int, w: int) -> float:
        """Amplitude (1-p)^((n-w)/2) (p/(q-1))^(w/2) of a vector of weight w."""
        return _bernoulli_amplitude(self.q, n, w, self.p)

    def dual_amplitude(self, n: int, w: int) -> float:
        return _bernoulli_amplitude(self.q, n, w, self.p_perp)


def _bernoulli_amplitude(q: int, n: int, w: int, p: float) -> float:
    return (1 - p) ** ((n - w) / 2) * (p / (q - 1)) ** (w / 2)


def bernoulli_dual(q: int, p: float) -> BernoulliProfile:
    _check_q(q)
    _check_relative('p', q, p)
    return BernoulliProfile(q, p, _dual_parameter(q, min(max(p, 0.0), (q - 1) / q)))


class ParamPoint(NamedTuple):
    q: int
    R: float
    tau: float
    tau_perp: float
    delta_gv_primal: float
    delta_gv_dual: float
    omega_easy_dual: float
    verdict: str


def verdict(tau_p: float, band_low: float, band_high: float) -> str:
    if tau_p >= band_high:
        return EASY
    if tau_p < band_low:
        return VACUOUS
    return USEFUL


def param_point(q: int, R: float, tau: float) -> ParamPoint:
    """Classify the dual weight reached by decoding at relative distance tau.

    The dual code has dimension n - k, hence its easy weight is (q-1)/q R and
    its GV distance is h_q^-1(R).
    """
    low, high = hard_band(q, R)
    tp = tau_perp(q, tau)
    return ParamPoint(q, R, tau, tp, delta_gv(q, R), low, high, verdict(tp, low, high))


def rate_grid(step: float = RATE_STEP) -> np.ndarray:
    """Rates step, 2 step, ... strictly below 1."""
    count = int(round(1 / step))
    return np.round(np.arange(1, count) * step, 12)


def tau_grid(upper: float, step: float = TAU_STEP) -> np.ndarray:
    """0, step, 2 step, ... up to upper, upper included."""
    grid = np.arange(0.0, upper, step)
    return np.append(grid, upper)


class TauPerpCurves(Stream):
    """tau_perp against tau for every rate, tau up to delta_GV(R)."""

    def __init__(self, qs: Sequence[int], rates: Optional[Iterable[float]] = None, tau_step: float = TAU_STEP):
        self.qs = list(qs)
        self.rates = list(rate_grid() if rates is None else rates)
        self.tau_step = tau_step
        super().__init__('tau_perp curves')

    def datagen(self) -> Iterator[Sequence]:
        yield ['q', 'R', 'tau', 'tau_perp', 'omega_easy_dual', 'delta_gv_dual', 'verdict']
        for q in self.qs:
            for R in self.rates:
                for tau in tau_grid(delta_gv(q, R), self.tau_step):
                    point = param_point(q, R, float(tau))
                    yield [q, R, point.tau, point.tau_perp, point.omega_easy_dual,
                           point.delta_gv_dual, point.verdict]


class OptimalTauPerp(Stream):
    """Best dual weight, reached at tau = delta_GV(R), against the hard band."""

    def __init__(self, qs: Sequence[int], rates: Optional[Iterable[float]] = None):
        self.qs = list(qs)
        self.rates = list(rate_grid() if rates is None else rates)
        super().__init__('optimal tau_perp')

    def datagen(self) -> Iterator[Sequence]:
        yield ['q', 'R', 'tau_star', 'tau_perp_at_star', 'band_low', 'band_high', 'verdict']
        for q in self.qs:
            for R in self.rates:
                point = param_point(q, R, delta_gv(q, R))
                yield [q, R, point.tau, point.tau_perp, point.delta_gv_dual,
                       point.omega_easy_dual, point.verdict]


def usefulness_scan(q: int, rates: Optional[Iterable[float]] = None, tau_step: float = TAU_STEP) -> pd.DataFrame:
    """Verdict of every (R, tau <= delta_GV(R)) grid point."""
    frame = TauPerpCurves([q], rates, tau_step).to_frame()
    _LOGGER.info(f'usefulness scan q={q}: {(frame.verdict == USEFUL).sum()} useful points of {len(frame)}')
    return frame


def useful_rates(scan: pd.DataFrame) -> pd.Series:
    """Per rate, whether some tau yields a useful verdict."""
    return scan.groupby('R')['verdict'].apply(lambda v: bool((v == USEFUL).any()))


# the separable Bernoulli state

def bernoulli_obstruction(q: int, n: int, k: int, tau: float) -> float:
    """log_q of <pi|1>^2 / q^(n-k) = q^k (1 - tau_perp)^n for the Bernoulli state."""
    if not 0 <= k <= n:
        raise ValueError(f"k ({k}) must be between 0 and n ({n}).")
    tp = tau_perp(q, tau)
    if tp >= 1:
        return -math.inf
    return k + n * math.log(1 - tp) / math.log(q)


def bernoulli_conditions(q: int, R: float, tau: float) -> Tuple[bool, bool, bool]:
    """The three requirements on the Bernoulli state, asymptotically.

    (i) tau <= delta_GV(R), (ii) tau_perp <= omega_easy of the dual code,
    (iii) q^k (1 - tau_perp)^n vanishes, i.e. R + log_q(1 - tau_perp) < 0.
    """
    tp = tau_perp(q, tau)
    first = tau <= delta_gv(q, R) + 1e-15
    second = tp <= omega_easy_rate(q, 1 - R)
    third = tp < 1 and R + math.log(1 - tp) / math.log(q) < 0
    return first, second, third


def bernoulli_feasibility_scan(q: int, R: float, tau_step: float = TAU_STEP) -> pd.DataFrame:
    """Grid of tau in [0, (q-1)/q] with the three conditions and their conjunction."""
    rows = []
    for tau in tau_grid((q - 1) / q, tau_step):
        first, second, third = bernoulli_conditions(q, R, float(tau))
        rows.append((float(tau), first, second, third, first and second and third))
    return pd.DataFrame(rows, columns=['tau', 'decodable', 'not_easy', 'negligible', 'feasible'])


def hellinger_distance(p: np.ndarray, r: np.ndarray) -> float:
    """H(p, r) = sqrt(1 - sum_i sqrt(p_i r_i))."""
    affinity = float(np.sum(np.sqrt(np.asarray(p) * np.asarray(r))))
    return math.sqrt(max(1 - affinity, 0.0))


def bernoulli_distribution(q: int, weights: np.ndarray, n: int, tau: float) -> np.ndarray:
    """mu_tau(e) = (1-tau)^(n-|e|) (tau/(q-1))^|e| for each weight in ``weights``."""
    weights = np.asarray(weights)
    return (1 - tau) ** (n - weights) * (tau / (q - 1)) ** weights


def bernoulli_overlap(q: int, n: int, tau: float) -> float:
    """<pi|1> = sum_w S_w (1-tau)^((n-w)/2) (tau/(q-1))^(w/2)."""
    return sum(
        math.comb(n, w) * (q - 1) ** w * _bernoulli_amplitude(q, n, w, tau)
        for w in range(n + 1)
    )


def hellinger_identity_gap(q: int, n: int, tau: float) -> float:
    """| <pi|1>^2 / q^n - (1 - H^2(mu_tau, U))^2 | by summation over F_q^n."""
    weights = weights_table(q, n)
    mu = bernoulli_distribution(q, weights, n, tau)
    uniform = np.full(mu.shape, q ** -n)
    overlap = float(np.sum(np.sqrt(mu)))
    lhs = overlap ** 2 / q ** n
    rhs = (1 - hellinger_distance(mu, uniform) ** 2) ** 2
    return abs(lhs - rhs)


def gv_lemma_exponent(q: int, R: float, delta: float) -> float:
    """alpha(R, delta) = h_q((1 - delta) delta_GV) - h_q(delta_GV), negative on (0, 1).

    :raises ValueError: if delta is outside (0, 1) or the exponent is not negative
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta ({delta}) must be in (0, 1).")
    d = delta_gv(q, R)
    alpha = entropy(q, (1 - delta) * d) - entropy(q, d)
    if alpha >= 0:
        raise ValueError(
            f"exponent alpha ({alpha}) must be negative, got delta_GV ({d}) at R ({R})."
        )
    return alpha


def finite_gv_gap(q: int, n: int, R: float) -> float:
    """| d_GV(n, k) / n - h_q^-1(1 - k/n) | with k = round(R n)."""
    k = int(round(R * n))
    return abs(gv_distance(q, n, k) / n - entropy_inverse(q, 1 - k / n))

