"""Exact Krawtchouk polynomials K_t(x) over {0, ..., n} for the q-ary Hamming scheme.

    K_t(x) = sum_j (-1)^j C(x, j) C(n - x, t - j) (q - 1)^(t - j)

Values at integers are exact big integers; values at rational points, used to
refine roots by bisection, are exact fractions obtained from the three-term
recurrence in the degree.
"""

import math
from fractions import Fraction

from collections.abc import Sequence
from typing import Dict, Iterator, List, Optional, Tuple

from .streams import Stream

import logging

_LOGGER = logging.getLogger(__name__)

ROOT_TOLERANCE = Fraction(1, 10 ** 9)
SPACING_TOLERANCE = 1e-6


class EmptyBracketError(ValueError):
    """No integer lies strictly between two consecutive roots."""


class RootList(Sequence):
    """Roots x_1 < ... < x_t of K_t, each with its bracketing interval.

    A bracket is a pair of fractions (lo, hi) with K_t changing sign on it, or
    lo == hi for a root that is an integer.
    """

    def __init__(self, t: int, brackets: Sequence[Tuple[Fraction, Fraction]]):
        self.t = t
        self.brackets = tuple(brackets)
        for (_, hi), (lo, _) in zip(self.brackets, self.brackets[1:]):
            if lo <= hi:
                raise ValueError(f"brackets overlap at {float(lo)}.")

    @property
    def roots(self) -> Tuple[float, ...]:
        return tuple(float((lo + hi) / 2) for lo, hi in self.brackets)

    @property
    def residuals(self) -> Tuple[float, ...]:
        return tuple(float(hi - lo) for lo, hi in self.brackets)

    @property
    def gaps(self) -> Tuple[float, ...]:
        roots = self.roots
        return tuple(b - a for a, b in zip(roots, roots[1:]))

    def min_gap(self) -> float:
        return min(self.gaps, default=math.inf)

    def max_gap(self) -> float:
        return max(self.gaps, default=0.0)

    def __getitem__(self, i):
        return self.roots[i]

    def __len__(self):
        return len(self.brackets)

    def __repr__(self):
        return f'RootList(t={self.t}, roots={[round(r, 6) for r in self.roots]})'


class KrawtchoukContext:
    """Krawtchouk polynomials of a fixed (q, n), with cached integer tables."""

    def __init__(self, q: int, n: int):
        if q < 2:
            raise ValueError(f"q ({q}) must be >= 2.")
        if n < 1:
            raise ValueError(f"n ({n}) must be >= 1.")
        self.q = q
        self.n = n
        self._rows: Dict[int, Tuple[int, ...]] = {}
        self._roots: Dict[int, RootList] = {}

    def _check_index(self, name: str, value: int):
        if not 0 <= value <= self.n:
            raise ValueError(f"{name} ({value}) must be between 0 and {self.n}.")

    def row(self, t: int) -> Tuple[int, ...]:
        """K_t(0), ..., K_t(n) from the defining sum."""
        self._check_index('t', t)
        if t not in self._rows:
            q, n = self.q, self.n
            self._rows[t] = tuple(
                sum(
                    (-1) ** j * math.comb(x, j) * math.comb(n - x, t - j) * (q - 1) ** (t - j)
                    for j in range(t + 1)
                )
                for x in range(n + 1)
            )
        return self._rows[t]

    def eval(self, t: int, x: int) -> int:
        self._check_index('x', x)
        return self.row(t)[x]

    def degree_recurrence_table(self) -> List[List[int]]:
        """K_t(x) for all t, x generated by the recurrence in the degree

        (t+1) K_{t+1}(x) = ((n-t)(q-1) + t - qx) K_t(x) - (q-1)(n-t+1) K_{t-1}(x)
        """
        q, n = self.q, self.n
        table = [[1] * (n + 1), [(q - 1) * n - q * x for x in range(n + 1)]]
        for t in range(1, n):
            row = []
            for x in range(n + 1):
                numerator = ((n - t) * (q - 1) + t - q * x) * table[t][x] \
                    - (q - 1) * (n - t + 1) * table[t - 1][x]
                value, remainder = divmod(numerator, t + 1)
                if remainder:
                    raise ArithmeticError(f"non-integral K_{t + 1}({x}).")
                row.append(value)
            table.append(row)
        return table[:n + 1]

    def evaluate_real(self, t: int, x) -> Fraction:
        """Exact value of K_t at a rational point."""
        self._check_index('t', t)
        q, n = self.q, self.n
        x = Fraction(x)
        previous, current = Fraction(1), (q - 1) * n - q * x
        if t == 0:
            return previous
        for s in range(1, t):
            previous, current = current, (
                ((n - s) * (q - 1) + s - q * x) * current - (q - 1) * (n - s + 1) * previous
            ) / (s + 1)
        return current

    def recurrence_residual(self, t: int, x: int) -> int:
        """Residual of the difference equation in x, exactly 0 for every t."""
        if not 1 <= x <= self.n - 1:
            raise ValueError(f"x ({x}) must be between 1 and {self.n - 1}.")
        q, n = self.q, self.n
        values = self.row(t)
        return (q - 1) * (n - x) * values[x + 1] \
            - ((q - 1) * (n - x) + x - q * t) * values[x] \
            + x * values[x - 1]

    def measure(self, j: int) -> Fraction:
        """mu(j) = (q-1)^j C(n, j) / q^n."""
        self._check_index('j', j)
        return Fraction((self.q - 1) ** j * math.comb(self.n, j), self.q ** self.n)

    def norm(self, t: int) -> int:
        """(q-1)^t C(n, t), the squared norm of K_t under mu."""
        return (self.q - 1) ** t * math.comb(self.n, t)

    def orthogonality_check(self, s: int, t: int) -> Fraction:
        """sum_j K_s(j) K_t(j) mu(j), exactly."""
        rs, rt = self.row(s), self.row(t)
        total = sum(rs[j] * rt[j] * (self.q - 1) ** j * math.comb(self.n, j) for j in range(self.n + 1))
        return Fraction(total, self.q ** self.n)

    def max_degree(self) -> int:
        """Largest t with t <= n (q-1)/q, for which K_t has t roots in (0, n)."""
        return (self.n * (self.q - 1)) // self.q

    def _sign_changes(self, t: int, step: Fraction) -> List[Tuple[Fraction, Fraction]]:
        """Brackets of sign changes of K_t on the grid of the given step."""
        points = int(self.n / step)
        brackets = []
        previous_x, previous_sign = None, None
        for i in range(points + 1):
            x = i * step
            if x.denominator == 1:
                value = self.eval(t, int(x))
            else:
                value = self.evaluate_real(t, x)

            if value == 0:
                brackets.append((x, x))
                # a simple root flips the sign, the next comparison is skipped
                previous_sign = None
                continue

            sign = value > 0
            if previous_sign is not None and sign != previous_sign:
                brackets.append((previous_x, x))
            previous_x, previous_sign = x, sign
        return brackets

    def _bisect(self, t: int, lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
        lo_positive = self.evaluate_real(t, lo) > 0
        iterations = 0
        while hi - lo > ROOT_TOLERANCE:
            mid = (lo + hi) / 2
            value = self.evaluate_real(t, mid)
            if value == 0:
                return mid, mid
            if (value > 0) == lo_positive:
                lo = mid
            else:
                hi = mid
            iterations += 1
        _LOGGER.debug(f'K_{t} root in [{float(lo)}, {float(hi)}] after {iterations} bisections')
        return lo, hi

    def roots(self, t: int) -> RootList:
        """The t real roots of K_t in (0, n).

        :raises ValueError: if t is out of range, or fewer than t sign changes
            are found at step 1/4
        """
        if not 1 <= t <= self.max_degree():
            raise ValueError(f"t ({t}) must be between 1 and {self.max_degree()}.")
        if t in self._roots:
            return self._roots[t]

        brackets = self._sign_changes(t, Fraction(1))
        if len(brackets) < t:
            _LOGGER.debug(f'K_{t}: {len(brackets)} sign changes at integers, rescanning at step 1/4')
            brackets = self._sign_changes(t, Fraction(1, 4))
        if len(brackets) != t:
            raise ValueError(f"K_{t} over n={self.n}: found {len(brackets)} roots, expected {t}.")

        refined = [b if b[0] == b[1] else self._bisect(t, *b) for b in brackets]
        self._roots[t] = RootList(t, refined)
        return self._roots[t]

    def first_root(self, t: int) -> float:
        return self.roots(t)[0]

    def root_spacing_certificate(self, t: int) -> bool:
        """True iff consecutive roots of K_t are at distance >= 2."""
        if not 1 <= t <= self.n // self.q:
            raise ValueError(f"t ({t}) must be between 1 and {self.n // self.q}.")
        return self.roots(t).min_gap() >= 2 - SPACING_TOLERANCE

    def krasikov_coefficients(self, t: int, x) -> Tuple[Fraction, Fraction]:
        """(b(x), c(x)) with K_t(x+1) = b(x) K_t(x) - c(x) K_t(x-1)."""
        q, n = self.q, self.n
        x = Fraction(x)
        if not 0 < x < n:
            raise ValueError(f"x ({x}) must be in (0, {n}).")
        denominator = (q - 1) * (n - x)
        return ((q - 1) * (n - x) + x - q * t) / denominator, x / denominator

    def krasikov_positive(self, t: int) -> bool:
        """True iff b(x) > 0 and c(x) > 0 on all of (0, n).

        c is always positive there; the numerator of b is affine in x, so it is
        enough to look at both ends. For q = 2 and t = n/2 b vanishes
        identically and only the weaker spacing >= 1 follows.
        """
        q, n = self.q, self.n
        at_zero = (q - 1) * n - q * t
        at_n = n - q * t
        return at_zero >= 0 and at_n >= 0 and max(at_zero, at_n) > 0

    def ratio_bound(self) -> int:
        """Bound (q-1) n on mu(j) / mu(j+1) and its inverse."""
        return (self.q - 1) * self.n

    def mass_threshold(self) -> Fraction:
        return Fraction(1, (self.q - 1) * self.n ** 5)

    def normalized_mass(self, t: int, u: int) -> Fraction:
        """K_t(u)^2 mu(u) / ((q-1)^t C(n, t))."""
        return self.eval(t, u) ** 2 * self.measure(u) / self.norm(t)

    def mass_between_roots(self, t: int, k: int = 0) -> Tuple[int, Fraction]:
        """Integer u between the roots x_k and x_{k+1} maximizing K_t(u)^2 mu(u).

        For t = 1 the interval is (x_1, n], n included.

        :param t: degree, 1 <= t <= n / q
        :param k: bracket index, 0 <= k <= max(t - 2, 0)
        :return: (u, normalized mass)
        :raises EmptyBracketError: if no integer lies strictly inside the interval
        """
        candidates = self.bracket_integers(t, k)
        u = max(candidates, key=lambda x: (self.normalized_mass(t, x), -x))
        return u, self.normalized_mass(t, u)

    def bracket_integers(self, t: int, k: int = 0) -> List[int]:
        """Integers strictly between x_k and x_{k+1}, or in (x_1, n] when t = 1."""
        if not 1 <= t <= self.n // self.q:
            raise ValueError(f"t ({t}) must be between 1 and {self.n // self.q}.")
        intervals = max(t - 1, 1)
        if not 0 <= k < intervals:
            raise ValueError(f"k ({k}) must be between 0 and {intervals - 1}.")

        roots = self.roots(t).roots
        lower = roots[k]
        # n + 1 makes n itself a candidate when t = 1
        upper = roots[k + 1] if t > 1 else self.n + 1
        candidates = [u for u in range(math.floor(lower) + 1, math.ceil(upper)) if lower < u < upper]
        if not candidates:
            raise EmptyBracketError(
                f"no integer strictly between {lower} and {upper} for K_{t} over n={self.n}."
            )
        return candidates

    def report(self, t_max: Optional[int] = None) -> 'KrawtchoukReport':
        return KrawtchoukReport(self, t_max)


class KrawtchoukReport(Stream):
    """Roots, gaps and maximal masses of K_t for t = 1..t_max."""

    def __init__(self, context: KrawtchoukContext, t_max: Optional[int] = None):
        bound = context.n // context.q
        if t_max is None:
            t_max = bound
        if not 1 <= t_max <= bound:
            raise ValueError(f"t_max ({t_max}) must be between 1 and {bound}.")
        self.context = context
        self.t_max = t_max
        super().__init__(f'krawtchouk q={context.q} n={context.n}')

    def datagen(self) -> Iterator[Sequence]:
        yield ['t', 'root_index', 'root', 'gap', 'u_star', 'mass']
        for t in range(1, self.t_max + 1):
            roots = self.context.roots(t).roots
            intervals = max(t - 1, 1)
            for i, root in enumerate(roots):
                gap = root - roots[i - 1] if i > 0 else None
                u_star, mass = None, None
                if i < intervals:
                    try:
                        u_star, mass = self.context.mass_between_roots(t, i)
                    except EmptyBracketError:
                        _LOGGER.warning(f'K_{t}: empty bracket after root {i}')
                yield [t, i, root, gap, u_star, mass]
