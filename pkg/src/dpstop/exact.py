"""Exact selection probabilities of the secretary rule and its p-mixes.

``r_exact(k, n)`` is the probability that the optimal rule picks the k-th
best of n candidates, as a :class:`~fractions.Fraction`.  ``q_pmix`` mixes it
with the uniform outcome of blind choice.  ``brute_force_distribution`` is the
enumeration oracle everything else is checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import CapacityError, ContractError, ParameterError
from .permutations import Permutation, relative_ranks
from .stopping import OptimalSecretary, StoppingPolicy, _play, as_probability, threshold

#: Largest n accepted by :func:`brute_force_distribution`.
MAX_ENUMERATION_N = 8

_X = 1.0 - math.exp(-1.0)


@dataclass(frozen=True)
class RankDistribution:
    """Probabilities of selecting the k-th best candidate, ``k = 1..n``.

    ``probs[k - 1]`` holds rank ``k``.  Entries are Fractions when ``exact``
    is set and floats otherwise.
    """

    probs: tuple
    exact: bool = True

    def __post_init__(self):
        probs = tuple(self.probs)
        if not probs:
            raise ParameterError("probs", "empty distribution")
        if self.exact:
            probs = tuple(Fraction(x) for x in probs)
            if sum(probs) != 1:
                raise ParameterError("probs", f"sums to {sum(probs)}, not 1")
        else:
            probs = tuple(float(x) for x in probs)
            if abs(math.fsum(probs) - 1.0) > 1e-12:
                raise ParameterError("probs", f"sums to {math.fsum(probs)!r}, not 1")
        if any(x < 0 for x in probs):
            raise ParameterError("probs", "negative entry")
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return len(self.probs)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, k):
        """Probability of rank ``k`` (1-based)."""
        if not 1 <= k <= len(self.probs):
            raise IndexError(k)
        return self.probs[k - 1]

    def __iter__(self):
        return iter(self.probs)

    def to_float(self) -> "RankDistribution":
        return RankDistribution(tuple(float(x) for x in self.probs), exact=False)

    def is_non_increasing(self) -> bool:
        return all(a >= b for a, b in zip(self.probs, self.probs[1:]))

    @classmethod
    def uniform(cls, n: int) -> "RankDistribution":
        return cls((Fraction(1, n),) * n)


def _check_kn(k, n):
    if int(n) != n or n < 1:
        raise ParameterError("n", f"must be a positive integer, got {n!r}")
    if int(k) != k or not 1 <= k <= n:
        raise ParameterError("k", f"must be an integer in [1, {n}], got {k!r}")


def _binom(a, b):
    return comb(a, b) if 0 <= b <= a else 0


@lru_cache(maxsize=None)
def r_exact(k: int, n: int) -> Fraction:
    """Probability that the optimal rule selects the k-th best of n.

    Rank 1 uses the classical win formula ``(t-1)/n * sum_{i=t..n} 1/(i-1)``.
    Ranks k >= 2 use ``(t-1)/n * (sum_{i=t..n-k+1} C(n-k,i-1)/C(n-1,i-1)/(i-1)
    + 1/(n-1))``.  The second expression is not valid at k = 1: it counts the
    forced stop at position n twice.

    >>> [str(r_exact(k, 4)) for k in range(1, 5)]
    ['11/24', '7/24', '1/6', '1/12']
    """
    _check_kn(k, n)
    if n == 1:
        return Fraction(1)
    t = threshold(n)
    lead = Fraction(t - 1, n)
    if k == 1:
        return lead * sum((Fraction(1, i - 1) for i in range(t, n + 1)), Fraction(0))
    s = sum(
        (
            Fraction(_binom(n - k, i - 1), _binom(n - 1, i - 1) * (i - 1))
            for i in range(t, n - k + 2)
        ),
        Fraction(0),
    )
    return lead * (s + Fraction(1, n - 1))


def r_recurrence(k: int, n: int) -> Fraction:
    """``r_exact(k, n)`` for ``k >= 2`` via successive differences from rank 2.

    Each step subtracts ``(t-1)/n * (1/j) * C(n-t+1, j) / C(n-1, j)``.  The
    step from rank 1 to rank 2 does not follow this rule, hence the seed.
    """
    _check_kn(k, n)
    if k < 2:
        raise ParameterError("k", "the difference recurrence starts at k = 2")
    t = threshold(n)
    r = r_exact(2, n)
    for j in range(2, k):
        r -= Fraction(t - 1, n) * Fraction(_binom(n - t + 1, j), j * _binom(n - 1, j))
    return r


def q_pmix(k: int, n: int, p) -> Fraction:
    """Selection probability of rank k under the p-mix of optimal and blind."""
    _check_kn(k, n)
    p = as_probability(p)
    if isinstance(p, float):
        p = Fraction(p)
    return p * r_exact(k, n) + (1 - p) * Fraction(1, n)


def secretary_distribution(n: int) -> RankDistribution:
    return RankDistribution(tuple(r_exact(k, n) for k in range(1, n + 1)))


def pmix_distribution(n: int, p) -> RankDistribution:
    return RankDistribution(tuple(q_pmix(k, n, p) for k in range(1, n + 1)))


def brute_force_distribution(
    policy: StoppingPolicy, n: int, sigma: Sequence[int] | None = None
) -> RankDistribution:
    """Exact rank distribution by playing all ``n!`` time orderings.

    Only deterministic policies are accepted; mixtures are obtained
    analytically from their components.
    """
    if int(n) != n or n < 1:
        raise ParameterError("n", f"must be a positive integer, got {n!r}")
    if n > MAX_ENUMERATION_N:
        raise CapacityError(f"enumeration of {n}! orderings exceeds n <= {MAX_ENUMERATION_N}")
    if policy.randomized:
        raise ContractError("brute_force_distribution needs a deterministic policy")
    sigma = Permutation.identity(n) if sigma is None else Permutation(sigma)
    if len(sigma) != n:
        raise ParameterError("sigma", f"length {len(sigma)} != n={n}")
    rank_of = {c: pos for pos, c in enumerate(sigma, start=1)}
    counts = [0] * n
    for tau in itertools.permutations(range(1, n + 1)):
        t = _play(policy, n, relative_ranks(sigma, tau))
        counts[rank_of[tau[t - 1]] - 1] += 1
    total = math.factorial(n)
    return RankDistribution(tuple(Fraction(c, total) for c in counts))


@dataclass(frozen=True)
class SeriesValue:
    k: int
    value: float
    tail_bound: float


def a_series(k: int) -> SeriesValue:
    """Tail ``sum_{s>=k} (1/s) (1 - 1/e)**s``, summed until the remainder
    bound drops below 1e-17.  ``a_1 == 1`` exactly."""
    if int(k) != k or k < 1:
        raise ParameterError("k", f"must be a positive integer, got {k!r}")
    if k == 1:
        return SeriesValue(1, 1.0, 0.0)
    terms = []
    s = k
    term = _X**s / s
    while True:
        terms.append(term)
        s += 1
        term = _X**s / s
        # Remaining terms are below a geometric series with ratio _X.
        bound = term / (1.0 - _X)
        if bound <= 1e-17 or term == 0.0:
            break
    return SeriesValue(int(k), math.fsum(terms), bound)


def r_asymptotic(k: int) -> float:
    """Large-n limit of ``r_exact(k, n)`` for fixed k: ``a_k / e``."""
    return a_series(k).value / math.e
