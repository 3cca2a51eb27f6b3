"""(epsilon, delta) privacy of stopping rules under the l-distance metric.

Neighboring qualification orderings differ by one swap of positions at most
``l`` apart.  Swapping positions i and j of the preference list exchanges
the selection probabilities of ranks i and j and leaves the others alone,
so every bound here is a function of the rank distribution.

Exact distributions are audited in rational arithmetic.  Anything involving
``exp(epsilon)`` is evaluated in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import CapacityError, ParameterError
from .exact import RankDistribution, a_series, q_pmix, r_exact, pmix_distribution
from .stopping import as_probability

UNBOUNDED = math.inf

#: Largest n accepted by the exhaustive (all subsets) audit.
MAX_EXHAUSTIVE_N = 12

#: Smallest n for which the adjacent-rank closed forms are established.
MIN_CLOSED_FORM_N = 7


@dataclass(frozen=True)
class DpParams:
    epsilon: float
    delta: float
    l: int | None = None
    p: float | None = None

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ParameterError("epsilon", f"must be >= 0, got {self.epsilon}")
        if not 0 <= self.delta <= 1:
            raise ParameterError("delta", f"must lie in [0, 1], got {self.delta}")
        if self.l is not None and (int(self.l) != self.l or self.l < 1):
            raise ParameterError("l", f"must be a positive integer, got {self.l}")
        if self.p is not None:
            as_probability(self.p)


@dataclass(frozen=True)
class AuditReport:
    """Smallest epsilon satisfying the privacy inequality at a given delta.

    ``witness_pair`` is ``(i, j)``: the neighbor swaps ranks i and j and the
    binding set ``witness_set`` (ranks of the qualification ordering) gives
    ``P_sigma(S) - delta = max_ratio * P_rho(S)``.  Both are ``None`` when no
    constraint forces epsilon above 0.
    """

    min_epsilon: float
    max_ratio: Fraction | float | None
    witness_pair: tuple[int, int] | None
    witness_set: frozenset = field(default_factory=frozenset)
    mode: str = "singleton"
    l: int = 1
    delta: Fraction | float = 0
    empirical: bool = False

    @property
    def unbounded(self) -> bool:
        return self.min_epsilon == UNBOUNDED


def log_ratio(x) -> float:
    """Natural log of a positive Fraction or float without overflow."""
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def _probs(dist):
    if isinstance(dist, RankDistribution):
        return list(dist.probs), dist.exact
    probs = list(dist)
    exact = all(isinstance(x, (int, Fraction)) for x in probs)
    return probs, exact


def _as_delta(delta, exact):
    if isinstance(delta, str):
        try:
            delta = Fraction(delta)
        except ValueError:
            raise ParameterError("delta", f"cannot parse {delta!r}") from None
    if isinstance(delta, bool) or not isinstance(delta, (int, float, Fraction)):
        raise ParameterError("delta", f"expected a number, got {delta!r}")
    if not 0 <= delta <= 1:
        raise ParameterError("delta", f"must lie in [0, 1], got {delta}")
    if exact:
        # Floats are read as the decimal they print as: 0.01 -> 1/100.
        return Fraction(repr(delta)) if isinstance(delta, float) else Fraction(delta)
    return float(delta)


def _check_l(l, n):
    if int(l) != l or not 1 <= l <= max(n - 1, 1):
        raise ParameterError("l", f"must be an integer in [1, {n - 1}], got {l!r}")


def _pairs(n, l):
    return [(i, i + d) for d in range(1, l + 1) for i in range(1, n - d + 1)]


def _ratio_bound(probs, l, delta):
    # Theorem-style bound: best (q_i - delta) / q_j over admissible pairs.
    best, witness = None, None
    n = len(probs)
    for a, b in _pairs(n, l):
        for i, j in ((a, b), (b, a)):
            qi, qj = probs[i - 1], probs[j - 1]
            if qi < qj or not delta < qi - qj:
                continue
            if qj == 0:
                return UNBOUNDED, (i, j)
            ratio = (qi - delta) / qj
            if best is None or ratio > best:
                best, witness = ratio, (i, j)
    return best, witness


def eps_lower_bound(dist: RankDistribution | Sequence, l: int, delta=0) -> float:
    """Smallest epsilon consistent with the rank distribution ``dist``.

    Over pairs of ranks ``i != j`` at most ``l`` apart with ``q_i >= q_j``
    and ``delta < q_i - q_j`` this is ``max ln((q_i - delta) / q_j)``; with
    no such pair it is 0.  Returns :data:`UNBOUNDED` when the binding ``q_j``
    is zero.

    >>> from fractions import Fraction as F
    >>> round(eps_lower_bound([F(1, 2), F(1, 3), F(1, 6)], l=2), 6)
    1.098612
    """
    probs, exact = _probs(dist)
    _check_l(l, len(probs))
    delta = _as_delta(delta, exact)
    best, _ = _ratio_bound(probs, l, delta)
    if best is None:
        return 0.0
    if best == UNBOUNDED:
        return UNBOUNDED
    return log_ratio(best)


def audit_dp(dist: RankDistribution | Sequence, l: int, delta=0, mode: str = "singleton") -> AuditReport:
    """Directly check the privacy inequality against every l-neighbor.

    ``mode="singleton"`` tries each one-outcome set and its complement;
    ``mode="exhaustive"`` tries all ``2**n`` outcome sets (n <= 12).  The
    answer is the smallest epsilon making
    ``P_sigma(S) <= exp(eps) * P_rho(S) + delta`` hold for all checked
    ``(rho, S)``; comparisons are exact for rational input.
    """
    probs, exact = _probs(dist)
    n = len(probs)
    _check_l(l, n)
    delta = _as_delta(delta, exact)
    if mode == "exhaustive":
        if n > MAX_EXHAUSTIVE_N:
            raise CapacityError(f"exhaustive audit enumerates 2**n sets; n={n} > {MAX_EXHAUSTIVE_N}")
        candidates = _exhaustive_sets(probs, l)
    elif mode == "singleton":
        candidates = _singleton_sets(probs, l)
    else:
        raise ParameterError("mode", f"expected 'singleton' or 'exhaustive', got {mode!r}")

    best = None
    witness = None
    for pair, members, p_sigma, p_rho in candidates:
        lhs = p_sigma - delta
        if lhs <= 0 or lhs <= p_rho:
            # Already satisfied at epsilon = 0.
            continue
        if p_rho == 0:
            return AuditReport(UNBOUNDED, UNBOUNDED, pair, frozenset(members()), mode, l, delta)
        ratio = lhs / p_rho
        if best is None or ratio > best:
            best, witness = ratio, (pair, members)
    if best is None:
        return AuditReport(0.0, None, None, frozenset(), mode, l, delta)
    pair, members = witness
    return AuditReport(log_ratio(best), best, pair, frozenset(members()), mode, l, delta)


def _singleton_sets(probs, l):
    n = len(probs)
    zero = probs[0] * 0
    total = sum(probs, zero)
    for a, b in _pairs(n, l):
        qa, qb = probs[a - 1], probs[b - 1]
        for i, j, qi, qj in ((a, b, qa, qb), (b, a, qb, qa)):
            # S = {i}: sigma gives q_i, rho gives q_j.
            yield (i, j), (lambda i=i: {i}), qi, qj
            # S = everything but j: sigma gives 1 - q_j, rho gives 1 - q_i.
            yield (i, j), (lambda j=j: set(range(1, n + 1)) - {j}), total - qj, total - qi


def _exhaustive_sets(probs, l):
    n = len(probs)
    zero = probs[0] * 0
    sums = [zero] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + probs[low.bit_length() - 1]

    def members(mask):
        return lambda: {k + 1 for k in range(n) if mask >> k & 1}

    for a, b in _pairs(n, l):
        for i, j in ((a, b), (b, a)):
            bi, bj = 1 << (i - 1), 1 << (j - 1)
            shift = probs[j - 1] - probs[i - 1]
            # Sets containing i but not j are the only ones whose probability
            # moves in the i -> j direction; the reverse is the (j, i) pass.
            for mask in range(1 << n):
                if mask & bi and not mask & bj:
                    yield (i, j), members(mask), sums[mask], sums[mask] + shift


# Closed forms for the optimal/blind p-mix --------------------------------


def _q_pair(n, p, l):
    if int(n) != n or n < 2:
        raise ParameterError("n", f"must be an integer >= 2, got {n!r}")
    _check_l(l, n)
    return q_pmix(1, n, p), q_pmix(l + 1, n, p)


def secretary_ratio(n: int, p, l: int, delta=0) -> Fraction | None:
    """Exact ``(q_1 - delta) / q_{l+1}`` when ``delta < q_1 - q_{l+1}``, else None."""
    delta = _as_delta(delta, True)
    q1, ql = _q_pair(n, p, l)
    if delta < q1 - ql:
        return (q1 - delta) / ql
    return None


def secretary_eps(n: int, p, l: int, delta=0) -> float:
    """Privacy level epsilon of the p-mix of optimal and blind for n candidates.

    For ``n >= 7`` the binding pair is ranks 1 and ``l + 1``, giving
    ``ln((q_1 - delta) / q_{l+1})`` or 0.  Smaller n fall back to the full
    pairwise bound.
    """
    if n < MIN_CLOSED_FORM_N:
        _check_l(l, n)
        return eps_lower_bound(pmix_distribution(n, p), l, delta)
    ratio = secretary_ratio(n, p, l, delta)
    return 0.0 if ratio is None else log_ratio(ratio)


def secretary_delta(n: int, p, l: int, epsilon: float) -> float:
    """Smallest delta making the p-mix (epsilon, delta)-private.

    ``q_1 - exp(epsilon) q_{l+1}`` while that is positive, else 0.
    """
    _check_eps(epsilon)
    if n < MIN_CLOSED_FORM_N:
        _check_l(l, n)
        return _delta_from_dist(pmix_distribution(n, p), l, epsilon)
    q1, ql = _q_pair(n, p, l)
    if epsilon >= log_ratio(q1 / ql):
        return 0.0
    return max(0.0, float(q1) - math.exp(epsilon) * float(ql))


def _delta_from_dist(dist, l, epsilon):
    probs = [float(x) for x in dist]
    growth = math.exp(epsilon)
    return max([0.0] + [probs[i - 1] - growth * probs[j - 1]
                        for a, b in _pairs(len(probs), l) for i, j in ((a, b), (b, a))])


def max_p(n: int, l: int, epsilon: float, delta: float) -> float:
    """Largest mix weight p for which the p-mix is (epsilon, delta)-private."""
    _check_eps(epsilon)
    delta = float(_as_delta(delta, False))
    if int(n) != n or n < 2:
        raise ParameterError("n", f"must be an integer >= 2, got {n!r}")
    _check_l(l, n)
    growth = math.expm1(epsilon)
    if n < MIN_CLOSED_FORM_N:
        pairs = [(i, j) for a, b in _pairs(n, l) for i, j in ((a, b), (b, a))]
    else:
        pairs = [(1, l + 1)]
    # Each pair's delta requirement is affine in p, so the admissible set is
    # an interval [0, p*] and p* is the tightest per-pair solution.
    best = 1.0
    for i, j in pairs:
        gap = float(r_exact(i, n)) - math.exp(epsilon) * float(r_exact(j, n))
        if delta < gap:
            best = min(best, (delta + growth / n) / (gap + growth / n))
    return min(1.0, max(0.0, best))


def compose_uniform_mix(epsilon: float, delta: float, p, n: int) -> DpParams:
    """Privacy of the p-mix of an (epsilon, delta) rule with a uniform one.

    Returns ``(ln(e^eps - (1-p)(e^eps - 1)/n), p * delta)``.
    """
    _check_eps(epsilon)
    p = float(as_probability(p))
    delta = float(_as_delta(delta, False))
    if int(n) != n or n < 1:
        raise ParameterError("n", f"must be a positive integer, got {n!r}")
    eps = math.log1p(math.expm1(epsilon) * (1.0 - (1.0 - p) / n))
    return DpParams(eps, p * delta, p=p)


def _check_eps(epsilon):
    if isinstance(epsilon, bool) or not isinstance(epsilon, (int, float, Fraction)) or not epsilon >= 0:
        raise ParameterError("epsilon", f"must be a number >= 0, got {epsilon!r}")


# Large-n limits ------------------------------------------------------------


def _a(l):
    if int(l) != l or l < 1:
        raise ParameterError("l", f"must be a positive integer, got {l!r}")
    return a_series(l + 1).value


def secretary_eps_asymptotic(p: float, l: int, delta: float) -> float:
    """Limit of :func:`secretary_eps`: ``ln((p - e*delta) / (a_{l+1} p))``."""
    p = float(as_probability(p))
    delta = float(_as_delta(delta, False))
    a = _a(l)
    if not delta < p / math.e * (1.0 - a):
        return 0.0
    return math.log((p - math.e * delta) / (a * p))


def secretary_delta_asymptotic(p: float, l: int, epsilon: float) -> float:
    """Limit of :func:`secretary_delta`: ``(p/e)(1 - a_{l+1} e^eps)``."""
    _check_eps(epsilon)
    p = float(as_probability(p))
    return max(0.0, p / math.e * (1.0 - _a(l) * math.exp(epsilon)))


def max_p_asymptotic(l: int, epsilon: float, delta: float) -> float:
    """Limit of :func:`max_p`: ``e*delta / (1 - e^eps a_{l+1})``, capped at 1."""
    _check_eps(epsilon)
    delta = float(_as_delta(delta, False))
    room = 1.0 - math.exp(epsilon) * _a(l)
    if delta * math.e >= room:
        return 1.0
    return math.e * delta / room


def full_mix_epsilon_asymptotic(l: int, delta: float) -> float:
    """Smallest epsilon at which :func:`max_p_asymptotic` reaches 1."""
    delta = float(_as_delta(delta, False))
    room = 1.0 - math.e * delta
    if room <= 0:
        return 0.0
    return max(0.0, math.log(room / _a(l)))
