"""Stopping policies and the online selection game.

A policy sees only ``n`` and the relative ranks of the arrivals so far and
answers STOP or CONTINUE.  Randomized policies draw their coins in
:meth:`StoppingPolicy.start_game`, before the first arrival, so a game is a
deterministic function of (qualification ordering, time ordering, tape).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .permutations import Permutation, relative_ranks

STOP = True
CONTINUE = False


@lru_cache(maxsize=None)
def threshold(n: int) -> int:
    """Cut-off of the optimal secretary rule.

    The smallest ``t`` with ``1/t + 1/(t+1) + ... + 1/(n-1) <= 1``, floored
    at 2 so that the first arrival is always skipped when ``n >= 2``.
    ``threshold(1) == 1``.

    >>> [threshold(n) for n in (3, 4, 10)]
    [2, 2, 4]
    """
    if int(n) != n or n < 1:
        raise ParameterError("n", f"must be a positive integer, got {n!r}")
    n = int(n)
    if n <= 2:
        return n
    # Grow the tail sum from i = n-1 downwards until it passes 1.
    total = 0.0
    t = n
    while t > 1 and total + 1.0 / (t - 1) <= 1.0:
        total += 1.0 / (t - 1)
        t -= 1
    if abs(total - 1.0) < 1e-9 or abs(total + 1.0 / (t - 1) - 1.0) < 1e-9:
        t = _threshold_exact(n, t)
    return max(t, 2)


def _threshold_exact(n, t):
    # Settle a float near-tie with rationals, starting from the float answer.
    tail = sum(Fraction(1, i) for i in range(t, n))
    while tail > 1:
        tail -= Fraction(1, t)
        t += 1
    while t > 1 and tail + Fraction(1, t - 1) <= 1:
        t -= 1
        tail += Fraction(1, t)
    return t


class StoppingPolicy:
    """Base class for stopping rules.

    Subclasses implement :meth:`decide`.  :meth:`stop_positions` is a batch
    entry point used by the simulator; the default plays each game through
    :meth:`decide`, and the built-in policies override it with array code.
    """

    #: True when the policy consumes randomness in :meth:`start_game`.
    randomized = False

    def start_game(self):
        """Draw any pre-game randomness.  Called once before each game."""

    def decide(self, n: int, history: Sequence[int]) -> bool:
        """Return STOP or CONTINUE after seeing ``history`` (relative ranks)."""
        raise NotImplementedError

    def stop_positions(self, ranks: np.ndarray) -> np.ndarray:
        """Stopping positions (1-based) for a batch of games.

        ``ranks[g, t]`` is the absolute rank (position in the qualification
        ordering) of the ``t``-th arrival of game ``g``.
        """
        ranks = np.asarray(ranks)
        n = ranks.shape[1]
        ident = tuple(range(1, n + 1))
        out = np.empty(ranks.shape[0], dtype=np.int64)
        for g, row in enumerate(ranks):
            history = relative_ranks(ident, row.tolist())
            self.start_game()
            out[g] = _play(self, n, history)
        return out

    def __repr__(self):
        return f"{type(self).__name__}()"


def _play(policy, n, history):
    for t in range(1, n + 1):
        if t == n or policy.decide(n, history[:t]):
            return t
    raise AssertionError("unreachable")


class OptimalSecretary(StoppingPolicy):
    """Skip the first ``threshold(n) - 1`` arrivals, then take the first
    arrival that is the best so far; take the last one if none is."""

    def decide(self, n, history):
        t = len(history)
        return t == n or (t >= threshold(n) and history[-1] == 1)

    def stop_positions(self, ranks):
        ranks = np.asarray(ranks)
        n = ranks.shape[1]
        best = ranks == np.minimum.accumulate(ranks, axis=1)
        best[:, : threshold(n) - 1] = False
        best[:, n - 1] = True
        return best.argmax(axis=1) + 1


class BlindChoice(StoppingPolicy):
    """Always stop at the first arrival."""

    def decide(self, n, history):
        return STOP

    def stop_positions(self, ranks):
        return np.ones(np.shape(ranks)[0], dtype=np.int64)


class PMix(StoppingPolicy):
    """Play ``first`` with probability ``p``, otherwise ``second``.

    The coin is tossed once per game, in :meth:`start_game`; the chosen
    policy then plays the whole game.
    """

    randomized = True

    def __init__(self, first: StoppingPolicy, second: StoppingPolicy, p, rng=None):
        p = as_probability(p, "p")
        self.first = first
        self.second = second
        self.p = p
        self.rng = np.random.default_rng(rng)
        self._current = first

    def start_game(self):
        self._current = self.first if self.rng.random() < self.p else self.second
        self._current.start_game()

    def decide(self, n, history):
        return self._current.decide(n, history)

    def stop_positions(self, ranks):
        ranks = np.asarray(ranks)
        heads = self.rng.random(ranks.shape[0]) < self.p
        out = np.empty(ranks.shape[0], dtype=np.int64)
        if heads.any():
            out[heads] = self.first.stop_positions(ranks[heads])
        if not heads.all():
            out[~heads] = self.second.stop_positions(ranks[~heads])
        return out

    def __repr__(self):
        return f"PMix({self.first!r}, {self.second!r}, p={self.p})"


def optimal_secretary() -> OptimalSecretary:
    return OptimalSecretary()


def blind_choice() -> BlindChoice:
    return BlindChoice()


def p_mix(a: StoppingPolicy, b: StoppingPolicy, p, rng=None) -> PMix:
    return PMix(a, b, p, rng)


@dataclass(frozen=True)
class GameResult:
    stop_position: int
    selected_rank: int
    selected_candidate: int


def run_game(policy: StoppingPolicy, sigma: Sequence[int], tau: Sequence[int]) -> GameResult:
    """Play one game: feed relative-rank prefixes until the policy stops.

    >>> run_game(OptimalSecretary(), (1, 2, 3, 4), (3, 2, 1, 4))
    GameResult(stop_position=2, selected_rank=2, selected_candidate=2)
    """
    sigma, tau = Permutation(sigma), Permutation(tau)
    if len(sigma) != len(tau):
        raise ParameterError("tau", "length differs from sigma")
    n = len(sigma)
    history = relative_ranks(sigma, tau)
    policy.start_game()
    t = _play(policy, n, history)
    chosen = tau.at(t)
    return GameResult(t, sigma.position(chosen), chosen)


def as_probability(p, name="p"):
    """Coerce to a float or Fraction in [0, 1]; strings like "1/3" allowed."""
    if isinstance(p, str):
        try:
            p = Fraction(p)
        except ValueError:
            raise ParameterError(name, f"cannot parse {p!r}") from None
    if isinstance(p, bool) or not isinstance(p, (int, float, Fraction)):
        raise ParameterError(name, f"expected a number, got {p!r}")
    if isinstance(p, float) and math.isnan(p) or not 0 <= p <= 1:
        raise ParameterError(name, f"must lie in [0, 1], got {p}")
    return p


def policy_from_name(name: str, p=None, rng=None) -> StoppingPolicy:
    """Build a policy from ``optimal``, ``blind``, ``pmix:<p>`` or ``pmix``.

    The bare ``pmix`` form takes its weight from ``p``.  The mixture is
    always optimal-with-probability-p, blind otherwise.
    """
    key, _, arg = name.strip().partition(":")
    key = key.lower()
    if key == "optimal":
        return OptimalSecretary()
    if key == "blind":
        return BlindChoice()
    if key == "pmix":
        weight = arg or p
        if weight is None or weight == "":
            raise ParameterError("p", "pmix needs a weight, e.g. pmix:0.5")
        return PMix(OptimalSecretary(), BlindChoice(), as_probability(weight), rng)
    raise ParameterError("policy", f"unknown policy {name!r}")
