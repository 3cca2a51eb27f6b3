"""Seeded Monte Carlo estimates of selection behaviour.

Every policy in this package is invariant under relabelling of the
qualification ordering, so games are simulated with the identity ordering:
the arrival matrix then directly holds absolute ranks.

Randomness: shard ``s`` of a run with seed ``seed`` draws its arrival
orders from ``SeedSequence(seed, spawn_key=(s, 0))`` and its policy coins
from ``SeedSequence(seed, spawn_key=(s, 1))``.  A run is a pure function of
its :class:`SimulationConfig`, shard count included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from .errors import ParameterError
from .exact import RankDistribution
from .privacy import AuditReport, audit_dp
from .stopping import as_probability, policy_from_name

#: Games below this count get no confidence interval.
MIN_CI_SAMPLES = 10_000

_Z95 = NormalDist().inv_cdf(0.975)
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    policy: str = "optimal"
    p: float | str | None = None
    samples: int = 100_000
    seed: int = 0
    shards: int = 1
    success_set: frozenset = field(default_factory=lambda: frozenset({1}))

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError("n", f"must be a positive integer, got {self.n!r}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ParameterError("samples", f"must be a positive integer, got {self.samples!r}")
        if int(self.shards) != self.shards or not 1 <= self.shards <= self.samples:
            raise ParameterError("shards", f"must be an integer in [1, samples], got {self.shards!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ParameterError("seed", f"must be an integer in [0, 2**64), got {self.seed!r}")
        if self.p is not None:
            as_probability(self.p)
        D = frozenset(int(k) for k in self.success_set)
        if not D or not D <= set(range(1, self.n + 1)):
            raise ParameterError("success_set", f"must be a non-empty subset of 1..{self.n}")
        object.__setattr__(self, "success_set", D)
        # Fail early on an unknown policy name.
        policy_from_name(self.policy, self.p)


@dataclass(frozen=True)
class Estimate:
    point: float
    std_error: float
    ci95: tuple[float, float] | None

    @classmethod
    def from_counts(cls, hits: int, total: int) -> "Estimate":
        f = hits / total
        se = math.sqrt(f * (1.0 - f) / total)
        ci = None
        if total >= MIN_CI_SAMPLES:
            ci = (max(0.0, f - _Z95 * se), min(1.0, f + _Z95 * se))
        return cls(f, se, ci)


def _shard_sizes(samples, shards):
    base, extra = divmod(samples, shards)
    return [base + (s < extra) for s in range(shards)]


def _run_shard(cfg, shard, size):
    n = cfg.n
    arrivals = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(shard, 0)))
    coins = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(shard, 1)))
    policy = policy_from_name(cfg.policy, cfg.p, rng=coins)
    dtype = np.int16 if n < 2**15 else np.int64
    row = np.arange(1, n + 1, dtype=dtype)
    chunk = max(1, _CHUNK_CELLS // n)
    counts = np.zeros(n + 1, dtype=np.int64)
    done = 0
    while done < size:
        m = min(chunk, size - done)
        ranks = arrivals.permuted(np.broadcast_to(row, (m, n)), axis=1)
        stops = np.asarray(policy.stop_positions(ranks))
        chosen = ranks[np.arange(m), stops - 1]
        counts += np.bincount(chosen, minlength=n + 1)
        done += m
    return counts[1:]


def simulate_counts(cfg: SimulationConfig) -> np.ndarray:
    """Number of games (out of ``cfg.samples``) that selected each rank."""
    total = np.zeros(cfg.n, dtype=np.int64)
    # Shards are independent; merging is a plain sum.
    for shard, size in enumerate(_shard_sizes(cfg.samples, cfg.shards)):
        total += _run_shard(cfg, shard, size)
    return total


def estimate_distribution(cfg: SimulationConfig) -> list[Estimate]:
    """Per-rank selection frequencies with binomial standard errors."""
    counts = simulate_counts(cfg)
    return [Estimate.from_counts(int(c), cfg.samples) for c in counts]


def estimate_success(cfg: SimulationConfig) -> Estimate:
    """Frequency with which the selected rank falls in ``cfg.success_set``."""
    counts = simulate_counts(cfg)
    hits = sum(int(counts[k - 1]) for k in cfg.success_set)
    return Estimate.from_counts(hits, cfg.samples)


def empirical_dp(cfg: SimulationConfig, l: int, delta=0) -> AuditReport:
    """Privacy audit of the simulated rank frequencies.

    The neighbor distributions are the swapped frequency vectors, and the
    check runs over one-outcome sets and their complements.  The result is
    a statistical estimate and is flagged ``empirical=True``.
    """
    counts = simulate_counts(cfg)
    freqs = RankDistribution(tuple(Fraction(int(c), cfg.samples) for c in counts))
    report = audit_dp(freqs, l, delta, mode="singleton")
    return AuditReport(
        report.min_epsilon,
        report.max_ratio,
        report.witness_pair,
        report.witness_set,
        report.mode,
        report.l,
        report.delta,
        empirical=True,
    )
