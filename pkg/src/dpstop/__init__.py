"""Differentially private optimal stopping.

The optimal secretary rule, blind choice and their p-mix; exact and
simulated selection probabilities; and (epsilon, delta) privacy bounds and
audits under the l-distance metric on preference orderings.
"""

from .errors import CapacityError, ContractError, ParameterError
from .exact import (
    RankDistribution,
    SeriesValue,
    a_series,
    brute_force_distribution,
    pmix_distribution,
    q_pmix,
    r_asymptotic,
    r_exact,
    r_recurrence,
    secretary_distribution,
)
from .montecarlo import (
    Estimate,
    SimulationConfig,
    empirical_dp,
    estimate_distribution,
    estimate_success,
)
from .permutations import (
    Permutation,
    dl_distance,
    neighbors_dl,
    relative_ranks,
    uniform_time_ordering,
)
from .privacy import (
    UNBOUNDED,
    AuditReport,
    DpParams,
    audit_dp,
    compose_uniform_mix,
    eps_lower_bound,
    max_p,
    max_p_asymptotic,
    secretary_delta,
    secretary_delta_asymptotic,
    secretary_eps,
    secretary_eps_asymptotic,
)
from .stopping import (
    BlindChoice,
    GameResult,
    OptimalSecretary,
    PMix,
    StoppingPolicy,
    blind_choice,
    optimal_secretary,
    p_mix,
    run_game,
    threshold,
)

__version__ = "0.1.0"
