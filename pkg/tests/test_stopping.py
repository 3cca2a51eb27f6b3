import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpstop.errors import ParameterError
from dpstop.exact import brute_force_distribution
from dpstop.permutations import Permutation, relative_ranks
from dpstop.stopping import (
    BlindChoice,
    OptimalSecretary,
    PMix,
    StoppingPolicy,
    blind_choice,
    optimal_secretary,
    p_mix,
    policy_from_name,
    run_game,
    threshold,
)


def threshold_oracle(n):
    # Literal reading of the definition, with exact rationals.
    for t in range(1, n + 1):
        if sum(Fraction(1, i) for i in range(t, n)) <= 1:
            return t


class TestThreshold:
    @pytest.mark.parametrize("n, t", [(1, 1), (2, 2), (3, 2), (4, 2), (10, 4)])
    def test_values(self, n, t):
        assert threshold(n) == t

    def test_matches_definition(self):
        for n in range(3, 400):
            assert threshold(n) == threshold_oracle(n)

    def test_n2_floor(self):
        # The literal definition gives 1 for n = 2 (1/1 <= 1); the rule
        # needs at least one observed arrival, so 2 is used.
        assert threshold_oracle(2) == 1
        assert threshold(2) == 2

    def test_near_n_over_e(self):
        assert abs(threshold(1000) - 369) <= 1
        assert abs(threshold(1000) - 1000 / np.e) <= 2
        assert abs(threshold(100_000) / 100_000 - 1 / np.e) < 1e-4

    def test_rejects_bad_n(self):
        with pytest.raises(ParameterError):
            threshold(0)


class TestRunGame:
    def test_optimal_hand_traces(self):
        m = optimal_secretary()
        assert run_game(m, (1, 2, 3), (2, 1, 3)).stop_position == 2
        assert run_game(m, (1, 2, 3), (2, 1, 3)).selected_rank == 1
        res = run_game(m, (1, 2, 3), (1, 2, 3))
        assert (res.stop_position, res.selected_rank) == (3, 3)
        assert run_game(m, (1,), (1,)).stop_position == 1

    def test_optimal_n4_traces(self):
        m = OptimalSecretary()
        sigma = Permutation.identity(4)
        assert relative_ranks(sigma, (3, 2, 1, 4)) == (1, 1, 1, 4)
        res = run_game(m, sigma, (3, 2, 1, 4))
        assert (res.stop_position, res.selected_rank, res.selected_candidate) == (2, 2, 2)
        res = run_game(m, sigma, (4, 3, 2, 1))
        assert (res.stop_position, res.selected_rank) == (2, 3)

    def test_blind_stops_first(self):
        b = blind_choice()
        for tau in itertools.permutations(range(1, 6)):
            assert run_game(b, (3, 1, 4, 5, 2), tau).stop_position == 1
        assert run_game(b, (1,), (1,)).stop_position == 1

    def test_result_is_consistent(self):
        sigma = Permutation([4, 2, 5, 1, 3])
        for tau in itertools.permutations(range(1, 6)):
            res = run_game(OptimalSecretary(), sigma, tau)
            assert res.selected_candidate == tau[res.stop_position - 1]
            assert res.selected_rank == sigma.position(res.selected_candidate)

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_optimal_stops_at_best_so_far_or_last(self, n):
        sigma = Permutation.identity(n)
        t_n = threshold(n)
        for tau in itertools.permutations(range(1, n + 1)):
            res = run_game(OptimalSecretary(), sigma, tau)
            ranks = relative_ranks(sigma, tau)
            assert res.stop_position >= t_n
            assert ranks[res.stop_position - 1] == 1 or res.stop_position == n

    def test_blind_rank_distribution_n4(self):
        dist = brute_force_distribution(BlindChoice(), 4)
        assert dist.probs == (Fraction(1, 4),) * 4


class TestSigmaInvariance:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    @pytest.mark.parametrize("policy", [OptimalSecretary(), BlindChoice()], ids=repr)
    def test_rank_distribution_ignores_sigma(self, n, policy):
        rng = np.random.default_rng(n)
        base = brute_force_distribution(policy, n)
        for _ in range(4):
            sigma = Permutation(rng.permutation(n) + 1)
            assert brute_force_distribution(policy, n, sigma) == base


class TestPMix:
    def test_rejects_bad_weight(self):
        with pytest.raises(ParameterError):
            p_mix(OptimalSecretary(), BlindChoice(), 1.5)
        with pytest.raises(ParameterError):
            p_mix(OptimalSecretary(), BlindChoice(), -0.1)

    @pytest.mark.parametrize("p, same_as", [(1, OptimalSecretary()), (0, BlindChoice())])
    def test_degenerate_coin(self, p, same_as):
        mix = p_mix(OptimalSecretary(), BlindChoice(), p, rng=3)
        sigma = Permutation.identity(4)
        for tau in itertools.permutations(range(1, 5)):
            assert run_game(mix, sigma, tau) == run_game(same_as, sigma, tau)

    def test_coin_fixed_for_whole_game(self):
        class Recorder(StoppingPolicy):
            def __init__(self):
                self.calls = 0

            def decide(self, n, history):
                self.calls += 1
                return False

        a, b = Recorder(), Recorder()
        mix = PMix(a, b, 0.5, rng=11)
        for _ in range(200):
            a.calls = b.calls = 0
            run_game(mix, (1, 2, 3, 4, 5), (5, 4, 3, 2, 1))
            # One sub-policy sees every step before the forced stop.
            assert sorted((a.calls, b.calls)) == [0, 4]

    def test_mixture_of_exact_distributions(self):
        opt = brute_force_distribution(OptimalSecretary(), 4)
        blind = brute_force_distribution(BlindChoice(), 4)
        half = Fraction(1, 2)
        assert half * opt[1] + half * blind[1] == Fraction(17, 48)

    def test_heads_frequency(self):
        mix = PMix(OptimalSecretary(), BlindChoice(), 0.3, rng=0)
        games = 20_000
        heads = 0
        for _ in range(games):
            mix.start_game()
            heads += mix._current is mix.first
        se = (0.3 * 0.7 / games) ** 0.5
        assert abs(heads / games - 0.3) <= 4 * se


class TestBatch:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 9), st.integers(0, 2**32 - 1))
    def test_vectorized_optimal_matches_game_loop(self, n, seed):
        rng = np.random.default_rng(seed)
        ranks = np.array([rng.permutation(n) + 1 for _ in range(50)])
        fast = OptimalSecretary().stop_positions(ranks)
        slow = StoppingPolicy.stop_positions(OptimalSecretary(), ranks)
        assert fast.tolist() == slow.tolist()

    def test_vectorized_blind(self):
        ranks = np.array([[3, 1, 2], [1, 2, 3]])
        assert BlindChoice().stop_positions(ranks).tolist() == [1, 1]

    def test_pmix_batch_uses_both_components(self):
        rng = np.random.default_rng(1)
        ranks = np.array([rng.permutation(8) + 1 for _ in range(400)])
        mix = PMix(OptimalSecretary(), BlindChoice(), 0.5, rng=2)
        pos = mix.stop_positions(ranks)
        opt = OptimalSecretary().stop_positions(ranks)
        assert np.all((pos == 1) | (pos == opt))
        assert 0 < np.sum(pos == 1) < 400


class TestPolicyNames:
    def test_names(self):
        assert isinstance(policy_from_name("optimal"), OptimalSecretary)
        assert isinstance(policy_from_name("blind"), BlindChoice)
        mix = policy_from_name("pmix:0.25")
        assert isinstance(mix, PMix) and mix.p == Fraction(1, 4)
        assert policy_from_name("pmix", p="1/3").p == Fraction(1, 3)

    @pytest.mark.parametrize("name", ["greedy", "pmix", "pmix:2", "pmix:abc"])
    def test_bad_names(self, name):
        with pytest.raises(ParameterError):
            policy_from_name(name)
