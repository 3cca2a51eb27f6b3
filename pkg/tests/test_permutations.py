import itertools
from collections import Counter, deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpstop.errors import CapacityError, ParameterError
from dpstop.permutations import (
    Permutation,
    dl_distance,
    format_permutation,
    neighbors_dl,
    parse_permutation,
    relative_ranks,
    uniform_time_ordering,
)


def perms(n):
    return st.permutations(list(range(1, n + 1))).map(Permutation)


sized_perm = st.integers(2, 7).flatmap(perms)


def inversions(seq):
    return sum(1 for a, b in itertools.combinations(seq, 2) if a > b)


def bfs_over_neighbors(src, dst, l):
    # Oracle: plain BFS on the neighbor graph, no group-theoretic shortcuts.
    src, dst = Permutation(src), Permutation(dst)
    seen = {src: 0}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        if cur == dst:
            return seen[cur]
        for nxt in neighbors_dl(cur, l):
            if nxt not in seen:
                seen[nxt] = seen[cur] + 1
                queue.append(nxt)
    raise AssertionError("unreachable")


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(ParameterError):
            Permutation([1, 1, 2])
        with pytest.raises(ParameterError):
            Permutation([0, 1, 2])
        with pytest.raises(ParameterError):
            Permutation([])

    def test_one_based_helpers(self):
        s = Permutation([3, 1, 2])
        assert s.at(1) == 3
        assert s.position(3) == 1
        assert s.swap(1, 3) == (2, 1, 3)
        assert s.inverse() == (2, 3, 1)

    def test_round_trip_text(self):
        s = Permutation([3, 1, 2])
        assert format_permutation(s) == "3,1,2"
        assert parse_permutation("3,1,2") == s
        with pytest.raises(ParameterError):
            parse_permutation("3,x,2")


class TestNeighbors:
    def test_adjacent_swaps_n3(self):
        assert set(neighbors_dl((1, 2, 3), 1)) == {(2, 1, 3), (1, 3, 2)}

    def test_all_transpositions_n3(self):
        assert set(neighbors_dl((1, 2, 3), 2)) == {(2, 1, 3), (1, 3, 2), (3, 2, 1)}

    def test_count_n10_l3(self):
        assert len(neighbors_dl(Permutation.identity(10), 3)) == 24

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_matches_exhaustive_generation(self, n):
        sigma = Permutation.identity(n)
        for l in range(1, n):
            expected = set()
            for rho in itertools.permutations(range(1, n + 1)):
                diff = [i for i in range(n) if rho[i] != sigma[i]]
                if len(diff) == 2 and diff[1] - diff[0] <= l:
                    expected.add(rho)
            got = neighbors_dl(sigma, l)
            assert len(got) == len(set(got)) == sum(n - d for d in range(1, l + 1))
            assert set(got) == expected

    @pytest.mark.parametrize("l", [0, 3])
    def test_l_out_of_range(self, l):
        with pytest.raises(ParameterError):
            neighbors_dl((1, 2, 3), l)

    @given(sized_perm, st.data())
    def test_monotone_in_l(self, sigma, data):
        l = data.draw(st.integers(1, len(sigma) - 2)) if len(sigma) > 2 else None
        if l is None:
            return
        assert set(neighbors_dl(sigma, l)) <= set(neighbors_dl(sigma, l + 1))


class TestDistance:
    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
    def test_first_last_swap(self, n):
        sigma = Permutation.identity(n)
        rho = sigma.swap(1, n)
        assert dl_distance(sigma, rho, 1) == 2 * n - 3
        assert dl_distance(sigma, rho, n - 1) == 1

    def test_identity(self):
        s = Permutation([2, 4, 1, 3])
        for l in (1, 2, 3):
            assert dl_distance(s, s, l) == 0

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            dl_distance(Permutation.identity(9), Permutation.identity(9), 1)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_d1_is_inversion_count(self, n):
        # d_1(sigma, rho) equals the inversions of rho read in sigma's order.
        for sigma in itertools.permutations(range(1, n + 1)):
            for rho in itertools.permutations(range(1, n + 1)):
                pos = {c: i for i, c in enumerate(sigma)}
                assert dl_distance(sigma, rho, 1) == inversions([pos[c] for c in rho])

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_metric_axioms_exhaustive(self, n):
        all_perms = list(itertools.permutations(range(1, n + 1)))
        for l in range(1, n):
            d = {(a, b): dl_distance(a, b, l) for a in all_perms for b in all_perms}
            for a in all_perms:
                for b in all_perms:
                    assert d[a, b] == d[b, a]
                    assert (d[a, b] == 0) == (a == b)
                    for c in all_perms:
                        assert d[a, c] <= d[a, b] + d[b, c]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 5).flatmap(lambda n: st.tuples(perms(n), perms(n), st.integers(1, n - 1))))
    def test_agrees_with_neighbor_graph_bfs(self, case):
        sigma, rho, l = case
        assert dl_distance(sigma, rho, l) == bfs_over_neighbors(rho, sigma, l)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 6).flatmap(lambda n: st.tuples(perms(n), perms(n), st.integers(1, n - 1))))
    def test_distance_one_iff_neighbor(self, case):
        sigma, rho, l = case
        assert (dl_distance(sigma, rho, l) == 1) == (rho in neighbors_dl(sigma, l))


class TestSampling:
    def test_n1(self):
        assert uniform_time_ordering(1, 0) == (1,)

    def test_deterministic(self):
        assert uniform_time_ordering(20, 1234) == uniform_time_ordering(20, 1234)

    def test_uniform_n3(self):
        rng = np.random.default_rng(5)
        draws = 600_000
        counts = Counter(uniform_time_ordering(3, rng) for _ in range(draws))
        assert len(counts) == 6
        se = (draws * (1 / 6) * (5 / 6)) ** 0.5
        for c in counts.values():
            assert abs(c - draws / 6) <= 4 * se


class TestRelativeRanks:
    def test_hand_trace(self):
        assert relative_ranks((1, 2, 3), (2, 1, 3)) == (1, 1, 3)

    def test_best_first_arrival_order(self):
        s = Permutation.identity(6)
        assert relative_ranks(s, s) == (1, 2, 3, 4, 5, 6)

    def test_worst_first_arrival_order(self):
        s = Permutation.identity(6)
        assert relative_ranks(s, tuple(reversed(s))) == (1,) * 6

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            relative_ranks((1, 2), (1, 2, 3))

    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(perms(n), perms(n))))
    def test_definition(self, case):
        sigma, tau = case
        ranks = relative_ranks(sigma, tau)
        for t, r in enumerate(ranks, start=1):
            assert 1 <= r <= t
            better = [s for s in tau[:t] if sigma.position(s) <= sigma.position(tau[t - 1])]
            assert r == len(better)
