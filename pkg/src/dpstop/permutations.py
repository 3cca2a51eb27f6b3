"""Permutations of candidates, the l-distance metric and relative ranks.

Candidates are the integers ``1..n``.  A qualification ordering lists them
best first; a time ordering lists them in arrival order.  Both are plain
:class:`Permutation` values.  Positions are 1-based in every public function.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ParameterError

#: Largest n for which :func:`dl_distance` will search the full group.
MAX_SEARCH_N = 8


class Permutation(tuple):
    """Immutable ordering of the identifiers ``1..n``.

    Behaves as a tuple (0-based indexing, hashing, equality), with 1-based
    helpers for positions.

    >>> s = Permutation([3, 1, 2])
    >>> s.at(1), s.position(2)
    (3, 3)
    """

    def __new__(cls, items: Iterable[int]):
        items = tuple(int(x) for x in items)
        n = len(items)
        if n < 1:
            raise ParameterError("permutation", "must contain at least one element")
        if sorted(items) != list(range(1, n + 1)):
            raise ParameterError(
                "permutation", f"{items} is not a bijection on 1..{n}"
            )
        return super().__new__(cls, items)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        _check_size(n)
        return cls(range(1, n + 1))

    @property
    def n(self) -> int:
        return len(self)

    def at(self, position: int) -> int:
        """Identifier at a 1-based position."""
        return self[position - 1]

    def position(self, candidate: int) -> int:
        """1-based position of ``candidate``."""
        return self.index(candidate) + 1

    def swap(self, i: int, j: int) -> "Permutation":
        """Copy with the entries at 1-based positions ``i`` and ``j`` exchanged."""
        items = list(self)
        items[i - 1], items[j - 1] = items[j - 1], items[i - 1]
        return Permutation(items)

    def inverse(self) -> "Permutation":
        out = [0] * len(self)
        for pos, c in enumerate(self, start=1):
            out[c - 1] = pos
        return Permutation(out)

    def __repr__(self):
        return f"Permutation({format_permutation(self)})"


def _check_size(n):
    if int(n) != n or n < 1:
        raise ParameterError("n", f"must be a positive integer, got {n!r}")


def _check_l(l, n):
    if int(l) != l or not 1 <= l <= n - 1:
        raise ParameterError("l", f"must be an integer in [1, {n - 1}], got {l!r}")


def format_permutation(perm: Sequence[int]) -> str:
    """Serialize as comma-separated identifiers, e.g. ``"3,1,2"``."""
    return ",".join(str(int(x)) for x in perm)


def parse_permutation(text: str) -> Permutation:
    try:
        items = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise ParameterError("permutation", f"cannot parse {text!r}") from None
    return Permutation(items)


def neighbors_dl(sigma: Sequence[int], l: int) -> list[Permutation]:
    """All permutations one l-bounded transposition away from ``sigma``.

    A neighbor swaps the entries at positions ``i < j`` with ``j - i <= l``.
    There are ``sum(n - d for d in 1..l)`` of them, listed by gap then by
    left position.
    """
    sigma = Permutation(sigma)
    n = len(sigma)
    _check_l(l, n)
    return [sigma.swap(i, i + d) for d in range(1, l + 1) for i in range(1, n - d + 1)]


@lru_cache(maxsize=None)
def _distance_table(n, l):
    # Breadth-first search over S_n from the identity, moves = position swaps.
    start = tuple(range(n))
    moves = [(i, i + d) for d in range(1, l + 1) for i in range(n - d)]
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        step = dist[cur] + 1
        for i, j in moves:
            nxt = list(cur)
            nxt[i], nxt[j] = nxt[j], nxt[i]
            nxt = tuple(nxt)
            if nxt not in dist:
                dist[nxt] = step
                queue.append(nxt)
    return dist


def dl_distance(sigma: Sequence[int], rho: Sequence[int], l: int) -> int:
    """Fewest l-bounded transpositions turning ``rho`` into ``sigma``.

    Exhaustive search, guarded at ``n <= MAX_SEARCH_N``.  Position swaps act
    on the right, so the distance only depends on ``rho^-1 o sigma``; one
    search table per ``(n, l)`` is cached and shared by all pairs.
    """
    sigma, rho = Permutation(sigma), Permutation(rho)
    if len(sigma) != len(rho):
        raise ParameterError("rho", "length differs from sigma")
    n = len(sigma)
    if n == 1:
        return 0
    _check_l(l, n)
    if n > MAX_SEARCH_N:
        raise CapacityError(f"dl_distance searches n! states; n={n} > {MAX_SEARCH_N}")
    where = {c: pos for pos, c in enumerate(rho)}
    relative = tuple(where[c] for c in sigma)
    return _distance_table(n, l)[relative]


def uniform_time_ordering(n: int, rng=None) -> Permutation:
    """Draw a time ordering uniformly from all ``n!`` orderings.

    ``rng`` is a :class:`numpy.random.Generator` or anything accepted by
    :func:`numpy.random.default_rng` (an int seed gives a reproducible draw).
    """
    _check_size(n)
    rng = np.random.default_rng(rng)
    return Permutation(rng.permutation(n) + 1)


def relative_ranks(sigma: Sequence[int], tau: Sequence[int]) -> tuple[int, ...]:
    """Relative rank of each arrival among the arrivals so far (1 = best).

    >>> relative_ranks((1, 2, 3), (2, 1, 3))
    (1, 1, 3)
    """
    if len(sigma) != len(tau):
        raise ParameterError("tau", "length differs from sigma")
    rank = {c: pos for pos, c in enumerate(sigma)}
    seen: list[int] = []
    out = []
    for c in tau:
        r = rank[c]
        out.append(1 + sum(1 for s in seen if s < r))
        seen.append(r)
    return tuple(out)
