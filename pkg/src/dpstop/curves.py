"""Trade-off curves between epsilon, delta and the mix weight p.

Each function returns a list of row dicts ready for CSV/JSON output.  By
default the large-n closed forms are used; pass ``finite_n`` to evaluate the
exact finite-n formulas instead.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParameterError
from . import privacy

P_STEP = Fraction(1, 100)
DELTA_STEP = Fraction(1, 1000)
EPS_STEP = Fraction(1, 1000)

DELTA_MAX = Fraction(2, 5)
EPS_MAX = Fraction(3, 2)

FIGURES = {
    1: "epsilon-delta boundary for one (p, l)",
    2: "epsilon-delta boundaries for several p at fixed l",
    3: "epsilon-delta boundaries for several l at fixed p",
    4: "epsilon as a function of p at delta = 0.01",
    5: "delta as a function of p at epsilon = 0.5",
    6: "largest admissible p as a function of epsilon at delta = 0.05",
}


def grid(lo, hi, step) -> list[Fraction]:
    """Evenly spaced rationals from ``lo`` to ``hi`` inclusive."""
    lo, hi, step = Fraction(lo), Fraction(hi), Fraction(step)
    if step <= 0:
        raise ParameterError("step", f"must be positive, got {step}")
    if hi < lo:
        raise ParameterError("range", f"empty range {lo}..{hi}")
    count = int((hi - lo) / step)
    return [lo + i * step for i in range(count + 1)]


def _decimal(x):
    return float(x)


def eps_vs_p(delta, l=1, finite_n=None, ps=None):
    ps = grid(0, 1, P_STEP) if ps is None else ps
    rows = []
    for p in ps:
        if finite_n is None:
            eps = privacy.secretary_eps_asymptotic(p, l, delta)
        else:
            eps = privacy.secretary_eps(finite_n, p, l, delta)
        rows.append({"p": _decimal(p), "epsilon": eps})
    return rows


def delta_vs_p(epsilon, l=1, finite_n=None, ps=None):
    ps = grid(0, 1, P_STEP) if ps is None else ps
    rows = []
    for p in ps:
        if finite_n is None:
            d = privacy.secretary_delta_asymptotic(p, l, epsilon)
        else:
            d = privacy.secretary_delta(finite_n, p, l, epsilon)
        rows.append({"p": _decimal(p), "delta": d})
    return rows


def eps_vs_delta(p, l=1, finite_n=None, deltas=None):
    """Lower boundary of the private (delta, epsilon) region."""
    deltas = grid(0, DELTA_MAX, DELTA_STEP) if deltas is None else deltas
    rows = []
    for d in deltas:
        if finite_n is None:
            eps = privacy.secretary_eps_asymptotic(p, l, d)
        else:
            eps = privacy.secretary_eps(finite_n, p, l, d)
        rows.append({"delta": _decimal(d), "epsilon": eps})
    return rows


def p_vs_eps(delta, l=1, finite_n=None, epsilons=None):
    epsilons = grid(0, EPS_MAX, EPS_STEP) if epsilons is None else epsilons
    rows = []
    for e in epsilons:
        e = float(e)
        if finite_n is None:
            p = privacy.max_p_asymptotic(l, e, delta)
        else:
            p = privacy.max_p(finite_n, l, e, delta)
        rows.append({"epsilon": e, "p": p})
    return rows


def figure(number: int, finite_n=None, p=None, l=None, delta=None, epsilon=None):
    """Rows for one of the six standard plots; see :data:`FIGURES`."""
    if number == 1:
        return eps_vs_delta(1 if p is None else p, l or 1, finite_n)
    if number == 2:
        return [
            {"p": float(w), **row}
            for w in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
            for row in eps_vs_delta(w, l or 1, finite_n)
        ]
    if number == 3:
        return [
            {"l": k, **row}
            for k in (1, 2, 3, 4)
            for row in eps_vs_delta(1 if p is None else p, k, finite_n)
        ]
    if number == 4:
        return eps_vs_p(Fraction(1, 100) if delta is None else delta, l or 1, finite_n)
    if number == 5:
        return delta_vs_p(0.5 if epsilon is None else epsilon, l or 1, finite_n)
    if number == 6:
        return p_vs_eps(Fraction(1, 20) if delta is None else delta, l or 1, finite_n)
    raise ParameterError("figure", f"unknown figure {number!r}; expected 1..6")
