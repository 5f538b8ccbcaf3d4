"""Weight certificates ruling out interval partitions.

Give every poset point a weight w with w >= 0 on good points (those allowed
to stand alone). If every admissible interval has total weight >= 0 while the
whole poset has negative weight, no partition exists: the partition would
write the total as a sum of non-negative parts. Such weights are the dual of
the linear relaxation of the exact cover. They are found with HiGHS and then
rounded and re-checked in exact integer arithmetic, so floating point never
decides anything.

The same columns also feed an exact-cover MIP, which often finds a partition
faster than the combinatorial search. Its answer is re-checked with bit
masks; a MIP that reports infeasibility is ignored.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Optional

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp
from scipy.sparse import csr_matrix


def interval_columns(decision) -> list[tuple[int, tuple[int, ...], int]]:
    """(bottom rank, top, mask) of every useful interval over the full point set."""
    P = decision.P
    cols = []
    for r in P.ranks(decision.deficient):
        cols.extend((r, d, mask) for d, mask in decision.candidates(r, P.points))
    return cols


def _incidence(P, cols: list[int]) -> tuple[csr_matrix, list[int]]:
    ranks = list(P.ranks())
    index = {r: i for i, r in enumerate(ranks)}
    indptr, indices = [0], []
    for mask in cols:
        indices.extend(index[r] for r in P.ranks(mask))
        indptr.append(len(indices))
    data = np.ones(len(indices), dtype=np.int64)
    return csr_matrix((data, indices, indptr), shape=(len(cols), len(ranks))), ranks


def _exact_check(A: csr_matrix, w: np.ndarray, good: np.ndarray) -> bool:
    return bool((A @ w >= 0).all() and (w[good] >= 0).all() and w.sum() < 0)


def _rounded(x: np.ndarray, good: np.ndarray, A: csr_matrix) -> Optional[np.ndarray]:
    for limit in (10**3, 10**6):
        fracs = [Fraction(float(v)).limit_denominator(limit) for v in x]
        fracs = [max(f, Fraction(0)) if gd else f for f, gd in zip(fracs, good)]
        scale = lcm(*(f.denominator for f in fracs))
        ints = [int(f * scale) for f in fracs]
        if max(map(abs, ints)) * len(ints) >= 2**62:
            continue  # int64 sums must stay exact
        w = np.array(ints, dtype=np.int64)
        if _exact_check(A, w, good):
            return w
    return None


def _integral(A: csr_matrix, good: np.ndarray, time_limit: Optional[float]) -> Optional[np.ndarray]:
    """Integer weights found by a feasibility MIP (small bounds keep it fast)."""
    size = A.shape[1]
    constraints = [
        LinearConstraint(A, 0, np.inf),
        LinearConstraint(np.ones((1, size)), -np.inf, -1),
    ]
    for top in (2, 8):
        options = {} if time_limit is None else {"time_limit": max(time_limit, 0.1)}
        res = milp(
            np.zeros(size),
            constraints=constraints,
            integrality=np.ones(size),
            bounds=Bounds(np.where(good, 0, -1), np.full(size, top)),
            options=options,
        )
        if res.x is not None:
            w = np.round(res.x).astype(np.int64)
            if _exact_check(A, w, good):
                return w
    return None


def refute(decision, time_limit: Optional[float] = None) -> Optional[dict[tuple[int, ...], int]]:
    """Integer point weights proving the decision infeasible, or None.

    None means no certificate was found; the decision is then still open.
    """
    P = decision.P
    cols = [mask for _, _, mask in interval_columns(decision)]
    if not cols:
        return None
    A, ranks = _incidence(P, cols)
    good = np.array([bool(decision.good >> r & 1) for r in ranks])
    bounds = [(0, None) if gd else (-1, None) for gd in good]
    options = {} if time_limit is None else {"time_limit": max(time_limit, 0.1)}
    res = linprog(
        np.ones(len(ranks)), A_ub=-A, b_ub=np.zeros(len(cols)), bounds=bounds,
        method="highs-ipm", options=options,
    )
    if res.status != 0 or res.fun > -1e-7:
        return None
    w = _rounded(res.x, good, A)
    if w is None:
        w = _integral(A, good, time_limit)
    if w is None:
        return None
    return {P.point(r): int(x) for r, x in zip(ranks, w) if x}


def cover(decision, time_limit: Optional[float] = None) -> Optional[list]:
    """Intervals covering every deficient point exactly once, or None."""
    P = decision.P
    cols = interval_columns(decision)
    if not cols:
        return None
    A, ranks = _incidence(P, [mask for _, _, mask in cols])
    deficient = np.array([bool(decision.deficient >> r & 1) for r in ranks])
    options = {} if time_limit is None else {"time_limit": max(time_limit, 0.1)}
    res = milp(
        np.zeros(len(cols)),
        constraints=[LinearConstraint(A.T.tocsr(), deficient.astype(float), np.ones(len(ranks)))],
        integrality=np.ones(len(cols)),
        bounds=Bounds(0, 1),
        options=options,
    )
    if res.x is None:
        return None
    chosen = [cols[i] for i in np.flatnonzero(res.x > 0.5)]
    used = 0
    for _, _, mask in chosen:
        if used & mask:
            return None
        used |= mask
    if decision.deficient & ~used:
        return None
    return [(P.point(r), d) for r, d, _ in chosen] + [(a, a) for a in map(P.point, P.ranks(P.points & ~used))]
