"""Exact Stanley depth through interval partitions of the characteristic poset.

Points of the box [0, g] are identified with their mixed-radix rank
(x1 varies fastest), and point sets are Python ints used as bit vectors.
Rank order is a linear extension of the componentwise order. A minimal
uncovered point must be the bottom of whichever interval covers it, so the
search branches on such a point, choosing the one with the fewest tops.
"""
from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import HypothesisError, IdealError, InfeasibleError
from .monomial import Monomial, MonomialIdeal, contains, max_exponents, monomials_of_degree

IDEAL = "ideal"
QUOTIENT = "quotient"

DEFAULT_BOX_CAP = 10**6
_FAIL_CACHE_LIMIT = 200_000
_FAIL_CACHE_BITS = 2**31  # about 256 MB of cached point sets
_RAISE_CHECK_MAX_VARS = 8
_PROBE_NODES = 500
_SECOND_PROBE_NODES = 20_000


class _NodeLimit(Exception):
    pass


def rho(d: Sequence[int], g: Sequence[int]) -> int:
    """Number of coordinates where d reaches the bound g."""
    return sum(1 for a, b in zip(d, g) if a == b)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _repeat(pattern: int, period: int, count: int) -> int:
    # pattern copied `count` times at spacing `period`
    return pattern * (((1 << (period * count)) - 1) // ((1 << period) - 1))


@dataclass(eq=False)
class CharacteristicPoset:
    """Ideal points or quotient points of the box [0, g] for a monomial ideal."""

    g: tuple[int, ...]
    mode: str
    points: int  # bit vector over box ranks
    ideal: MonomialIdeal = field(repr=False)

    def __post_init__(self):
        self.n = len(self.g)
        self.radix = tuple(b + 1 for b in self.g)
        strides = [1]
        for r in self.radix[:-1]:
            strides.append(strides[-1] * r)
        self.strides = tuple(strides)
        self.size = math.prod(self.radix)
        self.full = (1 << self.size) - 1
        self._range_masks: dict[tuple[int, int, int], int] = {}

    # -- geometry --------------------------------------------------------
    def rank(self, a: Sequence[int]) -> int:
        return sum(x * s for x, s in zip(a, self.strides))

    def point(self, r: int) -> tuple[int, ...]:
        return tuple((r // s) % b for s, b in zip(self.strides, self.radix))

    def range_mask(self, j: int, lo: int, hi: int) -> int:
        """Points of the box with lo <= a_j <= hi (j is 0-based)."""
        key = (j, lo, hi)
        mask = self._range_masks.get(key)
        if mask is None:
            s, r = self.strides[j], self.radix[j]
            block = ((1 << ((hi - lo + 1) * s)) - 1) << (lo * s)
            mask = _repeat(block, s * r, self.size // (s * r))
            self._range_masks[key] = mask
        return mask

    def interval_mask(self, c: Sequence[int], d: Sequence[int]) -> int:
        mask = self.full
        for j, (lo, hi) in enumerate(zip(c, d)):
            mask &= self.range_mask(j, lo, hi)
        return mask

    def rho_at_least(self, k: int) -> int:
        """Points a of the box with rho(a) >= k."""
        at_least = [self.full] + [0] * self.n
        for j in range(self.n):
            top = self.range_mask(j, self.g[j], self.g[j])
            for t in range(j + 1, 0, -1):
                at_least[t] |= at_least[t - 1] & top
        return at_least[k] if k <= self.n else 0

    # -- contents --------------------------------------------------------
    def __len__(self) -> int:
        return _popcount(self.points)

    def __contains__(self, a: Sequence[int]) -> bool:
        if len(a) != self.n or any(x < 0 or x > b for x, b in zip(a, self.g)):
            return False
        return bool(self.points >> self.rank(a) & 1)

    def ranks(self, mask: Optional[int] = None) -> Iterator[int]:
        mask = self.points if mask is None else mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def iter_points(self) -> Iterator[tuple[int, ...]]:
        for r in self.ranks():
            yield self.point(r)


def char_poset(
    I: MonomialIdeal,
    mode: str = IDEAL,
    g: Optional[Sequence[int]] = None,
    box_cap: int = DEFAULT_BOX_CAP,
) -> CharacteristicPoset:
    """Split the box [0, g] into points inside I (ideal mode) or outside (quotient mode)."""
    if mode not in (IDEAL, QUOTIENT):
        raise ValueError(f"unknown poset mode {mode!r}")
    if I.is_zero:
        raise IdealError("characteristic poset of the zero ideal")
    if mode == QUOTIENT and I.is_unit:
        raise IdealError("S/S has an empty characteristic poset")
    gmax = max_exponents(I)
    if g is None:
        g = gmax
    g = tuple(int(b) for b in g)
    if len(g) != I.n or any(b < m for b, m in zip(g, gmax)):
        raise IdealError(f"bound {g} is below the maximal exponents {gmax}")
    size = math.prod(b + 1 for b in g)
    if size > box_cap:
        raise InfeasibleError(f"box of {size} points exceeds cap {box_cap}")
    P = CharacteristicPoset(g, mode, 0, I)
    inside = 0
    for gen in I.gens:
        inside |= P.interval_mask(gen, g)
    P.points = inside if mode == IDEAL else P.full ^ inside
    return P


@dataclass(frozen=True)
class IntervalPartition:
    g: tuple[int, ...]
    intervals: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def value(self) -> int:
        return min(rho(d, self.g) for _, d in self.intervals)

    def problems(self, P: CharacteristicPoset) -> list[str]:
        """Re-check the partition against P point by point, independent of the search."""
        issues = []
        seen: set[tuple[int, ...]] = set()
        for c, d in self.intervals:
            if not all(0 <= a <= b <= h for a, b, h in zip(c, d, self.g)):
                issues.append(f"interval [{c}, {d}] is not inside the box")
                continue
            for a in _box_iter(c, d):
                if a not in P:
                    issues.append(f"interval [{c}, {d}] leaves the poset at {a}")
                    break
                if a in seen:
                    issues.append(f"point {a} covered twice")
                    break
                seen.add(a)
        missing = [a for a in P.iter_points() if a not in seen]
        if missing:
            issues.append(f"{len(missing)} poset points uncovered, e.g. {missing[0]}")
        return issues

    def to_dict(self) -> list[dict]:
        return [
            {"c": list(c), "d": list(d), "Z": [j for j, (a, b) in enumerate(zip(d, self.g), 1) if a == b]}
            for c, d in self.intervals
        ]


def _box_iter(c: Sequence[int], d: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not c:
        yield ()
        return
    for head in range(c[0], d[0] + 1):
        for rest in _box_iter(c[1:], d[1:]):
            yield (head,) + rest


@dataclass
class SolverStats:
    nodes: int = 0
    cache_hits: int = 0
    pruned: int = 0
    lp_refutations: int = 0
    mip_covers: int = 0
    decisions: dict = field(default_factory=dict)  # k -> feasible
    seconds: float = 0.0


class _Decision:
    """Is there a partition of P into intervals whose tops all have rho >= k?

    rho only grows going up, so points with rho >= k form an up-set and can
    always stand alone as singleton intervals. The search therefore only has
    to cover the deficient points (rho < k), a down-set: each minimal
    uncovered member is the bottom of its interval. Among tops covering the
    same deficient points only inclusion-minimal ones are tried, since the
    good points a larger interval would take can be singletons instead.
    """

    def __init__(self, P: CharacteristicPoset, k: int, deadline: Optional[float], stats: SolverStats):
        self.P = P
        self.k = k
        self.deadline = deadline
        self.stats = stats
        self.good = P.rho_at_least(k)
        self.deficient = P.points & ~self.good
        self.below_top = [P.range_mask(j, 0, P.g[j] - 1) if P.g[j] else 0 for j in range(P.n)]
        self.above_bottom = [P.range_mask(j, 1, P.g[j]) if P.g[j] else 0 for j in range(P.n)]
        self.failed: set[int] = set()
        self._cache_limit = min(_FAIL_CACHE_LIMIT, _FAIL_CACHE_BITS // max(P.size, 1))
        self._use_raises = P.n <= _RAISE_CHECK_MAX_VARS
        if self._use_raises:
            self._prepare_raises()

    def _reachable(self, U: int) -> bool:
        # every uncovered deficient point needs an uncovered chain up to a good point
        P = self.P
        X = U & self.good
        while True:
            prev = X
            for s, nt in zip(P.strides, self.below_top):
                X |= U & ((X >> s) & nt)
            if X == prev:
                return not (U & self.deficient & ~X)

    def _up_closed(self, j: int, X: int) -> int:
        """Points a whose whole ray {a + t e_j : a_j + t <= g_j} lies in X."""
        P = self.P
        s, gj = P.strides[j], P.g[j]
        Y = X
        for t in range(1, gj + 1):
            Y &= (X >> (t * s)) | P.range_mask(j, gj - t + 1, gj)
        return Y

    def _coverable(self, U: int) -> bool:
        """Every uncovered deficient point a needs [a, d] inside U for a good d.

        d is a with the coordinates in some set T raised to their bounds; the
        points a with [a, d_T(a)] inside U are built one raised coordinate at a
        time. Subsets T are visited in increasing bitmask order so T minus its
        lowest coordinate is always ready.
        """
        inside = {0: U}
        covered = U & self._raise_targets[0]
        for T, (low, rest) in self._subset_steps:
            inside[T] = self._up_closed(low, inside[rest])
            covered |= inside[T] & self._raise_targets[T]
        return not (U & self.deficient & ~covered)

    def _prepare_raises(self) -> None:
        P, k, n = self.P, self.k, self.P.n
        self._subset_steps = []
        self._raise_targets = {}
        tops = [P.range_mask(j, P.g[j], P.g[j]) for j in range(n)]
        for T in range(1 << n):
            size = bin(T).count("1")
            if size > k:
                continue
            # rho(d_T(a)) >= k  <=>  at least k - |T| coordinates outside T at the bound
            at_least = [P.full] + [0] * n
            for j in range(n):
                if T >> j & 1:
                    continue
                for t in range(n, 0, -1):
                    at_least[t] |= at_least[t - 1] & tops[j]
            self._raise_targets[T] = at_least[max(k - size, 0)]
            if T:
                low = (T & -T).bit_length() - 1
                self._subset_steps.append((T, (low, T & ~(1 << low))))

    def candidates(self, r: int, U: int) -> list[tuple[tuple[int, ...], int]]:
        """Useful tops d over the bottom with rank r, with their interval masks."""
        P, k, n = self.P, self.k, self.P.n
        c = P.point(r)
        outside = P.full ^ U
        # suffix[j] = points agreeing with c on coordinates j..n-1
        suffix = [P.full] * (n + 1)
        for j in range(n - 1, -1, -1):
            suffix[j] = suffix[j + 1] & P.range_mask(j, c[j], c[j])
        found = []
        d = list(c)

        def extend(j: int, prefix: int, hits: int) -> None:
            if j == n:
                found.append((tuple(d), prefix))
                return
            gj = P.g[j]
            for v in range(c[j], gj + 1):
                hit = v == gj
                if not hit and hits + (n - j - 1) < k:
                    continue
                part = prefix & P.range_mask(j, c[j], v)
                if part & suffix[j + 1] & outside:
                    break
                d[j] = v
                extend(j + 1, part, hits + hit)
            d[j] = c[j]

        extend(0, P.full, 0)
        groups: dict[int, list] = {}
        for d, mask in found:
            groups.setdefault(mask & self.deficient, []).append((d, mask))
        kept = []
        for group in groups.values():
            for d, mask in group:
                if not any(other != d and all(a <= b for a, b in zip(other, d)) for other, _ in group):
                    kept.append((d, mask))
        # most deficient points per good point consumed, then rank of the top
        kept.sort(key=lambda item: (
            -_popcount(item[1] & self.deficient) / (1 + _popcount(item[1] & self.good)),
            P.rank(item[0]),
        ))
        return kept

    def _branch_point(self, U: int) -> tuple[int, list]:
        """Minimal uncovered deficient point with the fewest useful tops."""
        P = self.P
        B = U & self.deficient
        covered_below = 0
        for s, ab in zip(P.strides, self.above_bottom):
            covered_below |= (B << s) & ab
        best = None
        for r in P.ranks(B & ~covered_below):
            cands = self.candidates(r, U)
            if best is None or len(cands) < len(best[1]):
                best = (r, cands)
                if len(cands) <= 1:
                    break
        return best

    def decide(self, use_lp: bool = True):
        """Witness intervals for the full poset, or None when infeasible."""
        P = self.P
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise InfeasibleError("time budget exceeded")
        if not self.deficient:
            return [(a, a) for a in P.iter_points()]
        if not (self._coverable(P.points) if self._use_raises else self._reachable(P.points)):
            return None
        if use_lp:
            try:
                return self.solve(node_limit=_PROBE_NODES)
            except _NodeLimit:
                pass
            from .relaxation import cover, refute

            budget = None if self.deadline is None else self.deadline - time.monotonic()
            if refute(self, budget) is not None:
                self.stats.lp_refutations += 1
                return None
            try:
                return self.solve(node_limit=_SECOND_PROBE_NODES)
            except _NodeLimit:
                pass
            budget = None if self.deadline is None else self.deadline - time.monotonic()
            found = cover(self, budget)
            if found is not None:
                self.stats.mip_covers += 1
                return found
        return self.solve()

    def solve(self, U: Optional[int] = None, node_limit: Optional[int] = None):
        P, stats = self.P, self.stats
        U = P.points if U is None else U
        frames: list[list] = []  # [uncovered, bottom, candidates, next index]
        nodes = 0
        while True:
            if not U & self.deficient:
                chosen = [(P.point(f[1]), f[2][f[3] - 1][0]) for f in frames]
                return chosen + [(a, a) for a in map(P.point, P.ranks(U))]
            stats.nodes += 1
            nodes += 1
            if node_limit is not None and nodes > node_limit:
                raise _NodeLimit
            if stats.nodes % 2048 == 0 and self.deadline is not None and time.monotonic() > self.deadline:
                raise InfeasibleError("time budget exceeded")
            if U in self.failed:
                stats.cache_hits += 1
            elif not (self._coverable(U) if self._use_raises else self._reachable(U)):
                stats.pruned += 1
                self._fail(U)
            else:
                r, cands = self._branch_point(U)
                if cands:
                    frames.append([U, r, cands, 0])
                else:
                    self._fail(U)
            while frames:
                f = frames[-1]
                if f[3] < len(f[2]):
                    U = f[0] ^ f[2][f[3]][1]
                    f[3] += 1
                    break
                self._fail(f[0])
                frames.pop()
            else:
                return None

    def _fail(self, U: int) -> None:
        if len(self.failed) < self._cache_limit:
            self.failed.add(U)


def _solve_branch(args):
    P, k, U, deadline = args
    return _Decision(P, k, deadline, SolverStats()).solve(U)


def _decide_parallel(P, k, deadline, stats, workers, use_lp):
    from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait

    from .relaxation import refute

    top = _Decision(P, k, deadline, stats)
    if not top.deficient:
        return [(a, a) for a in P.iter_points()]
    if not top._reachable(P.points):
        return None
    if use_lp and refute(top) is not None:
        stats.lp_refutations += 1
        return None
    r = (top.deficient & -top.deficient).bit_length() - 1
    c = P.point(r)
    cands = top.candidates(r, P.points)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending = {
            pool.submit(_solve_branch, (P, k, P.points ^ mask, deadline)): d for d, mask in cands
        }
        while pending:
            done, _ = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                d = pending.pop(fut)
                rest = fut.result()
                if rest is not None:
                    for other in pending:
                        other.cancel()
                    return [(c, d)] + rest
    return None


def sdepth_exact(
    P: CharacteristicPoset,
    time_budget: Optional[float] = None,
    workers: int = 1,
    stats: Optional[SolverStats] = None,
    use_lp: bool = True,
) -> tuple[int, IntervalPartition]:
    """Largest k admitting an interval partition with every top of rho >= k.

    workers == 1 is the canonical deterministic mode; more workers fan the
    first branching level out over processes (same value, possibly another
    witness).
    """
    if not P.points:
        raise IdealError("empty characteristic poset")
    stats = stats if stats is not None else SolverStats()
    start = time.monotonic()
    deadline = None if time_budget is None else start + time_budget
    try:
        for k in range(P.n, -1, -1):
            if workers > 1:
                found = _decide_parallel(P, k, deadline, stats, workers, use_lp)
            else:
                found = _Decision(P, k, deadline, stats).decide(use_lp)
            stats.decisions[k] = found is not None
            if found is not None:
                return k, IntervalPartition(P.g, tuple(found))
    finally:
        stats.seconds = time.monotonic() - start
    raise AssertionError("k = 0 is always feasible")  # singletons


def sdepth_ideal(I: MonomialIdeal, g=None, box_cap: int = DEFAULT_BOX_CAP, **kw) -> tuple[int, IntervalPartition]:
    if I.is_unit:
        return I.n, IntervalPartition((0,) * I.n, (((0,) * I.n, (0,) * I.n),))
    return sdepth_exact(char_poset(I, IDEAL, g, box_cap), **kw)


def sdepth_quotient_exact(
    I: MonomialIdeal, g=None, box_cap: int = DEFAULT_BOX_CAP, **kw
) -> tuple[int, IntervalPartition]:
    return sdepth_exact(char_poset(I, QUOTIENT, g, box_cap), **kw)


# -- Stanley decompositions ---------------------------------------------------

@dataclass(frozen=True)
class StanleyDecomposition:
    n: int
    g: tuple[int, ...]
    mode: str
    spaces: tuple[tuple[Monomial, frozenset[int]], ...]  # x^c K[Z], Z 1-based

    @property
    def sdepth(self) -> int:
        return min(len(Z) for _, Z in self.spaces)


def decomposition_from_partition(P: CharacteristicPoset, partition: IntervalPartition) -> StanleyDecomposition:
    """Each interval [c, d] contributes x^e K[Z(d)] for every e in [c, d] agreeing with c on Z(d)."""
    if tuple(partition.g) != P.g:
        raise IdealError("partition and poset use different bounds g")
    issues = partition.problems(P)
    if issues:
        raise IdealError("invalid interval partition: " + "; ".join(issues[:3]))
    spaces = []
    for c, d in partition.intervals:
        Z = frozenset(j for j, (a, b) in enumerate(zip(d, P.g), 1) if a == b)
        top = tuple(c[j - 1] if j in Z else d[j - 1] for j in range(1, P.n + 1))
        for e in _box_iter(c, top):
            spaces.append((e, Z))
    return StanleyDecomposition(P.n, P.g, P.mode, tuple(spaces))


@dataclass(frozen=True)
class Verification:
    ok: bool
    degree_cap: int
    witness: Optional[Monomial] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _space_monomials(c: Monomial, Z: frozenset[int], budget: int) -> Iterator[Monomial]:
    free = sorted(Z)
    for t in range(budget + 1):
        for u in monomials_of_degree(t, len(free)):
            m = list(c)
            for j, a in zip(free, u):
                m[j - 1] += a
            yield tuple(m)


def verify_decomposition(I: MonomialIdeal, D: StanleyDecomposition, degree_cap: Optional[int] = None) -> Verification:
    """Check the direct sum monomial by monomial up to degree_cap.

    A monomial of the module (I itself, or the complement of I for S/I)
    must lie in exactly one space; any other monomial in none.
    """
    cap = sum(D.g) + 1 if degree_cap is None else degree_cap
    counts: Counter = Counter()
    for c, Z in D.spaces:
        budget = cap - sum(c)
        if budget >= 0:
            counts.update(_space_monomials(c, Z, budget))
    for t in range(cap + 1):
        for m in monomials_of_degree(t, I.n):
            in_module = contains(I, m) == (D.mode == IDEAL)
            hits = counts.get(m, 0)
            if in_module and hits == 0:
                return Verification(False, cap, m, "uncovered")
            if in_module and hits > 1:
                return Verification(False, cap, m, "covered more than once")
            if not in_module and hits:
                return Verification(False, cap, m, "outside the module")
    return Verification(True, cap)


def decomposition_report(I: MonomialIdeal, mode: str, value: int, partition: IntervalPartition,
                         verification: Optional[Verification] = None) -> dict:
    report = {
        "n": I.n,
        "g": list(partition.g),
        "mode": mode,
        "sdepth": value,
        "intervals": partition.to_dict(),
        "verified": bool(verification) if verification is not None else False,
        "degree_cap": verification.degree_cap if verification is not None else sum(partition.g) + 1,
    }
    if verification is not None and not verification.ok:
        report["witness"] = list(verification.witness)
        report["failure"] = verification.reason
    return report


# -- closed forms -------------------------------------------------------------

def sdepth_prime_formula(k: int, n: int) -> int:
    """sdepth of (x1, ..., xk) in n variables."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return n - k // 2


def sdepth_irreducible_formula(r: int, n: int) -> int:
    """sdepth of an irreducible ideal with r pure-power generators; exponents do not matter."""
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    return n - r // 2


def bound_values(n: int, n_top: int, n_bottom: int) -> tuple[int, int]:
    """(n + ceil(n_bottom/2) - n_top, n - floor(n_top/2))."""
    return n + -(-n_bottom // 2) - n_top, n - n_top // 2


def family_bounds(family, i: int) -> tuple[int, int]:
    """(lower, upper) sdepth bounds for level i of a monotone Borel family."""
    if not family.monotone:
        raise HypothesisError("sdepth bounds need a_ij >= a_{i+1,j}")
    ns = family.n_seq
    return bound_values(family.n, ns[i], ns[-1])
