"""Borel families Q_0 cap ... cap Q_m with nested pure-power components.

A family is n together with levels (n_i, a_i1..a_in_i), n >= n_0 > ... > n_m >= 1.
Level i gives Q_i = (x1^a_i1, ..., x_ni^a_ini) and I_i = Q_i cap ... cap Q_m.
The experiment runners compute exact Stanley depths level by level and test
them against the closed-form bounds, both on monotone families
(a_ij >= a_{i+1,j}) and on families that break monotonicity.
"""
from __future__ import annotations

import csv
import io
import json
import os
import random
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import __version__
from .borel import (
    depth_formulas,
    regularity_family,
    regularity_via_chain,
    regularity_via_decomposition,
    sequential_chain,
)
from .errors import FamilyError, InfeasibleError
from .monomial import IrreducibleIdeal, MonomialIdeal, intersect, irreducible_decomposition
from .sdepth import (
    DEFAULT_BOX_CAP,
    IDEAL,
    QUOTIENT,
    SolverStats,
    bound_values,
    char_poset,
    decomposition_from_partition,
    sdepth_exact,
    verify_decomposition,
)

DEFAULT_TRIAL_BUDGET = 30.0


@dataclass(frozen=True)
class BorelFamily:
    n: int
    levels: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        if not self.levels:
            raise FamilyError("a family needs at least one level")
        prev = self.n + 1
        for ni, row in self.levels:
            if not 1 <= ni < prev:
                raise FamilyError(f"level sizes must satisfy n >= n_0 > ... >= 1, got {self.n_seq} with n={self.n}")
            if len(row) != ni:
                raise FamilyError(f"level with n_i={ni} has {len(row)} exponents")
            if any(a < 1 for a in row):
                raise FamilyError(f"exponents must be positive, got {row}")
            prev = ni

    @classmethod
    def from_rows(cls, n: int, rows: Iterable[Sequence[int]]) -> BorelFamily:
        return cls(n, tuple((len(r), tuple(int(a) for a in r)) for r in rows))

    @property
    def m(self) -> int:
        return len(self.levels) - 1

    @property
    def n_seq(self) -> tuple[int, ...]:
        return tuple(ni for ni, _ in self.levels)

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(row for _, row in self.levels)

    @property
    def monotone(self) -> bool:
        return all(
            upper[j] >= lower[j]
            for upper, lower in zip(self.rows, self.rows[1:])
            for j in range(len(lower))
        )

    def component(self, i: int) -> IrreducibleIdeal:
        return IrreducibleIdeal.from_exponents(self.rows[i], self.n)

    def tail(self, i: int) -> BorelFamily:
        return BorelFamily(self.n, self.levels[i:])

    def to_dict(self) -> dict:
        return {"n": self.n, "levels": [{"ni": ni, "a": list(row)} for ni, row in self.levels]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __str__(self) -> str:
        return " cap ".join(str(self.component(i)) for i in range(len(self.levels)))


def family_from_dict(data) -> BorelFamily:
    try:
        n = int(data["n"])
        levels = tuple((int(lv["ni"]), tuple(int(a) for a in lv["a"])) for lv in data["levels"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FamilyError(f"family document needs 'n' and 'levels' of {{ni, a}}: {exc}") from exc
    return BorelFamily(n, levels)


def family_from_json(text: str) -> BorelFamily:
    try:
        return family_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise FamilyError(f"malformed family document: {exc}") from exc


def build_ideals(F: BorelFamily) -> list[MonomialIdeal]:
    """[I_0, ..., I_m] with I_i = Q_i cap ... cap Q_m."""
    ideals = [F.component(F.m).as_ideal()]
    for i in range(F.m - 1, -1, -1):
        ideals.append(intersect(F.component(i).as_ideal(), ideals[-1]))
    return ideals[::-1]


def reduced(F: BorelFamily) -> BorelFamily:
    """Drop the levels whose Q_i is redundant in Q_0 cap ... cap Q_m."""
    I0 = build_ideals(F)[0]
    comps = set(irreducible_decomposition(I0))
    return BorelFamily(F.n, tuple(lv for i, lv in enumerate(F.levels) if F.component(i) in comps))


def is_reduced(F: BorelFamily) -> bool:
    return reduced(F) == F


def random_family(n: int, m: int, max_exp: int, monotone: bool, seed: int) -> BorelFamily:
    """Uniform level sizes, exponents uniform in [1, max_exp].

    With monotone=True rows are drawn bottom-up, row i taking a_ij in
    [a_{i+1,j}, max_exp] where level i+1 has a j-th exponent.
    """
    if not 0 <= m < n or max_exp < 1:
        raise FamilyError(f"infeasible parameters n={n}, m={m}, max_exp={max_exp}")
    rng = random.Random(seed)
    sizes = sorted(rng.sample(range(1, n + 1), m + 1), reverse=True)
    rows: list[list[int]] = [[] for _ in sizes]
    for i in range(m, -1, -1):
        for j in range(sizes[i]):
            lo = rows[i + 1][j] if monotone and i < m and j < sizes[i + 1] else 1
            rows[i].append(rng.randint(lo, max_exp))
    return BorelFamily.from_rows(n, rows)


def _non_monotone_family(
    n: int, m: int, max_exp: int, rng: random.Random, strict: bool = False, attempts: int = 200
) -> Optional[BorelFamily]:
    """Resample until monotonicity fails (after dropping redundant levels, if strict).

    None when no draw succeeds; strict families need n >= 3, since with a single
    pair of levels that breaks monotonicity one component must contain the other.
    """
    if m < 1 or max_exp < 2:
        raise FamilyError("non-monotone families need m >= 1 and max_exp >= 2")
    for _ in range(attempts):
        F = random_family(n, m, max_exp, False, rng.getrandbits(64))
        if not (reduced(F) if strict else F).monotone:
            return F
    return None


# -- experiment rows ------------------------------------------------------------

@dataclass
class LevelRow:
    """One level of one family; verdicts are recomputed from the stored numbers."""

    trial: int
    family: dict
    level: int
    n: int
    family_n_seq: list[int]  # n_i, ..., n_m as generated
    chain_n_seq: list[int]  # support bounds of the actual sequential chain of I_i
    gens: list[list[int]]
    monotone: bool
    status: str = "ok"  # or "skipped: cap"
    sdepth: Optional[int] = None
    sdepth_quotient: Optional[int] = None
    reg_chain: Optional[int] = None
    reg_decomposition: Optional[int] = None
    reg_formula: Optional[int] = None  # closed form on the reduced tail, monotone only
    certified: Optional[bool] = None  # both witnesses pass verify_decomposition
    seconds: float = 0.0
    nodes: int = 0
    lp_refutations: int = 0

    @property
    def reduced(self) -> bool:
        return self.chain_n_seq == self.family_n_seq

    @property
    def chain_is_subsequence(self) -> bool:
        it = iter(self.family_n_seq)
        return all(x in it for x in self.chain_n_seq)

    @property
    def bounds(self) -> tuple[int, int]:
        return bound_values(self.n, self.chain_n_seq[0], self.chain_n_seq[-1])

    @property
    def lower(self) -> int:
        return self.bounds[0]

    @property
    def upper(self) -> int:
        return self.bounds[1]

    @property
    def family_bounds(self) -> tuple[int, int]:
        """The same formula fed with the generated n_i rather than the chain's."""
        return bound_values(self.n, self.family_n_seq[0], self.family_n_seq[-1])

    @property
    def lower_ok(self) -> Optional[bool]:
        return None if self.sdepth is None else self.sdepth >= self.lower

    @property
    def upper_ok(self) -> Optional[bool]:
        return None if self.sdepth is None else self.sdepth <= self.upper

    @property
    def depth_quotient(self) -> int:
        return self.n - self.chain_n_seq[0]

    @property
    def depth_ideal(self) -> int:
        return self.n - self.chain_n_seq[0] + 1

    @property
    def quotient_ok(self) -> Optional[bool]:
        return None if self.sdepth_quotient is None else self.sdepth_quotient == self.depth_quotient

    @property
    def regularity_ok(self) -> Optional[bool]:
        if self.reg_chain is None:
            return None
        routes = [self.reg_chain, self.reg_decomposition]
        if self.reg_formula is not None:
            routes.append(self.reg_formula)
        return len(set(routes)) == 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(
            lower=self.lower, upper=self.upper, family_bounds=list(self.family_bounds), lower_ok=self.lower_ok, upper_ok=self.upper_ok,
            reduced=self.reduced, depth_quotient=self.depth_quotient, depth_ideal=self.depth_ideal,
            quotient_ok=self.quotient_ok, regularity_ok=self.regularity_ok,
        )
        return d


def classify(rows: Sequence[LevelRow]) -> str:
    """Trial verdict: bounds-hold, lower-violated, upper-violated or skipped."""
    if any(r.status != "ok" for r in rows):
        return "skipped"
    if any(r.lower_ok is False for r in rows):
        return "lower-violated"
    if any(r.upper_ok is False for r in rows):
        return "upper-violated"
    return "bounds-hold"


def chain_monotone(rows: Sequence[LevelRow]) -> Optional[bool]:
    """sdepth(I_0) <= sdepth(I_1) <= ... over the levels of one family."""
    vals = [r.sdepth for r in sorted(rows, key=lambda r: r.level)]
    if any(v is None for v in vals):
        return None
    return all(a <= b for a, b in zip(vals, vals[1:]))


def _solve(I: MonomialIdeal, mode: str, deadline: float, box_cap: int, stats: SolverStats):
    P = char_poset(I, mode, box_cap=box_cap)
    value, part = sdepth_exact(P, time_budget=max(deadline - time.monotonic(), 0.0), stats=stats)
    ok = bool(verify_decomposition(I, decomposition_from_partition(P, part)))
    return value, ok and part.value == value


def verify_bounds(
    F: BorelFamily,
    trial: int = 0,
    budget: float = DEFAULT_TRIAL_BUDGET,
    box_cap: int = DEFAULT_BOX_CAP,
) -> list[LevelRow]:
    """Exact invariants for every level of F, under one wall-clock budget."""
    deadline = time.monotonic() + budget
    rows = []
    skipping = False
    for i, I in enumerate(build_ideals(F)):
        chain = sequential_chain(I)
        row = LevelRow(
            trial=trial, family=F.to_dict(), level=i, n=F.n,
            family_n_seq=list(F.n_seq[i:]), chain_n_seq=list(chain.n_seq),
            gens=[list(g) for g in I.gens], monotone=F.monotone,
        )
        rows.append(row)
        if skipping:
            row.status = "skipped: cap"
            continue
        start = time.monotonic()
        stats = SolverStats()
        try:
            row.reg_chain = regularity_via_chain(I)
            row.reg_decomposition = regularity_via_decomposition(I)
            tail = reduced(F.tail(i))
            if tail.monotone:
                row.reg_formula = regularity_family(tail, 0)
            row.sdepth, ok_ideal = _solve(I, IDEAL, deadline, box_cap, stats)
            row.sdepth_quotient, ok_quot = _solve(I, QUOTIENT, deadline, box_cap, stats)
            row.certified = ok_ideal and ok_quot
        except InfeasibleError:
            row.status = "skipped: cap"
            skipping = True
        row.seconds = round(time.monotonic() - start, 4)
        row.nodes = stats.nodes
        row.lp_refutations = stats.lp_refutations
    return rows


# -- campaigns ------------------------------------------------------------------

@dataclass
class ExperimentReport:
    meta: dict
    rows: list[LevelRow] = field(default_factory=list)
    witnesses: list[str] = field(default_factory=list)

    def trials(self) -> dict[int, list[LevelRow]]:
        out: dict[int, list[LevelRow]] = {}
        for r in self.rows:
            out.setdefault(r.trial, []).append(r)
        return out

    def tally(self) -> dict[str, int]:
        counts = {"bounds-hold": 0, "lower-violated": 0, "upper-violated": 0, "skipped": 0}
        for rows in self.trials().values():
            counts[classify(rows)] += 1
        return counts

    def effectively_non_monotone(self) -> int:
        """Trials whose family stays non-monotone once redundant components are dropped."""
        return sum(1 for rows in self.trials().values()
                   if not reduced(family_from_dict(rows[0].family)).monotone)

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "tally": self.tally(),
            "trials": [
                {"trial": t, "verdict": classify(rows), "chain_monotone": chain_monotone(rows),
                 "monotone_after_reduction": reduced(family_from_dict(rows[0].family)).monotone}
                for t, rows in self.trials().items()
            ],
            "rows": [r.to_dict() for r in self.rows],
            "witnesses": self.witnesses,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in self.rows:
            d = r.to_dict()
            d["family"] = json.dumps(r.family, separators=(",", ":"))
            d["family_n_seq"] = " ".join(map(str, r.family_n_seq))
            d["chain_n_seq"] = " ".join(map(str, r.chain_n_seq))
            writer.writerow(["" if d[k] is None else d[k] for k in CSV_FIELDS])
        return buf.getvalue()

    def to_text(self) -> str:
        cols = ["trial", "level", "n", "chain_n_seq", "sdepth", "lower", "upper",
                "sdepth_quotient", "reg_chain", "reg_decomposition", "reg_formula", "status", "seconds"]
        table = [cols]
        for r in self.rows:
            d = r.to_dict()
            d["chain_n_seq"] = ",".join(map(str, r.chain_n_seq))
            table.append(["-" if d[c] is None else str(d[c]) for c in cols])
        widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
        tally = ", ".join(f"{k}: {v}" for k, v in self.tally().items())
        return "\n".join(lines + ["", tally] + [f"witness: {w}" for w in self.witnesses]) + "\n"


CSV_FIELDS = [
    "trial", "level", "n", "family", "family_n_seq", "chain_n_seq", "monotone", "reduced",
    "status", "sdepth", "lower", "upper", "lower_ok", "upper_ok", "sdepth_quotient",
    "depth_quotient", "depth_ideal", "reg_chain", "reg_decomposition", "reg_formula",
    "certified", "seconds", "nodes",
]


def _trial_params(rng: random.Random, max_n: int, max_m: int, min_m: int = 0) -> tuple[int, int]:
    n = rng.randint(max(2, min_m + 1), max_n)
    m = rng.randint(min_m, min(max_m, n - 1))
    return n, m


def campaign_families(
    count: int, max_n: int, max_m: int, max_exp: int, monotone: bool, seed: int, strict: bool = False
) -> list[BorelFamily]:
    """Seeded families with n in [2, max_n] and m in [0, min(max_m, n-1)]."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        if monotone:
            n, m = _trial_params(rng, max_n, max_m)
            out.append(random_family(n, m, max_exp, True, rng.getrandbits(64)))
        else:
            if max_n < (3 if strict else 2) or max_m < 1 or max_exp < 2:
                raise FamilyError(f"no non-monotone families with max_n={max_n}, max_m={max_m}, "
                                  f"max_exp={max_exp}{' (strict)' if strict else ''}")
            F = None
            while F is None:
                n, m = _trial_params(rng, max_n, max_m, min_m=1)
                F = _non_monotone_family(n, m, max_exp, rng, strict)
            out.append(F)
    return out


def _run_trial(args) -> list[LevelRow]:
    trial, F, budget, box_cap = args
    return verify_bounds(F, trial, budget, box_cap)


def run_families(
    families: Sequence[BorelFamily],
    meta: dict,
    budget: float = DEFAULT_TRIAL_BUDGET,
    box_cap: int = DEFAULT_BOX_CAP,
    workers: int = 1,
) -> ExperimentReport:
    jobs = [(t, F, budget, box_cap) for t, F in enumerate(families)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial, jobs))
    else:
        results = [_run_trial(job) for job in jobs]
    meta = dict(meta, budget=budget, box_cap=box_cap, version=__version__)
    return ExperimentReport(meta, [row for rows in results for row in rows])


def run_campaign(
    count: int = 200,
    max_n: int = 5,
    max_m: int = 2,
    max_exp: int = 3,
    seed: int = 0,
    budget: float = DEFAULT_TRIAL_BUDGET,
    box_cap: int = DEFAULT_BOX_CAP,
    workers: int = 1,
) -> ExperimentReport:
    """Monotone families: exact sdepth against the proven bounds."""
    families = campaign_families(count, max_n, max_m, max_exp, True, seed)
    meta = {"kind": "monotone-campaign", "count": count, "max_n": max_n, "max_m": max_m,
            "max_exp": max_exp, "seed": seed}
    return run_families(families, meta, budget, box_cap, workers)


def write_witness(row: LevelRow, directory: os.PathLike) -> Path:
    """Standalone ideal file (readable by the CLI) carrying the violating data."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"witness_trial{row.trial}_level{row.level}.json"
    doc = {
        "n": row.n,
        "gens": row.gens,
        "family": row.family,
        "level": row.level,
        "sdepth": row.sdepth,
        "lower": row.lower,
        "upper": row.upper,
        "violation": "lower" if row.lower_ok is False else "upper",
    }
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def question_search(
    max_n: int = 5,
    max_m: int = 2,
    max_exp: int = 3,
    trials: int = 100,
    seed: int = 0,
    budget: float = DEFAULT_TRIAL_BUDGET,
    witness_dir: Optional[os.PathLike] = None,
    box_cap: int = DEFAULT_BOX_CAP,
    workers: int = 1,
    monotone: bool = False,
    strict: bool = False,
) -> ExperimentReport:
    """Test the bounds on families that break a_ij >= a_{i+1,j}.

    A violation is an outcome to report, not an error: each one is written
    to witness_dir as a re-runnable ideal file. With strict=True only families
    that stay non-monotone after dropping redundant components are drawn.
    """
    if monotone:
        raise FamilyError("the open case concerns non-monotone families; monotone=True is rejected")
    families = campaign_families(trials, max_n, max_m, max_exp, False, seed, strict) if trials else []
    meta = {"kind": "question-search", "trials": trials, "max_n": max_n, "max_m": max_m,
            "max_exp": max_exp, "seed": seed, "strict": strict}
    report = run_families(families, meta, budget, box_cap, workers)
    if witness_dir is not None:
        for row in report.rows:
            if row.lower_ok is False or row.upper_ok is False:
                report.witnesses.append(str(write_witness(row, witness_dir)))
    return report


def load_family_or_ideal(text: str):
    """Parse a JSON document holding either a family ("levels") or an ideal ("gens")."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyError(f"malformed document: {exc}") from exc
    if isinstance(data, dict) and "levels" in data:
        return family_from_dict(data)
    from .monomial import ideal_from_dict

    return ideal_from_dict(data)
