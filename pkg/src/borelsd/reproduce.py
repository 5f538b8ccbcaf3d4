"""Known reference values, recomputed from scratch.

The reference data is a two-level family in five variables,
Q_0 = (x1^3, x2^2, x3^2, x4, x5) and Q_1 = (x1, x2, x3, x4), plus the variant
Q_0' = (x1^2, x2^2, x3, x4, x5) with the same Q_1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

from .borel import depth_formulas, is_borel_type, sequential_chain
from .family import BorelFamily, build_ideals, verify_bounds
from .monomial import MonomialIdeal, irreducible_decomposition, is_irreducible
from .sdepth import (
    DEFAULT_BOX_CAP,
    IDEAL,
    QUOTIENT,
    char_poset,
    decomposition_from_partition,
    family_bounds,
    sdepth_exact,
    sdepth_irreducible_formula,
    sdepth_prime_formula,
    verify_decomposition,
)

REFERENCE = BorelFamily.from_rows(5, [[3, 2, 2, 1, 1], [1, 1, 1, 1]])
VARIANT = BorelFamily.from_rows(5, [[2, 2, 1, 1, 1], [1, 1, 1, 1]])


@dataclass
class Check:
    name: str
    expected: Any
    got: Any = None

    @property
    def ok(self) -> bool:
        return self.expected == self.got

    def to_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "got": self.got, "ok": self.ok}


def _certified_sdepth(I: MonomialIdeal, mode: str, box_cap: int, time_budget: Optional[float]) -> int:
    P = char_poset(I, mode, box_cap=box_cap)
    value, part = sdepth_exact(P, time_budget=time_budget)
    if part.value != value or not verify_decomposition(I, decomposition_from_partition(P, part)):
        return -1  # reported as a mismatch
    return value


def reference_checks(box_cap: int = DEFAULT_BOX_CAP, time_budget: Optional[float] = None) -> list[Check]:
    """Every reference value, in canonical single-worker mode."""
    I = build_ideals(REFERENCE)[0]
    Q1 = MonomialIdeal.prime(4, 5)
    I_var = build_ideals(VARIANT)[0]
    Q0 = REFERENCE.component(0)
    sd = lambda J, mode=IDEAL: _certified_sdepth(J, mode, box_cap, time_budget)  # noqa: E731
    chain = sequential_chain(I)
    row0 = verify_bounds(REFERENCE, budget=time_budget or 1e9, box_cap=box_cap)[0]
    var0 = verify_bounds(VARIANT, budget=time_budget or 1e9, box_cap=box_cap)[0]

    table: list[tuple[str, Any, Callable[[], Any]]] = [
        ("Q_0 is irreducible", True, lambda: is_irreducible(Q0.as_ideal())),
        ("components of I are Q_0, Q_1", ["(x1, x2, x3, x4)", "(x4, x5, x2^2, x3^2, x1^3)"],
         lambda: sorted(map(str, irreducible_decomposition(I)))),
        ("I is of Borel type", True, lambda: is_borel_type(I)),
        ("chain support bounds (n_0, n_1)", [5, 4], lambda: list(chain.n_seq)),
        ("second chain level equals Q_1", "(x1, x2, x3, x4)", lambda: str(chain.levels[1].ideal)),
        ("associated primes", ["(x1, x2, x3, x4, x5)", "(x1, x2, x3, x4)"],
         lambda: [str(MonomialIdeal.prime(ni, 5)) for ni in chain.n_seq]),
        ("depths at level 0", [0, 1], lambda: list(depth_formulas(chain)[0])),
        ("depths at level 1", [1, 2], lambda: list(depth_formulas(chain)[1])),
        ("sdepth of (x1, x2, x3, x4) in 5 variables", 3, lambda: sd(Q1)),
        ("sdepth of I", 2, lambda: sd(I)),
        ("sdepth of I'", 3, lambda: sd(I_var)),
        ("sdepth of S/I", 0, lambda: sd(I, QUOTIENT)),
        ("sdepth of S/Q_1", 1, lambda: sd(Q1, QUOTIENT)),
        ("prime formula k=4, n=5", 3, lambda: sdepth_prime_formula(4, 5)),
        ("irreducible formula r=5, n=5", 3, lambda: sdepth_irreducible_formula(5, 5)),
        ("bounds for I at level 0", [2, 3], lambda: list(family_bounds(REFERENCE, 0))),
        ("bounds for I' at level 0", [2, 3], lambda: list(family_bounds(VARIANT, 0))),
        ("family row for I: sdepth, bounds, pass", [2, 2, 3, True],
         lambda: [row0.sdepth, row0.lower, row0.upper, bool(row0.lower_ok and row0.upper_ok)]),
        ("family row for I': sdepth, bounds, pass", [3, 2, 3, True],
         lambda: [var0.sdepth, var0.lower, var0.upper, bool(var0.lower_ok and var0.upper_ok)]),
    ]
    out = []
    for name, expected, compute in table:
        out.append(Check(name, expected, compute()))
    return out
