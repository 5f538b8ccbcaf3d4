"""Borel-type ideals: detection, sequential chains and regularity.

Regularity is computed two independent ways for any Borel-type ideal:
from the top degrees of the Artinian quotients J_i^sat / J_i along the
sequential chain, and as the maximum over irreducible components of the
pure-power formula sum(a) - r + 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import HypothesisError, IdealError, NotBorelTypeError
from .monomial import (
    IrreducibleIdeal,
    MonomialIdeal,
    contains,
    irreducible_decomposition,
    max_exponents,
    monomials_of_degree,
    saturate,
    variables_ideal,
)


@dataclass(frozen=True)
class BorelCondition:
    j: int
    sat_by_variable: MonomialIdeal
    sat_by_prefix: MonomialIdeal

    @property
    def holds(self) -> bool:
        return self.sat_by_variable == self.sat_by_prefix


def borel_conditions(I: MonomialIdeal) -> list[BorelCondition]:
    """(I : x_j^inf) against (I : (x1..xj)^inf) for every j."""
    if I.is_zero or I.is_unit:
        raise IdealError(f"Borel-type test needs a proper nonzero ideal, got {I}")
    return [
        BorelCondition(
            j,
            saturate(I, variables_ideal([j], I.n)),
            saturate(I, variables_ideal(range(1, j + 1), I.n)),
        )
        for j in range(1, I.n + 1)
    ]


def is_borel_type(I: MonomialIdeal) -> bool:
    return all(c.holds for c in borel_conditions(I))


@dataclass(frozen=True)
class ChainLevel:
    i: int
    ideal: MonomialIdeal  # I_i in S
    ni: int
    J: MonomialIdeal  # G(I_i) read in K[x1..x_ni]
    J_sat: MonomialIdeal  # (J : (x1..x_ni)^inf)


@dataclass(frozen=True)
class SequentialChain:
    n: int
    levels: tuple[ChainLevel, ...]

    @property
    def m(self) -> int:
        return len(self.levels) - 1

    @property
    def n_seq(self) -> tuple[int, ...]:
        return tuple(lv.ni for lv in self.levels)

    def ideals(self) -> list[MonomialIdeal]:
        return [lv.ideal for lv in self.levels]


def _top_variable(I: MonomialIdeal) -> int:
    return max(j for g in I.gens for j, a in enumerate(g, start=1) if a)


def sequential_chain(I: MonomialIdeal) -> SequentialChain:
    """I = I_0 < I_1 < ... < I_m < S by repeated saturation at the top variable."""
    if not is_borel_type(I):
        raise NotBorelTypeError(f"{I} is not of Borel type")
    levels = []
    K = I
    while not K.is_unit:
        ni = _top_variable(K)
        if levels and ni >= levels[-1].ni:
            raise NotBorelTypeError(f"support bounds not decreasing along the chain of {I}")
        J = K.restrict(ni)
        levels.append(ChainLevel(len(levels), K, ni, J, saturate(J, MonomialIdeal.prime(ni, ni))))
        K = saturate(K, variables_ideal([ni], I.n))
    return SequentialChain(I.n, tuple(levels))


def ass_primes(I: MonomialIdeal) -> list[MonomialIdeal]:
    chain = sequential_chain(I)
    return [MonomialIdeal.prime(ni, I.n) for ni in chain.n_seq]


def s_value(J: MonomialIdeal, Jsat: MonomialIdeal, r: int) -> Optional[int]:
    """Top degree of Jsat / J in K[x1..xr]; None when the quotient vanishes.

    Degrees are scanned upward; once past the largest generator degree of
    both ideals, the first degree where their components agree ends the scan.
    """
    if J.n != r or Jsat.n != r:
        raise IdealError(f"s_value expects ideals in {r} variables")
    if J.is_zero:
        raise IdealError("s_value needs a nonzero J (quotient must be Artinian)")
    top = max(J.max_degree(), Jsat.max_degree())
    g = max_exponents(MonomialIdeal(r, J.gens + Jsat.gens))
    cap = sum(g) + 1
    best = None
    t = 0
    while True:
        assert t <= cap, f"s_value scan passed its hard cap {cap}"
        differs = False
        for m in monomials_of_degree(t, r):
            in_sat = contains(Jsat, m)
            in_j = contains(J, m)
            if in_j and not in_sat:
                raise IdealError("s_value needs J contained in Jsat")
            if in_sat and not in_j:
                differs = True
                break
        if differs:
            best = t
        elif t >= top:
            return best
        t += 1


def level_s_value(level: ChainLevel) -> int:
    s = s_value(level.J, level.J_sat, level.ni)
    if s is None:
        # distinct associated primes rule this out
        raise RuntimeError(f"chain level {level.i} has an empty quotient J_sat / J")
    return s


def regularity_via_chain(I: MonomialIdeal) -> int:
    chain = sequential_chain(I)
    return max(level_s_value(lv) for lv in chain.levels) + 1


def regularity_irreducible(Q: IrreducibleIdeal) -> int:
    return sum(Q.exponents()) - Q.r + 1


def regularity_via_decomposition(I: MonomialIdeal) -> int:
    if not is_borel_type(I):
        raise NotBorelTypeError(f"{I} is not of Borel type; component formula not claimed")
    return max(regularity_irreducible(C) for C in irreducible_decomposition(I))


def regularity_family(family, i: int) -> int:
    """Closed form sum_j a_ij - n_i + 1 for level i of a monotone family."""
    if not family.monotone:
        raise HypothesisError("closed-form regularity needs a_ij >= a_{i+1,j}")
    ni, row = family.levels[i]
    return sum(row) - ni + 1


def depth_formulas(chain: SequentialChain) -> list[tuple[int, int]]:
    """(depth S/I_i, depth I_i) = (n - n_i, n - n_i + 1) per chain level."""
    return [(chain.n - ni, chain.n - ni + 1) for ni in chain.n_seq]


def chain_report(I: MonomialIdeal) -> dict:
    chain = sequential_chain(I)
    depths = depth_formulas(chain)
    rows = []
    for lv, (dq, di) in zip(chain.levels, depths):
        rows.append({
            "i": lv.i,
            "n_i": lv.ni,
            "gens_I": [list(g) for g in lv.ideal.gens],
            "gens_J": [list(g) for g in lv.J.gens],
            "gens_J_sat": [list(g) for g in lv.J_sat.gens],
            "s_value": level_s_value(lv),
            "depth_S_mod_I": dq,
            "depth_I": di,
        })
    return {"n": I.n, "gens": [list(g) for g in I.gens], "levels": rows}
