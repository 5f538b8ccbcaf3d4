"""Monomials and monomial ideals in K[x1, ..., xn].

Monomials are plain tuples of non-negative exponents. Ideals keep their
minimal generating set in canonical order (total degree, then lex), so two
ideals are equal exactly when their generator tuples are equal.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import IdealError

Monomial = tuple[int, ...]

MAX_VARS = 16
MAX_EXPONENT = 256


def degree(m: Monomial) -> int:
    return sum(m)


def divides(u: Monomial, v: Monomial) -> bool:
    return all(a <= b for a, b in zip(u, v))


def lcm(u: Monomial, v: Monomial) -> Monomial:
    return tuple(max(a, b) for a, b in zip(u, v))


def gcd(u: Monomial, v: Monomial) -> Monomial:
    return tuple(min(a, b) for a, b in zip(u, v))


def mul(u: Monomial, v: Monomial) -> Monomial:
    return tuple(a + b for a, b in zip(u, v))


def quotient(u: Monomial, v: Monomial) -> Monomial:
    """u / gcd(u, v)."""
    return tuple(a - min(a, b) for a, b in zip(u, v))


def one(n: int) -> Monomial:
    return (0,) * n


def var(j: int, n: int, power: int = 1) -> Monomial:
    """x_j^power, 1-indexed."""
    m = [0] * n
    m[j - 1] = power
    return tuple(m)


def sort_key(m: Monomial) -> tuple[int, Monomial]:
    # total degree, then lex with x1 > x2 > ... > xn
    return (sum(m), tuple(-a for a in m))


def monomials_of_degree(t: int, r: int) -> Iterator[Monomial]:
    """All exponent vectors of length r with entries summing to t."""
    if r == 0:
        if t == 0:
            yield ()
        return
    if r == 1:
        yield (t,)
        return
    for a in range(t, -1, -1):
        for rest in monomials_of_degree(t - a, r - 1):
            yield (a,) + rest


def _check_monomial(m: Sequence[int], n: int) -> Monomial:
    m = tuple(int(a) for a in m)
    if len(m) != n:
        raise IdealError(f"exponent vector {m} has length {len(m)}, expected {n}")
    for a in m:
        if a < 0:
            raise IdealError(f"negative exponent in {m}")
        if a > MAX_EXPONENT:
            raise IdealError(f"exponent {a} exceeds desk-scale limit {MAX_EXPONENT}")
    return m


@dataclass(frozen=True)
class MonomialIdeal:
    """A monomial ideal given by its canonical minimal generators.

    Build instances with :func:`minimalize` (or :meth:`from_gens`); the
    constructor trusts its input.
    """

    n: int
    gens: tuple[Monomial, ...]

    @classmethod
    def from_gens(cls, gens: Iterable[Sequence[int]], n: int) -> MonomialIdeal:
        return minimalize(gens, n)

    @classmethod
    def zero(cls, n: int) -> MonomialIdeal:
        return cls(n, ())

    @classmethod
    def unit(cls, n: int) -> MonomialIdeal:
        return cls(n, (one(n),))

    @classmethod
    def prime(cls, k: int, n: int) -> MonomialIdeal:
        """(x1, ..., xk)."""
        return minimalize([var(j, n) for j in range(1, k + 1)], n)

    @property
    def is_zero(self) -> bool:
        return not self.gens

    @property
    def is_unit(self) -> bool:
        return len(self.gens) == 1 and not any(self.gens[0])

    def __contains__(self, m: Monomial) -> bool:
        return contains(self, m)

    def __le__(self, other: MonomialIdeal) -> bool:
        return is_subideal(self, other)

    def __add__(self, other: MonomialIdeal) -> MonomialIdeal:
        return ideal_sum(self, other)

    def __and__(self, other: MonomialIdeal) -> MonomialIdeal:
        return intersect(self, other)

    def max_degree(self) -> int:
        return max((sum(g) for g in self.gens), default=0)

    def restrict(self, r: int) -> MonomialIdeal:
        """Read the generators inside K[x1..xr]; they must not involve later variables."""
        if any(any(g[r:]) for g in self.gens):
            raise IdealError(f"generators involve variables beyond x{r}")
        return MonomialIdeal(r, tuple(g[:r] for g in self.gens))

    def extend(self, n: int) -> MonomialIdeal:
        pad = (0,) * (n - self.n)
        return MonomialIdeal(n, tuple(g + pad for g in self.gens))

    def to_dict(self) -> dict:
        return {"n": self.n, "gens": [list(g) for g in self.gens]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __str__(self) -> str:
        if self.is_zero:
            return "(0)"
        return "(" + ", ".join(format_monomial(g) for g in self.gens) + ")"


@dataclass(frozen=True)
class IrreducibleIdeal:
    """(x_j^{a_j} : j in powers), every stored exponent at least 1."""

    n: int
    powers: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for j, a in self.powers:
            if not 1 <= j <= self.n:
                raise IdealError(f"variable index {j} outside 1..{self.n}")
            if a < 1:
                raise IdealError(f"irreducible ideal needs positive exponents, got x{j}^{a}")

    @classmethod
    def from_mapping(cls, powers: Mapping[int, int], n: int) -> IrreducibleIdeal:
        return cls(n, tuple(sorted(powers.items())))

    @classmethod
    def from_exponents(cls, a: Sequence[int], n: int) -> IrreducibleIdeal:
        """(x1^a1, ..., xr^ar) with r = len(a)."""
        return cls(n, tuple((j, e) for j, e in enumerate(a, start=1)))

    @property
    def r(self) -> int:
        return len(self.powers)

    def exponents(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.powers)

    def as_ideal(self) -> MonomialIdeal:
        return minimalize([var(j, self.n, a) for j, a in self.powers], self.n)

    def __str__(self) -> str:
        return str(self.as_ideal())


def minimalize(gens: Iterable[Sequence[int]], n: int) -> MonomialIdeal:
    """Drop generators divisible by others and sort canonically."""
    if not 1 <= n <= MAX_VARS:
        raise IdealError(f"number of variables {n} outside 1..{MAX_VARS}")
    cands = sorted({_check_monomial(g, n) for g in gens}, key=sort_key)
    kept: list[Monomial] = []
    for m in cands:
        if not any(divides(g, m) for g in kept):
            kept.append(m)
    return MonomialIdeal(n, tuple(kept))


def _same_ring(I: MonomialIdeal, J: MonomialIdeal) -> None:
    if I.n != J.n:
        raise IdealError(f"ideals live in different rings (n={I.n} vs n={J.n})")


def contains(I: MonomialIdeal, m: Monomial) -> bool:
    if len(m) != I.n:
        raise IdealError(f"monomial {m} does not live in n={I.n} variables")
    return any(divides(g, m) for g in I.gens)


def is_subideal(I: MonomialIdeal, J: MonomialIdeal) -> bool:
    _same_ring(I, J)
    return all(contains(J, g) for g in I.gens)


def ideal_sum(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_ring(I, J)
    return minimalize(I.gens + J.gens, I.n)


def intersect(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_ring(I, J)
    return minimalize((lcm(g, h) for g in I.gens for h in J.gens), I.n)


def intersect_all(ideals: Iterable[MonomialIdeal], n: int) -> MonomialIdeal:
    return reduce(intersect, ideals, MonomialIdeal.unit(n))


def colon_monomial(I: MonomialIdeal, u: Monomial) -> MonomialIdeal:
    """(I : u); m lies in it iff u*m lies in I."""
    u = _check_monomial(u, I.n)
    return minimalize((quotient(g, u) for g in I.gens), I.n)


def colon_ideal(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_ring(I, J)
    if J.is_zero:
        raise IdealError("colon by the zero ideal")
    return intersect_all((colon_monomial(I, g) for g in J.gens), I.n)


def saturate(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    """(I : J^inf), iterating K <- (K : J) to the fixpoint."""
    K = I
    while True:
        nxt = colon_ideal(K, J)
        if nxt == K:
            return K
        K = nxt


def variables_ideal(indices: Iterable[int], n: int) -> MonomialIdeal:
    return minimalize([var(j, n) for j in indices], n)


def _proper(I: MonomialIdeal, what: str) -> None:
    if I.is_zero or I.is_unit:
        raise IdealError(f"{what} needs a proper nonzero ideal, got {I}")


def _pure_power(g: Monomial) -> int | None:
    """Index (1-based) of the single variable in g, or None."""
    nz = [j for j, a in enumerate(g, start=1) if a]
    return nz[0] if len(nz) == 1 else None


def is_irreducible(I: MonomialIdeal) -> bool:
    _proper(I, "is_irreducible")
    return all(_pure_power(g) is not None for g in I.gens)


def as_irreducible(I: MonomialIdeal) -> IrreducibleIdeal:
    if not is_irreducible(I):
        raise IdealError(f"{I} is not irreducible")
    powers = {}
    for g in I.gens:
        j = _pure_power(g)
        powers[j] = g[j - 1]
    return IrreducibleIdeal.from_mapping(powers, I.n)


def irreducible_decomposition(I: MonomialIdeal) -> list[IrreducibleIdeal]:
    """Irredundant irreducible components, in canonical order of their generators."""
    _proper(I, "irreducible_decomposition")
    leaves: set[MonomialIdeal] = set()
    seen: set[MonomialIdeal] = set()
    stack = [I]
    while stack:
        K = stack.pop()
        if K in seen:
            continue
        seen.add(K)
        split = None
        for g in K.gens:
            nz = [j for j, a in enumerate(g) if a]
            if len(nz) > 1:
                split = (g, nz[0])
                break
        if split is None:
            leaves.add(K)
            continue
        g, j = split
        head = var(j + 1, K.n, g[j])
        tail = g[:j] + (0,) + g[j + 1:]
        stack.append(ideal_sum(K, MonomialIdeal(K.n, (head,))))
        stack.append(ideal_sum(K, MonomialIdeal(K.n, (tail,))))

    comps = sorted(leaves, key=lambda C: [sort_key(g) for g in C.gens])
    i = 0
    while i < len(comps):
        others = comps[:i] + comps[i + 1:]
        if others and is_subideal(intersect_all(others, I.n), comps[i]):
            del comps[i]
        else:
            i += 1
    return [as_irreducible(C) for C in comps]


def support(I: MonomialIdeal) -> set[int]:
    if I.is_zero:
        raise IdealError("support of the zero ideal")
    return {j for g in I.gens for j, a in enumerate(g, start=1) if a}


def max_exponents(I: MonomialIdeal) -> tuple[int, ...]:
    if I.is_zero:
        raise IdealError("max_exponents of the zero ideal")
    return tuple(max(col) for col in zip(*I.gens))


# -- parsing and formatting -------------------------------------------------

_FACTOR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def format_monomial(m: Monomial) -> str:
    parts = []
    for j, a in enumerate(m, start=1):
        if a == 1:
            parts.append(f"x{j}")
        elif a > 1:
            parts.append(f"x{j}^{a}")
    return "*".join(parts) or "1"


def parse_monomial(text: str, n: int | None = None) -> dict[int, int]:
    """Parse 'x1^3*x5' into {1: 3, 5: 1}; '1' is the empty product."""
    text = text.strip().replace(" ", "")
    if text == "1":
        return {}
    powers: dict[int, int] = {}
    for factor in text.split("*"):
        mt = _FACTOR.match(factor)
        if not mt:
            raise IdealError(f"cannot parse factor {factor!r}")
        j = int(mt.group(1))
        if j < 1 or (n is not None and j > n):
            raise IdealError(f"variable x{j} outside x1..x{n}")
        powers[j] = powers.get(j, 0) + int(mt.group(2) or 1)
    return powers


def parse_ideal(text: str, n: int | None = None) -> MonomialIdeal:
    """Parse human syntax like 'x1^3, x2^2, x1*x5'.

    Without n, the ring is K[x1..xk] for the largest index k mentioned.
    '0' or an empty string gives the zero ideal (then n is required).
    """
    text = text.strip().strip("()")
    terms = [t for t in text.split(",") if t.strip()]
    if not terms or terms == ["0"]:
        if n is None:
            raise IdealError("zero ideal needs an explicit number of variables")
        return MonomialIdeal.zero(n)
    parsed = [parse_monomial(t, n) for t in terms]
    if n is None:
        n = max((j for p in parsed for j in p), default=1)
    gens = []
    for p in parsed:
        m = [0] * n
        for j, a in p.items():
            m[j - 1] = a
        gens.append(m)
    return minimalize(gens, n)


def ideal_from_dict(data: Mapping) -> MonomialIdeal:
    try:
        n = int(data["n"])
        gens = data["gens"]
    except (KeyError, TypeError, ValueError) as exc:
        raise IdealError(f"ideal document needs integer 'n' and list 'gens': {exc}") from exc
    if not isinstance(gens, list):
        raise IdealError("'gens' must be a list of exponent vectors")
    return minimalize(gens, n)


def ideal_from_json(text: str) -> MonomialIdeal:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IdealError(f"malformed ideal document: {exc}") from exc
    return ideal_from_dict(data)
