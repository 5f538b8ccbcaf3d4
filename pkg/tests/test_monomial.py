import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelsd.errors import IdealError
from borelsd.monomial import (
    IrreducibleIdeal,
    MonomialIdeal,
    as_irreducible,
    colon_ideal,
    colon_monomial,
    contains,
    format_monomial,
    ideal_from_json,
    intersect,
    intersect_all,
    irreducible_decomposition,
    is_irreducible,
    max_exponents,
    minimalize,
    parse_ideal,
    saturate,
    support,
    variables_ideal,
)

import oracles

Q0 = MonomialIdeal.from_gens([(3, 0, 0, 0, 0), (0, 2, 0, 0, 0), (0, 0, 2, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1)], 5)
Q1 = MonomialIdeal.prime(4, 5)
I_REF = intersect(Q0, Q1)


def ideals(max_n=3, max_exp=3, max_gens=4):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        gens = draw(st.lists(st.tuples(*[st.integers(0, max_exp)] * n), min_size=1, max_size=max_gens))
        return MonomialIdeal.from_gens(gens, n)
    return build()


def box_monomials(n, bound):
    return itertools.product(range(bound + 1), repeat=n)


def test_minimalize_examples():
    assert minimalize([(1,), (2,)], 1).gens == ((1,),)
    assert Q0.gens == minimalize(Q0.gens, 5).gens
    assert minimalize([], 3).is_zero


def test_minimalize_rejects_bad_input():
    with pytest.raises(IdealError):
        minimalize([(1, 2)], 3)
    with pytest.raises(IdealError):
        minimalize([(-1,)], 1)


def test_contains_examples():
    I = MonomialIdeal.from_gens([(1, 1)], 2)
    assert contains(I, (2, 1))
    assert not contains(I, (2, 0))
    assert not contains(I_REF, (0, 0, 0, 0, 1))
    assert contains(Q0, (0, 0, 0, 0, 1)) and not contains(Q1, (0, 0, 0, 0, 1))


def test_intersection_examples():
    x1 = MonomialIdeal.from_gens([(1, 0)], 2)
    x2 = MonomialIdeal.from_gens([(0, 1)], 2)
    assert intersect(x1, x2).gens == ((1, 1),)
    expected = {(3, 0, 0, 0, 0), (0, 2, 0, 0, 0), (0, 0, 2, 0, 0), (0, 0, 0, 1, 0),
                (1, 0, 0, 0, 1), (0, 1, 0, 0, 1), (0, 0, 1, 0, 1)}
    assert set(I_REF.gens) == expected
    assert set(oracles.intersect_naive(Q0.gens, Q1.gens)) == expected
    assert intersect(I_REF, MonomialIdeal.unit(5)) == I_REF


def test_colon_examples():
    assert colon_monomial(MonomialIdeal.from_gens([(2, 1)], 2), (1, 0)).gens == ((1, 1),)
    assert colon_monomial(MonomialIdeal.from_gens([(0, 1)], 2), (0, 1)).is_unit
    I = MonomialIdeal.from_gens([(1, 1), (0, 2)], 2)
    assert colon_ideal(I, MonomialIdeal.from_gens([(0, 1)], 2)) == MonomialIdeal.prime(2, 2)
    assert colon_ideal(I, MonomialIdeal.unit(2)) == I
    x1 = MonomialIdeal.from_gens([(1, 0)], 2)
    assert colon_ideal(x1, MonomialIdeal.from_gens([(0, 1)], 2)) == x1
    with pytest.raises(IdealError):
        colon_ideal(I, MonomialIdeal.zero(2))


def test_colon_recovers_associated_prime():
    # search for v with (I : v) = (x1, .., x4)
    hits = [v for v in box_monomials(5, 3) if colon_monomial(I_REF, v) == Q1]
    assert hits
    assert all(not contains(I_REF, v) for v in hits)


def test_saturation_examples():
    x2 = variables_ideal([2], 2)
    assert saturate(MonomialIdeal.from_gens([(2, 0), (1, 1)], 2), x2).gens == ((1, 0),)
    assert saturate(MonomialIdeal.from_gens([(1, 1), (0, 2)], 2), x2).is_unit
    x1 = MonomialIdeal.from_gens([(1, 0)], 2)
    assert saturate(x1, x2) == x1


def test_irreducible_examples():
    Q = MonomialIdeal.from_gens([(3, 0), (0, 2)], 2)
    assert is_irreducible(Q)
    assert as_irreducible(Q).exponents() == (3, 2)
    assert not is_irreducible(MonomialIdeal.from_gens([(1, 1)], 2))
    assert is_irreducible(Q0)


def test_decomposition_examples():
    comps = irreducible_decomposition(MonomialIdeal.from_gens([(1, 1)], 2))
    assert {str(C) for C in comps} == {"(x1)", "(x2)"}
    comps = irreducible_decomposition(MonomialIdeal.from_gens([(2, 0), (1, 1)], 2))
    assert {str(C) for C in comps} == {"(x1)", "(x2, x1^2)"}
    comps = irreducible_decomposition(I_REF)
    assert {C.as_ideal() for C in comps} == {Q0, Q1}


def test_support_and_bounds():
    I = MonomialIdeal.from_gens([(3, 0, 0), (0, 2, 0)], 3)
    assert support(I) == {1, 2}
    assert max_exponents(I) == (3, 2, 0)
    assert support(MonomialIdeal.unit(3)) == set()
    assert max_exponents(MonomialIdeal.unit(3)) == (0, 0, 0)
    assert max_exponents(I_REF) == (3, 2, 2, 1, 1)


def test_irreducible_validation():
    with pytest.raises(IdealError):
        IrreducibleIdeal(2, ((3, 1),))
    with pytest.raises(IdealError):
        IrreducibleIdeal(2, ((1, 0),))


def test_parse_and_serialize():
    I = parse_ideal("x1^3, x2^2, x3^2, x4, x5")
    assert I == Q0
    assert parse_ideal(str(I_REF), 5) == I_REF
    assert ideal_from_json(I_REF.to_json()) == I_REF
    assert parse_ideal("0", 3).is_zero
    with pytest.raises(IdealError):
        parse_ideal("x1^", 2)
    with pytest.raises(IdealError):
        parse_ideal("x3", 2)
    with pytest.raises(IdealError):
        ideal_from_json('{"n": 2}')
    assert format_monomial((0, 0)) == "1"


@settings(max_examples=80, deadline=None)
@given(ideals(), ideals())
def test_intersection_matches_naive(I, J):
    if I.n != J.n:
        J = MonomialIdeal.from_gens([g[:I.n] + (0,) * (I.n - len(g)) for g in J.gens], I.n)
    K = intersect(I, J)
    assert set(K.gens) == set(oracles.intersect_naive(I.gens, J.gens))
    for m in box_monomials(I.n, 4):
        assert contains(K, m) == (contains(I, m) and contains(J, m))


@settings(max_examples=80, deadline=None)
@given(ideals(), st.data())
def test_colon_membership(I, data):
    u = data.draw(st.tuples(*[st.integers(0, 3)] * I.n))
    K = colon_monomial(I, u)
    for m in box_monomials(I.n, 3):
        assert contains(K, m) == contains(I, tuple(a + b for a, b in zip(m, u)))


@settings(max_examples=60, deadline=None)
@given(ideals(max_n=3, max_exp=3))
def test_decomposition_intersects_back(I):
    if I.is_unit:
        return
    comps = irreducible_decomposition(I)
    assert intersect_all((C.as_ideal() for C in comps), I.n) == I
    for C in comps:  # irredundant
        rest = [D.as_ideal() for D in comps if D != C]
        assert not rest or intersect_all(rest, I.n) != I


@settings(max_examples=60, deadline=None)
@given(ideals(max_n=3, max_exp=2), st.sets(st.integers(1, 3), min_size=1))
def test_saturation_matches_naive(I, js):
    js = {j for j in js if j <= I.n} or {1}
    K = saturate(I, variables_ideal(js, I.n))
    naive = oracles.saturation_naive(I.gens, js, I.n, 3)
    for m in box_monomials(I.n, 3):
        assert contains(K, m) == (m in naive)


@settings(max_examples=60, deadline=None)
@given(ideals())
def test_canonical_form_is_unique(I):
    shuffled = list(I.gens)[::-1] + [tuple(a + 1 for a in g) for g in I.gens]
    assert MonomialIdeal.from_gens(shuffled, I.n) == I
    assert parse_ideal(str(I), I.n) == I or I.is_unit
