import csv
import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelsd.borel import is_borel_type, sequential_chain
from borelsd.errors import FamilyError
from borelsd.family import (
    CSV_FIELDS,
    BorelFamily,
    build_ideals,
    campaign_families,
    chain_monotone,
    classify,
    family_from_json,
    is_reduced,
    question_search,
    random_family,
    reduced,
    run_campaign,
    verify_bounds,
    write_witness,
)
from borelsd.monomial import MonomialIdeal, ideal_from_json
from borelsd.sdepth import char_poset, sdepth_exact, sdepth_prime_formula

REF = BorelFamily.from_rows(5, [[3, 2, 2, 1, 1], [1, 1, 1, 1]])
VAR = BorelFamily.from_rows(5, [[2, 2, 1, 1, 1], [1, 1, 1, 1]])


def test_build_ideals_reference():
    I0, I1 = build_ideals(REF)
    assert set(I0.gens) == {(3, 0, 0, 0, 0), (0, 2, 0, 0, 0), (0, 0, 2, 0, 0), (0, 0, 0, 1, 0),
                            (1, 0, 0, 0, 1), (0, 1, 0, 0, 1), (0, 0, 1, 0, 1)}
    assert I1 == MonomialIdeal.prime(4, 5)


def test_single_level_is_its_component():
    F = BorelFamily.from_rows(3, [[2, 1]])
    assert build_ideals(F) == [F.component(0).as_ideal()]


def test_all_ones_family_collapses_to_smallest_prime():
    # nested primes intersect to the smallest one at every level
    F = BorelFamily.from_rows(5, [[1] * 5, [1] * 3, [1]])
    assert build_ideals(F) == [MonomialIdeal.prime(1, 5)] * 3
    assert not is_reduced(F) and reduced(F).n_seq == (1,)


def test_validation():
    with pytest.raises(FamilyError):
        BorelFamily.from_rows(3, [[1, 1], [1, 1]])
    with pytest.raises(FamilyError):
        BorelFamily.from_rows(2, [[1, 1, 1]])
    with pytest.raises(FamilyError):
        BorelFamily.from_rows(3, [[1, 0]])
    with pytest.raises(FamilyError):
        BorelFamily(3, ((2, (1, 1, 1)),))
    with pytest.raises(FamilyError):
        family_from_json('{"n": 3}')
    with pytest.raises(FamilyError):
        random_family(3, 3, 2, True, 0)


def test_monotone_flag_is_recomputed():
    assert REF.monotone
    doc = REF.to_dict()
    doc["monotone"] = False  # ignored
    assert family_from_json(json.dumps(doc)).monotone
    assert not BorelFamily.from_rows(3, [[1, 1, 1], [2, 1]]).monotone


def test_family_json_roundtrip():
    assert family_from_json(REF.to_json()) == REF
    assert REF.to_dict() == {"n": 5, "levels": [{"ni": 5, "a": [3, 2, 2, 1, 1]}, {"ni": 4, "a": [1, 1, 1, 1]}]}


def test_random_family_is_deterministic():
    a = random_family(5, 2, 3, True, 42)
    assert a.to_json() == random_family(5, 2, 3, True, 42).to_json()
    assert a.monotone and a.n == 5 and a.m == 2


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 5), st.integers(1, 4), st.booleans(), st.integers(0, 2**32))
def test_random_family_invariants(n, m, max_exp, mono, seed):
    m = min(m, n - 1)
    F = random_family(n, m, max_exp, mono, seed)
    assert F.m == m
    assert all(1 <= a <= max_exp for row in F.rows for a in row)
    if mono:
        assert F.monotone
    for I in build_ideals(F):
        assert is_borel_type(I)
    chain = sequential_chain(build_ideals(F)[0])
    it = iter(F.n_seq)
    assert all(x in it for x in chain.n_seq)
    if is_reduced(F):
        assert chain.n_seq == F.n_seq


def test_verify_bounds_reference_rows():
    row = verify_bounds(REF)[0]
    assert (row.sdepth, row.lower, row.upper) == (2, 2, 3)
    assert row.lower_ok and row.upper_ok and row.certified
    assert row.reg_chain == row.reg_decomposition == row.reg_formula == 5
    assert row.sdepth_quotient == 0 == row.depth_quotient
    row = verify_bounds(VAR)[0]
    assert (row.sdepth, row.lower, row.upper) == (3, 2, 3) and row.sdepth == row.upper


def test_all_ones_family_attains_closed_forms():
    F = BorelFamily.from_rows(5, [[1] * 5, [1] * 4, [1] * 2])
    for row in verify_bounds(F):
        ni = row.chain_n_seq[0]
        assert row.sdepth == sdepth_prime_formula(ni, 5) == row.lower == row.upper
        assert row.reg_chain == row.reg_decomposition == row.reg_formula == 1


def test_cap_marks_rows_skipped():
    rows = verify_bounds(REF, budget=1e-9)
    assert all(r.status == "skipped: cap" for r in rows)
    assert classify(rows) == "skipped"
    rows = verify_bounds(REF, box_cap=50)
    assert rows[0].status == "skipped: cap"


def test_question_search_preconditions():
    with pytest.raises(FamilyError):
        question_search(trials=1, monotone=True)
    report = question_search(trials=0, seed=3)
    assert report.rows == [] and report.meta["trials"] == 0 and report.meta["seed"] == 3


def test_question_families_break_monotonicity():
    fams = campaign_families(30, 5, 2, 3, False, 1)
    assert all(not F.monotone for F in fams)


def test_report_formats_and_reproducibility():
    a = run_campaign(count=6, max_n=4, seed=5)
    b = run_campaign(count=6, max_n=4, seed=5)
    strip = lambda rep: [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in rep.rows]  # noqa: E731
    assert strip(a) == strip(b)
    rows = list(csv.reader(io.StringIO(a.to_csv())))
    assert rows[0] == CSV_FIELDS and len(rows) == len(a.rows) + 1
    doc = json.loads(a.to_json())
    assert doc["meta"]["seed"] == 5 and "version" in doc["meta"]
    assert sum(doc["tally"].values()) == 6
    assert "bounds-hold" in a.to_text()
    assert all(chain_monotone(rows) for rows in a.trials().values())


def test_witness_file_reruns(tmp_path):
    F = BorelFamily.from_rows(4, [[2, 3, 1, 2], [3, 1]])
    row = verify_bounds(F)[0]
    row.chain_n_seq = [1]  # force a reported violation to exercise the plumbing
    assert row.lower_ok is False or row.upper_ok is False
    path = write_witness(row, tmp_path)
    doc = json.loads(path.read_text())
    assert family_from_json(json.dumps(doc["family"])) == F
    I = ideal_from_json(path.read_text())
    assert sdepth_exact(char_poset(I))[0] == doc["sdepth"] == row.sdepth


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2), st.integers(1, 3), st.integers(0, 2**32))
def test_monotone_bounds_hold(n, m, max_exp, seed):
    F = random_family(n, min(m, n - 1), max_exp, True, seed)
    rows = verify_bounds(F)
    assert classify(rows) == "bounds-hold"
    assert chain_monotone(rows)
    for r in rows:
        assert r.quotient_ok and r.regularity_ok and r.certified and r.chain_is_subsequence
