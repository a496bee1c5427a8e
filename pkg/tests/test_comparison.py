import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_protocol, random_taxonomy
from oracles import best_pairing_key, brute_matching
from protorel import (
    Domain,
    FluentCase,
    InfeasiblePairError,
    Valuation,
    best_matching,
    compare_fluents,
    comparison_table,
    derive_all,
    is_feasible,
    similarity,
    tie_break,
    valuate,
)
from protorel.comparison import fluent_pairing
from protorel.fluents import Acceptance, Commitment, ConditionalCommitment, Rejection
from scenarios import chain, letters, protocol, taxonomy


@pytest.fixture(scope="module")
def hospital():
    t = taxonomy("hospital")
    return t, derive_all(t, protocol("hospital", "p1")), derive_all(t, protocol("hospital", "p2"))


def test_fluent_cases():
    t = letters()
    assert compare_fluents(t, Domain("fb"), Domain("fbb")) is FluentCase.G1
    assert compare_fluents(t, Domain("fbb"), Domain("fb")) is FluentCase.G2
    assert compare_fluents(t, Domain("fa"), Domain("fb")) is FluentCase.IN
    assert compare_fluents(t, Domain("fa"), Domain("fa")) is FluentCase.EQ


def test_same_fluent_from_both_protocols_is_eq(hospital):
    t, d1, d2 = hospital
    ident = Domain("Identification")
    assert ident in d1[0].trace and ident in d2[0].trace
    assert compare_fluents(t, ident, ident) is FluentCase.EQ


def test_feasibility_in_the_scenario(hospital):
    t, d1, d2 = hospital
    assert not is_feasible(t, d1[0].trace, d2[1].trace)
    assert is_feasible(t, d1[1].trace, d2[2].trace)
    assert is_feasible(t, d1[1].trace, d1[1].trace)


def test_feasibility_is_a_disjunction():
    t = letters()
    small, big = {Domain("fa")}, {Domain("faa"), Domain("fd")}
    assert is_feasible(t, small, big) and is_feasible(t, big, small)
    assert not is_feasible(t, {Domain("fa"), Domain("fc")}, {Domain("faa"), Domain("fd")})


def test_scenario_valuations(hospital):
    t, d1, d2 = hospital
    assert valuate(t, d1[0].trace, d2[0].trace) == (3, 0, 0, 0)
    assert valuate(t, d1[1].trace, d2[2].trace) == (4, 0, 0, 1)
    with pytest.raises(InfeasiblePairError):
        valuate(t, d1[0].trace, d2[1].trace)


def test_self_valuation(hospital):
    t, d1, _ = hospital
    for d in d1:
        v = valuate(t, d.trace, d.trace)
        assert v == (len(d.trace), 0, 0, 0) and similarity(v) == 1


def test_metric_values():
    assert similarity(Valuation(3, 0, 0, 0)) == 1
    assert similarity(Valuation(4, 0, 0, 1)) == Fraction(4, 5)
    assert similarity(Valuation(0, 0, 0, 0)) == 1
    assert tie_break(Valuation(3, 0, 0, 0)) == 1
    assert tie_break(Valuation(2, 2, 0, 0)) == Fraction(1, 2)
    assert tie_break(Valuation(0, 0, 0, 0)) == 1


def test_metric_laws_on_small_tuples():
    for v in map(Valuation._make, product(range(7), repeat=4)):
        f, g = similarity(v), tie_break(v)
        assert 0 <= g <= f <= 1
        assert (f == 1) == (min(v.x1, v.x2) + v.x3 == 0)


def test_scenario_matching(hospital):
    t, d1, d2 = hospital
    m = best_matching(t, d1, d2)
    assert m.pairs == ((0, 0), (1, 2))
    assert m.total == Fraction(9, 5)


def test_self_matching_is_identity(hospital):
    t, _, d2 = hospital
    m = best_matching(t, d2, d2)
    assert m.pairs == ((0, 0), (1, 1), (2, 2)) and m.total == 3


def test_weather_table_and_matching():
    t = taxonomy("weather")
    d1 = derive_all(t, protocol("weather", "p1"))
    d2 = derive_all(t, protocol("weather", "p2"))
    table = comparison_table(t, d1, d2)
    feasible = [[c.feasible for c in row] for row in table]
    assert feasible == [[True, False, False], [False, True, True]]
    assert table[1][1].valuation == (2, 0, 0, 2)
    m = best_matching(t, d1, d2, table)
    assert m.pairs == ((0, 0), (1, 2))
    assert all(table[i][j].feasible for i, j in m.pairs)


def test_no_complete_matching():
    t = letters()
    d1 = derive_all(t, chain("P", ["fa"], ["fb"]))
    d2 = derive_all(t, chain("Q", ["fa"], ["fc"]))
    assert best_matching(t, d1, d2) is None


def test_commitment_fluents_compare_by_parts():
    t = letters()
    c_gen, c_narrow = Commitment("a", "b", Domain("fb")), Commitment("a", "b", Domain("fbb"))
    assert compare_fluents(t, c_gen, c_narrow) is FluentCase.G1
    assert compare_fluents(t, c_gen, Commitment("b", "a", Domain("fb"))) is FluentCase.IN
    cc = ConditionalCommitment("a", "b", Acceptance("a", "b", "fa"), Domain("fb"))
    assert compare_fluents(t, cc, c_gen) is FluentCase.IN
    assert compare_fluents(t, Acceptance("a", "b", "fa"), Rejection("a", "b", "fa")) is FluentCase.IN


_POOL = [
    Domain(n) for n in ("fa", "faa", "fb", "fbb", "fc", "fcc", "fccc", "fd")
] + [Commitment("a", "b", Domain("fc")), Commitment("a", "b", Domain("fcc")), Acceptance("a", "b", "fa")]


@settings(max_examples=300, deadline=None)
@given(st.sets(st.sampled_from(_POOL), max_size=5), st.sets(st.sampled_from(_POOL), max_size=5))
def test_pairing_is_optimal(T1, T2):
    t = letters()
    pairs = fluent_pairing(t, T1, T2)
    cases = [c for _, _, c in pairs]
    key = (len(pairs), cases.count(FluentCase.EQ), max(cases.count(FluentCase.G1), cases.count(FluentCase.G2)))
    assert key == best_pairing_key(t, T1, T2)
    assert len({a for a, _, _ in pairs}) == len(pairs) == len({b for _, b, _ in pairs})


@settings(max_examples=200, deadline=None)
@given(st.sets(st.sampled_from(_POOL), max_size=5), st.sets(st.sampled_from(_POOL), max_size=5))
def test_case_symmetry(T1, T2):
    t = letters()
    flip = {FluentCase.G1: FluentCase.G2, FluentCase.G2: FluentCase.G1}
    for a in T1:
        for b in T2:
            c = compare_fluents(t, a, b)
            assert compare_fluents(t, b, a) is flip.get(c, c)
    assert is_feasible(t, T1, T2) == is_feasible(t, T2, T1)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matching_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    t = random_taxonomy(rng)
    d1 = derive_all(t, random_protocol(rng, t, "P1"))
    d2 = derive_all(t, random_protocol(rng, t, "P2"))
    table = comparison_table(t, d1, d2)
    m = best_matching(t, d1, d2, table)
    expected = brute_matching(table)
    if expected is None:
        assert m is None
    else:
        assert (m.total, m.total_g, m.pairs) == expected
