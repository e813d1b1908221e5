import json
import random
from collections import Counter, defaultdict

import pytest
from hypothesis import given, settings, strategies as st

from qpbases.characters import config_exponent
from qpbases.lie_data import build_root_system
from qpbases.qp_enum import (MonomialError, QPMonomial, WeightError, WeightSpec, c1_satisfied,
                             c2_bound, c3_satisfied, census_to_series, charge_to_dual,
                             check_energy_identities, compare_monomials, dual_to_charge,
                             enumerate_census, list_monomials, monomial_sort_key,
                             satisfies_all)
from qpbases.series import TruncatedSeries

from oracles import a1_monomials

A1 = build_root_system("A1")


def mono(charges, modes):
    return QPMonomial.from_lists(charges, modes)


# conversions -------------------------------------------------------------------

@pytest.mark.parametrize("charges,dual", [((3, 1, 1), (3, 1, 1)), ((2, 2), (2, 2)),
                                          ((4, 1), (2, 1, 1, 1)), ((), ())])
def test_charge_to_dual(charges, dual):
    assert charge_to_dual(charges) == dual
    assert dual_to_charge(dual) == charges


@pytest.mark.parametrize("bad", [(1, 2), (2, 0), (3, -1), (1, 3, 2)])
def test_non_monotone_input_rejected(bad):
    with pytest.raises(MonomialError):
        charge_to_dual(bad)
    with pytest.raises(MonomialError):
        dual_to_charge(bad)


def test_conjugation_is_an_involution_on_random_partitions():
    rng = random.Random(20240611)
    for _ in range(10 ** 4):
        length = rng.randint(0, 12)
        lam = tuple(sorted((rng.randint(1, 12) for _ in range(length)), reverse=True))
        assert dual_to_charge(charge_to_dual(lam)) == lam
        assert charge_to_dual(dual_to_charge(lam)) == lam


def test_monomial_requires_charge_order():
    with pytest.raises(MonomialError):
        mono([(1, 2)], [(-1, -2)])
    with pytest.raises(MonomialError):
        mono([(0,)], [(-1,)])


# difference conditions ---------------------------------------------------------------

def test_c1_examples():
    assert c1_satisfied([(1, -1), (1, -3)])
    assert not c1_satisfied([(1, -1), (1, -2)])
    assert c1_satisfied([(5, 7)])
    assert c1_satisfied(mono([(2, 1)], [(-2, -1)]).colors[0])


def test_c2_examples():
    f4 = build_root_system("F4")
    m = mono([(), (1,), (2,), ()], [(), (-1,), (0,), ()])
    assert c2_bound(f4, WeightSpec.standard(1), m, 3, 1) == 0
    for rs in (A1, build_root_system("D4"), f4):
        for n in (1, 2, 3):
            charges = [(n,)] + [()] * (rs.rank - 1)
            m = mono(charges, [(0,)] + [()] * (rs.rank - 1))
            assert c2_bound(rs, WeightSpec.verma(), m, 1, 1) == -n
    d4 = build_root_system("D4")
    m = mono([(2,), (), (), ()], [(0,), (), (), ()])
    assert c2_bound(d4, WeightSpec.rectangular(1, 1, 1), m, 1, 1) == -3


def test_c3_examples():
    f4 = build_root_system("F4")
    assert c3_satisfied(f4, 1, mono([(), (), (2,), ()], [(), (), (-2,), ()]))
    assert not c3_satisfied(f4, 1, mono([(2,), (), (), ()], [(-2,), (), (), ()]))
    assert c3_satisfied(f4, 1, QPMonomial.empty(4))


def test_satisfies_all_examples():
    std1 = WeightSpec.standard(1)
    assert satisfies_all(A1, std1, mono([(1, 1)], [(-1, -3)]))
    assert not satisfies_all(A1, std1, mono([(2,)], [(-2,)]))
    for spec in (std1, WeightSpec.verma(), WeightSpec.standard(3)):
        assert satisfies_all(A1, spec, QPMonomial.empty(1))
    e6 = build_root_system("E6")
    assert satisfies_all(e6, WeightSpec.alt_e(1), QPMonomial.empty(6))


def test_weight_spec_validation():
    with pytest.raises(WeightError):
        WeightSpec.alt_e(1).validate(build_root_system("D4"))
    with pytest.raises(WeightError):
        WeightSpec.rectangular(1, 2, 1).validate(build_root_system("D4"))
    with pytest.raises(WeightError):
        WeightSpec.rectangular(1, 1, 1).validate(build_root_system("F4"))
    with pytest.raises(WeightError):
        WeightSpec.rectangular(1, 1, 0)
    with pytest.raises(WeightError):
        WeightSpec.standard(0)
    with pytest.raises(WeightError):
        WeightSpec("level")
    with pytest.raises(WeightError):
        c2_bound(build_root_system("B3"), WeightSpec.alt_e(1), QPMonomial.empty(3), 1, 1)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([("D4", 1), ("D4", 3), ("D4", 4), ("D5", 1), ("E6", 1), ("E6", 6),
                        ("E7", 1)]),
       st.integers(1, 3), st.data())
def test_rectangular_bounds_reduce_to_standard_below_k0(case, k0, data):
    name, j = case
    rs = build_root_system(name)
    charges = [tuple(sorted(data.draw(st.lists(st.integers(1, k0), max_size=3)), reverse=True))
               for _ in range(rs.rank)]
    m = mono(charges, [(0,) * len(c) for c in charges])
    rect, std = WeightSpec.rectangular(k0, j, 1), WeightSpec.standard(k0 + 1)
    for i in range(1, rs.rank + 1):
        for p in range(1, len(charges[i - 1]) + 1):
            assert c2_bound(rs, rect, m, i, p) == c2_bound(rs, std, m, i, p)


# ordering ---------------------------------------------------------------------------

def test_compare_examples():
    a = mono([(1, 1)], [(-1, -3)])
    assert compare_monomials(a, a) == 0
    assert compare_monomials(mono([(1, 1)], [(-1, -3)]), mono([(2,)], [(-2,)])) == -1
    assert compare_monomials(mono([(1, 1)], [(-1, -4)]), mono([(1, 1)], [(-1, -3)])) == -1
    assert compare_monomials(mono([(1, 1)], [(-1, -3)]), mono([(1, 1)], [(-1, -4)])) == 1
    with pytest.raises(MonomialError):
        compare_monomials(mono([(1,)], [(-1,)]), mono([(2,)], [(-2,)]))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 3), st.integers(-6, 0)), min_size=1, max_size=4),
       st.lists(st.tuples(st.integers(1, 3), st.integers(-6, 0)), min_size=1, max_size=4))
def test_order_is_antisymmetric_and_matches_sort_key(xs, ys):
    a = mono([tuple(n for n, _ in sorted(xs, reverse=True))],
             [tuple(m for _, m in sorted(xs, reverse=True))])
    b = mono([tuple(n for n, _ in sorted(ys, reverse=True))],
             [tuple(m for _, m in sorted(ys, reverse=True))])
    if a.color_type() != b.color_type():
        return
    c = compare_monomials(a, b)
    assert c == -compare_monomials(b, a)
    assert (c == 0) == (a == b)
    ka, kb = monomial_sort_key(a)[2:], monomial_sort_key(b)[2:]
    assert (ka > kb) - (ka < kb) == c


# energy identities ------------------------------------------------------------------------------

def test_energy_identity_examples():
    f4 = build_root_system("F4")
    assert check_energy_identities(f4, QPMonomial.empty(4))
    assert check_energy_identities(f4, mono([(2,), (), (), ()], [(-2,), (), (), ()]))
    assert check_energy_identities(f4, mono([(), (1,), (2,), ()], [(), (-1,), (0,), ()]))
    with pytest.raises(ValueError):
        check_energy_identities(A1, QPMonomial.empty(1))


# census ------------------------------------------------------------------------------

def test_a1_standard_census_example():
    c = enumerate_census(A1, WeightSpec.standard(1), 4, listing=True)
    assert c.entries == {(0, (0,)): 1, (1, (1,)): 1, (2, (1,)): 1, (3, (1,)): 1,
                         (4, (1,)): 1, (4, (2,)): 1}
    q4 = [m for m in c.monomials if m.energy() == 4]
    # stored by position p = 1, 2: the product x(-3)x(-1)
    assert sorted(m.energy_type() for m in q4) == [((-4,),), ((-1, -3),)]
    s = census_to_series(c)
    assert s == TruncatedSeries.from_terms(1, 4, {(0, (0,)): 1, (1, (1,)): 1, (2, (1,)): 1,
                                                  (3, (1,)): 1, (4, (1,)): 1, (4, (2,)): 1})


@pytest.mark.parametrize("name", ["A1", "B2", "G2", "D4", "F4", "E6"])
@pytest.mark.parametrize("spec", [WeightSpec.verma(), WeightSpec.standard(2)])
def test_zero_truncation(name, spec):
    c = enumerate_census(build_root_system(name), spec, 0)
    rank = build_root_system(name).rank
    assert c.entries == {(0, (0,) * rank): 1}
    assert census_to_series(c) == TruncatedSeries.one(rank, 0)


def test_a1_verma_census_example():
    c = enumerate_census(A1, WeightSpec.verma(), 2, listing=True)
    assert c.entries == {(0, (0,)): 1, (1, (1,)): 1, (2, (1,)): 1, (2, (2,)): 1}
    assert sorted(m.triples() for m in c.monomials if m.energy() == 2) == [[(1, 1, 2)], [(1, 2, 2)]]


@pytest.mark.parametrize("level,M", [(1, 12), (2, 10), (3, 9), (None, 8)])
def test_a1_census_matches_literal_search(level, M):
    spec = WeightSpec.verma() if level is None else WeightSpec.standard(level)
    want = Counter((e, (n,)) for e, n in a1_monomials(M, level))
    assert enumerate_census(A1, spec, M).entries == dict(want)


LISTING_CASES = [("A2", WeightSpec.standard(2), 6), ("B2", WeightSpec.standard(1), 6),
                 ("G2", WeightSpec.standard(1), 6), ("G2", WeightSpec.verma(), 5),
                 ("C3", WeightSpec.standard(1), 5), ("B3", WeightSpec.verma(), 4),
                 ("D4", WeightSpec.rectangular(1, 1, 1), 5),
                 ("D4", WeightSpec.rectangular(2, 1, 1), 4),
                 ("D4", WeightSpec.rectangular(1, 4, 1), 5),
                 ("F4", WeightSpec.standard(1), 4), ("E6", WeightSpec.alt_e(1), 3),
                 ("E6", WeightSpec.alt_e(2), 3), ("E6", WeightSpec.rectangular(1, 6, 1), 3)]


@pytest.mark.parametrize("name,spec,M", LISTING_CASES)
def test_listing_agrees_with_counts(name, spec, M):
    rs = build_root_system(name)
    c = enumerate_census(rs, spec, M, listing=True, list_guard=10 ** 6)
    assert c.checks["listing_agrees"] is True
    assert not c.checks["min_energy_failures"]
    mons = c.monomials
    assert mons == sorted(mons, key=monomial_sort_key)
    assert len(set(mons)) == len(mons)
    rect = None if spec.rect is None else spec.rect
    groups = defaultdict(list)
    for m in mons:
        assert satisfies_all(rs, spec, m)
        assert m.dual() == tuple(charge_to_dual(ch) for ch in m.charge_type())
        groups[m.dual()].append(m.energy())
    if spec.mode != "alt_e":
        for dual, energies in groups.items():
            # every energy is at least the exponent, and the exponent is attained
            assert min(energies) == config_exponent(rs, dual, rect)


def test_listing_guard():
    c = enumerate_census(build_root_system("A2"), WeightSpec.verma(), 6, listing=True,
                         list_guard=10)
    assert c.monomials is None and "listing_suppressed" in c.checks
    forced = enumerate_census(build_root_system("A2"), WeightSpec.verma(), 6, listing=True,
                              list_guard=10, force_list=True)
    assert len(forced.monomials) == forced.total()


def test_census_json_is_canonical():
    rs = build_root_system("B2")
    a = enumerate_census(rs, WeightSpec.standard(1), 5, listing=True)
    b = enumerate_census(rs, WeightSpec.standard(1), 5, listing=True)
    assert a.to_json() == b.to_json()
    d = json.loads(a.to_json())
    assert set(d) == {"spec", "mode", "M", "entries", "monomials"}
    keys = [(e["q"], e["color_type"]) for e in d["entries"]]
    assert keys == sorted(keys)


def test_modes_can_be_positive():
    # a color-3 particle of charge 2 next to two color-2 particles of F4
    f4 = build_root_system("F4")
    m = mono([(), (1, 1), (2,), ()], [(), (-1, -3), (0,), ()])
    assert c2_bound(f4, WeightSpec.verma(), m, 3, 1) == 2
    assert satisfies_all(f4, WeightSpec.verma(), mono([(), (1, 1), (2,), ()], [(), (-1, -3), (2,), ()]))


def test_negative_truncation_rejected():
    with pytest.raises(ValueError):
        enumerate_census(A1, WeightSpec.verma(), -1)


def test_listing_of_the_verma_monomials_matches_literal_a1_search():
    mons = list_monomials(A1, WeightSpec.verma(), 6)
    assert Counter((m.energy(), m.color_type()[0]) for m in mons) == Counter(a1_monomials(6))
