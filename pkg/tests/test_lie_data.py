import json
from fractions import Fraction

import pytest

from qpbases.lie_data import (AlgebraSpec, InvalidAlgebra, build_root_system, cartan_matrix,
                              enumerate_positive_roots, expected_positive_root_count,
                              level_one_fundamental_nodes)

SUPPORTED = ["A1", "A2", "A3", "A5", "B2", "B3", "B4", "C2", "C3", "C4", "D3", "D4", "D5", "D6",
             "E6", "E7", "E8", "F4", "G2"]

# dim g for the independent count (dim g - l) / 2
DIMENSION = {"A": lambda l: l * (l + 2), "B": lambda l: l * (2 * l + 1),
             "C": lambda l: l * (2 * l + 1), "D": lambda l: l * (2 * l - 1),
             "E": lambda l: {6: 78, 7: 133, 8: 248}[l], "F": lambda l: 52, "G": lambda l: 14}


@pytest.mark.parametrize("name", ["E9", "F5", "G3", "D2", "B1", "C1", "A0", "X4"])
def test_invalid_specs_are_rejected(name):
    with pytest.raises(InvalidAlgebra):
        build_root_system(name)


def test_d4_i_prime_and_nu():
    rs = build_root_system("D4")
    assert rs.i_prime == {2: 1, 3: 2, 4: 2}
    assert rs.nu == (1, 1, 1, 1)


def test_f4_nu_mu_and_highest_root():
    rs = build_root_system("F4")
    assert rs.nu == (1, 1, 2, 2)
    assert (rs.mu[2], rs.mu[3], rs.mu[4]) == (1, 2, 1)
    assert rs.highest_root == (2, 3, 4, 2)
    assert len(rs.positive_roots) == 24
    assert (2, 3, 4, 2) in rs.positive_roots


def test_a1_and_a2_roots():
    a1 = build_root_system("A1")
    assert a1.positive_roots == ((1,),)
    assert a1.highest_root == (1,)
    a2 = build_root_system("A2")
    assert set(a2.positive_roots) == {(1, 0), (0, 1), (1, 1)}


def test_d4_has_twelve_roots():
    assert len(enumerate_positive_roots(cartan_matrix(AlgebraSpec("D", 4)))) == 12


@pytest.mark.parametrize("name,nodes", [("D4", (1, 3, 4)), ("D5", (1, 4, 5)), ("E6", (1, 6)),
                                        ("E7", (1,)), ("F4", ()), ("A3", ()), ("E8", ())])
def test_level_one_nodes(name, nodes):
    assert level_one_fundamental_nodes(AlgebraSpec.parse(name)) == nodes


def test_exceptional_labeling():
    def edges(name):
        c = build_root_system(name).cartan
        return {(i + 1, j + 1) for i in range(len(c)) for j in range(i + 1, len(c)) if c[i][j]}
    assert edges("E6") == {(1, 2), (2, 3), (3, 4), (4, 5), (3, 6)}
    assert edges("E7") == {(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7)}
    assert edges("E8") == {(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 8)}


def test_c_labels_are_reversed():
    rs = build_root_system("C3")
    # alpha_1 is the long root: the only node with nu = 1
    assert rs.nu == (1, 2, 2)
    assert rs.norm2(1) == Fraction(2)


@pytest.mark.parametrize("name", SUPPORTED)
def test_invariants(name):
    rs = build_root_system(name)
    l = rs.rank
    c = rs.cartan
    for i in range(l):
        assert c[i][i] == 2
        for j in range(l):
            if i != j:
                assert c[i][j] in (0, -1, -2, -3)
                assert (c[i][j] == 0) == (c[j][i] == 0)
    assert all(n in (1, 2, 3) for n in rs.nu)
    assert list(rs.nu) == sorted(rs.nu)
    for i in range(2, l + 1):
        j = rs.i_prime[i]
        assert j < i and rs.adjacent(i, j) and c[i - 1][j - 1] != 0
        assert rs.nu[i - 1] % rs.nu[j - 1] == 0
        assert rs.mu[i] in (1, 2, 3)
    roots = rs.positive_roots
    assert len(set(roots)) == len(roots)
    for i in range(l):
        assert tuple(int(i == j) for j in range(l)) in roots
    assert rs.highest_root in roots
    assert not any(r != rs.highest_root and all(a >= b for a, b in zip(r, rs.highest_root))
                   for r in roots)
    assert len(roots) == expected_positive_root_count(rs.spec)
    assert len(roots) == (DIMENSION[rs.spec.family](l) - l) // 2


def test_nu_matches_inner_products():
    # <alpha_i, alpha_i> = 2, 1, 2/3 for nu = 1, 2, 3
    for name in ("B3", "C3", "F4", "G2"):
        rs = build_root_system(name)
        for i in range(1, rs.rank + 1):
            assert rs.norm2(i) == {1: Fraction(2), 2: Fraction(1), 3: Fraction(2, 3)}[rs.nu[i - 1]]
            for j in range(1, rs.rank + 1):
                assert rs.inner(i, j) == rs.inner(j, i)


def test_json_keys_and_determinism():
    rs = build_root_system("F4")
    d = json.loads(rs.to_json())
    assert set(d) == {"family", "rank", "cartan", "nu", "i_prime", "mu", "positive_roots",
                      "highest_root", "level_one_nodes"}
    assert rs.to_json() == build_root_system("F4").to_json()


def test_affine_matrix_is_rejected_by_the_cap():
    with pytest.raises(InvalidAlgebra):
        enumerate_positive_roots([[2, -2], [-2, 2]], cap=500)
    with pytest.raises(InvalidAlgebra):
        enumerate_positive_roots([[2, 1], [1, 2]])
