import pytest

from kisotropy import linalg as la
from kisotropy.errors import BudgetExceeded, DescriptorError
from kisotropy.lie import (build_group, cartan_matrix, group_from_name, make_pair, pair_from_descriptor,
                           validate_pair, weyl_elements)


@pytest.mark.parametrize("name,rank,order", [
    ("SU(2)", 1, 2),
    ("SU(3)", 2, 6),
    ("SU(4)", 3, 24),
    ("Sp(2)", 2, 8),
    ("Spin(7)", 3, 48),
    ("Spin(8)", 4, 192),
    ("SO(3)", 1, 2),
    ("PSU(3)", 2, 6),
    ("U(2)", 2, 2),
    ("T1", 1, 1),
    ("T3", 3, 1),
])
def test_rank_and_weyl_order(name, rank, order):
    G = group_from_name(name)
    assert G.rank == rank
    assert G.weyl_order == order


def test_su2_conventions():
    G = group_from_name("SU(2)")
    assert G.simple_roots == [[2]]
    assert sorted(la.as_tuple(w) for w in G.weyl_elements) == [((-1,),), ((1,),)]


def test_so3_lattice_is_even_weights():
    G = group_from_name("SO(3)")
    assert G.in_lattice([2]) and not G.in_lattice([1])
    assert G.index == 2


@pytest.mark.parametrize("kind,n,expected", [
    ("A", 2, [[2, -1], [-1, 2]]),
    ("C", 2, [[2, -1], [-2, 2]]),
    ("B", 2, [[2, -2], [-1, 2]]),
])
def test_cartan_matrices(kind, n, expected):
    # our convention A_ij = 2(a_i, a_j)/(a_i, a_i)
    A = cartan_matrix(kind, n)
    assert [list(r) for r in A] == expected or [list(r) for r in la.transpose(A)] == expected


def test_weyl_elements_closed_and_preserve_gram():
    G = group_from_name("Sp(2)")
    els = {la.as_tuple(w) for w in G.weyl_elements}
    for a in els:
        for b in els:
            assert la.as_tuple(la.matmul(a, b)) in els
    M = G.gram
    for w in els:
        # Gram form on weights is W-invariant: w^T M w = M
        assert la.matmul(la.matmul(la.transpose(w), M), w) == [list(r) for r in M]


def test_weyl_budget():
    G = group_from_name("Spin(8)")
    with pytest.raises(BudgetExceeded):
        weyl_elements(G, budget=10)


@pytest.mark.parametrize("name,free,torsion", [
    ("SU(2)", True, []),
    ("SU(4)", True, []),
    ("SO(3)", False, [2]),
    ("PSU(3)", False, [3]),
    ("U(2)", True, []),
    ("T2", True, []),
    ("SO(5)", False, [2]),
])
def test_pi1(name, free, torsion):
    f, tors, _ = group_from_name(name).pi1()
    assert f == free and tors == torsion


def test_u2_pi1_free_rank_one():
    assert group_from_name("U(2)").pi1()[2] == 1


@pytest.mark.parametrize("G,H,R,s", [
    ("SO(3)", "SO(2)", [[1]], 0),
    ("SU(2)", "T1", [[1]], 0),
    ("SU(4)", "Sp(2)", [[1, 0, 1], [0, 1, 0]], 1),
    ("SU(4)", "T1", [[1, 0, 2]], 2),
])
def test_valid_pairs(G, H, R, s):
    rep = validate_pair(make_pair(group_from_name(G), group_from_name(H), R))
    assert rep["valid"], rep["problems"]
    assert rep["rank_difference"] == s


def test_invalid_pairs_are_reported():
    # SU(4) -> Sp(2) with an unfolded matrix is not W_H-compatible
    rep = validate_pair(make_pair(group_from_name("SU(4)"), group_from_name("Sp(2)"), [[1, 0, 0], [0, 1, 0]]))
    assert not rep["valid"]
    # t -> t^2 is not an embedding of the torus
    rep = validate_pair(make_pair(group_from_name("SU(2)"), group_from_name("T1"), [[2]]))
    assert not rep["valid"]


def test_cover_coordinates_convert():
    U = group_from_name("U(2)")
    pair = make_pair(U, group_from_name("T1"), [[0, 1]], coordinates="cover")
    assert validate_pair(pair)["valid"]


@pytest.mark.parametrize("bad", [
    "SU(1)",
    "E(6)",
    "G(2)",
    {"factors": ["SU(2)"], "sublattice": [[0]]},
    {"nonsense": 1},
])
def test_bad_descriptors(bad):
    with pytest.raises(DescriptorError):
        build_group(bad)


def test_non_weyl_stable_sublattice():
    # w1 and 3 w2 span a finite-index sublattice that s2 does not preserve
    with pytest.raises(DescriptorError):
        build_group({"factors": ["SU(3)"], "sublattice": [[1, 0], [0, 3]]})


def test_pair_descriptor_round_trip():
    doc = {"ambient": "SU(4)", "subgroup": "Sp(2)", "restriction": [[1, 0, 1], [0, 1, 0]],
           "flags": {"sigma_pair": True}, "label": "x"}
    pair = pair_from_descriptor(doc)
    assert pair.sigma_pair and pair.rank_difference == 1 and pair.label == "x"


@pytest.mark.parametrize("doc", [
    {"ambient": "SU(2)"},
    {"ambient": "SU(2)", "subgroup": "T1", "restriction": [[1.5]]},
    {"ambient": "SU(2)", "subgroup": "T1", "colour": "red"},
    {"ambient": "SU(3)", "subgroup": "T1"},
    {"ambient": "SU(2)", "subgroup": "T1", "flags": {"other": True}},
])
def test_bad_pair_descriptors(doc):
    with pytest.raises(DescriptorError):
        pair_from_descriptor(doc)
