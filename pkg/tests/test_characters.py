from fractions import Fraction

import pytest

from kisotropy.algebra import Poly, parse_poly
from kisotropy.characters import (dominant_multiplicities, express_in_cover, irreducible_character,
                                  is_restriction_surjective, lattice_names, representation_ring,
                                  restriction_map, weyl_dimension)
from kisotropy.errors import IllDefinedMap
from kisotropy.groebner import PresentedRing, ring_map_image
from kisotropy.lie import group_from_name, make_pair


def G(name):
    return group_from_name(name)


def poly(G_, text):
    return parse_poly(text, lattice_names(G_))


def test_su2_defining_character():
    S = G("SU(2)")
    assert irreducible_character(S, [1]).poly == poly(S, "t + t^-1")


def test_so3_adjoint_in_cover_coordinates():
    ch = irreducible_character(G("SO(3)"), [2], cover=True)
    assert ch.in_cover() == parse_poly("t1^2 + 1 + t1^-2", ["t1"])
    assert ch.dimension == 3


def test_su3_defining_character():
    S = G("SU(3)")
    ch = irreducible_character(S, [1, 0])
    assert len(ch.poly.terms) == 3
    assert ch.dimension == 3


@pytest.mark.parametrize("name,hw,dim", [
    ("SU(3)", [1, 1], 8),
    ("SU(3)", [3, 0], 10),
    ("SU(3)", [2, 1], 15),
    ("Sp(2)", [0, 1], 5),
    ("Sp(2)", [1, 0], 4),
    ("Spin(7)", [0, 0, 1], 8),
    ("SU(4)", [0, 1, 0], 6),
])
def test_freudenthal_matches_weyl(name, hw, dim):
    H = G(name)
    assert weyl_dimension(H, hw) == dim
    assert irreducible_character(H, hw).dimension == dim


def test_multiplicities_of_adjoint_su3():
    S = G("SU(3)")
    mult = dominant_multiplicities(S, [1, 1])
    assert mult[(0, 0)] == 2 and mult[(1, 1)] == 1


def test_characters_are_weyl_invariant():
    for name in ("SU(3)", "Sp(2)", "PSU(3)", "U(2)"):
        R = representation_ring(G(name))
        assert all(ch.is_invariant() for ch in R.characters)


@pytest.mark.parametrize("name,names,free", [
    ("SU(2)", ["c1"], True),
    ("SO(3)", ["c1"], True),
    ("T1", ["t", "t_inv"], True),
    ("SU(3)", ["c1", "c2"], True),
    ("PSU(3)", ["c1", "c2", "c3"], False),
])
def test_representation_rings(name, names, free):
    R = representation_ring(G(name))
    assert R.names == names
    assert R.free == free


def test_psu3_ring_has_one_cubic_relation():
    R = representation_ring(G("PSU(3)"))
    rels = [r for r in R.ring.relations]
    assert len(rels) == 1 and rels[0].degree() == 3


def test_psu3_relation_holds_on_characters():
    R = representation_ring(G("PSU(3)"))
    for r in R.ring.relations:
        assert R.evaluate(r).is_zero()


def test_express_round_trip_su3():
    S = G("SU(3)")
    R = representation_ring(S)
    ch = irreducible_character(S, [1, 1]).poly
    pre = R.express(ch)
    # adjoint = c1 c2 - 1
    assert pre == parse_poly("c1*c2 - 1", ["c1", "c2"])
    assert R.evaluate(pre) == ch


def test_express_in_cover_peels_highest_terms():
    S = G("SU(2)")
    p = poly(S, "t^3 + t + t^-1 + t^-3")
    out = express_in_cover(S, p)
    assert out == parse_poly("c1^3 - 2*c1", ["c1"])


def test_restriction_so3_so2():
    pair = make_pair(G("SO(3)"), G("SO(2)"), [[1]])
    rm = restriction_map(pair)
    RH = rm.target
    assert RH.evaluate(rm.images[0]) == parse_poly("t + 1 + t^-1", ["t"])
    # the image is Z[t + 1/t]: t + 1/t is in it, t is not
    im = ring_map_image(rm.source.ring, RH.ring, rm.images)
    names = list(RH.ring.names)
    assert im.contains(parse_poly("t + t_inv", names))[0]
    assert not im.contains(parse_poly("t", names))[0]


def test_restriction_su2_torus():
    rm = restriction_map(make_pair(G("SU(2)"), G("T1"), [[1]]))
    assert rm.to_json() == {"c1": "t + t_inv"}


def test_su4_defining_restricts_to_sp2_defining():
    rm = restriction_map(make_pair(G("SU(4)"), G("Sp(2)"), [[1, 0, 1], [0, 1, 0]]))
    assert rm.to_json()["c1"] == "c1"


@pytest.mark.parametrize("ambient,sub,R,surj,primes", [
    ("SU(4)", "Sp(2)", [[1, 0, 1], [0, 1, 0]], True, ()),
    ("SO(3)", "SO(2)", [[1]], False, ()),
    ("SU(3)", "SU(3)", None, True, ()),
])
def test_surjectivity(ambient, sub, R, surj, primes):
    res = is_restriction_surjective(make_pair(G(ambient), G(sub), R))
    assert res.surjective == surj
    assert tuple(res.inverted_primes) == primes


def test_sp2_preimages():
    pair = make_pair(G("SU(4)"), G("Sp(2)"), [[1, 0, 1], [0, 1, 0]])
    res = is_restriction_surjective(pair)
    rm = restriction_map(pair)
    # c1 and c3 both restrict to the defining character, so either is a valid preimage
    assert res.preimages["c1"] in ("c1", "c3")
    assert res.preimages["c2"] == "c2 - 1"
    for k, name in enumerate(rm.target.names):
        pre = parse_poly(res.preimages[name], rm.source.names)
        assert rm.apply(pre) == rm.target.ring.var(k)


def test_u2_circle_needs_inverting_two():
    U = G("U(2)")
    res = is_restriction_surjective(make_pair(U, G("T1"), [[0, 1]], coordinates="cover"))
    assert res.surjective and tuple(res.inverted_primes) == (2,)


def test_bad_embedding_is_ill_defined():
    pair = make_pair(G("SU(4)"), G("Sp(2)"), [[1, 0, 0], [0, 1, 0]])
    with pytest.raises(IllDefinedMap):
        restriction_map(pair)
