import pytest

from kisotropy.algebra import Poly, parse_poly
from kisotropy.errors import HypothesisRefusal, NotApplicable
from kisotropy.groebner import fiber_dimension
from kisotropy.ktheory import (assemble_ktheory, classify_pair, formality_criterion_tor, iota_image_comparison,
                               iota_map, iota_window_injective, ordinary_ktheory, tor0_fiber_dimensions,
                               tor0_presentation)
from kisotropy.lie import group_from_name, make_pair

g = group_from_name


def pair(G, H, R=None, **kw):
    return make_pair(g(G), g(H), R, **kw)


SO3 = ("SO(3)", "SO(2)", [[1]])
SU2T = ("SU(2)", "T1", [[1]])
SU3T = ("SU(3)", "T2")
SU4_SP2 = ("SU(4)", "Sp(2)", [[1, 0, 1], [0, 1, 0]])
SU4_CIRCLE = ("SU(4)", "T1", [[1, 0, 2]])
GG = ("SU(3)", "SU(3)")


@pytest.mark.parametrize("args,kw,case", [
    (SU4_SP2, {"sigma_pair": True}, "surjective"),
    (SU2T, {}, "equal_rank"),
    (SU3T, {}, "equal_rank"),
    (GG, {}, "surjective"),
    (SO3, {}, "not_covered"),
    (("PSU(3)", "T2"), {}, "not_covered"),
    (SU4_CIRCLE, {}, "not_covered"),
])
def test_classification(args, kw, case):
    assert classify_pair(pair(*args, **kw)).case == case


def test_sigma_flag_is_reached_only_after_surjectivity():
    h = classify_pair(pair(*SU4_SP2, sigma_pair=True))
    assert h.case == "surjective" and h.pi1_free_abelian


def test_so3_refusal_reason_mentions_pi1():
    h = classify_pair(pair(*SO3))
    assert not h.pi1_free_abelian and h.pi1_torsion == [2]
    assert "pi_1" in h.reason


def test_circle_not_free_certificate():
    h = classify_pair(pair(*SU4_CIRCLE))
    assert "RH not free over image" in h.reason
    cert = h.certificates["image"]
    assert cert["fiber_at_augmentation"] == 2
    assert cert["fiber_at_singular_point"] == 4


def test_psu3_unfree_note():
    h = classify_pair(pair("PSU(3)", "T2"))
    cert = h.certificates["freeness"]
    assert not cert["free"]
    assert cert["fiber_at_augmentation"] == 6
    assert cert["fiber_at_singular_point"] > 6


def test_u2_circle_records_inverted_primes():
    h = classify_pair(pair("U(2)", "T1", [[0, 1]], coordinates="cover"))
    assert h.case == "surjective" and h.inverted_primes == [2]


def test_invalid_pair_is_not_covered():
    h = classify_pair(pair("SU(2)", "T1", [[2]]))
    assert h.case == "not_covered" and h.reason.startswith("invalid pair")


def test_tor0_so3():
    T = tor0_presentation(pair(*SO3))
    assert T.names == ("t", "t_inv", "t'", "t'_inv")
    names = list(T.names)
    assert parse_poly("t + t_inv - t' - t'_inv", names) in T.relations
    assert tor0_fiber_dimensions(pair(*SO3)) == (2, 2)


def test_tor0_identity_pair_forces_equality():
    T = tor0_presentation(pair(*GG))
    names = list(T.names)
    assert T.normal_form(parse_poly("c1 - c1'", names)).is_zero()
    assert T.normal_form(parse_poly("c2 - c2'", names)).is_zero()


@pytest.mark.parametrize("args,dim", [(SU2T, 2), (SU3T, 6), (GG, 1), (SU4_SP2, 1)])
def test_tor0_fiber_dimensions(args, dim):
    assert tor0_fiber_dimensions(pair(*args)) == (dim, dim)


def test_assemble_su4_sp2():
    rep = assemble_ktheory(pair(*SU4_SP2, sigma_pair=True))
    assert rep.exterior_rank == 1
    assert rep.ring.names == ("c1", "c2") and rep.ring.relations == ()
    assert rep.grading == {"c1": 0, "c2": 0, "z1": 1}
    assert rep.fiber_dimension == rep.predicted_rank == 1


def test_assemble_su2_torus():
    rep = assemble_ktheory(pair(*SU2T))
    assert rep.exterior_rank == 0
    assert rep.fiber_dimension == 2
    assert rep.to_json()["freeness_certificate"] == {"fiber_dimension": 2, "predicted_rank": 2}


def test_assemble_identity_pair_returns_rg():
    rep = assemble_ktheory(pair(*GG))
    assert rep.exterior_rank == 0
    assert rep.ring.names == ("c1", "c2")


@pytest.mark.parametrize("args", [SO3, SU4_CIRCLE, ("PSU(3)", "T2")])
def test_assemble_refuses(args):
    with pytest.raises(HypothesisRefusal) as exc:
        assemble_ktheory(pair(*args))
    assert exc.value.reason


@pytest.mark.parametrize("args,dim", [(SU2T, 2), (SU3T, 6), (SU4_SP2, 2), (GG, 1)])
def test_ordinary_ktheory_dimension(args, dim):
    assert ordinary_ktheory(pair(*args)).dimension == dim


def test_ordinary_su2_presentation():
    K = ordinary_ktheory(pair(*SU2T))
    names = list(K.ring.names)
    assert K.ring.contains(parse_poly("t + t_inv - 2", names))


def test_ordinary_refuses_uncovered():
    with pytest.raises(HypothesisRefusal):
        ordinary_ktheory(pair(*SO3))


@pytest.mark.parametrize("args,dim,s", [(SU2T, 2, 0), (GG, 1, 0), (SU4_SP2, 1, 1)])
def test_formality_criterion_tor(args, dim, s):
    v = formality_criterion_tor(pair(*args))
    assert v.surjective
    assert v.quotient_dimension == dim and v.exterior_rank == s


def test_iota_so3_pole_restrictions():
    io = iota_map(pair(*SO3))
    t, one = Poly.var(0, 1), Poly.one(1)
    assert io(t, one) == (t, t)
    assert io(one, t) == (t, parse_poly("t^-1", ["t"]))
    assert io(one, one) == (one, one)


def test_iota_su2_weyl_action():
    io = iota_map(pair(*SU2T))
    t, one = Poly.var(0, 1), Poly.one(1)
    assert io(one, t) == (t, parse_poly("t^-1", ["t"]))


def test_iota_on_tor0_kills_relations():
    p = pair(*SU3T)
    io = iota_map(p)
    T = tor0_presentation(p)
    for r in T.relations:
        assert all(c.is_zero() for c in io.on_tor0(r))


def test_iota_requires_torus():
    with pytest.raises(NotApplicable):
        iota_map(pair(*SU4_SP2))


@pytest.mark.parametrize("args,window", [(SO3, 3), (SU2T, 3), (SU3T, 1)])
def test_iota_injective_on_window(args, window):
    assert iota_window_injective(pair(*args), window)["injective"]


def test_iota_image_so3_witness():
    cmp_ = iota_image_comparison(pair(*SO3), 3)
    assert cmp_.witness == "(1, t)"
    assert cmp_.decided
    row = next(r for r in cmp_.tested if r[0] == "(1, t)")
    assert row[1] and not row[2]


def test_iota_image_su2_contains_all_gkm_pairs():
    cmp_ = iota_image_comparison(pair(*SU2T), 3)
    assert cmp_.witness is None
    assert all(lam for _, iota, lam, _ in cmp_.tested if iota)
    assert next(r for r in cmp_.tested if r[0] == "(1, 1)")[1:3] == (True, True)


def test_iota_comparison_needs_rank_one():
    with pytest.raises(NotApplicable):
        iota_image_comparison(pair(*SU3T))


def test_report_json_shape():
    js = assemble_ktheory(pair(*SU4_SP2, sigma_pair=True)).to_json()
    for key in ("presentation", "exterior_rank", "grading", "provenance", "inverted_primes", "hypotheses"):
        assert key in js
