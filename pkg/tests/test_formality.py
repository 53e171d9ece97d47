import pytest

from kisotropy.algebra import PoincareSeries
from kisotropy.formality import (borel_cohomology, equivariant_cohomology, formality_check, normalizer_action,
                                 restriction_cohomology, st_battery)
from kisotropy.lie import group_from_name, make_pair

g = group_from_name


def pair(G, H, R=None, **kw):
    return make_pair(g(G), g(H), R, **kw)


SU4_SP2 = ("SU(4)", "Sp(2)", [[1, 0, 1], [0, 1, 0]])
SU4_CIRCLE = ("SU(4)", "T1", [[1, 0, 2]])


@pytest.mark.parametrize("name,degrees", [
    ("SU(2)", [4]),
    ("T1", [2]),
    ("SU(3)", [4, 6]),
    ("SU(4)", [4, 6, 8]),
    ("Sp(2)", [4, 8]),
    ("Spin(7)", [4, 8, 12]),
    ("U(2)", [2, 4]),
])
def test_borel_degrees(name, degrees):
    assert sorted(borel_cohomology(g(name)).degrees) == degrees


def test_primitive_degrees_are_transgressions():
    B = borel_cohomology(g("SU(3)"))
    assert sorted(B.primitive_degrees) == [3, 5]


def test_restriction_su2_torus_is_square():
    assert restriction_cohomology(pair("SU(2)", "T1", [[1]])).to_json() == {"p": "u^2"}


def test_restriction_identity_pair():
    assert restriction_cohomology(pair("SU(3)", "SU(3)")).to_json() == {"p1": "p1", "p2": "p2"}


def test_restriction_su3_torus_gives_symmetric_functions():
    res = restriction_cohomology(pair("SU(3)", "T2")).to_json()
    assert res["p1"] == "u1^2 - u1*u2 + u2^2"
    assert res["p2"] == "-u1^2*u2 + u1*u2^2"


@pytest.mark.parametrize("args,order", [
    (("SU(2)", "T1", [[1]]), 2),
    (("SO(3)", "SO(2)", [[1]]), 2),
    (("SU(3)", "T2"), 6),
    (SU4_SP2, 1),
    (SU4_CIRCLE, 2),
])
def test_normalizer_orders(args, order):
    assert normalizer_action(pair(*args)).order == order


def test_so3_normalizer_is_inversion():
    N = normalizer_action(pair("SO(3)", "SO(2)", [[1]]))
    assert sorted(m[0][0] for m in N.normalizing.elements) == [-1, 1]


@pytest.mark.parametrize("args,dim", [
    (("SU(2)", "T1", [[1]]), 2),
    (("SU(3)", "T2"), 6),
    (SU4_SP2, 1),
    (("SU(3)", "SU(3)"), 1),
])
def test_formality_check(args, dim):
    f = formality_check(pair(*args))
    assert f.ci
    assert f.quotient_dimension == dim


@pytest.mark.parametrize("args,N,dim,s", [
    (("SU(2)", "T1", [[1]]), 2, 2, 0),
    (("SU(3)", "T2"), 6, 6, 0),
    (("SU(3)", "SU(3)"), 1, 1, 0),
    (SU4_SP2, 1, 2, 1),
    (SU4_CIRCLE, 2, 8, 2),
    (("PSU(3)", "T2"), 6, 6, 0),
])
def test_battery_agrees_and_fpdim(args, N, dim, s):
    rep = st_battery(pair(*args))
    verdicts = {k: c["verdict"] for k, c in rep.conditions.items()}
    assert set(verdicts.values()) == {True}
    assert rep.fpdim["N_order"] == N
    assert rep.fpdim["dim_H_G_mod_K"] == dim      # dim H*(G/K)
    assert rep.fpdim["predicted"] == N * 2 ** s


def test_cohomology_su2_torus():
    E = equivariant_cohomology(pair("SU(2)", "T1", [[1]]))
    assert E.exterior_rank == 0
    assert E.series == PoincareSeries.polynomial([1, 0, 1]) * PoincareSeries.free([2])
    assert E.series.factored() == "(1 + t^2)/(1 - t^2)"


def test_cohomology_identity_pair_is_borel_ring():
    E = equivariant_cohomology(pair("SU(3)", "SU(3)"))
    assert E.exterior_rank == 0
    assert E.series == PoincareSeries.free([4, 6])


def test_cohomology_su4_sp2():
    E = equivariant_cohomology(pair(*SU4_SP2))
    assert E.exterior_degrees == [5]
    assert E.series == PoincareSeries.polynomial([1, 0, 0, 0, 0, 1]) * PoincareSeries.free([4, 8])


def test_cohomology_su4_circle_exterior():
    E = equivariant_cohomology(pair(*SU4_CIRCLE))
    assert sorted(E.exterior_degrees) == [5, 7]
