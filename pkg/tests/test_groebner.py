import pytest

from kisotropy.algebra import PoincareSeries, Poly, parse_poly
from kisotropy.errors import BudgetExceeded, IllDefinedMap
from kisotropy.groebner import (IdealPresentation, MonomialOrder, PresentedRing, fiber_dimension,
                                groebner_basis, is_regular_sequence, laurent_ring, normal_form,
                                ring_map_image)


def ideal(names, gens):
    return IdealPresentation(tuple(names), tuple(parse_poly(g, list(names)) for g in gens))


def test_lex_basis_contains_quartic():
    I = ideal("xy", ["x^2 - y", "y^2 - x"])
    G = groebner_basis(I, MonomialOrder.lex(2))
    assert parse_poly("y^4 - y", ["x", "y"]) in G.gens


def test_basis_is_idempotent():
    I = ideal("xyz", ["x^2 - y*z", "y^3 - x", "x*z - 1"])
    order = MonomialOrder.grevlex(3)
    G = groebner_basis(I, order)
    again = groebner_basis(IdealPresentation(G.names, G.gens), order)
    assert set(again.gens) == set(G.gens)


@pytest.mark.parametrize("gens,unit", [
    (["0"], False),
    (["x", "x - 1"], True),
    (["x^2", "x*y"], False),
])
def test_trivial_ideals(gens, unit):
    G = groebner_basis(ideal("xy", gens))
    assert G.is_unit() == unit


def test_normal_form_membership():
    names = ["x", "y"]
    G = groebner_basis(ideal(names, ["x^2 - y"]))
    assert normal_form(parse_poly("x^2", names), G) == parse_poly("y", names)
    assert normal_form(parse_poly("x^3 - x*y", names), G).is_zero()


def test_laurent_rewriting():
    R = laurent_ring(["t"])
    t_plus = parse_poly("t + t^-1", ["t"]).embed(2, 0)
    assert R.normal_form(t_plus) == parse_poly("t + t_inv", ["t", "t_inv"])


@pytest.mark.parametrize("names,rels,degrees,series", [
    (["x"], ["x^2"], [2], PoincareSeries.polynomial([1, 0, 1])),
    (["u", "v"], ["u^2 - v^2"], [2, 2], PoincareSeries.polynomial([1, 0, 0, 0, -1]) * PoincareSeries.free([2, 2])),
    (["x", "y"], [], [2, 3], PoincareSeries.free([2, 3])),
])
def test_hilbert_series(names, rels, degrees, series):
    R = PresentedRing(names, [parse_poly(r, names) for r in rels], degrees)
    assert R.hilbert_series() == series


def test_hilbert_series_of_doubled_quadric_is_one_plus_t2_over_one_minus_t2():
    R = PresentedRing(["u", "v"], [parse_poly("u^2 - v^2", ["u", "v"])], [2, 2])
    assert R.hilbert_series() == PoincareSeries.polynomial([1, 0, 1]) * PoincareSeries.free([2])


@pytest.mark.parametrize("ring,dim", [
    (PresentedRing(["x", "y"], [parse_poly("x*y", ["x", "y"])]), 1),
    (PresentedRing(["x", "y"]), 2),
    (laurent_ring(["t"]), 1),
    (laurent_ring(["s", "t"]), 2),
])
def test_krull_dimension(ring, dim):
    assert ring.krull_dimension() == dim


def test_regular_sequences():
    names = ["x", "y"]
    R = PresentedRing(names, (), [1, 1])
    ok, _ = is_regular_sequence([parse_poly("x^2", names), parse_poly("y^2", names)], R)
    assert ok
    ok, _ = is_regular_sequence([parse_poly("x", names), parse_poly("x", names)], R)
    assert not ok


def test_e2_e3_regular_modulo_e1():
    names = ["a", "b", "c"]
    e1 = parse_poly("a + b + c", names)
    R = PresentedRing(names, [e1], [1, 1, 1])
    e2 = parse_poly("a*b + a*c + b*c", names)
    e3 = parse_poly("a*b*c", names)
    ok, cert = is_regular_sequence([e2, e3], R)
    assert ok
    assert R.quotient([e2, e3]).vector_dimension() == 6


def test_image_of_squares():
    src = PresentedRing(["s"])
    tgt = PresentedRing(["t"])
    im = ring_map_image(src, tgt, [parse_poly("t^2", ["t"])])
    assert im.contains(parse_poly("t^4 + 1", ["t"]))[0]
    assert not im.contains(parse_poly("t", ["t"]))[0]
    assert im.kernel == []


def test_image_in_laurent_ring():
    R = laurent_ring(["t"])
    names = list(R.names)
    im = ring_map_image(PresentedRing(["c"]), R, [parse_poly("t + t_inv", names)])
    ok, pre = im.contains(parse_poly("t^2 + t_inv^2", names))
    assert ok and pre == parse_poly("c^2 - 2", ["c"])
    assert not im.contains(parse_poly("t", names))[0]


def test_ill_defined_map_is_detected():
    src = PresentedRing(["a"], [parse_poly("a^2", ["a"])])
    tgt = PresentedRing(["t"])
    with pytest.raises(IllDefinedMap):
        ring_map_image(src, tgt, [parse_poly("t", ["t"])])


def test_fiber_dimension():
    R = PresentedRing(["x"], [parse_poly("x^2", ["x"])])
    assert fiber_dimension(R, {"x": 0}) == 1
    assert R.vector_dimension() == 2
    assert fiber_dimension(PresentedRing(["x", "y"]), {"x": 0}) is None


def test_budget_is_enforced():
    names = ["x", "y", "z"]
    I = ideal(names, ["x^3 - y*z + 1", "y^3 - x*z", "z^3 - x*y - 2", "x*y*z - x - y - z"])
    with pytest.raises(BudgetExceeded) as exc:
        groebner_basis(I, MonomialOrder.lex(3), budget=3)
    assert exc.value.diagnostics


def test_local_multiplicity_of_double_point():
    from kisotropy.groebner import local_multiplicity
    R = PresentedRing(["x"], [parse_poly("x^2", ["x"])])
    assert local_multiplicity(R, {"x": 0}) == 2
    S = PresentedRing(["x"], [parse_poly("x^2 - x", ["x"])])
    assert local_multiplicity(S, {"x": 0}) == 1
    assert local_multiplicity(S, {"x": 1}) == 1
    assert local_multiplicity(S, {"x": 5}) == 0
