import json
from fractions import Fraction

import pytest

from kisotropy.algebra import PoincareSeries, parse_poly
from kisotropy.errors import DescriptorError
from kisotropy.formality import weyl_matrix_group
from kisotropy.groebner import PresentedRing
from kisotropy.invariants import (FiniteMatrixGroup, coinvariant_dimension, cst_verdict, group_from_json,
                                  invariant_dimension, invariant_generators, is_pseudoreflection_group,
                                  molien_series, parameter_degree_test, subalgebra_collapse_check)
from kisotropy.lie import group_from_name

S3 = [[[-1, 1], [0, 1]], [[1, 0], [1, -1]]]
Z4 = [[[0, -1], [1, 0]]]
B2 = [[[0, 1], [1, 0]], [[-1, 0], [0, 1]]]


def gen(gens, n=2):
    return FiniteMatrixGroup.generated_by(gens, n)


def perm_matrices(n):
    from itertools import permutations
    out = []
    for p in permutations(range(n)):
        out.append([[int(p[j] == i) for j in range(n)] for i in range(n)])
    return out


def test_group_orders():
    assert gen(S3).order == 6
    assert gen(Z4).order == 4
    assert gen(B2).order == 8


@pytest.mark.parametrize("gens,n,series,poly", [
    ([], 2, PoincareSeries.free([1, 1]), True),
    (S3, 2, PoincareSeries.free([2, 3]), True),
    (Z4, 2, PoincareSeries.polynomial([1, 0, 0, 0, 1]) * PoincareSeries.free([2, 4]), False),
    (B2, 2, PoincareSeries.free([2, 4]), True),
    ([[[-1]]], 1, PoincareSeries.free([2]), True),
])
def test_molien(gens, n, series, poly):
    mol = molien_series(gen(gens, n))
    assert mol.series == series
    assert mol.polynomial == poly


def test_molien_counts_invariants_s3_permutation():
    G = FiniteMatrixGroup(perm_matrices(3), 3)
    mol = molien_series(G)
    coeffs = mol.series.expand(8)
    for d in range(9):
        assert coeffs[d] == invariant_dimension(G, d)


@pytest.mark.parametrize("gens,n,refl,count", [
    (S3, 2, True, 3),
    (Z4, 2, False, 0),
    ([[[-1]]], 1, True, 1),
    (B2, 2, True, 4),
])
def test_pseudoreflections(gens, n, refl, count):
    v = is_pseudoreflection_group(gen(gens, n))
    assert v.is_reflection_group == refl
    assert len(v.reflections) == count


@pytest.mark.parametrize("degrees,order,ok", [
    ([2, 3], 6, True),
    ([2, 2], 6, False),
    ([1, 1, 1], 1, True),
])
def test_parameter_degree_test(degrees, order, ok):
    assert parameter_degree_test(degrees, order) == ok


@pytest.mark.parametrize("gens,n,dim,order", [
    (S3, 2, 6, 6),
    (Z4, 2, 7, 4),
    ([], 1, 1, 1),
    (B2, 2, 8, 8),
    ([[[-1]]], 1, 2, 2),
])
def test_coinvariant_dimension(gens, n, dim, order):
    res = coinvariant_dimension(gen(gens, n))
    assert res.exact
    assert (res.dimension, res.group_order) == (dim, order)


def test_z4_coinvariants_exceed_group_order():
    # invariants x^2 + y^2, x^2 y^2, xy(x^2 - y^2); the quotient is 7-dimensional
    res = coinvariant_dimension(gen(Z4))
    assert res.dimension > res.group_order
    assert res.generator_degrees == [2, 4, 4]


def test_low_bound_gives_upper_bound_only():
    res = coinvariant_dimension(gen(Z4), degree_bound=2)
    assert not res.exact
    assert res.to_json()["bound_kind"] == "upper"
    assert res.dimension is None or res.dimension >= 7


@pytest.mark.parametrize("name", ["SU(2)", "SU(3)", "Sp(2)", "T1", "SO(3)", "PSU(3)", "U(2)"])
def test_cst_on_weyl_groups_rank_le_2(name):
    W = weyl_matrix_group(group_from_name(name))
    rep = cst_verdict(W)
    assert rep.verdict


def test_cst_on_z4_is_all_false():
    rep = cst_verdict(gen(Z4))
    assert not rep.verdict
    assert not rep.reflection.is_reflection_group
    assert not rep.molien.polynomial


def test_sp2_weyl_degrees():
    rep = cst_verdict(weyl_matrix_group(group_from_name("Sp(2)")))
    assert sorted(rep.molien.degrees) == [2, 4]


def test_invariant_generators_s3():
    inv = invariant_generators(gen(S3))
    assert inv.complete and inv.degrees == [2, 3]


class TestCollapse:
    names = ["a", "b", "c"]

    def setup_method(self):
        self.B = PresentedRing(self.names, [parse_poly("a + b + c", self.names)], [1, 1, 1])
        self.G = FiniteMatrixGroup(perm_matrices(3), 3)

    def p(self, text):
        return parse_poly(text, self.names)

    def test_elementary_generators_certify(self):
        v = subalgebra_collapse_check([self.p("a*b + a*c + b*c"), self.p("a*b*c")], self.B, self.G)
        assert v.ideals_equal and v.conclusion_certified

    def test_square_of_e2_is_not_enough(self):
        e2 = self.p("a*b + a*c + b*c")
        v = subalgebra_collapse_check([e2 * e2], self.B, self.G)
        assert not v.ideals_equal and not v.conclusion_certified

    def test_invariant_generators_themselves(self):
        inv = invariant_generators(self.G)
        v = subalgebra_collapse_check(inv.generators, self.B, self.G)
        assert v.ideals_equal


def test_group_json_forms():
    g = group_from_json(json.dumps({"degree": 2, "generators": [[["0", "-1"], ["1", "0"]]]}))
    assert g.order == 4
    g = group_from_json({"elements": [[[1, 0], [0, 1]], [[-1, 0], [0, -1]]]})
    assert g.order == 2
    rot = group_from_json({"generators": [[["1/2", "-3/4"], ["1", "1/2"]]]})
    assert rot.order == 6


@pytest.mark.parametrize("doc", [
    {"degree": 2},
    {"generators": [[[1, 0], [0, 0]]]},
    {"elements": [[[0, 1], [1, 0]], [[1, 0], [0, 1]], [[0, -1], [1, 0]]]},
    {"generators": [[["x", 0], [0, 1]]]},
])
def test_group_json_errors(doc):
    with pytest.raises(DescriptorError):
        group_from_json(doc)
