"""Finite matrix groups over Q and their polynomial invariants.

A group element g acts on Q[x_1..x_n] = Sym(Q^n) by sending the basis vector
x_i to g x_i, i.e. x_i -> sum_j g[j][i] x_j.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import lcm, prod

from . import linalg as la
from .algebra import PoincareSeries, Poly, default_names, one_minus_t_pow, upoly_add, upoly_divmod, upoly_mul
from .errors import BudgetExceeded, DescriptorError, InconsistentVerdict, NotApplicable
from .groebner import PresentedRing, normal_form

DEFAULT_GROUP_BUDGET = 10**4


def _freeze(M):
    return tuple(tuple(Fraction(x) for x in row) for row in M)


class FiniteMatrixGroup:
    """Finite subgroup of GL_n(Q) given by its full element list (identity first)."""

    def __init__(self, elements, degree=None, label=""):
        els = [_freeze(e) for e in elements]
        if not els and degree is None:
            raise DescriptorError("empty group needs an explicit degree")
        self.degree = degree if degree is not None else len(els[0])
        ident = _freeze(la.identity(self.degree))
        seen = dict.fromkeys([ident] + els)
        self.elements = list(seen)
        self.label = label
        self._check_closed()

    def _check_closed(self):
        s = set(self.elements)
        for a in self.elements:
            for b in self.elements:
                if _freeze(la.matmul(a, b)) not in s:
                    raise DescriptorError("element list is not closed under products")

    @classmethod
    def generated_by(cls, generators, degree=None, budget=DEFAULT_GROUP_BUDGET, label=""):
        gens = [_freeze(g) for g in generators]
        n = degree if degree is not None else (len(gens[0]) if gens else 0)
        for g in gens:
            if len(g) != n or any(len(r) != n for r in g):
                raise DescriptorError("generators must be square of the declared degree")
            if la.det(g) == 0:
                raise DescriptorError("singular generator")
        ident = _freeze(la.identity(n))
        seen = {ident: None}
        frontier = [ident]
        while frontier:
            new = []
            for a in frontier:
                for g in gens:
                    b = _freeze(la.matmul(g, a))
                    if b not in seen:
                        seen[b] = None
                        new.append(b)
                        if len(seen) > budget:
                            raise BudgetExceeded(f"group closure exceeds budget {budget} (infinite group?)",
                                                 {"enumerated": len(seen)})
            frontier = new
        out = cls.__new__(cls)
        out.degree = n
        out.elements = list(seen)
        out.label = label
        return out

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def act(self, g, f):
        n = self.degree
        images = [Poly({tuple(int(k == j) for k in range(n)): g[j][i] for j in range(n) if g[j][i]}, n)
                  for i in range(n)]
        return f.substitute(images, n)

    def reynolds(self, f):
        total = Poly.zero(self.degree)
        for g in self.elements:
            total = total + self.act(g, f)
        return total * Fraction(1, self.order)

    def is_invariant(self, f):
        return all(self.act(g, f) == f for g in self.elements)

    def to_json(self):
        return {"degree": self.degree,
                "elements": [[[str(x) for x in row] for row in g] for g in self.elements]}

    def __repr__(self):
        return f"FiniteMatrixGroup({self.label or 'degree ' + str(self.degree)}, order {self.order})"


def _entry(x):
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            raise DescriptorError(f"bad matrix entry {x!r}") from None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise DescriptorError(f"matrix entries must be integers or 'p/q' strings, got {x!r}")


def group_from_json(data, budget=DEFAULT_GROUP_BUDGET):
    """{"degree": n, "generators": [...]} or {"degree": n, "elements": [...]}; entries int or 'p/q'."""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict):
        raise DescriptorError("matrix group descriptor must be a JSON object")
    n = data.get("degree")
    key = "generators" if "generators" in data else "elements" if "elements" in data else None
    if key is None:
        raise DescriptorError("descriptor needs 'generators' or 'elements'")
    try:
        mats = [[[_entry(x) for x in row] for row in m] for m in data[key]]
    except TypeError as exc:
        raise DescriptorError(f"malformed matrix list: {exc}") from None
    if n is None:
        if not mats:
            raise DescriptorError("need 'degree' when the list is empty")
        n = len(mats[0])
    label = data.get("label", "")
    if key == "elements":
        return FiniteMatrixGroup(mats, n, label)
    return FiniteMatrixGroup.generated_by(mats, n, budget, label)


# ---------------------------------------------------------------------------
# Molien series

def _charpoly_reversed(g):
    """Coefficients (low degree first) of det(I - t g), by Faddeev-LeVerrier."""
    n = len(g)
    c = [Fraction(1)] + [Fraction(0)] * n      # char poly x^n + c1 x^{n-1} + ...
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        M = [[sum(g[i][a] * M[a][j] for a in range(n)) + (c[k - 1] if i == j else 0) for j in range(n)]
             for i in range(n)]
        gm = la.matmul(g, M)
        c[k] = -sum(gm[i][i] for i in range(n)) / k
    # det(I - t g) = t^n charpoly(1/t) = sum_k c_k t^k
    return c


def element_order(g, limit=10**4):
    ident = _freeze(la.identity(len(g)))
    p = g
    for k in range(1, limit + 1):
        if _freeze(p) == ident:
            return k
        p = la.matmul(p, g)
    raise BudgetExceeded("element order exceeds limit", {"limit": limit})


@dataclass
class MolienData:
    series: PoincareSeries
    polynomial: bool
    degrees: list = field(default_factory=list)
    group_order: int = 0

    def to_json(self):
        return {"series": self.series.to_json(), "factored": self.series.factored(),
                "polynomial": self.polynomial, "degrees": list(self.degrees), "group_order": self.group_order}


def molien_series(G):
    n = G.degree
    if n == 0:
        return MolienData(PoincareSeries([1], ()), True, [], G.order)
    by_poly = {}
    M = 1
    for g in G.elements:
        p = tuple(_charpoly_reversed(g))
        by_poly[p] = by_poly.get(p, 0) + 1
        M = lcm(M, element_order(g))
    common = [Fraction(1)]
    for _ in range(n):
        common = upoly_mul(common, one_minus_t_pow(M))
    num = [Fraction(0)]
    for p, count in by_poly.items():
        q, r = upoly_divmod(common, list(p))
        if any(r):
            raise ArithmeticError("det(I - tg) does not divide (1 - t^M)^n")
        num = upoly_add(num, [count * x for x in q])
    num = [x / G.order for x in num]
    series = PoincareSeries(num, [M] * n)
    degrees = _free_degrees(series, n)
    return MolienData(series, degrees is not None, degrees or [], G.order)


def _free_degrees(series, n, cap=200):
    """Greedy factorisation against 1/(1 - t^d), smallest d first; None if not of that form."""
    coeffs = series.expand(cap + 1)
    degrees = []
    current = [Fraction(1)] + [Fraction(0)] * cap   # expansion of prod 1/(1-t^d) so far
    for k in range(1, cap + 1):
        diff = coeffs[k] - current[k]
        if diff < 0 or diff.denominator != 1:
            return None
        for _ in range(int(diff)):
            degrees.append(k)
            for j in range(k, cap + 1):
                current[j] += current[j - k]
            if len(degrees) > n:
                return None
        if len(degrees) == n:
            break
    if len(degrees) != n or PoincareSeries.free(degrees) != series:
        return None
    return degrees


# ---------------------------------------------------------------------------
# invariants degree by degree

def homogeneous_monomials(n, d, weights=None):
    weights = weights or [1] * n
    out = []

    def rec(i, left, cur):
        if i == n:
            if left == 0:
                out.append(tuple(cur))
            return
        w = weights[i]
        for k in range(left // w + 1):
            cur.append(k)
            rec(i + 1, left - k * w, cur)
            cur.pop()

    rec(0, d, [])
    return out


def _coeff_rows(polys, monos):
    idx = {m: i for i, m in enumerate(monos)}
    rows = []
    for p in polys:
        v = [Fraction(0)] * len(monos)
        for e, c in p.terms.items():
            v[idx[e]] = c
        rows.append(v)
    return rows


def invariants_of_degree(G, d, weights=None):
    """A basis of the degree-d invariants (Reynolds images of monomials, row-reduced)."""
    n = G.degree
    monos = homogeneous_monomials(n, d, weights)
    if not monos:
        return []
    images = [G.reynolds(Poly.monomial(m, 1, n)) for m in monos]
    R, piv = la.rref(_coeff_rows(images, monos))
    return [Poly({monos[j]: c for j, c in enumerate(R[r]) if c}, n) for r in range(len(piv))]


def invariant_dimension(G, d):
    """dim of degree-d invariants via the rank of the averaged monomial basis (Molien oracle)."""
    return len(invariants_of_degree(G, d))


def _products_of_degree(gens, gdegs, d, n):
    """All products of generators of total degree d."""
    out = []

    def rec(start, left, cur):
        if left == 0:
            out.append(cur)
            return
        for i in range(start, len(gens)):
            if gdegs[i] <= left:
                rec(i, left - gdegs[i], cur * gens[i])

    rec(0, d, Poly.one(n))
    return out


@dataclass
class InvariantGenerators:
    generators: list
    degrees: list
    complete: bool           # certified to generate the whole invariant ring
    certificate: str


def invariant_generators(G, degree_bound=None, weights=None):
    """Minimal homogeneous generators of Q[V]^G up to ``degree_bound`` (default: Noether's |G|).

    Stops early once the generators found form a system of parameters whose
    degrees multiply to |G|, which already forces them to generate.
    """
    n = G.degree
    bound = degree_bound if degree_bound is not None else G.order
    gens, degs = [], []
    for d in range(1, bound + 1):
        basis = invariants_of_degree(G, d, weights)
        if not basis:
            continue
        monos = homogeneous_monomials(n, d, weights)
        old = _products_of_degree(gens, degs, d, n) if gens else []
        rows = _coeff_rows(old, monos)
        r = la.rank(rows) if rows else 0
        for b in basis:
            cand = rows + _coeff_rows([b], monos)
            if la.rank(cand) > r:
                rows, r = cand, r + 1
                gens.append(b)
                degs.append(d)
        if len(gens) == n and prod(degs) == G.order and _is_parameter_system(gens, n, weights):
            return InvariantGenerators(gens, degs, True, "system of parameters with product of degrees = |G|")
    complete = degree_bound is None or bound >= G.order
    cert = "Noether bound |G|" if complete else f"degree bound {bound} (below Noether's bound)"
    return InvariantGenerators(gens, degs, complete, cert)


def _is_parameter_system(gens, n, weights=None):
    ring = PresentedRing(default_names(n, "x"), gens, weights or [1] * n)
    return ring.vector_dimension() is not None


def parameter_degree_test(degrees, order):
    """True iff prod(degrees) == order (the sufficient condition for a polynomial invariant ring)."""
    if any(d <= 0 for d in degrees):
        raise ValueError("degrees must be positive")
    return prod(degrees) == order


# ---------------------------------------------------------------------------
# reflections, coinvariants, Chevalley-Shephard-Todd

def pseudoreflections(G):
    ident = la.identity(G.degree)
    out = []
    for g in G.elements:
        diff = [[g[i][j] - ident[i][j] for j in range(G.degree)] for i in range(G.degree)]
        if la.rank(diff) == 1:
            out.append(g)
    return out


@dataclass
class ReflectionVerdict:
    is_reflection_group: bool
    reflections: list
    generated_order: int

    def to_json(self):
        return {"is_reflection_group": self.is_reflection_group, "reflection_count": len(self.reflections),
                "generated_order": self.generated_order,
                "reflections": [[[str(x) for x in row] for row in g] for g in self.reflections]}


def is_pseudoreflection_group(G):
    refl = pseudoreflections(G)
    if G.degree == 0:
        return ReflectionVerdict(True, [], 1)
    sub = FiniteMatrixGroup.generated_by(refl, G.degree, budget=max(G.order, 1)) if refl else None
    order = sub.order if sub else 1
    return ReflectionVerdict(order == G.order, refl, order)


@dataclass
class CoinvariantResult:
    dimension: int | None
    group_order: int
    exact: bool
    generator_degrees: list

    @property
    def comparison(self):
        if self.dimension is None:
            return "infinite"
        if self.dimension == self.group_order:
            return "equal"
        return "greater" if self.dimension > self.group_order else "less"

    def to_json(self):
        return {"dimension": self.dimension, "group_order": self.group_order, "comparison": self.comparison,
                "exact": self.exact, "generator_degrees": self.generator_degrees,
                "bound_kind": "exact" if self.exact else "upper"}


def coinvariant_dimension(G, degree_bound=None):
    """dim Q[V]/(positive-degree invariants).

    With a bound below Noether's the ideal may be missing generators; the
    result is then only an upper bound (possibly infinite) and ``exact`` is False.
    """
    inv = invariant_generators(G, degree_bound)
    n = G.degree
    ring = PresentedRing(default_names(n, "x"), inv.generators, [1] * n)
    dim = ring.vector_dimension()
    return CoinvariantResult(dim, G.order, inv.complete, list(inv.degrees))


@dataclass
class CSTReport:
    reflection: ReflectionVerdict
    molien: MolienData
    coinvariants: CoinvariantResult
    verdict: bool

    def to_json(self):
        return {"polynomial_invariants": self.verdict,
                "reflection_group": self.reflection.to_json(),
                "molien": self.molien.to_json(),
                "coinvariants": self.coinvariants.to_json()}


def cst_verdict(G):
    """Reflection test, Molien factorisation and |coinvariants| = |G|, which must all agree."""
    refl = is_pseudoreflection_group(G)
    mol = molien_series(G)
    coinv = coinvariant_dimension(G)
    tests = [refl.is_reflection_group, mol.polynomial, coinv.exact and coinv.dimension == G.order]
    if len(set(tests)) != 1:
        raise InconsistentVerdict(f"reflection={tests[0]}, molien={tests[1]}, coinvariants={tests[2]}")
    if mol.polynomial:
        if prod(mol.degrees) != G.order or sum(d - 1 for d in mol.degrees) != len(refl.reflections):
            raise InconsistentVerdict("degree identities fail for a polynomial invariant ring")
    return CSTReport(refl, mol, coinv, tests[0])


# ---------------------------------------------------------------------------
# the subalgebra collapse criterion

@dataclass
class CollapseVerdict:
    ideals_equal: bool
    conclusion_certified: bool
    missing: list             # generators of one ideal outside the other, as text
    invariant_generators: list

    def to_json(self):
        return {"ideals_equal": self.ideals_equal, "conclusion_certified": self.conclusion_certified,
                "missing": self.missing, "invariant_generators": self.invariant_generators}


def subalgebra_collapse_check(A_gens, B, G):
    """Compare (A+)B with ((B+)^G)B; equality certifies A = B^G."""
    n = B.nvars
    if G.degree != n:
        raise NotApplicable("group degree must match the ring's variable count")
    if not B.graded:
        raise NotApplicable("B must be graded")
    A_gens = [B.encode(a) for a in A_gens]
    for k, a in enumerate(A_gens):
        for g in G.elements:
            if not B.normal_form(G.act(g, a) - a).is_zero():
                raise NotApplicable(f"generator {k} ({B.format(a)}) is not invariant")
    inv = invariant_generators(G, weights=list(B.degrees))
    I_A = B.quotient([a for a in A_gens if not a.is_zero()])
    I_G = B.quotient(inv.generators)
    missing = []
    for f in inv.generators:
        if not I_A.normal_form(f).is_zero():
            missing.append("invariant " + B.format(f))
    for a in A_gens:
        if not I_G.normal_form(a).is_zero():
            missing.append("A-generator " + B.format(a))
    equal = not missing
    return CollapseVerdict(equal, equal and inv.complete, missing, [B.format(f) for f in inv.generators])
