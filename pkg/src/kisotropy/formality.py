"""Rational cohomology side: H*(BG), the normalizer action, and formality of (G, K).

H*(BT; Q) is the symmetric algebra on the rational weight lattice, each
lattice basis vector being a class of degree 2.  H*(BG; Q) is its W-invariant
subring, generated in degrees 2*d_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import linalg as la
from .algebra import PoincareSeries, Poly
from .errors import InconsistentVerdict, NotApplicable
from .groebner import PresentedRing, is_regular_sequence
from .invariants import (FiniteMatrixGroup, _coeff_rows, homogeneous_monomials, invariant_generators,
                         is_pseudoreflection_group)
from .lie import GroupPair


def weight_names(G, stem="u"):
    return [stem] if G.rank == 1 else [f"{stem}{i + 1}" for i in range(G.rank)]


def weyl_matrix_group(G):
    return FiniteMatrixGroup(G.weyl_elements, G.rank, f"W({G.label})")


# ---------------------------------------------------------------------------
# H*(BG)

@dataclass
class BorelCohomology:
    group: object
    ring: PresentedRing          # generators of degree 2*d_i
    invariants: list             # generator -> W-invariant polynomial on the weight space
    poly_degrees: list           # d_i
    weight_names: list

    @property
    def degrees(self):
        return [2 * d for d in self.poly_degrees]

    @property
    def primitive_degrees(self):
        """Degrees 2*d_i - 1 of the primitive generators of H*(G; Q) (transgression partners)."""
        return [2 * d - 1 for d in self.poly_degrees]

    @property
    def is_torus(self):
        return self.group.semisimple_rank == 0

    def express(self, f):
        """Write a W-invariant polynomial on the weight space in the generators, or None."""
        return express_in_generators(f, self.invariants, self.poly_degrees, self.ring.nvars)

    def to_json(self):
        return {
            "group": self.group.label,
            "generators": {n: {"degree": d, "invariant": f.format(self.weight_names)}
                           for n, d, f in zip(self.ring.names, self.degrees, self.invariants)},
            "degrees": self.degrees,
            "primitive_degrees": self.primitive_degrees,
        }


@lru_cache(maxsize=128)
def borel_cohomology(G):
    names_w = weight_names(G)
    n = G.rank
    if G.semisimple_rank == 0:
        invs = [Poly.var(i, n) for i in range(n)]
        degs = [1] * n
        names = names_w
    else:
        W = weyl_matrix_group(G)
        inv = invariant_generators(W)
        if not inv.complete or len(inv.generators) != n:
            raise NotApplicable(f"Weyl invariants of {G.label} are not polynomial (should not happen)")
        invs = [_normalise(f) for f in inv.generators]
        degs = list(inv.degrees)
        names = ["p"] if n == 1 else [f"p{i + 1}" for i in range(n)]
    ring = PresentedRing(names, (), [2 * d for d in degs])
    return BorelCohomology(G, ring, invs, degs, names_w)


def _normalise(f):
    # integral primitive, positive leading coefficient, for stable output
    return f.primitive()


def express_in_generators(f, gens, gdegs, nvars_out):
    """f (homogeneous pieces allowed) as a polynomial in homogeneous ``gens``; None if outside."""
    if f.is_zero():
        return Poly.zero(nvars_out)
    n = f.nvars
    out = Poly.zero(nvars_out)
    for d in sorted({sum(e) for e in f.terms}):
        part = Poly({e: c for e, c in f.terms.items() if sum(e) == d}, n)
        exps = homogeneous_monomials(len(gens), d, gdegs) if d > 0 else [tuple([0] * len(gens))]
        prods = []
        for e in exps:
            p = Poly.one(n)
            for g, k in zip(gens, e):
                if k:
                    p = p * g ** k
            prods.append(p)
        if not prods:
            return None
        monos = sorted({m for p in prods + [part] for m in p.terms})
        A = la.transpose(_coeff_rows(prods, monos))
        x = la.solve(A, _coeff_rows([part], monos)[0])
        if x is None:
            return None
        for e, c in zip(exps, x):
            if c:
                out = out + Poly.monomial(e, c, nvars_out)
    return out


# ---------------------------------------------------------------------------
# restriction H*(BG) -> H*(BK)

@dataclass
class CohomologyRestriction:
    pair: GroupPair
    source: BorelCohomology
    target: BorelCohomology
    on_weights: list      # restricted invariant of each G generator, polynomial on K's weight space
    images: list          # the same, written in K's generators

    def to_json(self):
        return {n: self.target.ring.format(f) for n, f in zip(self.source.ring.names, self.images)}


def restrict_weight_poly(pair, f):
    H = pair.subgroup
    R = pair.restriction
    ys = [Poly({tuple(int(k == i) for k in range(H.rank)): R[i][j] for i in range(H.rank) if R[i][j]}, H.rank)
          for j in range(pair.ambient.rank)]
    return f.substitute(ys, H.rank)


def restriction_cohomology(pair):
    BG = borel_cohomology(pair.ambient)
    BK = borel_cohomology(pair.subgroup)
    on_w, images = [], []
    for name, f, d in zip(BG.ring.names, BG.invariants, BG.poly_degrees):
        r = restrict_weight_poly(pair, f)
        if not r.is_zero() and not r.is_homogeneous():
            raise NotApplicable(f"restriction of {name} is inhomogeneous (embedding error)")
        img = BK.express(r)
        if img is None:
            raise NotApplicable(f"restriction of {name} is not W_K-invariant (embedding error)")
        on_w.append(r)
        images.append(img)
    return CohomologyRestriction(pair, BG, BK, on_w, images)


# ---------------------------------------------------------------------------
# the normalizer model

@dataclass
class NormalizerData:
    stabilizer: FiniteMatrixGroup        # W_G-stabilizer of s, restricted to s* (models N_G(S))
    normalizing: FiniteMatrixGroup       # elements also normalizing W_K (models the preimage of N_G(K))
    weyl_subgroup: FiniteMatrixGroup     # W_K on s*
    source: str                          # "weyl-stabilizer" or "override"

    @property
    def order(self):
        """|N| = |normalizing| / |W_K|."""
        return self.normalizing.order // self.weyl_subgroup.order

    def to_json(self):
        return {"order": self.order, "source": self.source,
                "stabilizer_order": self.stabilizer.order,
                "normalizing_order": self.normalizing.order,
                "subgroup_weyl_order": self.weyl_subgroup.order}


def _right_inverse(R):
    Rt = la.transpose(R)
    return la.matmul(Rt, la.inverse(la.matmul(R, Rt)))


def normalizer_action(pair):
    """N acting on the dual of the Lie algebra of S (a maximal torus of K)."""
    G, H = pair.ambient, pair.subgroup
    WK = FiniteMatrixGroup(H.weyl_elements, H.rank, f"W({H.label})")
    if pair.normalizer_override is not None:
        gens = [list(map(list, m)) for m in pair.normalizer_override]
        grp = FiniteMatrixGroup.generated_by(gens + [list(map(list, w)) for w in H.weyl_generators], H.rank)
        return NormalizerData(grp, grp, WK, "override")
    R = [list(r) for r in pair.restriction]
    Rp = _right_inverse(R)
    kernel = la.nullspace(R, G.rank)
    mats = {}
    for w in G.weyl_elements:
        if any(any(x for x in la.matvec(R, la.matvec(w, k))) for k in kernel):
            continue
        m = la.matmul(la.matmul(R, w), Rp)
        mats[la.as_tuple([[Fraction(x) for x in row] for row in m])] = None
    stab = FiniteMatrixGroup(list(mats), H.rank, "stabilizer")
    wk = set(WK.elements)
    keep = []
    for m in stab.elements:
        minv = la.inverse(m)
        if all(la.as_tuple([[Fraction(x) for x in r] for r in la.matmul(la.matmul(m, k), minv)]) in wk
               for k in WK.elements):
            keep.append(m)
    if not wk <= set(keep):
        raise NotApplicable("W_K is not contained in the stabilizer model; supply an override")
    norm = FiniteMatrixGroup(keep, H.rank, "normalizer")
    return NormalizerData(stab, norm, WK, "weyl-stabilizer")


# ---------------------------------------------------------------------------
# formality of G/K (complete intersection test)

@dataclass
class FormalityCheck:
    ci: bool
    regular_sequence: list        # names of G generators whose images form the sequence
    minimal_generator_count: int
    expected_length: int
    quotient: PresentedRing
    quotient_dimension: int | None
    certificate: dict = field(default_factory=dict)

    def to_json(self):
        return {"complete_intersection": self.ci, "regular_sequence": self.regular_sequence,
                "minimal_generators": self.minimal_generator_count, "expected_length": self.expected_length,
                "quotient_dimension": self.quotient_dimension, "quotient": self.quotient.to_json(),
                "certificate": {k: str(v) for k, v in self.certificate.items()}}


def formality_check(pair, restriction=None):
    """Is H_K // H_G a complete intersection?

    The image ideal has finite colength, so the quotient is a complete
    intersection exactly when the ideal needs rk K minimal generators; a
    minimal generating set is picked from the images in degree order and, when
    it has the right length, certified regular by its Hilbert series.
    """
    res = restriction or restriction_cohomology(pair)
    BK = res.target
    ring = BK.ring
    order = sorted(range(len(res.images)), key=lambda j: (res.source.degrees[j], j))
    kept = []
    for j in order:
        f = res.images[j]
        if f.is_zero() or f.is_constant():
            continue
        cur = ring.quotient([res.images[i] for i in kept]) if kept else ring
        if not cur.normal_form(f).is_zero():
            kept.append(j)
    q = ring.quotient([res.images[j] for j in kept]) if kept else ring
    dim = q.vector_dimension()
    expected = pair.subgroup.rank
    names = [res.source.ring.names[j] for j in kept]
    cert = {}
    ci = False
    if len(kept) == expected:
        ok, data = is_regular_sequence([res.images[j] for j in kept], ring) if kept else (True, {})
        if not ok:
            raise InconsistentVerdict("minimal generators of a finite-colength ideal are not regular")
        cert = {"predicted": data.get("predicted", ""), "actual": data.get("actual", "")}
        ci = True
    return FormalityCheck(ci, names if ci else [], len(kept), expected, q, dim, cert)


# ---------------------------------------------------------------------------
# surjectivity onto N-invariants

def _in_subalgebra(f, gens):
    gens = [g for g in gens if not g.is_zero()]
    degs = [g.degree() for g in gens]
    if any(d <= 0 for d in degs):
        gens, degs = [g for g, d in zip(gens, degs) if d > 0], [d for d in degs if d > 0]
    return express_in_generators(f, gens, degs, len(gens))


@dataclass
class SurjectionCheck:
    surjective: bool
    witnesses: dict
    failing: str | None
    invariant_degrees: list

    def to_json(self):
        return {"surjective": self.surjective, "witnesses": self.witnesses, "failing": self.failing,
                "invariant_degrees": self.invariant_degrees}


def _surjection_onto_invariants(res, group, names_w):
    inv = invariant_generators(group)
    wit = {}
    src_names = [n for n, f in zip(res.source.ring.names, res.on_weights) if not f.is_zero() and f.degree() > 0]
    for f in inv.generators:
        pre = _in_subalgebra(f, res.on_weights)
        text = f.format(names_w)
        if pre is None:
            return SurjectionCheck(False, wit, text, list(inv.degrees))
        wit[text] = pre.format(src_names)
    return SurjectionCheck(True, wit, None, list(inv.degrees))


def _action_on_indecomposables(BK, group):
    """Matrices of the induced action on Q H_K (one coordinate per generator of H*(BK))."""
    n = len(BK.invariants)
    mats = {}
    for g in group.elements:
        M = [[Fraction(0)] * n for _ in range(n)]
        for i, f in enumerate(BK.invariants):
            img = BK.express(group.act(g, f))
            if img is None:
                raise NotApplicable("group does not preserve H*(BK)")
            for j in range(n):
                e = tuple(int(k == j) for k in range(n))
                M[j][i] = img.terms.get(e, Fraction(0))
        mats[la.as_tuple(M)] = None
    return FiniteMatrixGroup(list(mats), n, "N on QH_K")


# ---------------------------------------------------------------------------
# the battery

@dataclass
class FormalityReport:
    pair: GroupPair
    conditions: dict              # "1".."4" -> {"verdict": bool|None, ...certificate}
    isotropy_formal: bool | None
    fpdim: dict
    ci: FormalityCheck
    normalizer: NormalizerData

    @property
    def status(self):
        return "decided" if self.isotropy_formal is not None else "undecided"

    def to_json(self):
        return {"pair": self.pair.label, "status": self.status, "isotropy_formal": self.isotropy_formal,
                "conditions": self.conditions, "fpdim": self.fpdim, "formality": self.ci.to_json(),
                "normalizer": self.normalizer.to_json()}


def st_battery(pair):
    G, K = pair.ambient, pair.subgroup
    res = restriction_cohomology(pair)
    ci = formality_check(pair, res)
    N = normalizer_action(pair)
    s = pair.rank_difference
    names_w = weight_names(K, "y")

    # (2): G/K formal and H_G -> H_K^N onto (N-invariants on H_K = invariants of the normalizing group)
    surj_K = _surjection_onto_invariants(res, N.normalizing, names_w)
    c2 = ci.ci and surj_K.surjective
    # (3): N acts on Q H_K as a reflection group, plus the same surjection
    QN = _action_on_indecomposables(res.target, N.normalizing)
    refl3 = is_pseudoreflection_group(QN)
    c3 = refl3.is_reflection_group and surj_K.surjective
    # (4): N_G(S) on s as a reflection group and H_G -> H_S^{N_G(S)} onto
    refl4 = is_pseudoreflection_group(N.stabilizer)
    surj_S = _surjection_onto_invariants(res, N.stabilizer, names_w) if K.semisimple_rank else surj_K
    c4 = refl4.is_reflection_group and surj_S.surjective
    # (1): dim H*(G/K) = |N| 2^s, with dim H*(G/K) read off the formal model
    order = N.order
    if ci.ci and ci.quotient_dimension is not None:
        dim_gk = ci.quotient_dimension * 2 ** s
        c1 = dim_gk == order * 2 ** s
        fp = {"dim_H_G_mod_K": dim_gk, "N_order": order, "rank_difference": s,
              "predicted": order * 2 ** s, "holds": c1}
    else:
        c1 = False
        fp = {"dim_H_G_mod_K": None, "N_order": order, "rank_difference": s, "predicted": order * 2 ** s,
              "holds": False, "reason": "G/K is not formal, so it is not isotropy-formal"}
    conditions = {
        "1": {"verdict": c1, "fpdim": fp},
        "2": {"verdict": c2, "formal": ci.ci, "surjection": surj_K.to_json()},
        "3": {"verdict": c3, "reflection_group": refl3.is_reflection_group,
              "reflection_count": len(refl3.reflections), "N_on_QH_K_order": QN.order,
              "surjection": surj_K.surjective},
        "4": {"verdict": c4, "reflection_group": refl4.is_reflection_group,
              "reflection_count": len(refl4.reflections), "stabilizer_order": N.stabilizer.order,
              "surjection": surj_S.to_json()},
    }
    verdicts = {c1, c2, c3, c4}
    if len(verdicts) != 1:
        raise InconsistentVerdict(f"battery disagrees on {pair.label}: "
                                  + ", ".join(f"({k})={v['verdict']}" for k, v in conditions.items()))
    return FormalityReport(pair, conditions, c1, fp, ci, N)


# ---------------------------------------------------------------------------
# H*_H(G/H) in the formal case

@dataclass
class EquivariantCohomology:
    pair: GroupPair
    ring: PresentedRing              # H_H (x)_{H_G} H_H, doubled generators
    exterior_degrees: list
    series: PoincareSeries

    @property
    def exterior_rank(self):
        return len(self.exterior_degrees)

    def fiber_dimension(self):
        """dim of the quotient by the left copy's positive-degree generators, times 2^s."""
        half = self.ring.nvars // 2
        q = self.ring.quotient([Poly.var(i, self.ring.nvars) for i in range(half)])
        d = q.vector_dimension()
        return None if d is None else d * 2 ** self.exterior_rank

    def to_json(self):
        return {"pair": self.pair.label, "presentation": self.ring.to_json(),
                "exterior_degrees": self.exterior_degrees, "exterior_rank": self.exterior_rank,
                "series": self.series.to_json(), "factored": self.series.factored(),
                "truncated": self.series.truncated(12)}


def _primed(name):
    return name + "'"


def equivariant_cohomology(pair, report=None):
    report = report or st_battery(pair)
    if not report.isotropy_formal:
        raise NotApplicable("the isotropy action is not equivariantly formal")
    res = restriction_cohomology(pair)
    BK = res.target
    n = BK.ring.nvars
    names = list(BK.ring.names) + [_primed(x) for x in BK.ring.names]
    rels = []
    for f in res.images:
        left = f.embed(2 * n, 0)
        right = f.embed(2 * n, n)
        r = left - right
        if not r.is_zero():
            rels.append(r)
    ring = PresentedRing(names, rels, list(BK.ring.degrees) * 2)
    used = {res.source.ring.names.index(x) for x in report.ci.regular_sequence}
    ext = [res.source.primitive_degrees[j] for j in range(len(res.images)) if j not in used]
    series = ring.hilbert_series()
    for d in ext:
        series = series * PoincareSeries.polynomial([1] + [0] * (d - 1) + [1])
    return EquivariantCohomology(pair, ring, ext, series)
