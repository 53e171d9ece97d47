"""Root data for compact connected Lie groups and their subgroup pairs.

Conventions (fixed so results are bit-reproducible):

* A simply connected simple factor of type X_n has weight lattice Z^n in the
  basis of fundamental weights w_1..w_n, numbered as in Bourbaki (A_n:
  alpha_i = e_i - e_{i+1}; B_n: alpha_n = e_n short; C_n: alpha_n = 2e_n
  long; D_n: alpha_{n-1} = e_{n-1} - e_n, alpha_n = e_{n-1} + e_n).
* A torus factor T^k contributes k coordinates with trivial Weyl action.
* The *cover* of a group is the product of those factors.  A central
  quotient is recorded only by a Weyl-stable full-rank sublattice of the
  cover's weight lattice; the group's own coordinates are the coefficients
  with respect to a Hermite basis of that sublattice (the columns of
  ``cover_basis``).
* SO(3) is SU(2) with sublattice 2Z, so its coordinate t is the weight
  2*w_1, the standard character of SO(2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product as iproduct

from . import linalg as la
from .algebra import Poly
from .errors import BudgetExceeded, DescriptorError

DEFAULT_WEYL_BUDGET = 10**4


# ---------------------------------------------------------------------------
# Cartan data of simple factors

def _simple_roots_eps(kind, n):
    def e(i, dim):
        v = [0] * dim
        v[i] = 1
        return v

    if kind == "A":
        dim = n + 1
        return [[a - b for a, b in zip(e(i, dim), e(i + 1, dim))] for i in range(n)]
    dim = n
    roots = [[a - b for a, b in zip(e(i, dim), e(i + 1, dim))] for i in range(n - 1)]
    if kind == "B":
        roots.append(e(n - 1, dim))
    elif kind == "C":
        roots.append([2 * x for x in e(n - 1, dim)])
    elif kind == "D":
        if n < 2:
            raise DescriptorError("D_n needs n >= 2")
        roots.append([a + b for a, b in zip(e(n - 2, dim), e(n - 1, dim))])
    else:
        raise DescriptorError(f"unsupported Cartan type {kind}")
    return roots


def cartan_matrix(kind, n):
    """A[i][j] = <alpha_j, alpha_i^vee>."""
    roots = _simple_roots_eps(kind, n)

    def ip(a, b):
        return sum(x * y for x, y in zip(a, b))

    return [[Fraction(2 * ip(roots[i], roots[j]), ip(roots[i], roots[i])) for j in range(n)] for i in range(n)]


def _factor_data(kind, n):
    roots = _simple_roots_eps(kind, n)
    A = [[int(x) for x in row] for row in cartan_matrix(kind, n)]
    half_len = [Fraction(sum(x * x for x in r), 2) for r in roots]
    Ainv = la.inverse(A)
    gram = [[half_len[i] * Ainv[i][j] for j in range(n)] for i in range(n)]
    simple = [[A[i][j] for i in range(n)] for j in range(n)]  # alpha_j in w-coordinates
    return simple, gram


# ---------------------------------------------------------------------------
# the group record

@dataclass(frozen=True, eq=False)
class CompactGroup:
    label: str
    factors: tuple          # ("A", n) / ("B", n) / ("C", n) / ("D", n) / ("T", k)
    cover_basis: tuple      # square integer matrix, columns = own basis in cover coordinates
    weyl_budget: int = DEFAULT_WEYL_BUDGET

    # ---- cover-level data
    @cached_property
    def rank(self):
        return sum(n for _, n in self.factors)

    @cached_property
    def semisimple_rank(self):
        return sum(n for k, n in self.factors if k != "T")

    @cached_property
    def _cover(self):
        r = self.rank
        simple = []
        gram = [[Fraction(0)] * r for _ in range(r)]
        ss_coords, torus_coords = [], []
        off = 0
        for kind, n in self.factors:
            if kind == "T":
                for i in range(n):
                    gram[off + i][off + i] = Fraction(1)
                    torus_coords.append(off + i)
            else:
                s, g = _factor_data(kind, n)
                for j in range(n):
                    v = [0] * r
                    for i in range(n):
                        v[off + i] = s[j][i]
                    simple.append((off + j, v))
                for i in range(n):
                    for j in range(n):
                        gram[off + i][off + j] = g[i][j]
                    ss_coords.append(off + i)
            off += n
        return simple, gram, ss_coords, torus_coords

    @property
    def cover_simple_roots(self):
        """List of (coordinate index i, alpha_i in cover coordinates)."""
        return self._cover[0]

    @property
    def cover_gram(self):
        return self._cover[1]

    @property
    def semisimple_coords(self):
        return self._cover[2]

    @property
    def torus_coords(self):
        return self._cover[3]

    @cached_property
    def cover_basis_inverse(self):
        return la.inverse(self.cover_basis)

    def to_cover(self, v):
        return [int(x) for x in la.matvec(self.cover_basis, v)]

    def from_cover(self, v):
        out = la.matvec(self.cover_basis_inverse, v)
        if any(Fraction(x).denominator != 1 for x in out):
            raise DescriptorError(f"weight {v} is not in the lattice of {self.label}")
        return [int(x) for x in out]

    def in_lattice(self, cover_vec):
        return all(Fraction(x).denominator == 1 for x in la.matvec(self.cover_basis_inverse, cover_vec))

    # ---- own-coordinate data
    @cached_property
    def simple_roots(self):
        return [self.from_cover(v) for _, v in self.cover_simple_roots]

    @cached_property
    def cover_weyl_generators(self):
        r = self.rank
        gens = []
        for i, alpha in self.cover_simple_roots:
            S = la.identity(r)
            for a in range(r):
                S[a][i] -= alpha[a]
            gens.append(S)
        return gens

    @cached_property
    def weyl_generators(self):
        L, Li = self.cover_basis, self.cover_basis_inverse
        out = []
        for S in self.cover_weyl_generators:
            M = la.matmul(la.matmul(Li, S), L)
            out.append(la.int_matrix(M))
        return out

    @cached_property
    def gram(self):
        L = self.cover_basis
        return la.matmul(la.matmul(la.transpose(L), self.cover_gram), L)

    @cached_property
    def index(self):
        return abs(int(la.det(self.cover_basis)))

    def is_dominant_cover(self, v):
        return all(v[i] >= 0 for i in self.semisimple_coords)

    def is_dominant(self, v):
        return self.is_dominant_cover(self.to_cover(v))

    @cached_property
    def dominant_generators(self):
        """Hilbert basis of the dominant weights of the lattice (own coordinates).

        Certificate: every irreducible element lies in the box whose semisimple
        coordinates are in [0, index] and torus coordinates in [-index, index].
        """
        return [self.from_cover(v) for v in self._hilbert_basis_cover()]

    def _hilbert_basis_cover(self):
        d = self.index
        ss, tor = self.semisimple_coords, self.torus_coords
        r = self.rank

        def unit(i):
            v = [0] * r
            v[i] = 1
            return v

        if d == 1:
            out = []
            for i in range(r):
                out.append(unit(i))
                if i in tor:
                    out.append([-x for x in unit(i)])
            return out
        ranges = [range(0, d + 1) if i in ss else range(-d, d + 1) for i in range(r)]
        cands = [list(v) for v in iproduct(*ranges) if any(v) and self.in_lattice(list(v))]
        # units: lattice vectors supported on the torus coordinates
        units = [v for v in cands if not any(v[i] for i in ss)]
        out = []
        if tor:
            ub = la.column_hnf(units, r) if units else []
            for j in range(len(ub[0]) if ub else 0):
                u = [ub[i][j] for i in range(r)]
                out.extend([u, [-x for x in u]])
        # the pointed part, by increasing semisimple degree: v is redundant when
        # v - b is dominant and in the lattice for an earlier generator b
        rest = [v for v in cands if any(v[i] for i in ss)]
        rest.sort(key=lambda v: (sum(v[i] for i in ss), sum(abs(x) for x in v), v))
        chosen = []
        for v in rest:
            if any(self.in_lattice([a - b for a, b in zip(v, g)])
                   and all(v[i] >= g[i] for i in ss) for g in chosen):
                continue
            chosen.append(v)
        return out + chosen

    @cached_property
    def unit_directions(self):
        """Indices of dominant generators that are units (their negatives are also generators)."""
        gens = [tuple(g) for g in self.dominant_generators]
        s = set(gens)
        return [i for i, g in enumerate(gens) if tuple(-x for x in g) in s]

    # ---- Weyl group
    @cached_property
    def weyl_elements(self):
        return weyl_elements(self)

    @property
    def weyl_order(self):
        return len(self.weyl_elements)

    @cached_property
    def positive_roots_cover(self):
        """Positive roots in cover coordinates (orbit of simple roots, positive in root coordinates)."""
        simple = [v for _, v in self.cover_simple_roots]
        if not simple:
            return []
        roots = {tuple(v) for v in simple}
        frontier = list(roots)
        gens = self.cover_weyl_generators
        while frontier:
            new = []
            for v in frontier:
                for S in gens:
                    w = tuple(la.matvec(S, list(v)))
                    if w not in roots:
                        roots.add(w)
                        new.append(w)
            frontier = new
        # positivity: coefficients in simple-root basis
        idx = [i for i, _ in self.cover_simple_roots]
        M = [[v[a] for v in simple] for a in idx]  # restricted to semisimple coords
        Minv = la.inverse(M)
        pos = []
        for r in roots:
            c = la.matvec(Minv, [r[a] for a in idx])
            if all(x >= 0 for x in c):
                pos.append(list(r))
        pos.sort()
        return pos

    @cached_property
    def positive_roots(self):
        return [self.from_cover(v) for v in self.positive_roots_cover]

    def inner(self, u, v, cover=True):
        G = self.cover_gram if cover else self.gram
        return sum(u[i] * G[i][j] * v[j] for i in range(len(u)) for j in range(len(v)))

    @cached_property
    def rho_cover(self):
        v = [0] * self.rank
        for i in self.semisimple_coords:
            v[i] = 1
        return v

    def coroot_pairing(self, weight_cover, root_cover):
        return 2 * self.inner(weight_cover, root_cover) / self.inner(root_cover, root_cover)

    def weyl_dimension(self, highest_cover):
        """prod <lambda + rho, a^vee> / <rho, a^vee> over positive roots."""
        lr = [a + b for a, b in zip(highest_cover, self.rho_cover)]
        out = Fraction(1)
        for a in self.positive_roots_cover:
            out *= self.coroot_pairing(lr, a) / self.coroot_pairing(self.rho_cover, a)
        return out

    def dominant_representative_cover(self, v):
        v = list(v)
        simple = dict(self.cover_simple_roots)
        changed = True
        while changed:
            changed = False
            for i, alpha in simple.items():
                if v[i] < 0:
                    k = v[i]
                    v = [x - k * a for x, a in zip(v, alpha)]
                    changed = True
        return v

    # ---- pi_1
    def pi1(self):
        """(free_abelian, torsion invariants, free rank) of pi_1 = cocharacters / coroots."""
        L = self.cover_basis
        cols = [[L[i][k] for k in range(self.rank)] for i in self.semisimple_coords]
        if cols:
            M = [[c[k] for c in cols] for k in range(self.rank)]
            torsion, free = la.cokernel_torsion(M, self.rank)
        else:
            torsion, free = [], self.rank
        return not torsion, torsion, free

    def describe(self):
        return {
            "label": self.label,
            "rank": self.rank,
            "factors": [f"{k}{n}" for k, n in self.factors],
            "cover_basis": [list(r) for r in self.cover_basis],
            "weyl_order": self.weyl_order,
        }

    def __repr__(self):
        return f"CompactGroup({self.label})"


def weyl_elements(G, budget=None):
    """All Weyl group elements as integer matrices on the group's own lattice; identity first."""
    budget = budget or G.weyl_budget
    r = G.rank
    ident = la.as_tuple(la.identity(r))
    seen = {ident: None}
    order = [ident]
    frontier = [ident]
    gens = [la.as_tuple(S) for S in G.weyl_generators]
    while frontier:
        new = []
        for w in frontier:
            for s in gens:
                x = la.as_tuple(la.matmul(s, w))
                if x not in seen:
                    seen[x] = None
                    order.append(x)
                    new.append(x)
                    if len(order) > budget:
                        raise BudgetExceeded(f"Weyl group of {G.label} exceeds budget {budget}",
                                             {"enumerated": len(order)})
        frontier = new
    return [[list(row) for row in w] for w in order]


# ---------------------------------------------------------------------------
# constructors

def _lattice_from_generators(gens, r):
    basis = la.column_hnf(gens, r)
    if not basis or len(basis[0]) != r:
        raise DescriptorError("sublattice does not have full rank (infinite index)")
    return basis


def _check_weyl_stable(G):
    for S in G.cover_weyl_generators:
        M = la.matmul(la.matmul(G.cover_basis_inverse, S), G.cover_basis)
        if not la.is_integral(M):
            raise DescriptorError(f"sublattice of {G.label} is not Weyl-stable")


def make_group(label, factors, sublattice_generators=None, weyl_budget=DEFAULT_WEYL_BUDGET):
    factors = tuple((k, int(n)) for k, n in factors)
    r = sum(n for _, n in factors)
    if sublattice_generators is None:
        L = la.identity(r)
    else:
        gens = [list(map(int, g)) for g in sublattice_generators]
        if any(len(g) != r for g in gens):
            raise DescriptorError("sublattice generators must have the cover's rank")
        L = _lattice_from_generators(gens, r)
    G = CompactGroup(label, factors, la.as_tuple(L), weyl_budget)
    _check_weyl_stable(G)
    return G


_NAME = re.compile(r"^\s*([A-Za-z]+)\s*(?:\(\s*(\d+)\s*\)|\^?(\d+))?\s*$")


def _unit(r, i):
    v = [0] * r
    v[i] = 1
    return v


def group_from_name(name, weyl_budget=DEFAULT_WEYL_BUDGET):
    m = _NAME.match(name)
    if not m:
        raise DescriptorError(f"cannot parse group name {name!r}")
    kind = m.group(1)
    n = m.group(2) or m.group(3)
    n = int(n) if n else None
    label = name.strip()
    K = kind.upper()
    if K == "T":
        return make_group(label, [("T", n or 1)], weyl_budget=weyl_budget)
    if K in ("G", "F", "E"):
        raise DescriptorError(f"exceptional type {name} is not supported in this version")
    if n is None:
        raise DescriptorError(f"{name!r} needs a size")
    if K == "SU":
        if n < 2:
            raise DescriptorError("SU(n) needs n >= 2")
        return make_group(label, [("A", n - 1)], weyl_budget=weyl_budget)
    if K == "SP":
        return make_group(label, [("C", n)], weyl_budget=weyl_budget)
    if K == "SPIN":
        if n < 3 or n == 4:
            raise DescriptorError("Spin(n) supported for n = 3 and n >= 5")
        if n == 3:
            return make_group(label, [("A", 1)], weyl_budget=weyl_budget)
        return make_group(label, [("B", n // 2)] if n % 2 else [("D", n // 2)], weyl_budget=weyl_budget)
    if K == "SO":
        if n == 2:
            return make_group(label, [("T", 1)], weyl_budget=weyl_budget)
        if n == 3:
            return make_group(label, [("A", 1)], [[2]], weyl_budget=weyl_budget)
        if n == 4:
            raise DescriptorError("SO(4) is not a simple classical descriptor; use a product quotient")
        m_ = n // 2
        if n % 2:
            gens = [_unit(m_, i) for i in range(m_ - 1)] + [[2 * x for x in _unit(m_, m_ - 1)]]
            return make_group(label, [("B", m_)], gens, weyl_budget)
        gens = [_unit(m_, i) for i in range(m_ - 2)]
        gens.append([a + b for a, b in zip(_unit(m_, m_ - 2), _unit(m_, m_ - 1))])
        gens.append([2 * x for x in _unit(m_, m_ - 1)])
        return make_group(label, [("D", m_)], gens, weyl_budget)
    if K == "PSU":
        A = cartan_matrix("A", n - 1)
        gens = [[int(A[i][j]) for i in range(n - 1)] for j in range(n - 1)]
        return make_group(label, [("A", n - 1)], gens, weyl_budget)
    if K == "U":
        if n == 1:
            return make_group(label, [("T", 1)], weyl_budget=weyl_budget)
        r = n
        A = cartan_matrix("A", n - 1)
        gens = [[int(A[i][j]) for i in range(n - 1)] + [0] for j in range(n - 1)]
        gens.append(_unit(r, 0)[:-1] + [1])
        gens.append([0] * (n - 1) + [n])
        return make_group(label, [("A", n - 1), ("T", 1)], gens, weyl_budget)
    raise DescriptorError(f"unknown group family {kind!r}")


def product_group(groups, sublattice_generators=None, label=None):
    """Product of groups; optional sublattice in the product's cover coordinates."""
    factors = []
    for g in groups:
        factors.extend(g.factors)
    r = sum(n for _, n in factors)
    L = [[0] * r for _ in range(r)]
    off = 0
    for g in groups:
        for i in range(g.rank):
            for j in range(g.rank):
                L[off + i][off + j] = g.cover_basis[i][j]
        off += g.rank
    gens = [[L[i][j] for i in range(r)] for j in range(r)]
    if sublattice_generators is not None:
        gens = [list(map(int, g)) for g in sublattice_generators]
    label = label or " x ".join(g.label for g in groups)
    return make_group(label, factors, gens)


def build_group(spec, weyl_budget=DEFAULT_WEYL_BUDGET):
    """Group from a descriptor: a name string or a dict with 'name' or 'factors' (+ 'sublattice')."""
    if isinstance(spec, CompactGroup):
        return spec
    if isinstance(spec, str):
        return group_from_name(spec, weyl_budget)
    if not isinstance(spec, dict):
        raise DescriptorError(f"malformed group descriptor {spec!r}")
    if "name" in spec and "factors" not in spec:
        G = group_from_name(spec["name"], weyl_budget)
        if "sublattice" in spec:
            G = make_group(spec.get("label", G.label), G.factors,
                           _compose_sublattice(G, spec["sublattice"]), weyl_budget)
        return G
    if "factors" in spec:
        parts = [build_group(f, weyl_budget) for f in spec["factors"]]
        return product_group(parts, spec.get("sublattice"), spec.get("label"))
    raise DescriptorError(f"malformed group descriptor {spec!r}")


def _compose_sublattice(G, gens):
    """Generators given in G's own coordinates, converted to G's cover coordinates."""
    return [G.to_cover(list(g)) for g in gens]


# ---------------------------------------------------------------------------
# orbit sums (invariants without the representation-theory module)

def orbit_sum(G, weight):
    """Sum of e^{w(weight)} over the distinct Weyl images, as a Laurent Poly in own coordinates."""
    seen = set()
    for w in G.weyl_elements:
        seen.add(tuple(la.matvec(w, weight)))
    return Poly({e: 1 for e in seen}, G.rank)


def act_on_poly(w, p):
    """Substitute e^mu -> e^{w mu} in a Laurent polynomial on the lattice."""
    return p.map_exponents(w)


def is_weyl_invariant(G, p):
    return all(act_on_poly(S, p) == p for S in G.weyl_generators)


# ---------------------------------------------------------------------------
# pairs

@dataclass(frozen=True, eq=False)
class GroupPair:
    ambient: CompactGroup
    subgroup: CompactGroup
    restriction: tuple          # rank(H) x rank(G) integer matrix, characters of T -> characters of S
    sigma_pair: bool = False
    label: str = ""
    normalizer_override: tuple | None = None   # optional generator matrices on Lie(S)^*
    inverted_primes: tuple = ()
    metadata: dict = field(default_factory=dict)

    @property
    def rank_difference(self):
        return self.ambient.rank - self.subgroup.rank

    def restrict_weight(self, v):
        return [sum(a * b for a, b in zip(row, v)) for row in self.restriction]

    def restrict_poly(self, p):
        return p.map_exponents([list(r) for r in self.restriction], self.subgroup.rank)

    @property
    def is_equal_rank(self):
        return self.rank_difference == 0

    def __repr__(self):
        return f"GroupPair({self.label or (self.ambient.label + ', ' + self.subgroup.label)})"


def make_pair(ambient, subgroup, restriction=None, sigma_pair=False, label="", coordinates="own", **kw):
    """Pair (G, H) with restriction matrix rows = H coordinates, columns = G coordinates.

    With ``coordinates="cover"`` both sides are read in the simply connected
    covers' coordinates and converted to the groups' own lattices.
    """
    G = build_group(ambient)
    H = build_group(subgroup)
    if restriction is None:
        if G.rank != H.rank:
            raise DescriptorError("restriction matrix required when ranks differ")
        restriction = la.identity(G.rank)
    if coordinates == "cover":
        M = la.matmul(la.matmul(H.cover_basis_inverse, [list(r) for r in restriction]), G.cover_basis)
        if not la.is_integral(M):
            raise DescriptorError("restriction does not map the ambient lattice into the subgroup lattice")
        restriction = la.int_matrix(M)
    elif coordinates != "own":
        raise DescriptorError(f"unknown coordinate convention {coordinates!r}")
    R = la.as_tuple([[int(x) for x in row] for row in restriction])
    if len(R) != H.rank or any(len(row) != G.rank for row in R):
        raise DescriptorError(f"restriction must be {H.rank} x {G.rank}")
    return GroupPair(G, H, R, bool(sigma_pair), label or f"({G.label}, {H.label})", **kw)


def validate_pair(pair):
    """Check the invariants of a GroupPair; returns a report dict (never raises)."""
    G, H = pair.ambient, pair.subgroup
    problems = []
    if H.rank > G.rank:
        problems.append(f"rank({H.label}) = {H.rank} exceeds rank({G.label}) = {G.rank}")
    R = [list(r) for r in pair.restriction]
    if not problems:
        divs = la.elementary_divisors(R)
        if len(divs) < H.rank or any(d != 1 for d in divs):
            problems.append("restriction is not surjective onto the subgroup's character lattice "
                            "(torus map is not an embedding)")
    failing = None
    if not problems:
        for i, g in enumerate(G.dominant_generators):
            res = pair.restrict_poly(orbit_sum(G, g))
            if not is_weyl_invariant(H, res):
                failing = {"generator": i, "weight": g}
                problems.append(f"restricted orbit sum of dominant generator {g} is not W_H-invariant")
                break
    return {
        "valid": not problems,
        "rank_difference": pair.rank_difference,
        "problems": problems,
        "failing_character": failing,
    }


PAIR_KEYS = {"ambient", "subgroup", "restriction", "flags", "coordinates", "label",
             "normalizer_override", "inverted_primes", "metadata"}


def pair_from_descriptor(doc, weyl_budget=DEFAULT_WEYL_BUDGET):
    """GroupPair from a JSON pair descriptor (already parsed)."""
    if not isinstance(doc, dict):
        raise DescriptorError("pair descriptor must be a JSON object")
    unknown = set(doc) - PAIR_KEYS
    if unknown:
        raise DescriptorError(f"unknown descriptor keys: {sorted(unknown)}")
    for key in ("ambient", "subgroup"):
        if key not in doc:
            raise DescriptorError(f"pair descriptor lacks {key!r}")
    flags = doc.get("flags", {})
    if not isinstance(flags, dict) or set(flags) - {"sigma_pair"}:
        raise DescriptorError("flags must be an object with at most 'sigma_pair'")
    R = doc.get("restriction")
    if R is not None and (not isinstance(R, list) or not all(isinstance(r, list) for r in R)
                          or not all(isinstance(x, int) for r in R for x in r)):
        raise DescriptorError("restriction must be a list of integer rows")
    override = doc.get("normalizer_override")
    if override is not None:
        override = tuple(la.as_tuple([[Fraction(x) for x in row] for row in m]) for m in override)
    G = build_group(doc["ambient"], weyl_budget)
    H = build_group(doc["subgroup"], weyl_budget)
    return make_pair(G, H, R, bool(flags.get("sigma_pair", False)), doc.get("label", ""),
                     doc.get("coordinates", "own"), normalizer_override=override,
                     inverted_primes=tuple(doc.get("inverted_primes", ())),
                     metadata=dict(doc.get("metadata", {})))
