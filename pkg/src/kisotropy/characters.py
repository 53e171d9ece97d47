"""Characters, representation rings and restriction maps.

A character of G is a Weyl-invariant Laurent polynomial in the group's own
lattice coordinates.  Irreducible characters come from Freudenthal's
multiplicity recursion on dominant weights; the Weyl dimension formula is
kept as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import linalg as la
from .algebra import Poly, default_names
from .errors import DescriptorError, IllDefinedMap, NotApplicable
from .groebner import PresentedRing, ring_map_image
from .lie import CompactGroup, GroupPair, is_weyl_invariant, make_group


@dataclass(frozen=True, eq=False)
class Character:
    group: CompactGroup
    poly: Poly
    highest_weight: tuple | None = None

    @property
    def dimension(self):
        return self.poly.augmentation()

    def in_cover(self):
        """The same character written in the simply connected cover's coordinates."""
        return self.poly.map_exponents([list(r) for r in self.group.cover_basis], self.group.rank)

    def is_invariant(self):
        return is_weyl_invariant(self.group, self.poly)

    def __add__(self, other):
        return Character(self.group, self.poly + other.poly)

    def __mul__(self, other):
        return Character(self.group, self.poly * other.poly)

    def names(self):
        return lattice_names(self.group)

    def format(self):
        return self.poly.format(self.names())

    def to_json(self):
        out = {"variables": self.names(), "poly": self.format()}
        if self.highest_weight is not None:
            out["highest_weight"] = list(self.highest_weight)
        return out

    def __repr__(self):
        return f"Character({self.format()})"


def lattice_names(G):
    return ["t"] if G.rank == 1 else default_names(G.rank)


# ---------------------------------------------------------------------------
# Freudenthal

def _orbit_cover(G, mu):
    seen = {tuple(mu)}
    frontier = [tuple(mu)]
    gens = G.cover_weyl_generators
    while frontier:
        new = []
        for v in frontier:
            for S in gens:
                w = tuple(la.matvec(S, list(v)))
                if w not in seen:
                    seen.add(w)
                    new.append(w)
        frontier = new
    return seen


def dominant_multiplicities(G, highest_cover):
    """{dominant weight: multiplicity} for the irreducible with the given highest weight (cover coords)."""
    lam = tuple(highest_cover)
    pos = [tuple(a) for a in G.positive_roots_cover]
    dom = {lam}
    frontier = [lam]
    while frontier:
        new = []
        for v in frontier:
            for a in pos:
                w = tuple(x - y for x, y in zip(v, a))
                if w not in dom and G.is_dominant_cover(w):
                    dom.add(w)
                    new.append(w)
        frontier = new
    rho = G.rho_cover

    def norm_shift(v):
        u = [x + r for x, r in zip(v, rho)]
        return G.inner(u, u)

    top = norm_shift(lam)
    order = sorted(dom, key=lambda v: -G.inner(list(v), rho))
    mult = {lam: 1}

    def m(v):
        d = tuple(G.dominant_representative_cover(v))
        return mult.get(d, 0) if d in dom else 0

    for mu in order:
        if mu == lam:
            continue
        total = Fraction(0)
        for a in pos:
            k = 1
            while True:
                v = [x + k * y for x, y in zip(mu, a)]
                d = tuple(G.dominant_representative_cover(v))
                if d not in dom:
                    break
                total += mult.get(d, 0) * G.inner(v, list(a))
                k += 1
        denom = top - norm_shift(mu)
        val = 2 * total / denom
        if val.denominator != 1:
            raise ArithmeticError(f"non-integral multiplicity at {mu}")
        if val:
            mult[mu] = int(val)
    return mult


def irreducible_character(G, highest_weight, cover=False):
    """Irreducible character with the given highest weight.

    The weight is in G's own lattice coordinates, or in the simply connected
    cover's coordinates when ``cover`` is true (so SO(3)'s adjoint is weight 2).
    """
    hw = [int(x) for x in highest_weight]
    if len(hw) != G.rank:
        raise DescriptorError(f"weight {hw} does not have rank {G.rank}")
    if cover:
        if not G.in_lattice(hw):
            raise DescriptorError(f"weight {hw} is not in the lattice of {G.label}")
        hw = G.from_cover(hw)
    cover = G.to_cover(hw)
    if not G.is_dominant_cover(cover):
        raise DescriptorError(f"weight {hw} is not dominant")
    return Character(G, _character_poly(G, tuple(hw)), tuple(hw))


@lru_cache(maxsize=4096)
def _character_poly_cached(G, hw):
    cover = G.to_cover(list(hw))
    terms = {}
    for mu, k in dominant_multiplicities(G, cover).items():
        for v in _orbit_cover(G, mu):
            terms[tuple(G.from_cover(list(v)))] = k
    return Poly(terms, G.rank)


def _character_poly(G, hw):
    return _character_poly_cached(G, hw)


def weyl_dimension(G, highest_weight):
    return G.weyl_dimension(G.to_cover(list(highest_weight)))


def orbit_character(G, weight):
    """Orbit sum of e^weight (own coordinates) as a Character."""
    terms = {tuple(G.from_cover(list(v))): 1 for v in _orbit_cover(G, G.to_cover(list(weight)))}
    return Character(G, Poly(terms, G.rank))


# ---------------------------------------------------------------------------
# the cover's free ring and peeling

@lru_cache(maxsize=256)
def cover_group(G):
    if G.index == 1:
        return G
    return make_group(G.label + "~", G.factors)


@dataclass
class CoverRing:
    """Q[c_i (semisimple fundamentals), s_j^{+-1} (torus coordinates)] of the simply connected cover."""

    group: CompactGroup
    ring: PresentedRing
    fundamentals: dict       # cover coordinate -> Character of the cover
    slot: dict               # cover coordinate -> ring variable index


@lru_cache(maxsize=256)
def cover_ring(G):
    C = cover_group(G)
    names, slot, inv = [], {}, []
    for k, i in enumerate(C.semisimple_coords):
        slot[i] = len(names)
        names.append(f"c{k + 1}")
    tor = C.torus_coords
    for k, i in enumerate(tor):
        slot[i] = len(names)
        names.append("s" if len(tor) == 1 else f"s{k + 1}")
    for i in tor:
        inv.append((slot[i], len(names)))
        names.append(names[slot[i]] + "_inv")
    ring = PresentedRing(names, (), None, inv)
    fund = {}
    for i in C.semisimple_coords:
        w = [0] * C.rank
        w[i] = 1
        fund[i] = irreducible_character(C, w)
    return CoverRing(C, ring, fund, slot)


def express_in_cover(G, poly):
    """Write a W-invariant Laurent polynomial on G's lattice in the cover's fundamental characters."""
    CR = cover_ring(G)
    C = CR.group
    L = [list(r) for r in G.cover_basis]
    f = poly.map_exponents(L, C.rank) if G.index != 1 else poly
    n = CR.ring.nvars
    out = Poly.zero(n)
    rho = C.rho_cover
    guard = 0
    while not f.is_zero():
        guard += 1
        if guard > 10**5:
            raise ArithmeticError("peeling did not terminate")
        mu = max(f.terms, key=lambda e: (C.inner(list(e), rho), e))
        c = f.terms[mu]
        if not C.is_dominant_cover(mu):
            raise NotApplicable("polynomial is not Weyl-invariant")
        term = Poly.const(c, C.rank)
        mono = Poly.const(c, n)
        for i in C.semisimple_coords:
            if mu[i]:
                term = term * CR.fundamentals[i].poly ** mu[i]
                mono = mono * Poly.var(CR.slot[i], n) ** mu[i]
        tor = [0] * C.rank
        for i in C.torus_coords:
            tor[i] = mu[i]
            if mu[i]:
                mono = mono * Poly.var(CR.slot[i], n) ** mu[i]
        if any(tor):
            term = term * Poly.monomial(tor, 1, C.rank)
        f = f - term
        out = out + mono
    return CR.ring.encode(out)


# ---------------------------------------------------------------------------
# representation rings

@dataclass
class RepRingPresentation:
    group: CompactGroup
    ring: PresentedRing
    characters: list          # one Character per ring variable
    free: bool
    certificate: dict = field(default_factory=dict)

    @property
    def names(self):
        return list(self.ring.names)

    def images_in_cover(self):
        return [express_in_cover(self.group, ch.poly) for ch in self.characters]

    def evaluate(self, p):
        """The Laurent polynomial on the lattice represented by p (a ring element)."""
        chars = [ch.poly for ch in self.characters]
        return p.substitute(chars, self.group.rank)

    def express(self, poly):
        """Preimage of a W-invariant Laurent polynomial in the ring's generators."""
        if self.group.index == 1:
            return _relabel_cover(self, express_in_cover(self.group, poly))
        ok, pre = self._image().contains(express_in_cover(self.group, poly))
        if not ok:
            raise NotApplicable("element is not supported on the group's lattice")
        return self.ring.encode(pre)

    def _image(self):
        if not hasattr(self, "_image_cache"):
            CR = cover_ring(self.group)
            self._image_cache = ring_map_image(self.ring, CR.ring, self.images_in_cover(), check=False)
        return self._image_cache

    @property
    def augmentation_values(self):
        return [ch.dimension for ch in self.characters]

    def to_json(self):
        return {
            "group": self.group.label,
            "presentation": self.ring.to_json(),
            "generators": {n: ch.to_json() for n, ch in zip(self.names, self.characters)},
            "free": self.free,
            "certificate": self.certificate,
        }


def _relabel_cover(rep, p):
    # for simply connected groups the ring variables coincide with the cover ring's
    return Poly(p.terms, rep.ring.nvars)


_rep_cache = {}


def representation_ring(G):
    key = id(G)
    if key in _rep_cache and _rep_cache[key].group is G:
        return _rep_cache[key]
    rep = _build_rep_ring(G)
    _rep_cache[key] = rep
    return rep


def _build_rep_ring(G):
    if G.index == 1:
        CR = cover_ring(G)
        chars = []
        for name in CR.ring.names:
            i = CR.ring.names.index(name)
            chars.append(_cover_variable_character(G, CR, i))
        if G.semisimple_rank == 0:
            names = _torus_names(G.rank)
            ring = PresentedRing(names, (), None, [(i, i + G.rank) for i in range(G.rank)])
        else:
            ring = CR.ring
        return RepRingPresentation(G, ring, chars, True,
                                   {"generators": "fundamental characters", "lattice_index": 1})
    gens = G.dominant_generators
    units = set(G.unit_directions)
    order = [i for i in range(len(gens)) if i not in units]
    names = [f"c{k + 1}" for k in range(len(order))]
    pairs = []
    for i in sorted(units):
        j = next(j for j in units if gens[j] == [-x for x in gens[i]])
        if not any(j == a for a, _ in pairs):
            pairs.append((i, j))
    base = ["d"] if len(pairs) == 1 else [f"d{k + 1}" for k in range(len(pairs))]
    nonunit = len(names)
    names += base + [b + "_inv" for b in base]
    order += [i for i, _ in pairs] + [j for _, j in pairs]
    inv = [(nonunit + k, nonunit + len(pairs) + k) for k in range(len(pairs))]
    chars = [irreducible_character(G, gens[i]) for i in order]
    free_ring = PresentedRing(names, (), None, inv)
    CR = cover_ring(G)
    images = [express_in_cover(G, ch.poly) for ch in chars]
    im = ring_map_image(free_ring, CR.ring, images, check=False)
    kernel = [r for r in im.kernel if not free_ring.contains(r)]
    ring = free_ring.quotient(kernel)
    free = not kernel
    cert = {
        "generators": "irreducible characters of the Hilbert basis of the dominant sublattice monoid",
        "lattice_index": G.index,
        "search_box": G.index,
        "highest_weights": [list(gens[i]) for i in order],
    }
    rep = RepRingPresentation(G, ring, chars, free, cert)
    rep._image_cache = im
    return rep


def _torus_names(r):
    base = ["t"] if r == 1 else default_names(r)
    return base + [b + "_inv" for b in base]


def _cover_variable_character(G, CR, idx):
    C = CR.group
    for i, s in CR.slot.items():
        if s == idx:
            if i in C.semisimple_coords:
                w = [0] * C.rank
                w[i] = 1
                return irreducible_character(G, w)
            w = [0] * C.rank
            w[i] = 1
            return Character(G, Poly.monomial(w, 1, G.rank), tuple(w))
    # an inverse slot
    for a, b in CR.ring.inverse_pairs:
        if b == idx:
            ch = _cover_variable_character(G, CR, a)
            return Character(G, ch.poly ** -1, tuple(-x for x in ch.highest_weight))
    raise IndexError(idx)


# ---------------------------------------------------------------------------
# restriction

@dataclass
class RestrictionMap:
    pair: GroupPair
    source: RepRingPresentation
    target: RepRingPresentation
    images: list              # one Poly in target.ring per source variable

    def apply(self, p):
        return self.target.ring.encode(p.substitute(self.images, self.target.ring.nvars))

    def to_json(self):
        return {n: self.target.ring.format(f) for n, f in zip(self.source.names, self.images)}


def restriction_map(pair):
    RG = representation_ring(pair.ambient)
    RH = representation_ring(pair.subgroup)
    images = []
    for name, ch in zip(RG.names, RG.characters):
        res = pair.restrict_poly(ch.poly)
        if not is_weyl_invariant(pair.subgroup, res):
            raise IllDefinedMap(f"restriction of {name} is not invariant under W_H "
                                f"(bad embedding matrix)", name)
        images.append(RH.express(res))
    return RestrictionMap(pair, RG, RH, images)


@dataclass
class SurjectivityResult:
    surjective: bool
    preimages: dict           # RH generator name -> preimage text in RG generators
    failing: str | None = None
    inverted_primes: tuple = ()

    def to_json(self):
        return {"surjective": self.surjective, "preimages": self.preimages,
                "failing_generator": self.failing, "inverted_primes": list(self.inverted_primes)}


def _primes(n):
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            if p not in out:
                out.append(p)
            n //= p
        p += 1
    if n > 1 and n not in out:
        out.append(n)
    return out


def is_restriction_surjective(pair, budget=None):
    """Is RG -> RH onto (over Q)?  Preimages of each RH generator, or the first generator missed."""
    rm = restriction_map(pair)
    RG, RH = rm.source, rm.target
    im = ring_map_image(RG.ring, RH.ring, rm.images, budget=budget, check=True)
    pre = {}
    primes = set()
    for k, name in enumerate(RH.names):
        ok, p = im.contains(RH.ring.var(k))
        if not ok:
            return SurjectivityResult(False, pre, name)
        p = RG.ring.normal_form(Poly(p.terms, RG.ring.nvars))
        pre[name] = RG.ring.format(p)
        for c in p.terms.values():
            primes.update(_primes(Fraction(c).denominator))
    return SurjectivityResult(True, pre, None, tuple(sorted(primes)))
