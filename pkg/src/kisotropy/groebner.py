"""Buchberger's algorithm over Q and the ideal-theoretic operations built on it.

Laurent rings enter only through paired variables (t, t_inv) with the
relation t*t_inv - 1; :class:`PresentedRing` records those pairs so callers
can encode Laurent polynomials.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .algebra import Poly, PoincareSeries, one_minus_t_pow, parse_poly, upoly_mul
from .errors import BudgetExceeded, IllDefinedMap, NotApplicable, VariableMismatch

DEFAULT_PAIR_BUDGET = 10**6

_budget = DEFAULT_PAIR_BUDGET


def set_default_budget(n):
    global _budget
    _budget = DEFAULT_PAIR_BUDGET if n is None else int(n)


def default_budget():
    return _budget


# ---------------------------------------------------------------------------
# monomial orders

class MonomialOrder:
    """Graded reverse lex (optionally weighted), lex, or a two-block elimination order."""

    def __init__(self, kind, nvars, weights=None, block=0):
        if kind not in ("grevlex", "lex", "elim"):
            raise ValueError(f"unknown order {kind!r}")
        self.kind = kind
        self.nvars = nvars
        self.weights = tuple(weights) if weights else (1,) * nvars
        self.block = block
        self._cache = {}

    @classmethod
    def grevlex(cls, nvars, weights=None):
        return cls("grevlex", nvars, weights)

    @classmethod
    def lex(cls, nvars):
        return cls("lex", nvars)

    @classmethod
    def elimination(cls, nvars, block, weights=None):
        """Every monomial involving one of the first ``block`` variables beats all others."""
        return cls("elim", nvars, weights, block)

    def key(self, e):
        k = self._cache.get(e)
        if k is None:
            k = self._cache[e] = self._key(e)
        return k

    def _key(self, e):
        w = self.weights
        if self.kind == "lex":
            return e
        if self.kind == "grevlex":
            return (sum(a * b for a, b in zip(w, e)), tuple(-x for x in reversed(e)))
        k = self.block
        head, tail = e[:k], e[k:]
        return (sum(a * b for a, b in zip(w[:k], head)), tuple(-x for x in reversed(head)),
                sum(a * b for a, b in zip(w[k:], tail)), tuple(-x for x in reversed(tail)))

    def describe(self):
        return f"{self.kind}(n={self.nvars},w={list(self.weights)},block={self.block})"

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.describe() == other.describe()

    def __hash__(self):
        return hash(self.describe())

    def __repr__(self):
        return self.describe()


# ---------------------------------------------------------------------------
# core Buchberger on dict polynomials

def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _disjoint(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _wdeg(e, w):
    return sum(a * b for a, b in zip(w, e))


class _Reducer:
    def __init__(self, order):
        self.order = order
        self.key = order.key

    def lead(self, f):
        return max(f, key=self.key)

    def reduce(self, f, basis, lms, full=True):
        """Normal form of dict ``f`` by monic dict polynomials ``basis`` with leading monomials ``lms``."""
        key = self.key
        f = dict(f)
        rem = {}
        while f:
            m = max(f, key=key)
            c = f[m]
            for g, lm in zip(basis, lms):
                if _divides(lm, m):
                    shift = tuple(a - b for a, b in zip(m, lm))
                    for e, gc in g.items():
                        t = tuple(a + b for a, b in zip(e, shift))
                        v = f.get(t, 0) - c * gc
                        if v:
                            f[t] = v
                        else:
                            f.pop(t, None)
                    break
            else:
                if not full:
                    rem.update(f)
                    return rem
                rem[m] = c
                del f[m]
        return rem


def _monic(f, lm):
    c = f[lm]
    if c == 1:
        return f
    inv = 1 / c
    return {e: v * inv for e, v in f.items()}


def _buchberger(polys, order, budget):
    red = _Reducer(order)
    key = order.key
    w = order.weights
    G, LM, SUG = [], [], []
    active = []
    pairs = []  # heap of (sugar, lcm key, counter, i, j)
    counter = itertools.count()

    def pair_entry(i, j):
        l = _lcm(LM[i], LM[j])
        s = max(SUG[i] + _wdeg(l, w) - _wdeg(LM[i], w), SUG[j] + _wdeg(l, w) - _wdeg(LM[j], w))
        return (s, key(l), next(counter), i, j)

    def add(h, sugar):
        nonlocal pairs
        lm = red.lead(h)
        h = _monic(h, lm)
        k = len(G)
        G.append(h)
        LM.append(lm)
        SUG.append(sugar)
        # Gebauer-Moeller update
        C = [g for g in active]
        D = []
        lcms = {g: _lcm(lm, LM[g]) for g in C}
        for idx, g1 in enumerate(C):
            l1 = lcms[g1]
            if _disjoint(lm, LM[g1]):
                D.append(g1)
                continue
            dominated = False
            for g2 in C[idx + 1:]:
                if _divides(lcms[g2], l1):
                    dominated = True
                    break
            if not dominated:
                for g2 in D:
                    if _divides(lcms[g2], l1):
                        dominated = True
                        break
            if not dominated:
                D.append(g1)
        E = [g for g in D if not _disjoint(lm, LM[g])]
        kept = []
        for entry in pairs:
            _, _, _, i, j = entry
            lij = _lcm(LM[i], LM[j])
            if (not _divides(lm, lij)) or _lcm(LM[i], lm) == lij or _lcm(lm, LM[j]) == lij:
                kept.append(entry)
        for g in E:
            kept.append(pair_entry(g, k))
        heapq.heapify(kept)
        pairs = kept
        active[:] = [g for g in active if not _divides(lm, LM[g])] + [k]

    # sort inputs so small leading terms go first
    start = []
    for f in polys:
        if f:
            start.append(f)
    start.sort(key=lambda f: key(red.lead(f)))
    for f in start:
        r = red.reduce(f, [G[i] for i in active], [LM[i] for i in active])
        if r:
            add(r, max(_wdeg(e, w) for e in f))
            if all(x == 0 for x in LM[-1]):
                return [{(0,) * order.nvars: Fraction(1)}]

    done = 0
    while pairs:
        s, _, _, i, j = heapq.heappop(pairs)
        done += 1
        if done > budget:
            raise BudgetExceeded(
                f"Groebner pair budget {budget} exceeded",
                {"pairs_reduced": done - 1, "basis_size": len(active), "pending_pairs": len(pairs) + 1},
            )
        l = _lcm(LM[i], LM[j])
        si = tuple(a - b for a, b in zip(l, LM[i]))
        sj = tuple(a - b for a, b in zip(l, LM[j]))
        spoly = {}
        for e, c in G[i].items():
            t = tuple(a + b for a, b in zip(e, si))
            spoly[t] = c
        for e, c in G[j].items():
            t = tuple(a + b for a, b in zip(e, sj))
            v = spoly.get(t, 0) - c
            if v:
                spoly[t] = v
            else:
                spoly.pop(t, None)
        if not spoly:
            continue
        r = red.reduce(spoly, [G[k] for k in active], [LM[k] for k in active])
        if r:
            add(r, s)
            if all(x == 0 for x in LM[-1]):
                return [{(0,) * order.nvars: Fraction(1)}]

    # reduced basis
    basis = [G[k] for k in active]
    lms = [LM[k] for k in active]
    out = []
    for idx, g in enumerate(basis):
        others = [b for k, b in enumerate(basis) if k != idx]
        olms = [m for k, m in enumerate(lms) if k != idx]
        tail = dict(g)
        del tail[lms[idx]]
        r = red.reduce(tail, others, olms)
        r[lms[idx]] = Fraction(1)
        out.append(r)
    out.sort(key=lambda f: key(red.lead(f)))
    return out


# ---------------------------------------------------------------------------
# on-disk cache

def cache_dir():
    return os.environ.get("KISOTROPY_CACHE_DIR") or None


def _cache_key(gens, order):
    h = hashlib.sha256()
    h.update(order.describe().encode())
    for g in gens:
        h.update(b"|")
        h.update(repr(sorted((e, str(c)) for e, c in g.terms.items())).encode())
    return h.hexdigest()


def _cache_names(n):
    return [f"x{i}" for i in range(n)]


def _cache_load(gens, order):
    d = cache_dir()
    if not d:
        return None
    path = os.path.join(d, _cache_key(gens, order) + ".gb")
    if not os.path.exists(path):
        return None
    names = _cache_names(order.nvars)
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != order.describe():
        return None
    return [parse_poly(ln, names) if ln != "0" else Poly.zero(order.nvars) for ln in lines[1:]]


def _cache_store(gens, order, basis):
    d = cache_dir()
    if not d:
        return
    os.makedirs(d, exist_ok=True)
    names = _cache_names(order.nvars)
    path = os.path.join(d, _cache_key(gens, order) + ".gb")
    tmp = path + f".{os.getpid()}.tmp"
    with open(tmp, "w") as fh:
        fh.write(order.describe() + "\n")
        for g in basis:
            fh.write(g.format(names) + "\n")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# public ideal layer

@dataclass(frozen=True)
class IdealPresentation:
    names: tuple
    gens: tuple
    degrees: tuple | None = None
    order: MonomialOrder | None = None  # set iff gens is a reduced Groebner basis for it

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "gens", tuple(self.gens))
        if self.degrees is not None:
            object.__setattr__(self, "degrees", tuple(self.degrees))
        for g in self.gens:
            if g.nvars != len(self.names):
                raise VariableMismatch("generator lives in a different ring")
            if g.laurent:
                raise NotApplicable("Groebner bases need polynomial generators; encode inverses first")

    @property
    def nvars(self):
        return len(self.names)

    def is_unit(self):
        return any(g.is_constant() and not g.is_zero() for g in self.gens)

    def leading_monomials(self):
        if self.order is None:
            raise NotApplicable("not a Groebner basis")
        return [max(g.terms, key=self.order.key) for g in self.gens]


def groebner_basis(ideal, order=None, budget=None):
    """Reduced Groebner basis as a new IdealPresentation (idempotent on its output)."""
    n = ideal.nvars
    if order is None:
        order = MonomialOrder.grevlex(n, ideal.degrees)
    if order.nvars != n:
        raise VariableMismatch("order/ring size mismatch")
    if ideal.order == order:
        return ideal
    gens = [g for g in ideal.gens if not g.is_zero()]
    cached = _cache_load(gens, order)
    if cached is not None:
        return IdealPresentation(ideal.names, cached, ideal.degrees, order)
    raw = _buchberger([dict(g.terms) for g in gens], order, budget or _budget)
    basis = [Poly._raw(f, n) for f in raw]
    _cache_store(gens, order, basis)
    return IdealPresentation(ideal.names, basis, ideal.degrees, order)


def normal_form(p, basis):
    """Remainder of p on division by a Groebner basis; zero iff p lies in the ideal."""
    if basis.order is None:
        raise NotApplicable("normal_form needs a Groebner basis")
    if p.nvars != basis.nvars:
        raise VariableMismatch("polynomial and basis live in different rings")
    if p.laurent:
        raise NotApplicable("encode negative powers through inverse variables first")
    red = _Reducer(basis.order)
    gens = [g.terms for g in basis.gens]
    lms = basis.leading_monomials()
    return Poly._raw(red.reduce(p.terms, gens, lms), p.nvars)


# ---------------------------------------------------------------------------
# monomial ideal combinatorics

def _minimalize(monos):
    monos = sorted(set(monos), key=sum)
    out = []
    for m in monos:
        if not any(_divides(g, m) for g in out):
            out.append(m)
    return out


def _hilbert_numerator(monos, weights):
    """K-polynomial of S / (monos) as {degree: coeff}."""
    monos = _minimalize(monos)
    if not monos:
        return {0: 1}
    # pairwise coprime generators: product formula
    support = [frozenset(i for i, x in enumerate(m) if x) for m in monos]
    if all(not (a & b) for a, b in itertools.combinations(support, 2)):
        out = {0: 1}
        for m in monos:
            d = _wdeg(m, weights)
            new = {}
            for k, v in out.items():
                new[k] = new.get(k, 0) + v
                new[k + d] = new.get(k + d, 0) - v
            out = {k: v for k, v in new.items() if v}
        return out
    # pivot on the variable appearing in most non-pure generators
    counts = {}
    for m in monos:
        if sum(1 for x in m if x) > 1:
            for i, x in enumerate(m):
                if x:
                    counts[i] = counts.get(i, 0) + 1
    i = max(counts, key=lambda v: (counts[v], -v))
    n = len(monos[0])
    pivot = tuple(1 if k == i else 0 for k in range(n))
    left = monos + [pivot]
    right = [tuple(max(a - b, 0) for a, b in zip(m, pivot)) for m in monos]
    a = _hilbert_numerator(left, weights)
    b = _hilbert_numerator(right, weights)
    d = weights[i]
    out = dict(a)
    for k, v in b.items():
        out[k + d] = out.get(k + d, 0) + v
    return {k: v for k, v in out.items() if v}


def _monomial_dimension(monos, n):
    """Krull dimension of S / (monos): largest variable set supporting no generator."""
    monos = _minimalize(monos)
    if any(all(x == 0 for x in m) for m in monos):
        return -1
    supports = [frozenset(i for i, x in enumerate(m) if x) for m in monos]

    best = 0

    def search(i, chosen):
        nonlocal best
        if len(chosen) + (n - i) <= best:
            return
        if i == n:
            best = max(best, len(chosen))
            return
        trial = chosen | {i}
        if not any(s <= trial for s in supports):
            search(i + 1, trial)
        search(i + 1, chosen)

    search(0, frozenset())
    return best


def _count_standard(monos, n, limit=10**6):
    """Number of monomials outside (monos), or None if infinite."""
    monos = _minimalize(monos)
    if any(all(x == 0 for x in m) for m in monos):
        return 0
    bounds = []
    for i in range(n):
        pure = [m[i] for m in monos if m[i] and all(x == 0 for k, x in enumerate(m) if k != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    count = 0
    e = [0] * n

    def rec(i):
        nonlocal count
        if i == n:
            count += 1
            if count > limit:
                raise BudgetExceeded("standard monomial enumeration limit exceeded")
            return
        for k in range(bounds[i]):
            e[i] = k
            part = tuple(e[: i + 1]) + (0,) * (n - i - 1)
            if any(_divides(m, part) for m in monos):
                break
            rec(i + 1)
        e[i] = 0

    rec(0)
    return count


def standard_monomials(monos, n, limit=10**5):
    monos = _minimalize(monos)
    if _count_standard(monos, n, limit) is None:
        raise NotApplicable("infinitely many standard monomials")
    out = []
    bounds = [min(m[i] for m in monos if m[i] and all(x == 0 for k, x in enumerate(m) if k != i)) for i in range(n)]
    for e in itertools.product(*[range(b) for b in bounds]):
        if not any(_divides(m, e) for m in monos):
            out.append(e)
    return out


# ---------------------------------------------------------------------------
# presented rings

class PresentedRing:
    """Q[names] / (relations), with optional inverse pairs (i, j): x_i * x_j = 1."""

    def __init__(self, names, relations=(), degrees=None, inverse_pairs=()):
        self.names = tuple(names)
        n = len(self.names)
        self.degrees = tuple(degrees) if degrees is not None else None
        if self.degrees is not None and len(self.degrees) != n:
            raise VariableMismatch("one degree per variable")
        self.inverse_pairs = tuple(tuple(p) for p in inverse_pairs)
        rels = []
        for i, j in self.inverse_pairs:
            rels.append(Poly.var(i, n) * Poly.var(j, n) - 1)
        for r in relations:
            if r.nvars != n:
                raise VariableMismatch("relation lives in a different ring")
            if r.laurent:
                r = self.encode(r)
            if not r.is_zero() and r not in rels:
                rels.append(r)
        self.relations = tuple(rels)
        self._bases = {}

    @property
    def nvars(self):
        return len(self.names)

    @property
    def graded(self):
        return self.degrees is not None and all(d > 0 for d in self.degrees) and \
            all(r.is_homogeneous(self.degrees) for r in self.relations)

    def var(self, name_or_index):
        i = self.names.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return Poly.var(i, self.nvars)

    def inverse_slot(self, i):
        for a, b in self.inverse_pairs:
            if a == i:
                return b
            if b == i:
                return a
        return None

    def encode(self, p):
        """Rewrite negative powers through the paired inverse variables."""
        if not p.laurent:
            return p
        slots = {}
        for i in range(self.nvars):
            j = self.inverse_slot(i)
            if j is not None:
                slots[i] = j
        for e in p.terms:
            for i, k in enumerate(e):
                if k < 0 and i not in slots:
                    raise NotApplicable(f"variable {self.names[i]} is not invertible in this ring")
        return p.without_inverses(slots)

    def parse(self, text):
        return self.encode(parse_poly(text, self.names))

    def ideal(self):
        return IdealPresentation(self.names, self.relations, self.degrees)

    def default_order(self):
        return MonomialOrder.grevlex(self.nvars, self.degrees if self.graded else None)

    def basis(self, order=None, budget=None):
        order = order or self.default_order()
        if order not in self._bases:
            self._bases[order] = groebner_basis(self.ideal(), order, budget)
        return self._bases[order]

    def normal_form(self, p, order=None):
        return normal_form(self.encode(p), self.basis(order))

    def contains(self, p):
        return self.normal_form(p).is_zero()

    def is_zero_ring(self):
        return self.basis().is_unit()

    def quotient(self, extra, names=None):
        extra = [self.encode(r) for r in extra]
        return PresentedRing(names or self.names, self.relations + tuple(extra), self.degrees, self.inverse_pairs)

    def leading_monomials(self, order=None):
        return self.basis(order).leading_monomials()

    def krull_dimension(self):
        return max(_monomial_dimension(self.leading_monomials(), self.nvars), -1)

    def vector_dimension(self):
        """Q-dimension of the ring, or None when infinite."""
        return _count_standard(self.leading_monomials(), self.nvars)

    def hilbert_series(self):
        if not self.graded:
            raise NotApplicable("hilbert_series needs positive degrees and homogeneous relations")
        lms = self.basis(MonomialOrder.grevlex(self.nvars, self.degrees)).leading_monomials()
        num = _hilbert_numerator(lms, self.degrees)
        top = max(num) if num else 0
        return PoincareSeries([num.get(k, 0) for k in range(top + 1)], self.degrees)

    def element_degree(self, p):
        if self.degrees is None:
            raise NotApplicable("ungraded ring")
        if not p.is_homogeneous(self.degrees):
            raise NotApplicable(f"{p.format(self.names)} is not homogeneous")
        return p.degree(self.degrees)

    def format(self, p):
        return p.format(self.names)

    def __repr__(self):
        rels = ", ".join(self.format(r) for r in self.relations)
        return f"PresentedRing([{', '.join(self.names)}] / ({rels}))"

    def to_json(self):
        out = {"variables": list(self.names), "relations": [self.format(r) for r in self.relations]}
        if self.degrees is not None:
            out["degrees"] = list(self.degrees)
        if self.inverse_pairs:
            out["inverse_pairs"] = [[self.names[i], self.names[j]] for i, j in self.inverse_pairs]
        return out


def laurent_ring(names, extra_relations=()):
    """Q[t1^+-1..tn^+-1] realised with doubled variables t_i, t_i_inv."""
    names = list(names)
    n = len(names)
    allnames = names + [f"{x}_inv" for x in names]
    ring = PresentedRing(allnames, (), None, [(i, i + n) for i in range(n)])
    if extra_relations:
        ring = ring.quotient(extra_relations)
    return ring


def lift_laurent(p, ring):
    """Laurent polynomial in the first half of a laurent_ring, embedded and encoded."""
    return ring.encode(p.embed(ring.nvars, 0))


def hilbert_series(ring):
    return ring.hilbert_series()


def krull_dimension(ring):
    return ring.krull_dimension()


# ---------------------------------------------------------------------------
# regular sequences

def is_regular_sequence(elems, ring):
    """Hilbert-series test: R/(f1..fk) has series HS(R) * prod(1 - t^deg fi)."""
    if not ring.graded:
        raise NotApplicable("regular-sequence test needs a graded ring")
    degs = []
    for f in elems:
        d = ring.element_degree(f)
        if d is None or d <= 0:
            return False, {"reason": "element of non-positive degree or zero"}
        degs.append(d)
    base = ring.hilbert_series()
    predicted = base * PoincareSeries(_koszul_numerator(degs), ())
    actual = ring.quotient(elems).hilbert_series()
    ok = predicted == actual
    return ok, {"degrees": degs, "predicted": predicted, "actual": actual}


def _koszul_numerator(degs):
    num = [Fraction(1)]
    for d in degs:
        num = upoly_mul(num, one_minus_t_pow(d))
    return num


# ---------------------------------------------------------------------------
# images of ring maps

@dataclass
class ImageMap:
    """The subring generated by the images of source generators inside target."""

    source: PresentedRing
    target: PresentedRing
    images: list
    basis: IdealPresentation
    kernel: list = field(default_factory=list)

    @cached_property
    def presentation(self):
        return self.source.quotient(self.kernel)

    def _combined(self, p):
        m, n = self.target.nvars, self.source.nvars
        return self.target.encode(p).embed(m + n, 0)

    def contains(self, p):
        """(True, preimage in source variables) or (False, None)."""
        m, n = self.target.nvars, self.source.nvars
        r = normal_form(self._combined(p), self.basis)
        if any(e[i] for e in r.terms for i in range(m)):
            return False, None
        return True, r.restrict(list(range(m, m + n)))

    def is_injective(self):
        src = self.source
        return all(src.contains(k) for k in self.kernel)


def ring_map_image(source, target, images, budget=None, check=True):
    """Elimination presentation of the image of source -> target, x_j -> images[j]."""
    if len(images) != source.nvars:
        raise VariableMismatch("one image per source generator")
    images = [target.encode(f) for f in images]
    if check:
        for rel in source.relations:
            val = rel.substitute(images, target.nvars)
            if not target.contains(val):
                raise IllDefinedMap(f"relation {source.format(rel)} does not map to zero", source.format(rel))
    m, n = target.nvars, source.nvars
    weights = None
    if target.graded and all(f.is_homogeneous(target.degrees) and not f.is_zero() and f.degree(target.degrees) > 0
                             for f in images):
        weights = list(target.degrees) + [f.degree(target.degrees) for f in images]
    gens = [r.embed(m + n, 0) for r in target.relations]
    for j, f in enumerate(images):
        gens.append(Poly.var(m + j, m + n) - f.embed(m + n, 0))
    names = tuple(target.names) + tuple(f"{s}'" if s in target.names else s for s in source.names)
    order = MonomialOrder.elimination(m + n, m, weights)
    ideal = IdealPresentation(names, gens, tuple(weights) if weights else None)
    basis = groebner_basis(ideal, order, budget)
    kernel = []
    for g in basis.gens:
        if not any(e[i] for e in g.terms for i in range(m)):
            kernel.append(g.restrict(list(range(m, m + n))))
    return ImageMap(source, target, images, basis, kernel)


def fiber_dimension(ring, targets):
    """dim_Q of ring / (x_i - v_i) for the given {index or name: value}; None if infinite."""
    extra = []
    for k, v in targets.items():
        i = ring.names.index(k) if isinstance(k, str) else k
        extra.append(Poly.var(i, ring.nvars) - Fraction(v))
    return ring.quotient(extra).vector_dimension()


def local_multiplicity(ring, point):
    """Length of the localisation of a zero-dimensional ring at a rational point.

    ``point`` gives a value for every variable (index or name).  The length is
    dim R / (I + m^N) once N reaches dim R, which bounds every local length.
    """
    total = ring.vector_dimension()
    if total is None:
        return None
    n = ring.nvars
    shifted = [Poly.zero(n)] * n
    for k, v in point.items():
        i = ring.names.index(k) if isinstance(k, str) else k
        shifted[i] = Poly.var(i, n) - Fraction(v)
    if any(s.is_zero() for s in shifted):
        raise VariableMismatch("a value is needed for every variable")
    N = max(total, 1)
    powers = [Poly.one(n)]
    for _ in range(N):
        powers = list({p * s for p in powers for s in shifted})
    return ring.quotient(powers).vector_dimension()
