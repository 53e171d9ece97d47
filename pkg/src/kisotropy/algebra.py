"""Exact multivariate (Laurent) polynomials and univariate Poincare series.

Polynomials are immutable maps from exponent tuples to nonzero rationals.
Negative exponents are allowed, which makes the same type serve for
characters in R(T) = Z[t1^+-1, ..., tn^+-1].  Groebner machinery never sees
negative exponents; Laurent rings are handed to it through paired inverse
variables (see :mod:`kisotropy.groebner`).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

from .errors import ParseError, PoleAtOne, VariableMismatch


def _q(c):
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


def _show_number(c):
    c = _q(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


class Poly:
    """Polynomial in ``nvars`` variables with exact rational coefficients."""

    __slots__ = ("terms", "nvars", "_hash")

    def __init__(self, terms=None, nvars=0):
        clean = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise VariableMismatch(f"exponent {e} has length {len(e)}, expected {nvars}")
                if c:
                    clean[tuple(e)] = _q(c)
        self.terms = clean
        self.nvars = nvars
        self._hash = None

    @classmethod
    def _raw(cls, terms, nvars):
        p = cls.__new__(cls)
        p.terms = terms
        p.nvars = nvars
        p._hash = None
        return p

    # constructors
    @classmethod
    def const(cls, c, nvars):
        c = _q(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def zero(cls, nvars):
        return cls._raw({}, nvars)

    @classmethod
    def one(cls, nvars):
        return cls.const(1, nvars)

    @classmethod
    def var(cls, i, nvars, power=1):
        e = [0] * nvars
        e[i] = power
        return cls._raw({tuple(e): Fraction(1)}, nvars)

    @classmethod
    def monomial(cls, exps, coeff=1, nvars=None):
        exps = tuple(exps)
        return cls({exps: coeff}, len(exps) if nvars is None else nvars)

    # basic queries
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def laurent(self):
        return any(x < 0 for e in self.terms for x in e)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_integral(self):
        return all(c.denominator == 1 for c in self.terms.values())

    def __len__(self):
        return len(self.terms)

    def _check(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise VariableMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        return Poly.const(other, self.nvars)

    # arithmetic
    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = _q(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly._raw({e: v * c for e, v in self.terms.items()}, self.nvars)
        other = self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly._raw(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials can be inverted")
            (e, c), = self.terms.items()
            return Poly._raw({tuple(-x * -k for x in e): 1 / c ** -k}, self.nvars)
        result = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Poly.const(other, self.nvars)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # evaluations and maps
    def augmentation(self):
        """Value with every variable set to 1 (the dimension of a virtual character)."""
        return sum(self.terms.values(), Fraction(0))

    def evaluate(self, values):
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term *= _q(v) ** k
            total += term
        return total

    def substitute(self, images, nvars=None):
        """Replace variable i by ``images[i]``; negative powers need monomial images."""
        if len(images) != self.nvars:
            raise VariableMismatch("one image per variable required")
        if nvars is None:
            nvars = images[0].nvars if images else 0
        cache = {}
        out = Poly.zero(nvars)
        for e, c in self.terms.items():
            term = Poly.const(c, nvars)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            out = out + term
        return out

    def map_exponents(self, matrix, nvars=None):
        """Apply the integer matrix to every exponent vector (column convention)."""
        rows = len(matrix)
        out = {}
        for e, c in self.terms.items():
            f = tuple(sum(matrix[r][j] * e[j] for j in range(self.nvars)) for r in range(rows))
            v = out.get(f, 0) + c
            if v:
                out[f] = v
            else:
                out.pop(f, None)
        return Poly._raw(out, rows if nvars is None else nvars)

    def embed(self, nvars, offset=0):
        """Same polynomial inside a larger ring, occupying slots offset..offset+self.nvars."""
        pad_l = (0,) * offset
        pad_r = (0,) * (nvars - offset - self.nvars)
        return Poly._raw({pad_l + e + pad_r: c for e, c in self.terms.items()}, nvars)

    def restrict(self, keep):
        """Drop variables not listed in ``keep`` (they must not occur)."""
        out = {}
        for e, c in self.terms.items():
            if any(e[i] for i in range(self.nvars) if i not in keep):
                raise VariableMismatch("polynomial involves a dropped variable")
            out[tuple(e[i] for i in keep)] = c
        return Poly._raw(out, len(keep))

    def variables(self):
        return sorted({i for e in self.terms for i, k in enumerate(e) if k})

    def degree(self, weights=None):
        if not self.terms:
            return None
        w = weights or (1,) * self.nvars
        return max(sum(a * b for a, b in zip(w, e)) for e in self.terms)

    def is_homogeneous(self, weights=None):
        w = weights or (1,) * self.nvars
        return len({sum(a * b for a, b in zip(w, e)) for e in self.terms}) <= 1

    def homogeneous_part(self, d, weights=None):
        w = weights or (1,) * self.nvars
        return Poly._raw({e: c for e, c in self.terms.items()
                          if sum(a * b for a, b in zip(w, e)) == d}, self.nvars)

    def content(self):
        """Positive rational c with self / c integral and primitive."""
        if not self.terms:
            return Fraction(0)
        num = reduce(gcd, (c.numerator for c in self.terms.values()))
        den = reduce(lcm, (c.denominator for c in self.terms.values()))
        return Fraction(num, den)

    def primitive(self):
        c = self.content()
        return self if not c else self * (1 / c)

    def monic(self, order_key=grevlex_key):
        if not self.terms:
            return self
        lead = max(self.terms, key=order_key)
        return self * (1 / self.terms[lead])

    def sorted_terms(self, order_key=grevlex_key):
        return sorted(self.terms.items(), key=lambda ec: order_key(ec[0]), reverse=True)

    def without_inverses(self, inverse_slots):
        """Rewrite negative powers of variable i as positive powers of ``inverse_slots[i]``."""
        out = {}
        n = self.nvars
        for e, c in self.terms.items():
            f = list(e)
            for i, k in enumerate(e):
                if k < 0:
                    j = inverse_slots[i]
                    f[i] = 0
                    f[j] += -k
            out[tuple(f)] = out.get(tuple(f), 0) + c
        return Poly({k: v for k, v in out.items() if v}, n)

    # text form
    def format(self, names=None):
        names = names or default_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            mono = "*".join(factors)
            if not mono:
                body = _show_number(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{_show_number(abs(c))}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Poly({self.format()!r}, nvars={self.nvars})"


def default_names(n, stem="t"):
    return [f"{stem}{i + 1}" for i in range(n)]


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9']*)|(\^)|(\*)|([+-])|(\())")


def parse_poly(text, names):
    """Parse ``3*t1^2*t2^-1 + 1`` style text over the given variable names."""
    index = {n: i for i, n in enumerate(names)}
    n = len(names)
    src = text.strip()
    if not src:
        raise ParseError("empty polynomial")
    pos = 0
    total = Poly.zero(n)
    expect_term = True
    sign = 1
    coeff = Fraction(1)
    exps = [0] * n
    have_factor = False

    def flush():
        nonlocal total, coeff, exps, have_factor, sign
        if not have_factor:
            raise ParseError(f"dangling operator in {text!r}")
        total = total + Poly.monomial(exps, sign * coeff, n)
        coeff, exps, have_factor, sign = Fraction(1), [0] * n, False, 1

    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        num, name, caret, star, pm, lpar = m.groups()
        if lpar:
            raise ParseError("parentheses are not part of the polynomial grammar")
        if pm:
            if expect_term:
                sign = -sign if pm == "-" else sign
                continue
            flush()
            sign = -1 if pm == "-" else 1
            expect_term = True
            continue
        if star:
            if expect_term:
                raise ParseError(f"misplaced '*' in {text!r}")
            expect_term = True
            continue
        if caret:
            raise ParseError(f"misplaced '^' in {text!r}")
        if not expect_term:
            raise ParseError(f"missing operator near {pos} in {text!r}")
        if num:
            coeff *= Fraction(num)
        else:
            if name not in index:
                raise ParseError(f"unknown variable {name!r}")
            power = 1
            m2 = re.compile(r"\s*\^\s*(-?\d+)").match(src, pos)
            if m2:
                power = int(m2.group(1))
                pos = m2.end()
            exps[index[name]] += power
        have_factor = True
        expect_term = False
    if expect_term:
        raise ParseError(f"trailing operator in {text!r}")
    flush()
    return total


def poly_arith(p, q, op):
    if p.nvars != q.nvars:
        raise VariableMismatch(f"{p.nvars} vs {q.nvars} variables")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def augmentation(p):
    return p.augmentation()


# ---------------------------------------------------------------------------
# univariate helpers: coefficient lists, lowest degree first

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def upoly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def upoly_add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def upoly_divmod(a, b):
    a = [Fraction(x) for x in _trim(a)]
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, y in enumerate(b):
            a[i + shift] -= f * y
        a = _trim(a)
    return _trim(q), a


def upoly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    return [Fraction(x) / a[-1] for x in a]


def one_minus_t_pow(d):
    return [Fraction(1)] + [Fraction(0)] * (d - 1) + [Fraction(-1)]


_CYCLO = {}


def cyclotomic(m):
    if m not in _CYCLO:
        num = [Fraction(-1)] + [Fraction(0)] * (m - 1) + [Fraction(1)]
        for d in range(1, m):
            if m % d == 0:
                num, r = upoly_divmod(num, cyclotomic(d))
                assert not r
        _CYCLO[m] = num
    return _CYCLO[m]


def _divides(a, b):
    _, r = upoly_divmod(b, a)
    return not r


def _as_number(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


class PoincareSeries:
    """numerator(t) / prod(1 - t^d for d in denominator).

    Instances are always in canonical form: numerator and denominator share
    no factor, and the denominator degrees are chosen greedily (largest
    cyclotomic factor first), so equal series compare equal.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=()):
        num = _trim([Fraction(c) for c in numerator])
        den = sorted(int(d) for d in denominator)
        if any(d <= 0 for d in den):
            raise ValueError("denominator degrees must be positive")
        num, den = self._reduce(num, den)
        self.numerator = tuple(_as_number(c) for c in num)
        self.denominator = tuple(den)

    @staticmethod
    def _reduce(num, den):
        if not num:
            return [], []
        q = [Fraction(1)]
        for d in den:
            q = upoly_mul(q, one_minus_t_pow(d))
        g = upoly_gcd(num, q)
        num, _ = upoly_divmod(num, g)
        q, _ = upoly_divmod(q, g)
        scale = q[0]
        num = [c / scale for c in num]
        q = [c / scale for c in q]
        rest = q
        chosen = []
        top = max(den) if den else 0
        while len(rest) > 1:
            m = next(m for m in range(top, 0, -1) if _divides(cyclotomic(m), rest))
            chosen.append(m)
            for j in range(1, m + 1):
                if m % j == 0 and _divides(cyclotomic(j), rest):
                    rest, _ = upoly_divmod(rest, cyclotomic(j))
        full = [Fraction(1)]
        for m in chosen:
            full = upoly_mul(full, one_minus_t_pow(m))
        cof, r = upoly_divmod(full, q)
        assert not r
        num = upoly_mul(num, cof)
        return num, sorted(chosen)

    @classmethod
    def free(cls, degrees):
        return cls([1], degrees)

    @classmethod
    def polynomial(cls, coeffs):
        return cls(coeffs, ())

    def __eq__(self, other):
        if not isinstance(other, PoincareSeries):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __add__(self, other):
        a = list(self.numerator)
        for d in other.denominator:
            a = upoly_mul(a, one_minus_t_pow(d))
        b = list(other.numerator)
        for d in self.denominator:
            b = upoly_mul(b, one_minus_t_pow(d))
        return PoincareSeries(upoly_add(a, b), self.denominator + other.denominator)

    def __mul__(self, other):
        if not isinstance(other, PoincareSeries):
            return PoincareSeries([Fraction(c) * Fraction(other) for c in self.numerator], self.denominator)
        return PoincareSeries(upoly_mul(list(self.numerator), list(other.numerator)),
                              self.denominator + other.denominator)

    __rmul__ = __mul__

    def is_polynomial(self):
        return not self.denominator

    def pole_order_at_one(self):
        return len(self.denominator)

    def eval_at_one(self):
        if self.denominator:
            raise PoleAtOne(f"{self} has a pole of order {len(self.denominator)} at t = 1")
        return Fraction(sum(Fraction(c) for c in self.numerator))

    def expand(self, order):
        """Power-series coefficients of t^0 .. t^order."""
        coeffs = [Fraction(0)] * (order + 1)
        for i, c in enumerate(self.numerator):
            if i <= order:
                coeffs[i] = Fraction(c)
        for d in self.denominator:
            for i in range(d, order + 1):
                coeffs[i] += coeffs[i - d]
        return [_as_number(c) for c in coeffs]

    def numerator_string(self, var="t"):
        return _upoly_str(self.numerator, var)

    def factored(self, var="t"):
        num = self.numerator_string(var)
        if not self.denominator:
            return num
        den = "".join(f"(1 - {var}^{d})" if d > 1 else f"(1 - {var})" for d in self.denominator)
        if len(self.numerator) > 1 and sum(1 for c in self.numerator if c) > 1:
            num = f"({num})"
        return f"{num}/{den}" if len(self.denominator) == 1 else f"{num}/({den})"

    def truncated(self, order=12, var="t"):
        return _upoly_str(self.expand(order), var) + f" + O({var}^{order + 1})"

    def __str__(self):
        return self.factored()

    def __repr__(self):
        return f"PoincareSeries({list(self.numerator)}, {list(self.denominator)})"

    def to_json(self):
        return {"numerator": [str(c) for c in self.numerator], "denominator_degrees": list(self.denominator),
                "factored": self.factored()}


def _upoly_str(coeffs, var="t"):
    parts = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        c = Fraction(c)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_show_number(mag)}*{mono}"
        else:
            body = _show_number(mag)
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def series_eval_at_one(s):
    return s.eval_at_one()
