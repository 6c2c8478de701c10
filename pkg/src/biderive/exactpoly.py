"""Exact sparse multivariate polynomials and rational functions over Q.

A :class:`Ring` fixes an ordered variable list and a monomial order.  A
:class:`Poly` is a map from exponent tuples to ``int``/``Fraction``
coefficients; a :class:`RationalFunction` is a numerator/denominator pair
with a monic denominator.  Nothing here uses floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce

from . import kernels

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*\Z")


class AmbientMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message, text="", position=None):
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)
        self.text = text
        self.position = position


class UnknownVariable(ParseError):
    pass


class PoleError(ZeroDivisionError):
    pass


def _block_key(kind, lo, hi):
    if kind == "lex":
        return lambda e: tuple(-x for x in e[lo:hi])
    if kind == "degrevlex":
        def key(e):
            part = e[lo:hi]
            return (-sum(part),) + part[::-1]
        return key
    raise ValueError(f"unknown monomial order block {kind!r}")


def _normalize_order(order, n):
    if isinstance(order, str):
        return ((order, n),)
    blocks = tuple((str(kind), int(size)) for kind, size in order)
    if sum(size for _, size in blocks) != n:
        raise ValueError("block sizes must add up to the number of variables")
    return blocks


class Ring:
    """Immutable ordered variable list with a fixed monomial order.

    ``order`` is ``"degrevlex"``, ``"lex"``, or a tuple of ``(kind, size)``
    blocks; earlier blocks dominate later ones.
    """

    __slots__ = ("names", "order", "sortkey", "_index", "_hash")

    def __init__(self, names, order="degrevlex"):
        names = tuple(names)
        for name in names:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self.order = _normalize_order(order, len(names))
        self._index = {v: i for i, v in enumerate(names)}
        self._hash = hash((names, self.order))
        if len(self.order) == 1:
            kind, size = self.order[0]
            if kind == "lex":
                self.sortkey = lambda e: tuple(-x for x in e)
            elif kind == "degrevlex":
                self.sortkey = lambda e: (-sum(e),) + e[::-1]
            else:
                raise ValueError(f"unknown monomial order {kind!r}")
        else:
            keys = []
            lo = 0
            for kind, size in self.order:
                keys.append(_block_key(kind, lo, lo + size))
                lo += size
            self.sortkey = lambda e: tuple(x for k in keys for x in k(e))

    @property
    def nvars(self):
        return len(self.names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names and self.order == other.order

    def __hash__(self):
        return self._hash

    def __repr__(self):
        order = self.order[0][0] if len(self.order) == 1 else self.order
        return f"Ring({list(self.names)}, {order!r})"

    @property
    def zero_exp(self):
        return (0,) * len(self.names)

    def with_order(self, order):
        return Ring(self.names, order)

    def gen(self, name):
        e = [0] * len(self.names)
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self):
        return [self.gen(v) for v in self.names]

    def zero(self):
        return Poly(self, {})

    def one(self):
        return Poly(self, {self.zero_exp: 1})

    def const(self, c):
        c = _coeff(c)
        return Poly(self, {self.zero_exp: c} if c else {})

    def parse(self, text):
        return parse_element(text, self)


def _coeff(c):
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        return _coeff(Fraction(c))
    raise TypeError(f"not an exact rational: {c!r}")


def _fmt_coeff(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class Poly:
    """Sparse polynomial over Q in a fixed :class:`Ring`.

    Treat instances as immutable; ``terms`` is shared between operations.
    """

    __slots__ = ("ring", "terms", "_lead")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._lead = None

    @classmethod
    def from_dict(cls, ring, terms):
        return cls(ring, {tuple(e): _coeff(c) for e, c in terms.items() if c})

    # basic queries

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and self.ring.zero_exp in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return Fraction(self.terms.get(self.ring.zero_exp, 0))

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name):
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def variables(self):
        used = [0] * self.ring.nvars
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = 1
        return [v for v, u in zip(self.ring.names, used) if u]

    def lead_exp(self):
        if self._lead is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            self._lead = min(self.terms, key=self.ring.sortkey)
        return self._lead

    def lead_coeff(self):
        return self.terms[self.lead_exp()]

    def sorted_terms(self):
        """Terms in descending ambient order."""
        return sorted(self.terms.items(), key=lambda t: self.ring.sortkey(t[0]))

    def monic(self):
        if not self.terms:
            return self
        lc = self.lead_coeff()
        if lc == 1:
            return self
        inv = Fraction(1) / lc
        return Poly(self.ring, {e: _coeff(c * inv) for e, c in self.terms.items()})

    # arithmetic

    def _check(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise AmbientMismatch(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Poly(self.ring, kernels.add_terms(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Poly(self.ring, kernels.add_terms(self.terms, other.terms, -1))

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _coeff(other)
            if not other:
                return self.ring.zero()
            return Poly(self.ring, {e: _coeff(c * other) for e, c in self.terms.items()})
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Poly(self.ring, kernels.mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / other)
        return RationalFunction(self, self._check(other))

    def mul_monomial(self, exp, coeff=1):
        return Poly(self.ring, kernels.shift_terms(self.terms, tuple(exp), coeff))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({self.ring.zero_exp: other} if other else {})
        if isinstance(other, RationalFunction):
            return other == self
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # calculus and substitution

    def diff(self, name):
        return Poly(self.ring, kernels.diff_terms(self.terms, self.ring.index(name)))

    def divmod(self, divisors):
        """Multivariate division; returns ``(quotients, remainder)``."""
        divisors = [self._check(d) for d in divisors]
        quotients = [{} for _ in divisors]
        rem = {}
        f = dict(self.terms)
        key = self.ring.sortkey
        leads = [(d.lead_exp(), d.lead_coeff()) if d else None for d in divisors]
        while f:
            e = min(f, key=key)
            c = f[e]
            for i, ld in enumerate(leads):
                if ld is not None and kernels.divides(ld[0], e):
                    q = tuple(a - b for a, b in zip(e, ld[0]))
                    factor = _coeff(Fraction(c) / ld[1])
                    quotients[i][q] = quotients[i].get(q, 0) + factor
                    f = kernels.add_terms(f, divisors[i].terms, -factor, q)
                    break
            else:
                rem[e] = c
                del f[e]
        return [Poly(self.ring, {e: c for e, c in q.items() if c}) for q in quotients], Poly(self.ring, rem)

    def exact_div(self, other):
        """Quotient if ``other`` divides ``self`` exactly, else ``None``."""
        other = self._check(other)
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        (q,), r = self.divmod([other])
        return q if not r else None

    def substitute(self, values, target=None):
        """Substitute ``values`` (name -> scalar/Poly/RationalFunction).

        Unassigned variables are carried over by name into ``target``
        (defaults to this ring).  Returns a :class:`RationalFunction`.
        """
        target = target or self.ring
        images = []
        for name in self.ring.names:
            if name in values:
                images.append(as_element(values[name], target))
            else:
                images.append(RationalFunction.from_poly(target.gen(name)))
        result = RationalFunction.from_poly(target.zero())
        powers = {}
        poly_only = all(im.den.is_constant() for im in images)
        if poly_only:
            nums = [im.num * (Fraction(1) / im.den.constant_value()) for im in images]
            acc = {}
            for e, c in self.terms.items():
                term = target.const(c)
                for i, k in enumerate(e):
                    if k:
                        p = powers.get((i, k))
                        if p is None:
                            p = powers[(i, k)] = nums[i] ** k
                        term = term * p
                acc = kernels.add_terms(acc, term.terms)
            return RationalFunction.from_poly(Poly(target, acc))
        for e, c in self.terms.items():
            term = RationalFunction.from_poly(target.const(c))
            for i, k in enumerate(e):
                if k:
                    term = term * images[i] ** k
            result = result + term
        return result

    def rename(self, target, mapping=None):
        """Move into ``target`` by variable name (``mapping`` renames first)."""
        mapping = mapping or {}
        idx = []
        for i, name in enumerate(self.ring.names):
            idx.append(target._index.get(mapping.get(name, name)))
        n = target.nvars
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                if k:
                    j = idx[i]
                    if j is None:
                        raise UnknownVariable(
                            f"variable {self.ring.names[i]!r} does not exist in target ring")
                    ne[j] += k
            ne = tuple(ne)
            out[ne] = out.get(ne, 0) + c
        return Poly(target, {e: c for e, c in out.items() if c})

    # formatting

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def _monomial_str(ring, e):
    parts = []
    for name, k in zip(ring.names, e):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(p):
    if not p.terms:
        return "0"
    out = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        c = Fraction(c)
        neg = c < 0
        a = -c if neg else c
        mono = _monomial_str(p.ring, e)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _monomial_gcd(exps):
    return reduce(lambda a, b: tuple(map(min, a, b)), exps)


class RationalFunction:
    """Quotient ``num/den`` of polynomials in one ring.

    Canonical form: the denominator is monic, common monomial factors are
    cancelled, and exact polynomial divisibility is cancelled.  No general
    gcd is taken, so equality uses cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = num.ring.one()
        if num.ring != den.ring:
            raise AmbientMismatch(f"{num.ring!r} vs {den.ring!r}")
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p):
        return cls(p, p.ring.one(), _canonical=True)

    @property
    def ring(self):
        return self.num.ring

    def is_polynomial(self):
        return self.den.is_constant()

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            if other.ring != self.ring:
                raise AmbientMismatch(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise AmbientMismatch(f"{self.ring!r} vs {other.ring!r}")
            return RationalFunction.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.from_poly(self.ring.const(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            if self.den.is_constant():
                return RationalFunction(self.num + other.num, self.den, _canonical=True)
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den.is_constant() and other.den.is_constant():
            return RationalFunction(self.num * other.num, self.den, _canonical=True)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by zero")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("exponent must be an integer")
        if n < 0:
            if not self.num:
                raise ZeroDivisionError("zero to a negative power")
            return RationalFunction(self.den ** -n, self.num ** -n)
        return RationalFunction(self.num ** n, self.den ** n, _canonical=self.den.is_constant())

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return self.num == other.num
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None

    def diff(self, name):
        dn = self.num.diff(name)
        if self.den.is_constant():
            return RationalFunction(dn, self.den, _canonical=True)
        dd = self.den.diff(name)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def substitute(self, values, target=None):
        num = self.num.substitute(values, target)
        den = self.den.substitute(values, target)
        if not den:
            raise PoleError("denominator vanishes at the substituted point")
        return num / den

    def evaluate(self, point):
        missing = [v for v in self.ring.names if v not in point
                   and (self.num.degree_in(v) > 0 or self.den.degree_in(v) > 0)]
        if missing:
            raise ValueError(f"unassigned variables: {missing}")
        target = None
        for v in point.values():
            if isinstance(v, (Poly, RationalFunction)):
                target = v.ring
                break
        return self.substitute(point, target)

    def rename(self, target, mapping=None):
        return RationalFunction(self.num.rename(target, mapping), self.den.rename(target, mapping))

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"RationalFunction({format_element(self)!r})"


def _canonicalize(num, den):
    ring = num.ring
    if not num:
        return num, ring.one()
    if den.is_constant():
        c = den.constant_value()
        return (num if c == 1 else num * (Fraction(1) / c)), ring.one()
    g = _monomial_gcd(list(num.terms) + list(den.terms))
    if any(g):
        neg = tuple(-k for k in g)
        num = num.mul_monomial(neg)
        den = den.mul_monomial(neg)
    if den.is_constant():
        c = den.constant_value()
        return num * (Fraction(1) / c), ring.one()
    q = num.exact_div(den) if num.degree() >= den.degree() else None
    if q is not None:
        return q, ring.one()
    if den.degree() >= num.degree() and not num.is_constant():
        q = den.exact_div(num)
        if q is not None:
            num, den = ring.one(), q
            if den.is_constant():
                return num * (Fraction(1) / den.constant_value()), ring.one()
    lc = den.lead_coeff()
    if lc != 1:
        inv = Fraction(1) / lc
        num = num * inv
        den = den * inv
    return num, den


def as_element(value, ring):
    """Coerce ``value`` into a :class:`RationalFunction` over ``ring``."""
    if isinstance(value, RationalFunction):
        if value.ring != ring:
            raise AmbientMismatch(f"{value.ring!r} vs {ring!r}")
        return value
    if isinstance(value, Poly):
        if value.ring != ring:
            raise AmbientMismatch(f"{value.ring!r} vs {ring!r}")
        return RationalFunction.from_poly(value)
    if isinstance(value, (int, Fraction)):
        return RationalFunction.from_poly(ring.const(value))
    if isinstance(value, str):
        return parse_element(value, ring)
    raise TypeError(f"cannot interpret {value!r} as an element")


# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)"
    r"|(?P<op>\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text, ring):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            raise ParseError(f"expected {value!r}", self.text, pos)

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", self.text, 0)
        value = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {v!r}", self.text, pos)
        return value

    def expr(self):
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1:]
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if not rhs:
                    raise ParseError("division by zero", self.text, pos)
                value = value / rhs
        return value

    def factor(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.factor()
        value = self.atom()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            kind, v, pos = self.take()
            if kind != "num":
                raise ParseError("expected integer exponent", self.text, pos)
            k = int(v)
            if neg:
                if not value:
                    raise ParseError("zero to a negative power", self.text, pos)
                k = -k
            value = value ** k
        return value

    def atom(self):
        kind, v, pos = self.take()
        if kind == "num":
            return RationalFunction.from_poly(self.ring.const(int(v)))
        if kind == "name":
            if v not in self.ring:
                raise UnknownVariable(f"unknown variable {v!r}", self.text, pos)
            return RationalFunction.from_poly(self.ring.gen(v))
        if v == "(":
            value = self.expr()
            self.expect(")")
            return value
        if kind == "end":
            raise ParseError("unexpected end of input", self.text, pos)
        raise ParseError(f"unexpected token {v!r}", self.text, pos)


def parse_element(text, ambient):
    """Parse ``text`` into a :class:`RationalFunction` over ``ambient``.

    ``ambient`` may be a :class:`Ring` or a list of variable names.
    """
    ring = ambient if isinstance(ambient, Ring) else Ring(ambient)
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    return _Parser(text, ring).parse()


def parse_poly(text, ambient):
    value = parse_element(text, ambient)
    if not value.is_polynomial():
        raise ParseError(f"expected a polynomial, got {format_element(value)}", text)
    return value.num * (Fraction(1) / value.den.constant_value())


def format_element(f):
    if isinstance(f, Poly):
        return format_poly(f)
    if f.den.is_constant():
        return format_poly(f.num * (Fraction(1) / f.den.constant_value()))
    return f"({format_poly(f.num)})/({format_poly(f.den)})"


def ring_arithmetic(op, a, b):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(f, name):
    return f.diff(name)


def evaluate(f, point):
    if isinstance(f, Poly):
        f = RationalFunction.from_poly(f)
    return f.evaluate(point)
