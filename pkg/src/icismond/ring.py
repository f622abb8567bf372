"""Exact sparse multivariate polynomials over the rationals."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from gmpy2 import mpq

from .errors import ParseError, RingMismatchError
from .orderings import MonomialOrdering

# exponents are machine-width; exceeding this is a hard error
MAX_EXPONENT = 2**31 - 1

Monomial = Tuple[int, ...]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class RingSpec:
    """Ordered variable names plus a partition into named blocks."""

    __slots__ = ("variables", "blocks", "ordering", "_index")

    def __init__(self, variables: Sequence[str], blocks=None, ordering=None):
        variables = tuple(variables)
        for v in variables:
            if not isinstance(v, str) or not _NAME.match(v):
                raise ValueError(f"invalid variable name {v!r}")
        if len(set(variables)) != len(variables):
            raise ValueError("variable names must be unique")
        if blocks is None:
            blocks = {"vars": variables} if variables else {}
        blocks = {str(k): tuple(v) for k, v in dict(blocks).items()}
        covered = [v for b in blocks.values() for v in b]
        for name, b in blocks.items():
            if not b:
                raise ValueError(f"block {name!r} is empty")
        if sorted(covered) != sorted(variables):
            raise ValueError("blocks must partition the variables exactly once")
        self.variables = variables
        self.blocks = blocks
        self._index = {v: i for i, v in enumerate(variables)}
        self.ordering = ordering or MonomialOrdering.degrevlex(len(variables))

    @property
    def nvars(self):
        return len(self.variables)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def block_indices(self, block):
        return [self._index[v] for v in self.blocks[block]]

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, RingSpec) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __repr__(self):
        return f"RingSpec({list(self.variables)})"

    # -- constructors for polynomials ----------------------------------
    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return Polynomial(self, {(0,) * self.nvars: mpq(1)})

    def const(self, c):
        return Polynomial(self, {(0,) * self.nvars: _q(c)})

    def var(self, name):
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): mpq(1)})

    def gens(self):
        return [self.var(v) for v in self.variables]

    def monomial(self, exps, coeff=1):
        return Polynomial(self, {tuple(exps): _q(coeff)})

    def parse(self, text):
        return parse_polynomial(text, self)


def _q(c):
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def _check_exps(e):
    for a in e:
        if a > MAX_EXPONENT:
            raise OverflowError("monomial exponent overflow")
    return e


class Polynomial:
    """Immutable polynomial: a map from exponent tuples to nonzero rationals."""

    __slots__ = ("ring", "_t", "_hash")

    def __init__(self, ring: RingSpec, terms: Mapping[Monomial, object] = None):
        self.ring = ring
        t = {}
        if terms:
            n = ring.nvars
            for e, c in terms.items():
                if len(e) != n:
                    raise ValueError("exponent vector length mismatch")
                if c:
                    t[tuple(e)] = c if type(c) is type(mpq(0)) else _q(c)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        p = cls.__new__(cls)
        p.ring = ring
        p._t = terms
        p._hash = None
        return p

    # -- basic protocol ------------------------------------------------
    @property
    def terms_dict(self) -> Dict[Monomial, mpq]:
        return dict(self._t)

    def terms(self, ordering=None):
        """(coefficient, exponents) pairs, descending in ``ordering``."""
        key = (ordering or self.ring.ordering).key
        return [(self._t[e], e) for e in sorted(self._t, key=key, reverse=True)]

    def __iter__(self):
        return iter(self.terms())

    def __len__(self):
        return len(self._t)

    def is_zero(self):
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._t == other._t
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self._t == self.ring.const(other)._t
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._t.items())))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(
                    f"ring mismatch: {self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self.ring.const(other)
        return None

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = dict(self._t)
        for e, c in o._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Polynomial._raw(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = {}
        for e1, c1 in self._t.items():
            for e2, c2 in o._t.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
        for e in t:
            _check_exps(e)
        return Polynomial._raw(self.ring, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c):
        c = _q(c)
        if not c:
            return self.ring.zero()
        return Polynomial._raw(self.ring, {e: v * c for e, v in self._t.items()})

    def mul_monomial(self, exps, c=1):
        c = _q(c)
        return Polynomial._raw(self.ring, {
            _check_exps(tuple(a + b for a, b in zip(e, exps))): v * c
            for e, v in self._t.items()})

    # -- structure -----------------------------------------------------
    def degree(self):
        return max((sum(e) for e in self._t), default=-1)

    def lowest_degree(self):
        return min((sum(e) for e in self._t), default=-1)

    def leading(self, ordering=None):
        """(coefficient, exponents) of the leading term."""
        if not self._t:
            raise ValueError("zero polynomial has no leading term")
        key = (ordering or self.ring.ordering).key
        e = max(self._t, key=key)
        return self._t[e], e

    def constant_term(self):
        return self._t.get((0,) * self.ring.nvars, mpq(0))

    def variables_used(self):
        used = set()
        for e in self._t:
            used.update(i for i, a in enumerate(e) if a)
        return [self.ring.variables[i] for i in sorted(used)]

    def diff(self, var):
        i = self.ring.index(var) if isinstance(var, str) else var
        t = {}
        for e, c in self._t.items():
            a = e[i]
            if a:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * a
        return Polynomial._raw(self.ring, t)

    def compose(self, images: Sequence["Polynomial"], target: RingSpec = None):
        """Substitute ``images[i]`` for the i-th variable."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        if target is None:
            target = images[0].ring if images else self.ring
        cache = [dict() for _ in images]

        def power(i, a):
            c = cache[i]
            if a not in c:
                c[a] = images[i] ** a if a < 2 or (a - 1) not in c \
                    else c[a - 1] * images[i]
            return c[a]

        acc = {}
        for e, coeff in sorted(self._t.items()):
            term = None
            for i, a in enumerate(e):
                if a:
                    pw = power(i, a)
                    term = pw if term is None else term * pw
            if term is None:
                term = target.one()
            for m, v in term._t.items():
                s = acc.get(m, 0) + coeff * v
                if s:
                    acc[m] = s
                else:
                    acc.pop(m, None)
        return Polynomial._raw(target, acc)

    def subs_zero(self, names):
        """Set the named variables to 0 (same ring)."""
        idx = [self.ring.index(v) for v in names]
        return Polynomial._raw(self.ring, {
            e: c for e, c in self._t.items() if all(e[i] == 0 for i in idx)})

    def to_ring(self, ring: RingSpec):
        """Re-embed into a ring whose variables include all used ones."""
        return self.restrict(ring)

    def restrict(self, ring: RingSpec):
        """Move into a ring that contains every variable actually used."""
        for v in self.variables_used():
            if v not in ring:
                raise RingMismatchError(f"variable {v} not in {ring!r}")
        idx = [self.ring.index(v) for v in ring.variables if v in self.ring]
        pos = {v: i for i, v in enumerate(ring.variables)}
        n = ring.nvars
        t = {}
        for e, c in self._t.items():
            f = [0] * n
            for i in idx:
                f[pos[self.ring.variables[i]]] = e[i]
            t[tuple(f)] = c
        return Polynomial._raw(ring, t)

    # -- printing ------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


# --------------------------------------------------------------------------
# arithmetic entry points


def poly_arith(op, p: Polynomial, q: Polynomial) -> Polynomial:
    if p.ring != q.ring:
        raise RingMismatchError("ring mismatch")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def _mod(c, char):
    return mpq(c.numerator * pow(int(c.denominator), -1, char) % char)


def exact_divide(p: Polynomial, q: Polynomial, char=0):
    """Return ``r`` with ``p == q*r``, or ``None`` if ``q`` does not divide ``p``.

    With ``char`` a prime the division runs over GF(char) and ``r`` has
    coefficients in ``0 .. char-1``.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.ring != q.ring:
        raise RingMismatchError("ring mismatch")
    order = MonomialOrdering.lex(p.ring.nvars)
    key = order.key
    if char:
        qt = [(e, _mod(c, char)) for e, c in q._t.items()]
        qt = [(e, c) for e, c in qt if c]
        if not qt:
            raise ZeroDivisionError("divisor vanishes modulo the characteristic")
        rem = {e: v for e, v in ((e, _mod(c, char)) for e, c in p._t.items()) if v}
        qe = max((e for e, _ in qt), key=key)
        qinv = pow(int(dict(qt)[qe]), -1, char)
    else:
        qc, qe = q.leading(order)
        qt = list(q._t.items())
        rem = dict(p._t)
    quot = {}
    while rem:
        e = max(rem, key=key)
        if any(a < b for a, b in zip(e, qe)):
            return None
        m = tuple(a - b for a, b in zip(e, qe))
        c = mpq(int(rem[e]) * qinv % char) if char else rem[e] / qc
        quot[m] = c
        for f, d in qt:
            g = tuple(a + b for a, b in zip(f, m))
            v = rem.get(g, 0) - c * d
            if char:
                v = mpq(int(v) % char)
            if v:
                rem[g] = v
            else:
                rem.pop(g, None)
    return Polynomial._raw(p.ring, quot)


def partial_derivative(p: Polynomial, var: str) -> Polynomial:
    return p.diff(var)


# --------------------------------------------------------------------------
# text grammar
#   expr   := ['+'|'-'] term (('+'|'-') term)*
#   term   := factor ('*' factor)*
#   factor := base ('^' nat)?
#   base   := var | rational | '(' expr ')'
# A leading sign is accepted so that printed output always re-parses.

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", start)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, ring):
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return p

    def expr(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self):
        base = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "-":
                raise ParseError("negative exponent", tok[2])
            if tok[0] != "int":
                raise ParseError("exponent must be a natural number", tok[2])
            self.take()
            k = int(tok[1])
            if k > MAX_EXPONENT:
                raise ParseError("exponent too large", tok[2])
            base = base ** k
        return base

    def base(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "name":
            self.take()
            if tok[1] not in self.ring:
                raise ParseError(f"unknown variable {tok[1]!r}", tok[2])
            return self.ring.var(tok[1])
        if kind == "int":
            self.take()
            num = int(tok[1])
            if self.peek()[0] == "/":
                self.take()
                den_tok = self.take("int") if self.peek()[0] == "int" else None
                if den_tok is None:
                    t = self.peek()
                    raise ParseError("expected integer denominator", t[2])
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", den_tok[2])
                return self.ring.const(mpq(num, den))
            return self.ring.const(num)
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        what = "end of input" if kind == "end" else repr(tok[1])
        raise ParseError(f"unexpected {what}", tok[2])


def parse_polynomial(text: str, ring: RingSpec) -> Polynomial:
    if not isinstance(text, str):
        raise ParseError("polynomial must be given as a string")
    return _Parser(text, ring).parse()


def _format_coeff(c):
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_polynomial(p: Polynomial, ordering=None) -> str:
    if p.is_zero():
        return "0"
    names = p.ring.variables
    out = []
    for c, e in p.terms(ordering):
        mono = "*".join(
            names[i] if a == 1 else f"{names[i]}^{a}"
            for i, a in enumerate(e) if a)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def monomial_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return _check_exps(tuple(a + b for a, b in zip(m1, m2)))


def monomial_divides(m1: Monomial, m2: Monomial) -> bool:
    return all(a <= b for a, b in zip(m1, m2))
