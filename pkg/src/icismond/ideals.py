"""Ideals in polynomial rings and their localizations at the origin."""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import List, Optional, Sequence

from gmpy2 import mpq
import sympy

from . import engine
from .engine import Limits, TermOrder
from .errors import InconsistencyError, RingMismatchError
from .orderings import MonomialOrdering, elimination_order
from .ring import Polynomial, RingSpec, exact_divide


@total_ordering
@dataclass(frozen=True)
class QuotientDimension:
    """A vector-space dimension that may be infinite (``value is None``)."""

    value: Optional[int]

    @property
    def finite(self):
        return self.value is not None

    def __int__(self):
        if self.value is None:
            raise ValueError("infinite dimension")
        return self.value

    def __eq__(self, other):
        if isinstance(other, QuotientDimension):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        if other == float("inf"):
            return self.value is None
        return NotImplemented

    def __lt__(self, other):
        o = other.value if isinstance(other, QuotientDimension) else other
        if self.value is None:
            return False
        if o is None or o == float("inf"):
            return True
        return self.value < o

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return "infinite" if self.value is None else str(self.value)

    def to_json(self):
        return "infinite" if self.value is None else self.value


INFINITE = QuotientDimension(None)


def poly_to_vec(p: Polynomial, comp=0):
    return {e + (comp,): c for e, c in p._t.items()}


def vec_to_poly(v, ring: RingSpec, comp=0):
    return Polynomial._raw(ring, {t[:-1]: mpq(c) for t, c in v.items()
                                  if t[-1] == comp})


def local_ordering(ring: RingSpec):
    return MonomialOrdering.negdegrevlex(ring.nvars)


class Ideal:
    """Generators plus a lazily computed standard basis for one ordering.

    The default ordering is the local ``negdegrevlex`` order, i.e. the ideal
    is read in the localization at the origin.
    """

    def __init__(self, ring: RingSpec, generators: Sequence[Polynomial],
                 ordering: MonomialOrdering = None, char=0, limits=None):
        gens = []
        for g in generators:
            if g.ring != ring:
                raise RingMismatchError("generator not in the ideal's ring")
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators = gens
        self.ordering = ordering or local_ordering(ring)
        if self.ordering.nvars != ring.nvars:
            raise ValueError("ordering size does not match ring")
        self.char = char
        self.limits = limits
        self._basis = None

    @property
    def is_local(self):
        return not self.ordering.is_global

    @property
    def term_order(self):
        return TermOrder(self.ordering)

    @property
    def basis(self) -> List[Polynomial]:
        if self._basis is None:
            vecs = engine.standard_basis(
                [poly_to_vec(g) for g in self.generators], self.term_order,
                char=self.char, limits=self.limits)
            self._basis = [vec_to_poly(v, self.ring) for v in vecs]
        return self._basis

    @property
    def is_complete(self):
        return self._basis is not None

    def leading_monomials(self):
        key = self.ordering.key
        return [max(b._t, key=key) for b in self.basis]

    def with_ordering(self, ordering):
        return Ideal(self.ring, self.generators, ordering, self.char, self.limits)

    def __add__(self, other):
        gens = other.generators if isinstance(other, Ideal) else list(other)
        return Ideal(self.ring, self.generators + list(gens), self.ordering,
                     self.char, self.limits)

    def __mul__(self, other):
        if isinstance(other, Ideal):
            gens = [a * b for a in self.generators for b in other.generators]
        else:
            gens = [a * other for a in self.generators]
        return Ideal(self.ring, gens, self.ordering, self.char, self.limits)

    def __contains__(self, p):
        return normal_form(p, self).is_zero()

    def contains_ideal(self, other: "Ideal"):
        return all(g in self for g in other.generators)

    def equals(self, other: "Ideal"):
        """Equality in the ring read by this ideal's ordering."""
        o = other.with_ordering(self.ordering)
        return self.contains_ideal(other) and o.contains_ideal(self)

    def is_unit(self):
        return any(all(a == 0 for a in m) for m in self.leading_monomials())

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"Ideal({gens}; {self.ordering.describe()})"


def standard_basis(I: Ideal) -> Ideal:
    I.basis  # noqa: B018 -- forces completion
    return I


def normal_form(p: Polynomial, I: Ideal) -> Polynomial:
    if p.ring != I.ring:
        raise RingMismatchError("polynomial and ideal live in different rings")
    r = engine.normal_form(poly_to_vec(p), [poly_to_vec(b) for b in I.basis],
                           I.term_order, char=I.char, limits=I.limits)
    return vec_to_poly(r, I.ring)


def vdim_quotient(I: Ideal) -> QuotientDimension:
    lts = [m + (0,) for m in I.leading_monomials()]
    n = engine.staircase_size(lts, I.ring.nvars, 1)
    return QuotientDimension(n)


def standard_monomials(I: Ideal):
    lts = [m + (0,) for m in I.leading_monomials()]
    return [t[:-1] for t in engine.standard_terms(lts, I.ring.nvars, 1)]


def drop_ring(ring: RingSpec, drop: Sequence[str]) -> RingSpec:
    drop = set(drop)
    keep = [v for v in ring.variables if v not in drop]
    blocks = {}
    for name, b in ring.blocks.items():
        kb = tuple(v for v in b if v not in drop)
        if kb:
            blocks[name] = kb
    return RingSpec(keep, blocks)


def eliminate(I: Ideal, drop) -> Ideal:
    """Generators of ``I`` intersected with the subring without ``drop``.

    ``drop`` is a block name of ``I.ring`` or a list of variable names.  The
    computation is global; the result keeps the ideal's ordering restricted
    to the remaining variables when that ordering is a plain one.
    """
    ring = I.ring
    if isinstance(drop, str):
        drop = list(ring.blocks[drop])
    drop = list(drop)
    didx = [ring.index(v) for v in drop]
    order = elimination_order(ring.nvars, didx)
    J = Ideal(ring, I.generators, order, I.char, I.limits)
    small = drop_ring(ring, drop)
    dset = set(didx)
    kept = []
    for b in J.basis:
        if all(all(e[i] == 0 for i in dset) for e in b._t):
            kept.append(b.restrict(small))
    new_order = _restrict_ordering(I.ordering, small.nvars)
    return Ideal(small, kept, new_order, I.char, I.limits)


def _restrict_ordering(order, nvars):
    if order.kind == "degrevlex":
        return MonomialOrdering.degrevlex(nvars)
    if order.kind == "lex":
        return MonomialOrdering.lex(nvars)
    return MonomialOrdering.negdegrevlex(nvars)


def _fresh_name(ring, base="t"):
    name = base
    k = 0
    while name in ring:
        k += 1
        name = f"{base}{k}"
    return name


def extend_ring(ring: RingSpec, names, block):
    blocks = dict(ring.blocks)
    blocks[block if block not in blocks else _fresh_name(ring, block)] = tuple(names)
    return RingSpec(tuple(names) + ring.variables, blocks)


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """``I`` and ``J`` intersected, via elimination of t from t*I + (1-t)*J."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals live in different rings")
    ring = I.ring
    t = _fresh_name(ring, "t")
    big = extend_ring(ring, [t], "_aux")
    T = big.var(t)
    gens = [T * g.to_ring(big) for g in I.generators]
    gens += [(1 - T) * g.to_ring(big) for g in J.generators]
    K = eliminate(Ideal(big, gens, MonomialOrdering.degrevlex(big.nvars),
                        I.char, I.limits), [t])
    gens = [g.restrict(ring) for g in K.generators]
    return Ideal(ring, gens, I.ordering, I.char, I.limits)


def colon_by_element(I: Ideal, q: Polynomial) -> Ideal:
    """``(I : q)`` computed as ``(I ∩ (q)) / q``."""
    if q.is_zero():
        raise ZeroDivisionError("colon by the zero polynomial")
    K = intersect(I, Ideal(I.ring, [q], I.ordering, I.char, I.limits))
    gens = []
    for g in K.generators:
        r = exact_divide(g, q, I.char)
        if r is None:
            raise InconsistencyError("intersection element not divisible by q")
        gens.append(r)
    return Ideal(I.ring, gens, I.ordering, I.char, I.limits)


def _to_sympy(p: Polynomial, gens):
    return sympy.Poly.from_dict(
        {e: sympy.Rational(int(c.numerator), int(c.denominator))
         for e, c in p._t.items()}, *gens, domain="QQ")


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic (leading coefficient 1 in degrevlex) gcd, via sympy."""
    if a.ring != b.ring:
        raise RingMismatchError("polynomials live in different rings")
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    gens = sympy.symbols(f"v0:{a.ring.nvars}") if a.ring.nvars else ()
    if not gens:
        return a.ring.one()
    g = sympy.gcd(_to_sympy(a, gens), _to_sympy(b, gens))
    out = Polynomial(a.ring, {e: mpq(int(c.p), int(c.q))
                              for e, c in g.as_dict().items()})
    c, _ = out.leading()
    return out.scale(1 / c)


def local_factor(p: Polynomial) -> Polynomial:
    """Drop the irreducible factors of p that do not vanish at the origin.

    Those factors are units in the local ring, so the result generates the
    same ideal germ as p.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    n = p.ring.nvars
    if not n:
        return p.ring.one()
    gens = sympy.symbols(f"v0:{n}")
    _, facs = sympy.factor_list(_to_sympy(p, gens))
    out = p.ring.one()
    for q, e in facs:
        d = q.as_dict()
        if d.get((0,) * n, 0) != 0:
            continue
        f = Polynomial(p.ring, {k: mpq(int(c.p), int(c.q)) for k, c in d.items()})
        for _ in range(e):
            out = out * f
    return out


def squarefree_check(p: Polynomial) -> bool:
    """True iff gcd(p, dp/dx_1, ..., dp/dx_N) is a unit."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    g = p
    for v in p.variables_used():
        g = poly_gcd(g, p.diff(v))
        if g.degree() == 0:
            return True
    return g.degree() == 0


def preimage(I: Ideal, images: Sequence[Polynomial], target: RingSpec,
             ordering=None) -> Ideal:
    """``{q : q(images) in I}`` for the ring map target -> I.ring.

    Graph ideal plus generators of ``I``, source variables eliminated.  A
    variable present in both rings is a shared parameter and must map to
    itself.
    """
    src = I.ring
    shared = [v for v in target.variables if v in src]
    for y, phi in zip(target.variables, images):
        if y in src and phi != src.var(y):
            raise ValueError(f"shared variable {y} must map to itself")
    own = tuple(v for v in target.variables if v not in src)
    big = RingSpec(src.variables + own, {"source": src.variables, "target": own}
                   if own else {"source": src.variables})
    gens = [big.var(y) - phi.to_ring(big)
            for y, phi in zip(target.variables, images) if y not in src]
    gens += [g.to_ring(big) for g in I.generators]
    drop = [v for v in src.variables if v not in shared]
    K = eliminate(Ideal(big, gens, MonomialOrdering.degrevlex(big.nvars),
                        I.char, I.limits), drop)
    gens = [g.restrict(target) for g in K.generators]
    return Ideal(target, gens, ordering or local_ordering(target), I.char,
                 I.limits)
