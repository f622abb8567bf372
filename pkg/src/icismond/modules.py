"""Submodules of free modules: bases, syzygies, lifts, subquotients, Fitting ideals.

Syzygies and lifts are computed globally on the augmented module
``<(g_i, e_i)>`` with the original components dominant; localization at the
origin is flat, so the global syzygy module localizes to the local one.
Only vector-space dimensions are computed with a local (Mora) ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence

from gmpy2 import mpq

from . import engine
from .engine import TermOrder
from .errors import ContainmentError, RingMismatchError, ValidationError
from .ideals import (Ideal, QuotientDimension, local_ordering, standard_monomials,
                     vdim_quotient)
from .orderings import MonomialOrdering, elimination_order
from .ring import Polynomial, RingSpec


class FreeModuleElement:
    """A vector of polynomials over a common ring."""

    __slots__ = ("ring", "components")

    def __init__(self, ring: RingSpec, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("rank must be positive")
        for c in comps:
            if c.ring != ring:
                raise RingMismatchError("component not in the module's ring")
        self.ring = ring
        self.components = comps

    @classmethod
    def unit(cls, ring, rank, i):
        return cls(ring, [ring.one() if j == i else ring.zero()
                          for j in range(rank)])

    @classmethod
    def from_vector(cls, v, ring, rank, offset=0):
        parts = [dict() for _ in range(rank)]
        for t, c in v.items():
            parts[t[-1] - offset][t[:-1]] = mpq(c)
        return cls(ring, [Polynomial._raw(ring, p) for p in parts])

    @property
    def rank(self):
        return len(self.components)

    def to_vector(self, offset=0):
        v = {}
        for i, p in enumerate(self.components):
            for e, c in p._t.items():
                v[e + (i + offset,)] = c
        return v

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def __add__(self, other):
        return FreeModuleElement(self.ring, [a + b for a, b in
                                             zip(self.components, other.components)])

    def __sub__(self, other):
        return FreeModuleElement(self.ring, [a - b for a, b in
                                             zip(self.components, other.components)])

    def scale(self, p: Polynomial):
        return FreeModuleElement(self.ring, [p * c for c in self.components])

    def __eq__(self, other):
        return (isinstance(other, FreeModuleElement)
                and self.components == other.components)

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def combine(coeffs: Sequence[Polynomial], gens: Sequence[FreeModuleElement]):
    """``sum coeffs[i] * gens[i]``."""
    ring = gens[0].ring
    acc = [ring.zero()] * gens[0].rank
    for a, g in zip(coeffs, gens):
        if a.is_zero():
            continue
        acc = [x + a * y for x, y in zip(acc, g.components)]
    return FreeModuleElement(ring, acc)


def _as_elements(gens, ring=None):
    out = []
    for g in gens:
        if isinstance(g, Polynomial):
            g = FreeModuleElement(g.ring, [g])
        out.append(g)
    return out


@dataclass
class SubmodulePresentation:
    """Generators of a submodule of a free module, plus relations among them.

    ``relations`` are vectors over the generator index set (columns of a
    presentation matrix).  A zero module is marked with ``zero=True`` and an
    empty generator list.
    """

    ring: RingSpec
    ambient_rank: int
    generators: List[FreeModuleElement]
    relations: Optional[List[FreeModuleElement]] = None
    zero: bool = False

    def __post_init__(self):
        if not self.generators and not self.zero:
            self.zero = True

    def check(self):
        """Every relation contracted against the generators vanishes."""
        for r in self.relations or []:
            if not combine(r.components, self.generators).is_zero():
                return False
        return True

    @classmethod
    def of(cls, gens, ring=None, with_relations=True):
        gens = _as_elements(gens)
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            return cls(ring, 0, [], [], zero=True)
        rels = syzygies(gens).generators if with_relations else None
        return cls(gens[0].ring, gens[0].rank, gens, rels)


# --------------------------------------------------------------------------
# standard bases of modules


def module_order(ring, mono=None, pot=False, priority=None):
    return TermOrder(mono or local_ordering(ring), priority=priority, pot=pot)


def module_standard_basis(gens: Sequence[FreeModuleElement], order: TermOrder = None,
                          char=0, limits=None) -> List[FreeModuleElement]:
    gens = _as_elements(gens)
    if not gens:
        return []
    ring, rank = gens[0].ring, gens[0].rank
    order = order or module_order(ring)
    vecs = engine.standard_basis([g.to_vector() for g in gens], order,
                                 char=char, limits=limits)
    return [FreeModuleElement.from_vector(v, ring, rank) for v in vecs]


def module_vdim(gens: Sequence[FreeModuleElement], rank: int, ring: RingSpec,
                char=0, limits=None) -> QuotientDimension:
    """dim_C of (local free module of ``rank``) / <gens>."""
    vecs = [g.to_vector() for g in gens if not g.is_zero()]
    if not vecs:
        return QuotientDimension(rank if ring.nvars == 0 or rank == 0 else None)
    order = module_order(ring)
    return QuotientDimension(engine.local_dimension(vecs, order, ring.nvars,
                                                    rank, char, limits))


def module_standard_terms(gens, rank, ring, char=0, limits=None):
    vecs = [g.to_vector() for g in gens if not g.is_zero()]
    order = module_order(ring)
    basis = engine.standard_basis(vecs, order, char=char, limits=limits)
    lts = engine.leading_terms(basis, order)
    return engine.standard_terms(lts, ring.nvars, rank)


# --------------------------------------------------------------------------
# syzygies and lifts


class _Augmented:
    """Global GB of <(g_i, e_i)> with original components dominant."""

    def __init__(self, gens: List[FreeModuleElement], char=0, limits=None):
        self.ring = gens[0].ring
        self.rank = gens[0].rank
        self.m = len(gens)
        self.char = char
        self.limits = limits
        r = self.rank
        vecs = []
        for i, g in enumerate(gens):
            v = g.to_vector()
            v[(0,) * self.ring.nvars + (r + i,)] = mpq(1)
            vecs.append(v)
        prio = {c: 1 for c in range(r)}
        self.order = TermOrder(MonomialOrdering.degrevlex(self.ring.nvars), prio)
        self.basis = engine.standard_basis(vecs, self.order, char=char,
                                           limits=limits)

    def syzygies(self):
        key = self.order.key
        out = []
        for v in self.basis:
            if engine.lead(v, key)[-1] >= self.rank:
                out.append(FreeModuleElement.from_vector(v, self.ring, self.m,
                                                         offset=self.rank))
        return out

    def lift(self, q: FreeModuleElement):
        """Coefficients c with q = sum c_i g_i, or None if q not in <g>."""
        field = engine.Field(self.char)
        elems = engine.as_elems(self.basis, self.order)
        v = engine.convert_vector(q.to_vector(), field)
        r = engine.reduce_global(v, elems, self.order, field, full=False)
        if r and engine.lead(r, self.order.key)[-1] < self.rank:
            return None
        coeffs = FreeModuleElement.from_vector(r, self.ring, self.m,
                                               offset=self.rank) if r else \
            FreeModuleElement(self.ring, [self.ring.zero()] * self.m)
        return [-c for c in coeffs.components]


def syzygies(gens: Sequence[FreeModuleElement], char=0,
             limits=None) -> SubmodulePresentation:
    """Generators of {a : sum a_i g_i = 0}."""
    gens = _as_elements(gens)
    if not gens:
        raise ValueError("need at least one generator")
    aug = _Augmented(gens, char, limits)
    syz = aug.syzygies()
    ring = gens[0].ring
    return SubmodulePresentation(ring, len(gens), syz, None, zero=not syz)


def lift(inner: Sequence[FreeModuleElement], outer: Sequence[FreeModuleElement],
         char=0, limits=None):
    """Express each inner element in terms of the outer generators."""
    inner, outer = _as_elements(inner), _as_elements(outer)
    aug = _Augmented(outer, char, limits)
    out = []
    for q in inner:
        c = aug.lift(q)
        if c is None:
            raise ContainmentError(f"{q!r} is not in the outer module")
        out.append(c)
    return out


def subquotient_dim(outer, inner, char=0, limits=None) -> QuotientDimension:
    """dim_C <outer>/<inner> in the localization at the origin.

    Presented as the free module of rank |outer| modulo lifts of ``inner``
    plus the syzygies of ``outer``; containment is checked.
    """
    outer = [g for g in _as_elements(outer) if not g.is_zero()]
    inner = [g for g in _as_elements(inner) if not g.is_zero()]
    if not outer:
        if inner:
            raise ContainmentError("nonzero inner module in zero outer module")
        return QuotientDimension(0)
    ring = outer[0].ring
    aug = _Augmented(outer, char, limits)
    rels = list(aug.syzygies())
    for q in inner:
        c = aug.lift(q)
        if c is None:
            raise ContainmentError(f"{q!r} is not in the outer module")
        rels.append(FreeModuleElement(ring, c))
    return module_vdim(rels, len(outer), ring, char, limits)


# --------------------------------------------------------------------------
# finite ring maps


@dataclass
class RingMap:
    """Ring map target -> source given by one source polynomial per target
    variable.  Variables shared by both rings are parameters mapped to
    themselves."""

    source: RingSpec
    target: RingSpec
    images: List[Polynomial]

    def __post_init__(self):
        if len(self.images) != self.target.nvars:
            raise ValueError("need one image per target variable")
        for p in self.images:
            if p.ring != self.source:
                raise RingMismatchError("image not in the source ring")

    def pullback(self, p: Polynomial) -> Polynomial:
        return p.compose(self.images, self.source)

    def jacobian(self):
        """Rows are differentials of the components."""
        return [[p.diff(v) for v in self.source.variables] for p in self.images]

    def fiber_ideal(self):
        """Pullback of the target maximal ideal (source ring, local)."""
        return Ideal(self.source, list(self.images))


@dataclass
class PresentationMatrix:
    """Presentation of the source ring as a module over the target ring.

    ``basis`` lists the source monomials used as module generators,
    ``entries`` is a rows x cols matrix over the target ring whose columns
    are relations.
    """

    ring: RingSpec
    basis: List[tuple]
    entries: List[List[Polynomial]]

    @property
    def rows(self):
        return len(self.basis)

    @property
    def cols(self):
        return len(self.entries[0]) if self.entries else 0

    def column(self, j):
        return [row[j] for row in self.entries]


def finite_basis(phi: RingMap, source_ideal=()):
    """Standard monomials of source/(phi^* m_target + source_ideal), local
    ordering."""
    fib = phi.fiber_ideal() + list(source_ideal)
    if not vdim_quotient(fib).finite:
        raise ValidationError("map germ is not finite (infinite fiber algebra)")
    return standard_monomials(fib)


def pushforward_module(phi: RingMap, rank: int,
                       relations: Sequence[FreeModuleElement] = (), char=0,
                       limits=None, source_ideal=()):
    """Present source^rank / <relations> as a module over the target ring.

    Generators are ``b e_i`` for ``b`` in ``finite_basis(phi, source_ideal)``;
    they span by Nakayama when ``source_ideal * e_i`` lies in the relations
    and the map is finite on its zero set.  Returns ``(generators, columns)``
    where generators are ``(monomial, component)`` pairs and each column is
    a list of target polynomials, one per generator.  The relations are the
    elements free of source variables in a module elimination over
    source x target of ``eps_s - b_s`` and ``(y_j - phi_j) e_i``.
    """
    basis = finite_basis(phi, source_ideal)
    src, tgt = phi.source, phi.target
    shared = [v for v in tgt.variables if v in src]
    own = tuple(v for v in tgt.variables if v not in src)
    big = RingSpec(src.variables + own)
    n = big.nvars
    gens = [(b, i) for i in range(rank) for b in basis]
    m = len(gens)
    vecs = []
    pad = (0,) * len(own)
    for r in relations:
        if r.ring != src:
            raise RingMismatchError("relation not over the source ring")
        v = {}
        for i, p in enumerate(r.components):
            for e, c in p._t.items():
                v[e + pad + (m + i,)] = c
        if v:
            vecs.append(v)
    for y, p in zip(tgt.variables, phi.images):
        if y in src:
            continue
        g = big.var(y) - p.to_ring(big)
        for i in range(rank):
            vecs.append({e + (m + i,): c for e, c in g._t.items()})
    zero = (0,) * n
    for a, (b, i) in enumerate(gens):
        vecs.append({zero + (a,): mpq(1), b + pad + (m + i,): mpq(-1)})
    drop = [big.index(v) for v in src.variables if v not in shared]
    mono = elimination_order(n, drop)
    order = TermOrder(mono, priority={m + i: 1 for i in range(rank)})
    gb = engine.standard_basis(vecs, order, char=char, limits=limits)
    dset = set(drop)
    cols = []
    key = order.key
    for v in gb:
        if engine.lead(v, key)[-1] >= m:
            continue
        if any(t[i] for t in v for i in dset):
            continue
        col = [dict() for _ in range(m)]
        for t, c in v.items():
            col[t[-1]][t[:-1]] = mpq(c)
        cols.append([Polynomial._raw(big, d).restrict(tgt) for d in col])
    return gens, cols


def pushforward_presentation(phi: RingMap, char=0, limits=None) -> PresentationMatrix:
    """Relations among the standard monomials b_a over the target ring."""
    gens, cols = pushforward_module(phi, 1, (), char, limits)
    m = len(gens)
    entries = [[col[a] for col in cols] for a in range(m)]
    return PresentationMatrix(phi.target, [b for b, _ in gens], entries)


def _det(mat):
    """Laplace expansion along the first row with memoized minors."""
    n = len(mat)
    if n == 0:
        return None

    @lru_cache(maxsize=None)
    def minor(rows, cols):
        if len(rows) == 1:
            return mat[rows[0]][cols[0]]
        r = rows[0]
        rest = rows[1:]
        acc = None
        for k, c in enumerate(cols):
            a = mat[r][c]
            if a.is_zero():
                continue
            sub = minor(rest, cols[:k] + cols[k + 1:])
            term = a * sub if k % 2 == 0 else -(a * sub)
            acc = term if acc is None else acc + term
        return acc if acc is not None else mat[0][0].ring.zero()

    return minor(tuple(range(n)), tuple(range(n)))


def minors(entries, size):
    rows = len(entries)
    cols = len(entries[0]) if entries else 0
    out = []
    for R in combinations(range(rows), size):
        for C in combinations(range(cols), size):
            sub = [[entries[i][j] for j in C] for i in R]
            d = _det(sub)
            if d is not None and not d.is_zero():
                out.append(d)
    return out


def fitting_ideal(P: PresentationMatrix, i: int, ordering=None) -> Ideal:
    """Ideal of (m-i)-minors; the unit ideal when ``m - i <= 0``."""
    m = P.rows
    if i < 0:
        raise ValueError("Fitting index must be non-negative")
    if i > m:
        raise ValueError("Fitting index out of range")
    if i == m:
        return Ideal(P.ring, [P.ring.one()], ordering)
    gens = list(dict.fromkeys(minors(P.entries, m - i)))
    return Ideal(P.ring, gens, ordering)
