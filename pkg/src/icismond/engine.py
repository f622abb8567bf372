"""Standard-basis kernel shared by ideals and modules.

Vectors are dicts ``{term: coeff}`` where a term is the exponent tuple with
the component index appended, ``(e_1, ..., e_N, comp)``.  Ideals are the
rank-one case (component 0).  Monomial multipliers are terms with component
0, so ``map(add, t, m)`` multiplies without touching the component.

Global orderings run Buchberger's algorithm with the Gebauer-Moeller
criteria; local and mixed orderings run Mora's normal form with ecart
selection.  Either way the pair selection is the normal strategy (smallest
lcm degree first).
"""

from __future__ import annotations

import heapq

import time
from dataclasses import dataclass
from operator import add, le, sub
from typing import Dict, List, Optional

from gmpy2 import mpq, mpz

from .errors import ResourceError
from .orderings import MonomialOrdering

Vector = Dict[tuple, object]


@dataclass
class Limits:
    """Resource guards; ``None`` disables a guard."""

    max_degree: Optional[int] = 400
    max_basis: Optional[int] = 20000
    timeout: Optional[float] = None
    check_criteria: bool = False
    deadline: Optional[float] = None    # absolute, time.monotonic() based

    def start(self):
        ends = [d for d in (self.deadline,
                            time.monotonic() + self.timeout if self.timeout else None)
                if d is not None]
        return min(ends) if ends else None


DEFAULT_LIMITS = Limits()


class TermOrder:
    """Module ordering: component priority, then monomial order, then index.

    ``priority`` maps a component to an integer; components with a larger
    priority dominate (position-over-term between priority classes,
    term-over-position inside a class).  With no priority map every
    component shares one class, which is plain term-over-position.
    """

    def __init__(self, mono: MonomialOrdering, priority=None, pot=False):
        self.mono = mono
        self.nvars = mono.nvars
        self.priority = dict(priority or {})
        self.pot = pot
        self._cache = {}
        self.is_global = mono.is_global
        mk = mono.key
        prio = self.priority
        cache = self._cache

        if pot:
            def key(t):
                k = cache.get(t)
                if k is None:
                    c = t[-1]
                    k = cache[t] = (prio.get(c, 0), -c, mk(t[:-1]))
                return k
        else:
            def key(t):
                k = cache.get(t)
                if k is None:
                    c = t[-1]
                    k = cache[t] = (prio.get(c, 0), mk(t[:-1]), -c)
                return k
        self.key = key
        ncache = {}

        # flat negated key, for max-heaps
        def nkey(t):
            k = ncache.get(t)
            if k is None:
                a, b, c = key(t)
                if pot:
                    k = (-a, -b) + tuple(-x for x in c)
                else:
                    k = (-a,) + tuple(-x for x in b) + (-c,)
                ncache[t] = k
            return k
        self.nkey = nkey

    def describe(self):
        return f"{self.mono.describe()}/{'pot' if self.pot else 'top'}"


# --------------------------------------------------------------------------
# coefficient fields


class Field:
    """Q (``char == 0``) or GF(p)."""

    def __init__(self, char=0):
        self.char = char

    def convert(self, c):
        if not self.char:
            return mpq(c)
        c = mpq(c)
        p = self.char
        den = int(c.denominator) % p
        if den == 0:
            raise ZeroDivisionError(f"denominator divisible by {p}")
        return mpz(int(c.numerator) * pow(den, -1, p) % p)

    def inv(self, c):
        if not self.char:
            return 1 / c
        return mpz(pow(int(c), -1, self.char))


def convert_vector(v, field):
    out = {}
    for t, c in v.items():
        c = field.convert(c)
        if c:
            out[t] = c
    return out


def tdeg(t):
    return sum(t) - t[-1]


def lead(v, key):
    return max(v, key=key)


def _monic(v, lt, field):
    c = v[lt]
    if c == 1:
        return v
    inv = field.inv(c)
    p = field.char
    if p:
        return {t: a * inv % p for t, a in v.items()}
    return {t: a * inv for t, a in v.items()}


def _divides(s, t):
    return s[-1] == t[-1] and all(map(le, s[:-1], t[:-1]))


def _lcm(s, t):
    return tuple(map(max, s[:-1], t[:-1])) + (s[-1],)


def _quot(t, s):
    # monomial multiplier with component 0
    return tuple(map(sub, t[:-1], s[:-1])) + (0,)


def _axpy(h, c, m, g, p):
    """h -= c * m * g in place (g monic or not; c already scaled)."""
    get = h.get
    if p:
        for t, a in g.items():
            u = tuple(map(add, t, m))
            v = (get(u, 0) - c * a) % p
            if v:
                h[u] = v
            else:
                h.pop(u, None)
    else:
        for t, a in g.items():
            u = tuple(map(add, t, m))
            v = get(u, 0) - c * a
            if v:
                h[u] = v
            else:
                h.pop(u, None)


class _Elem:
    __slots__ = ("v", "lt", "ecart", "deg")

    def __init__(self, v, lt):
        self.v = v
        self.lt = lt
        self.deg = max(map(tdeg, v))
        self.ecart = self.deg - tdeg(lt)


# --------------------------------------------------------------------------
# reduction


def reduce_global(f, basis, order, field, full=True):
    """Normal form w.r.t. a global ordering; basis items are monic _Elem."""
    nkey = order.nkey
    p = field.char
    h = dict(f)
    rem = {}
    heap = [(nkey(t), t) for t in h]
    heapq.heapify(heap)
    push = heapq.heappush
    pop = heapq.heappop
    while heap:
        lt = pop(heap)[1]
        c = h.get(lt)
        if c is None:
            continue
        for g in basis:
            if _divides(g.lt, lt):
                m = _quot(lt, g.lt)
                get = h.get
                for t, a in g.v.items():
                    u = tuple(map(add, t, m))
                    old = get(u)
                    v = (0 if old is None else old) - c * a
                    if p:
                        v %= p
                    if v:
                        h[u] = v
                        if old is None:
                            push(heap, (nkey(u), u))
                    elif old is not None:
                        del h[u]
                break
        else:
            if not full:
                rem.update(h)
                return rem
            rem[lt] = h.pop(lt)
    return rem


def reduce_mora(f, basis, order, field, limits=None, deadline=None):
    """Mora's weak normal form: returns h with u*f - h in <basis>, u a unit."""
    key = order.key
    p = field.char
    h = dict(f)
    T = list(basis)
    steps = 0
    while h:
        lt = max(h, key=key)
        best = None
        for g in T:
            if _divides(g.lt, lt) and (best is None or g.ecart < best.ecart):
                best = g
                if g.ecart == 0:
                    break
        if best is None:
            return h
        hdeg = max(map(tdeg, h))
        hecart = hdeg - tdeg(lt)
        if best.ecart > hecart:
            T.append(_Elem(_monic(dict(h), lt, field), lt))
        _axpy(h, h[lt], _quot(lt, best.lt), best.v, p)
        steps += 1
        if deadline is not None and steps % 64 == 0 and time.monotonic() > deadline:
            raise ResourceError("timeout during Mora normal form")
        if limits and limits.max_degree and hdeg > limits.max_degree:
            raise ResourceError(f"degree bound {limits.max_degree} exceeded")
    return h


def _axpy_trunc(h, c, m, g, p, bound):
    """Like _axpy but drops terms of total degree >= bound."""
    get = h.get
    dm = sum(m)
    for t, a in g.items():
        if tdeg(t) + dm >= bound:
            continue
        u = tuple(map(add, t, m))
        v = get(u, 0) - c * a
        if p:
            v %= p
        if v:
            h[u] = v
        else:
            h.pop(u, None)


def _degree_first(order):
    return (order.mono.kind == "negdegrevlex" and not order.priority
            and not order.pot)


def _is_pure_power(t):
    return sum(1 for a in t[:-1] if a) <= 1


def corner_bound(lts, nvars, comps):
    """Smallest N with every term of degree N (in each of ``comps``) in the
    monomial module spanned by ``lts``; ``None`` if there is none."""
    worst = 0
    for c in comps:
        mons = [t[:-1] for t in lts if t[-1] == c]
        if any(sum(m) == 0 for m in mons):
            continue
        powers = []
        for i in range(nvars):
            ps = [m[i] for m in mons
                  if m[i] and all(m[j] == 0 for j in range(nvars) if j != i)]
            if not ps:
                return None
            powers.append(min(ps))
        top = sum(p - 1 for p in powers) + 1
        prof = staircase_profile([m + (0,) for m in mons], nvars, 1, top + 1)
        last = max(d for d, n in enumerate(prof) if n)
        worst = max(worst, last + 1)
    return worst


def reduce_truncated(f, basis, order, field, bound):
    """Weak normal form in (free module) / m^bound for a local ordering.

    Modulo m^bound the local ordering is a well-order on the finitely many
    surviving terms, so plain top reduction terminates.
    """
    key = order.key
    p = field.char
    h = {t: c for t, c in f.items() if tdeg(t) < bound}
    while h:
        lt = max(h, key=key)
        for g in basis:
            if _divides(g.lt, lt):
                _axpy_trunc(h, h[lt], _quot(lt, g.lt), g.v, p, bound)
                break
        else:
            return h
    return h


# --------------------------------------------------------------------------
# Buchberger / Mora completion


def _spoly(a, b, lcm, p):
    h = {}
    ma = _quot(lcm, a.lt)
    mb = _quot(lcm, b.lt)
    get = h.get
    for t, c in a.v.items():
        h[tuple(map(add, t, ma))] = c
    for t, c in b.v.items():
        u = tuple(map(add, t, mb))
        v = get(u, 0) - c
        if p:
            v %= p
        if v:
            h[u] = v
        else:
            h.pop(u, None)
    return h


class _PairSet:
    """Gebauer-Moeller pair bookkeeping."""

    def __init__(self, key, use_product):
        self.pairs = {}   # (i, j) -> lcm
        self.key = key
        self.use_product = use_product

    def update(self, G, new):
        f = G[new].lt
        keep = {}
        for (i, j), L in self.pairs.items():
            if (_divides(f, L) and _lcm(G[i].lt, f) != L
                    and _lcm(G[j].lt, f) != L):
                continue
            keep[(i, j)] = L
        cand = {}
        for i in range(new):
            g = G[i]
            if g is None or g.lt[-1] != f[-1]:
                continue
            L = _lcm(g.lt, f)
            cand.setdefault(L, []).append(i)
        lcms = sorted(cand, key=lambda L: (tdeg(L), self.key(L)))
        minimal = []
        for L in lcms:
            if any(_divides(M, L) for M in minimal):
                continue
            minimal.append(L)
        for L in minimal:
            group = cand[L]
            if self.use_product and any(
                    all(a == 0 or b == 0 for a, b in zip(G[i].lt[:-1], f[:-1]))
                    for i in group):
                continue
            keep[(min(group), new)] = L
        self.pairs = keep

    def pop(self):
        key = self.key
        best = min(self.pairs, key=lambda ij: (tdeg(self.pairs[ij]),
                                               key(self.pairs[ij]), ij))
        return best, self.pairs.pop(best)

    def __bool__(self):
        return bool(self.pairs)


def standard_basis(gens: List[Vector], order: TermOrder, char=0,
                   limits: Limits = None, reduce=True,
                   truncate: Optional[int] = None) -> List[Vector]:
    """Standard basis of the submodule generated by ``gens``.

    Returns monic vectors forming a minimal standard basis; for global
    orderings with ``reduce`` the basis is fully interreduced.  With
    ``truncate=N`` (local orderings only) the computation runs modulo
    ``m^N`` times the free module, and the basis returned omits the
    implicit generators of ``m^N``.
    """
    if truncate is not None and not order.mono.is_local:
        raise ValueError("truncation needs a local ordering")
    limits = limits or DEFAULT_LIMITS
    deadline = limits.start()
    field = Field(char)
    key = order.key
    p = field.char
    is_global = order.is_global

    G: List[Optional[_Elem]] = []
    # the product criterion needs commuting generators: ideals only
    rank_one = all(t[-1] == 0 for g in gens for t in g)
    pairs = _PairSet(key, use_product=is_global and rank_one
                     and truncate is None)
    # highest corner: once the leading terms contain every term of degree N
    # in every component in play, m^N lies in the module (Nakayama) and
    # terms of degree >= N can be dropped from then on.
    corner_ok = (not is_global and truncate is None and _degree_first(order))
    comps = sorted({t[-1] for g in gens for t in g})
    bound = [truncate]

    def nf(v):
        basis = [g for g in G if g is not None]
        if bound[0] is not None:
            return reduce_truncated(v, basis, order, field, bound[0])
        if is_global:
            return reduce_global(v, basis, order, field, full=False)
        return reduce_mora(v, basis, order, field, limits, deadline)

    def insert(v):
        lt = lead(v, key)
        e = _Elem(_monic(v, lt, field), lt)
        if limits.max_degree is not None and e.deg > limits.max_degree:
            raise ResourceError(
                f"degree bound {limits.max_degree} exceeded ({e.deg})")
        G.append(e)
        if limits.max_basis is not None and len(G) > limits.max_basis:
            raise ResourceError(f"basis size bound {limits.max_basis} exceeded")
        pairs.update(G, len(G) - 1)
        if corner_ok and (_is_pure_power(lt) or
                          (bound[0] is not None and len(G) % 16 == 0)):
            c = corner_bound([g.lt for g in G], order.nvars, comps)
            if c is not None and (bound[0] is None or c < bound[0]):
                bound[0] = c

    start = sorted((convert_vector(g, field) for g in gens),
                   key=lambda v: (max(map(tdeg, v)) if v else 0, len(v)))
    for v in start:
        if not v:
            continue
        h = nf(v)
        if h:
            insert(h)

    while pairs:
        if deadline is not None and time.monotonic() > deadline:
            raise ResourceError("timeout during standard basis computation")
        (i, j), L = pairs.pop()
        s = _spoly(G[i], G[j], L, p)
        if not s:
            continue
        h = nf(s)
        if h:
            insert(h)

    elems = [g for g in G if g is not None]
    # minimalize
    elems.sort(key=lambda g: key(g.lt))
    minimal = []
    for g in elems:
        if not any(_divides(m.lt, g.lt) for m in minimal):
            minimal.append(g)
    if is_global and reduce:
        out = []
        for idx, g in enumerate(minimal):
            others = minimal[:idx] + minimal[idx + 1:]
            r = reduce_global(g.v, others, order, field, full=True)
            out.append(_monic(r, g.lt, field))
        result = out
    else:
        result = [g.v for g in minimal]
    if limits.check_criteria:
        assert_standard_basis(result, order, char)
    return result


def as_elems(basis, order):
    key = order.key
    return [_Elem(v, lead(v, key)) for v in basis]


def normal_form(v: Vector, basis: List[Vector], order: TermOrder, char=0,
                full=True, limits=None) -> Vector:
    """Remainder of ``v`` against a completed standard basis.

    Global orderings give the unique (fully reduced when ``full``) normal
    form; local orderings give Mora's weak normal form, which is zero iff
    ``v`` lies in the localized module.  When the basis has a highest
    corner the reduction runs modulo the corresponding power of m.
    """
    field = Field(char)
    v = convert_vector(v, field)
    elems = as_elems([convert_vector(b, field) for b in basis], order)
    elems = [_Elem(_monic(e.v, e.lt, field), e.lt) for e in elems]
    if order.is_global:
        return reduce_global(v, elems, order, field, full=full)
    if _degree_first(order):
        comps = sorted({t[-1] for t in v})
        c = corner_bound([e.lt for e in elems], order.nvars, comps)
        if c is not None:
            return reduce_truncated(v, elems, order, field, c)
    deadline = limits.start() if limits else None
    return reduce_mora(v, elems, order, field, limits, deadline)


def assert_standard_basis(basis, order, char=0, limits=None):
    """Every S-pair of ``basis`` reduces to zero (Buchberger/Mora criterion)."""
    field = Field(char)
    deadline = limits.start() if limits else None
    elems = [_Elem(v, lead(v, order.key)) for v in basis]
    for a in range(len(elems)):
        for b in range(a + 1, len(elems)):
            if elems[a].lt[-1] != elems[b].lt[-1]:
                continue
            L = _lcm(elems[a].lt, elems[b].lt)
            s = _spoly(elems[a], elems[b], L, field.char)
            if not s:
                continue
            if order.is_global:
                r = reduce_global(s, elems, order, field, full=False)
            else:
                r = reduce_mora(s, elems, order, field, limits, deadline)
            if r:
                raise AssertionError("S-polynomial does not reduce to zero")


# --------------------------------------------------------------------------
# staircases


def leading_terms(basis, order):
    return [lead(v, order.key) for v in basis]


def _count_free(mons, nvars, cap):
    """Monomials in nvars variables outside the monomial ideal ``mons``.

    Returns None if infinitely many.  ``mons`` is a list of exponent tuples.
    """
    if nvars == 0:
        return 0 if any(True for _ in mons) else 1
    if any(sum(m) == 0 for m in mons):
        return 0
    # some variable with no pure power => infinite
    for i in range(nvars):
        if not any(m[i] > 0 and all(m[j] == 0 for j in range(nvars) if j != i)
                   for m in mons):
            return None
    last = nvars - 1
    bound = min(m[last] for m in mons
                if m[last] > 0 and all(m[j] == 0 for j in range(last)))
    total = 0
    for a in range(bound):
        sub_mons = [m[:last] for m in mons if m[last] <= a]
        c = _count_free(sub_mons, last, cap)
        if c is None:
            return None
        total += c
        if cap is not None and total > cap:
            raise ResourceError("staircase exceeds configured size")
    return total


def staircase_size(lts, nvars, rank, cap=None):
    """Number of standard terms; ``None`` means infinite."""
    total = 0
    for c in range(rank):
        mons = [t[:-1] for t in lts if t[-1] == c]
        n = _count_free(mons, nvars, cap)
        if n is None:
            return None
        total += n
    return total


def _enum_free(mons, nvars):
    if nvars == 0:
        if not mons:
            yield ()
        return
    last = nvars - 1
    pure = [m[last] for m in mons
            if m[last] > 0 and all(m[j] == 0 for j in range(last))]
    if not pure:
        raise ValueError("infinite staircase")
    for a in range(min(pure)):
        sub_mons = [m[:last] for m in mons if m[last] <= a]
        for rest in _enum_free(sub_mons, last):
            yield rest + (a,)


def standard_terms(lts, nvars, rank):
    """List the standard terms (exponents + component) of a finite staircase."""
    out = []
    for c in range(rank):
        mons = [t[:-1] for t in lts if t[-1] == c]
        if any(sum(m) == 0 for m in mons):
            continue
        out.extend(e + (c,) for e in _enum_free(mons, nvars))
    return out


def staircase_profile(lts, nvars, rank, bound):
    """Numbers of standard terms in each degree ``0 .. bound-1``."""
    by_comp = {}
    for t in lts:
        by_comp.setdefault(t[-1], []).append(t[:-1])
    profile = [0] * bound
    for c in range(rank):
        mons = by_comp.get(c, [])
        layer = {(0,) * nvars}
        for d in range(bound):
            layer = {e for e in layer
                     if not any(all(map(le, m, e)) for m in mons)}
            if not layer:
                break
            profile[d] += len(layer)
            nxt = set()
            for e in layer:
                for i in range(nvars):
                    nxt.add(e[:i] + (e[i] + 1,) + e[i + 1:])
            layer = nxt
    return profile


def truncated_local_dim(gens: List[Vector], order: TermOrder, nvars, rank,
                        char=0, limits: Limits = None, bound=None):
    """Try to get dim of (local free module)/<gens> by truncation at m^bound.

    Returns ``(dim, basis)`` when the staircase dies out before degree
    ``bound - 1`` (then m^(bound-1) lies in the module by Nakayama, and the
    truncated count is exact), otherwise ``(None, basis)``.
    """
    basis = standard_basis(gens, order, char=char, limits=limits,
                           truncate=bound)
    lts = leading_terms(basis, order)
    profile = staircase_profile(lts, nvars, rank, bound)
    if profile[-1]:
        return None, basis
    return sum(profile), basis


def _term_count(nvars, bound, rank):
    from math import comb
    return comb(bound - 1 + nvars, nvars) * rank


TRUNCATION_BOUNDS = (6, 10, 16, 24, 36, 54)
TRUNCATION_TERMS = 150000


def local_dimension(gens: List[Vector], order: TermOrder, nvars, rank,
                    char=0, limits: Limits = None):
    """dim of (local free module of ``rank``)/<gens>; ``None`` if infinite.

    Finite answers are found by truncation at growing powers of the maximal
    ideal, which avoids the coefficient and degree growth of Mora's normal
    form.  If no bound within the size budget certifies the answer, Mora's
    algorithm decides (and detects infinite quotients).
    """
    gens = [g for g in gens if g]
    if not gens:
        return 0 if nvars == 0 else None
    low = max(min(map(tdeg, g)) for g in gens)
    for bound in TRUNCATION_BOUNDS:
        if bound <= low + 1:
            continue
        if _term_count(nvars, bound, rank) > TRUNCATION_TERMS:
            break
        if limits and limits.max_degree and bound > limits.max_degree:
            break
        dim, _ = truncated_local_dim(gens, order, nvars, rank, char, limits,
                                     bound)
        if dim is not None:
            return dim
    basis = standard_basis(gens, order, char=char, limits=limits)
    return staircase_size(leading_terms(basis, order), nvars, rank)
