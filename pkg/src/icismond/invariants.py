"""Milnor and Tjurina numbers, and syntactic weighted homogeneity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Tuple

import sympy

from .ideals import Ideal, QuotientDimension, normal_form, vdim_quotient
from .modules import FreeModuleElement, module_vdim
from .ring import Polynomial


def jacobian_ideal(g: Polynomial, variables=None, char=0, limits=None) -> Ideal:
    names = variables or g.ring.variables
    return Ideal(g.ring, [g.diff(v) for v in names], char=char, limits=limits)


def milnor_number(g: Polynomial, char=0, limits=None) -> QuotientDimension:
    """dim O/J(g) at the origin."""
    _at_origin(g)
    return vdim_quotient(jacobian_ideal(g, char=char, limits=limits))


def tjurina_hypersurface(g: Polynomial, char=0, limits=None) -> QuotientDimension:
    """dim O/(J(g) + (g)) at the origin."""
    _at_origin(g)
    J = jacobian_ideal(g, char=char, limits=limits)
    return vdim_quotient(J + [g])


def tjurina_icis(h: Sequence[Polynomial], char=0, limits=None) -> QuotientDimension:
    """dim T^1 = O^k / (columns of dh + h O^k).

    With ``k = 0`` (smooth source) the answer is 0.
    """
    h = list(h)
    if not h:
        return QuotientDimension(0)
    for p in h:
        _at_origin(p)
    ring = h[0].ring
    k = len(h)
    gens = [FreeModuleElement(ring, [p.diff(v) for p in h])
            for v in ring.variables]
    for p in h:
        for i in range(k):
            gens.append(FreeModuleElement(
                ring, [p if j == i else ring.zero() for j in range(k)]))
    return module_vdim(gens, k, ring, char, limits)


def in_own_jacobian(g: Polynomial, char=0, limits=None) -> bool:
    """Whether g lies in J(g) locally, i.e. K(g) = 0."""
    J = jacobian_ideal(g, char=char, limits=limits)
    return normal_form(g, J).is_zero()


def _at_origin(p: Polynomial):
    if p.constant_term() != 0:
        raise ValueError("polynomial does not vanish at the origin")


@dataclass(frozen=True)
class WeightCertificate:
    weights: Tuple[Fraction, ...]
    degree: Fraction

    def check(self, g: Polynomial) -> bool:
        return all(sum(w * a for w, a in zip(self.weights, e)) == self.degree
                   for e in g.terms_dict)

    def to_json(self):
        return {"weights": [str(w) for w in self.weights],
                "degree": str(self.degree)}


def weighted_homogeneous_weights(g: Polynomial) -> Optional[WeightCertificate]:
    """Positive weights making every exponent of ``g`` the same degree.

    Solves <w, a> = d exactly.  Variables absent from ``g`` get weight 1.
    With d fixed to 1 the solutions form an affine family; a strictly
    positive member is found as the barycentre of the nonnegative vertices.
    """
    if g.is_zero():
        raise ValueError("zero polynomial")
    ring = g.ring
    used = [i for i in range(ring.nvars)
            if any(e[i] for e in g.terms_dict)]
    if not used:
        return None
    exps = [tuple(e[i] for i in used) for e in g.terms_dict]
    m = len(used)
    A = sympy.Matrix([list(e) for e in exps])
    b = sympy.Matrix([1] * len(exps))
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    free = list(params)
    point = _positive_point(sol, free, m)
    if point is None:
        return None
    weights = [Fraction(1)] * ring.nvars
    for i, w in zip(used, point):
        weights[i] = w
    # scale to integers for readability
    den = 1
    for w in point:
        den = den * w.denominator // _gcd(den, w.denominator)
    weights = tuple(w * den if i in used else Fraction(1)
                    for i, w in enumerate(weights))
    cert = WeightCertificate(weights, Fraction(den))
    if not cert.check(g):
        raise AssertionError("weight certificate does not verify")
    return cert


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _positive_point(sol, free, m):
    if not free:
        vals = [Fraction(str(x)) for x in sol]
        return vals if all(v > 0 for v in vals) else None
    # The feasible set {w >= 0 : A w = 1} is bounded (every used variable
    # has a positive exponent somewhere), so it is the hull of its vertices
    # and has a strictly positive point iff the vertex average does.
    candidates = []
    for zero_set in combinations(range(m), len(free)):
        eqs = [sol[i] for i in zero_set]
        s = sympy.solve(eqs, free, dict=True)
        if not s:
            continue
        vec = [sol[i].subs(s[0]) for i in range(m)]
        if any(v.free_symbols for v in vec):
            continue
        vec = [Fraction(str(v)) for v in vec]
        if all(v >= 0 for v in vec):
            candidates.append(vec)
    if candidates:
        avg = [sum(c[i] for c in candidates) / len(candidates) for i in range(m)]
        if all(v > 0 for v in avg):
            return avg
    return None
