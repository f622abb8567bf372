"""Independent oracles: plain linear algebra and brute-force enumeration.

Nothing here uses the standard-basis engine.  Arithmetic is on
``fractions.Fraction`` so the engine's gmpy2 path is not shared either.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product


def monomials_below(nvars, degree):
    """All exponent tuples of total degree < degree."""
    out = []
    for e in product(range(degree), repeat=nvars):
        if sum(e) < degree:
            out.append(e)
    return out


def _rank(rows):
    """Rank of sparse rows (dicts column -> Fraction), exact."""
    pivots = {}
    rank = 0
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v}
        while r:
            col = min(r)
            if col in pivots:
                prow = pivots[col]
                f = r[col]
                for c, v in prow.items():
                    w = r.get(c, 0) - f * v
                    if w:
                        r[c] = w
                    else:
                        r.pop(c, None)
            else:
                inv = 1 / r[col]
                pivots[col] = {c: v * inv for c, v in r.items()}
                rank += 1
                break
    return rank


def truncated_colength(gens, nvars, degree):
    """dim C[x]/(I + m^degree), from the span of truncated multiples.

    ``gens`` are dicts exponent tuple -> rational.
    """
    monos = monomials_below(nvars, degree)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for g in gens:
        low = min((sum(e) for e in g), default=degree)
        for m in monos:
            if sum(m) + low >= degree:
                continue
            row = {}
            for e, c in g.items():
                t = tuple(a + b for a, b in zip(e, m))
                if sum(t) < degree:
                    row[index[t]] = Fraction(c)
            if row:
                rows.append(row)
    return len(monos) - _rank(rows)


def local_colength(gens, nvars, max_degree=40):
    """dim O/I at the origin, or None if not certified below max_degree.

    The truncated colength is nondecreasing in the truncation degree D;
    once two consecutive values agree, m^D lies in I + m^(D+1), hence in I
    by Nakayama, and the common value is exact.
    """
    prev = None
    for d in range(1, max_degree + 1):
        cur = truncated_colength(gens, nvars, d)
        if cur == prev:
            return cur
        prev = cur
    return None


def jacobian_dicts(poly, nvars):
    """Partial derivatives of a dict polynomial."""
    out = []
    for i in range(nvars):
        d = {}
        for e, c in poly.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                d[tuple(f)] = d.get(tuple(f), 0) + c * e[i]
        out.append({e: c for e, c in d.items() if c})
    return out


def staircase_count(generators, nvars, box):
    """Monomials in [0, box)^nvars divisible by none of the generators."""
    count = 0
    for e in product(range(box), repeat=nvars):
        if not any(all(a >= b for a, b in zip(e, g)) for g in generators):
            count += 1
    return count
