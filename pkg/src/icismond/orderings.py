"""Monomial orderings.

An ordering is compiled to a sort key on exponent tuples: ``key(a) > key(b)``
iff ``a > b`` in the ordering.  Keys are plain tuples so that Python's tuple
comparison does all the work.
"""

from __future__ import annotations

from fractions import Fraction

LESS, EQUAL, GREATER = -1, 0, 1


def _degrevlex_key(e):
    return (sum(e),) + tuple(-a for a in reversed(e))


def _negdegrevlex_key(e):
    return (-sum(e),) + tuple(-a for a in reversed(e))


def _lex_key(e):
    return tuple(e)


class MonomialOrdering:
    """A total multiplicative order on monomials in ``nvars`` variables.

    Use the classmethod constructors rather than ``__init__``.
    """

    __slots__ = ("kind", "nvars", "params", "key", "_signs")

    def __init__(self, kind, nvars, params, key, signs):
        self.kind = kind
        self.nvars = nvars
        self.params = params
        self.key = key
        # +1 if x_i > 1, -1 if x_i < 1
        self._signs = tuple(signs)

    # -- constructors -------------------------------------------------
    @classmethod
    def degrevlex(cls, nvars):
        return cls("degrevlex", nvars, (), _degrevlex_key, [1] * nvars)

    @classmethod
    def lex(cls, nvars):
        return cls("lex", nvars, (), _lex_key, [1] * nvars)

    @classmethod
    def negdegrevlex(cls, nvars):
        return cls("negdegrevlex", nvars, (), _negdegrevlex_key, [-1] * nvars)

    @classmethod
    def weighted(cls, weights):
        """Weight ordering, ties broken by degrevlex on all variables.

        Negative weights give local variables; zero weights fall back on the
        (global) tiebreak.
        """
        w = tuple(Fraction(x) for x in weights)
        if all(x.denominator == 1 for x in w):
            w = tuple(int(x) for x in w)
        n = len(w)

        def key(e):
            return (sum(a * b for a, b in zip(w, e)),) + _degrevlex_key(e)

        signs = [1 if x >= 0 else -1 for x in w]
        return cls("weighted", n, (w,), key, signs)

    @classmethod
    def block(cls, blocks, nvars=None):
        """``blocks`` is a list of ``(variable_indices, sub_ordering)`` pairs.

        Earlier blocks dominate later ones.  The index lists must partition
        ``range(nvars)``.
        """
        blocks = [(tuple(ix), o) for ix, o in blocks]
        seen = sorted(i for ix, _ in blocks for i in ix)
        if nvars is None:
            nvars = len(seen)
        if seen != list(range(nvars)):
            raise ValueError("block indices must partition the variables")
        for ix, o in blocks:
            if o.nvars != len(ix):
                raise ValueError("sub-ordering size does not match its block")
        subs = [(ix, o.key) for ix, o in blocks]

        def key(e):
            out = ()
            for ix, k in subs:
                out += k(tuple(e[i] for i in ix))
            return out

        signs = [0] * nvars
        for ix, o in blocks:
            for i, s in zip(ix, o._signs):
                signs[i] = s
        return cls("block", nvars, tuple(blocks), key, signs)

    # -- queries ------------------------------------------------------
    @property
    def is_global(self):
        return all(s > 0 for s in self._signs)

    @property
    def is_local(self):
        return all(s < 0 for s in self._signs)

    def compare(self, m1, m2):
        k1, k2 = self.key(tuple(m1)), self.key(tuple(m2))
        if k1 == k2:
            return EQUAL
        return GREATER if k1 > k2 else LESS

    def describe(self):
        if self.kind == "block":
            return "block(" + ", ".join(
                f"{list(ix)}:{o.describe()}" for ix, o in self.params) + ")"
        if self.kind == "weighted":
            return f"weighted({[str(x) for x in self.params[0]]})"
        return self.kind

    def __repr__(self):
        return f"MonomialOrdering({self.describe()}, nvars={self.nvars})"

    def __eq__(self, other):
        return (isinstance(other, MonomialOrdering) and self.kind == other.kind
                and self.nvars == other.nvars and self.params == other.params)

    def __hash__(self):
        return hash((self.kind, self.nvars, self.params))


def compare(order, m1, m2):
    """Compare two exponent vectors; returns LESS, EQUAL or GREATER."""
    return order.compare(m1, m2)


def elimination_order(nvars, drop, local_rest=False):
    """Block order with the ``drop`` indices globally dominant."""
    drop = sorted(drop)
    keep = [i for i in range(nvars) if i not in set(drop)]
    rest = (MonomialOrdering.negdegrevlex(len(keep)) if local_rest
            else MonomialOrdering.degrevlex(len(keep)))
    blocks = [(drop, MonomialOrdering.degrevlex(len(drop)))]
    if keep:
        blocks.append((keep, rest))
    return MonomialOrdering.block(blocks, nvars)
