"""Map germs on an ICIS: image, conductor, Jacobian modules, codimension.

Notation: the source has coordinates x (n+k of them), ``h`` cuts out X,
``f`` has n+1 components.  ``fhat = (f, h)`` maps C^{n+k} to C^{n+1+k}
with target coordinates (y, z).  Unfoldings add parameters u which are
shared by source and target.

Elimination and preimages run on global polynomial representatives.  They
agree with the germ-level constructions when the fibre of ``fhat`` over
the origin is the origin alone; ``fiber_is_origin`` checks that.

The ``char`` option only reaches the dimension counts (standard bases of
relation modules and local quotients); eliminations stay over Q.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

from . import engine
from .engine import Limits
from .errors import (ContainmentError, InconsistencyError, ResourceError,
                     ValidationError)
from .ideals import (Ideal, QuotientDimension, colon_by_element, normal_form,
                     local_factor, poly_gcd, preimage, squarefree_check,
                     vdim_quotient)
from .invariants import tjurina_icis
from .modules import (FreeModuleElement, PresentationMatrix, RingMap,
                      _Augmented, _det, fitting_ideal, minors, module_standard_terms,
                      module_vdim, pushforward_module, pushforward_presentation)
from .orderings import MonomialOrdering
from .ring import Polynomial, RingSpec, exact_divide, format_polynomial


# --------------------------------------------------------------------------
# input types


@dataclass(frozen=True)
class GermSpec:
    n: int
    k: int
    ring: RingSpec
    h: Tuple[Polynomial, ...]
    f: Tuple[Polynomial, ...]

    @classmethod
    def from_strings(cls, n, k, variables, h, f):
        ring = RingSpec(variables, {"x": tuple(variables)} if variables else {})
        return cls(n, k, ring, tuple(ring.parse(s) for s in h),
                   tuple(ring.parse(s) for s in f))

    @property
    def variables(self):
        return self.ring.variables

    def check_shape(self):
        if self.n < 1:
            raise ValidationError("n must be at least 1")
        if self.k < 0:
            raise ValidationError("k must be non-negative")
        if self.ring.nvars != self.n + self.k:
            raise ValidationError(
                f"need n+k = {self.n + self.k} source variables, got {self.ring.nvars}")
        if len(self.h) != self.k:
            raise ValidationError(f"need k = {self.k} ICIS equations, got {len(self.h)}")
        if len(self.f) != self.n + 1:
            raise ValidationError(
                f"need n+1 = {self.n + 1} map components, got {len(self.f)}")
        for name, ps in (("h", self.h), ("f", self.f)):
            for i, p in enumerate(ps):
                if p.constant_term() != 0:
                    raise ValidationError(f"{name}[{i}] does not vanish at the origin")

    def to_json(self):
        return {"n": self.n, "k": self.k, "vars": list(self.variables),
                "h": [format_polynomial(p) for p in self.h],
                "f": [format_polynomial(p) for p in self.f]}

    def with_f(self, f):
        return GermSpec(self.n, self.k, self.ring, self.h, tuple(f))


@dataclass(frozen=True)
class UnfoldingSpec:
    """F(x, u) = fhat(x) + (terms vanishing at u = 0), components in (y, z)
    order; the u coordinates map to themselves."""

    base: GermSpec
    u_vars: Tuple[str, ...]
    ring: RingSpec          # x and u
    F: Tuple[Polynomial, ...]

    @property
    def r(self):
        return len(self.u_vars)

    def check(self):
        base = self.base
        fhat = list(base.f) + list(base.h)
        if len(self.F) != len(fhat):
            raise ValidationError(
                f"unfolding needs {len(fhat)} components, got {len(self.F)}")
        for a, b in zip(self.F, fhat):
            if a.subs_zero(self.u_vars) != b.to_ring(self.ring):
                raise ValidationError("unfolding does not restrict to fhat at u = 0")

    def to_json(self):
        return {"u_vars": list(self.u_vars),
                "F": [format_polynomial(p) for p in self.F]}


def unfolding_from_strings(base: GermSpec, u_vars, F) -> UnfoldingSpec:
    u_vars = tuple(u_vars)
    clash = set(u_vars) & set(base.variables)
    if clash:
        raise ValidationError(f"unfolding parameters clash with source variables: {sorted(clash)}")
    ring = _source_ring(base, u_vars)
    U = UnfoldingSpec(base, u_vars, ring, tuple(ring.parse(s) for s in F))
    U.check()
    return U


def _source_ring(base, u_vars):
    blocks = {"x": base.variables}
    if u_vars:
        blocks["u"] = tuple(u_vars)
    return RingSpec(tuple(base.variables) + tuple(u_vars), blocks)


def _fresh(base, taken):
    name, i = base, 0
    while name in taken:
        i += 1
        name = f"{base}_{i}"
    return name


def target_names(spec: GermSpec, extra=()):
    taken = set(spec.variables) | set(extra)
    ys, zs = [], []
    for i in range(spec.n + 1):
        ys.append(_fresh(f"Y{i + 1}", taken))
        taken.add(ys[-1])
    for i in range(spec.k):
        zs.append(_fresh(f"Z{i + 1}", taken))
        taken.add(zs[-1])
    return ys, zs


# --------------------------------------------------------------------------
# fhat and its image


@dataclass
class MapData:
    """A finite map germ C^s -> C^{s+1} (with optional shared parameters).

    ``y`` and ``z`` name the target coordinates; for unfoldings ``u`` are
    the shared parameters, in both rings.
    """

    phi: RingMap
    y: Tuple[str, ...]
    z: Tuple[str, ...]
    u: Tuple[str, ...] = ()

    @property
    def source(self):
        return self.phi.source

    @property
    def target(self):
        return self.phi.target

    @property
    def components(self):
        return list(self.phi.images)


def build_fhat(spec: GermSpec, limits=None) -> MapData:
    ys, zs = target_names(spec)
    tgt = RingSpec(ys + zs, {"y": tuple(ys), **({"z": tuple(zs)} if zs else {})})
    images = list(spec.f) + list(spec.h)
    phi = RingMap(spec.ring, tgt, images)
    data = MapData(phi, tuple(ys), tuple(zs))
    check_finite(data, limits)
    return data


def build_unfolding_map(U: UnfoldingSpec, limits=None) -> MapData:
    spec = U.base
    ys, zs = target_names(spec, U.u_vars)
    blocks = {"y": tuple(ys)}
    if zs:
        blocks["z"] = tuple(zs)
    if U.u_vars:
        blocks["u"] = U.u_vars
    tgt = RingSpec(ys + zs + list(U.u_vars), blocks)
    images = list(U.F) + [U.ring.var(u) for u in U.u_vars]
    data = MapData(RingMap(U.ring, tgt, images), tuple(ys), tuple(zs), U.u_vars)
    check_finite(data, limits)
    return data


def check_finite(data: MapData, limits=None):
    fib = Ideal(data.source, data.components, limits=limits)
    if not vdim_quotient(fib).finite:
        raise ValidationError("fhat is not finite: the map is not finite on X")


def fiber_is_origin(data: MapData, limits=None) -> bool:
    """Whether the global fibre over 0 is the origin alone.

    Compares the global and local lengths of source/(pullback of m).
    """
    comps = data.components
    loc = vdim_quotient(Ideal(data.source, comps, limits=limits))
    glob = vdim_quotient(Ideal(data.source, comps,
                               MonomialOrdering.degrevlex(data.source.nvars),
                               limits=limits))
    return glob.finite and glob == loc


@dataclass
class ImageData:
    ghat: Polynomial
    g: Polynomial
    presentation: Optional[PresentationMatrix] = None
    fitting0_matches: Optional[bool] = None
    lam: Optional[Polynomial] = None
    conductor: Optional[Ideal] = None
    fitting1: Optional[Ideal] = None


def _normalize(p: Polynomial) -> Polynomial:
    c, _ = p.leading(MonomialOrdering.degrevlex(p.ring.nvars))
    return p.scale(1 / c)


def image_equation(data: MapData, limits=None, check_fitting=True,
                   method="elimination") -> ImageData:
    """Reduced equation of the image.

    ``method="elimination"`` eliminates the source variables from the graph
    ideal; ``method="fitting"`` takes the determinant of the square
    presentation of the pushforward (Mond-Pellikaan), which is much cheaper
    for unfoldings.  Factors that are units at the origin are dropped.
    With ``check_fitting`` the other path is recorded for comparison.
    """
    src = data.source
    P = None
    if method == "fitting":
        P = pushforward_presentation(data.phi, limits=limits)
        if P.rows == 0 or P.cols < P.rows:
            raise ValidationError(
                f"pushforward presentation is {P.rows}x{P.cols}")
        # F_0 is principal, so the gcd of the maximal minors generates it
        raw = None
        for d in minors(P.entries, P.rows):
            raw = d if raw is None else poly_gcd(raw, d)
        if raw is None:
            raise ValidationError("all maximal minors of the presentation vanish")
    elif method == "elimination":
        K = preimage(Ideal(src, [], limits=limits), data.components, data.target)
        gens = [p for p in K.generators if not p.is_zero()]
        if len(gens) != 1:
            raise ValidationError(
                f"image ideal is not principal ({len(gens)} generators)")
        raw = gens[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    ghat = _normalize(local_factor(raw))
    if ghat.constant_term() != 0:
        raise ValidationError("image equation does not vanish at the origin")
    if not data.phi.pullback(ghat).is_zero():
        raise InconsistencyError("image equation does not vanish on the image")
    if not squarefree_check(ghat):
        raise ValidationError(
            "image equation is not reduced: f is not generically one-to-one")
    ysub = data.target
    small = RingSpec(data.y, {"y": data.y})
    g = ghat.subs_zero(list(data.z) + list(data.u)).restrict(small)
    out = ImageData(ghat, g)
    out.presentation = P
    if check_fitting:
        if P is None:
            P = pushforward_presentation(data.phi, limits=limits)
            out.presentation = P
        F0 = fitting_ideal(P, 0)
        out.fitting0_matches = F0.equals(Ideal(ysub, [ghat]))
    return out


def jacobian_minors(data: MapData):
    """Maximal minors of d(fhat) with row l deleted, l = 0 .. s."""
    rows = data.phi.jacobian()
    out = []
    for l in range(len(rows)):
        sub = rows[:l] + rows[l + 1:]
        d = _det(sub)
        out.append(d if d is not None else data.source.one())
    return out


def conductor_lambda(data: MapData, ghat: Polynomial) -> Polynomial:
    """Piene's lambda: d_l ghat o fhat = (-1)^l lambda minor_l for every l."""
    if data.target.nvars != data.source.nvars + 1:
        raise ValidationError("conductor needs a map C^s -> C^{s+1}")
    mins = jacobian_minors(data)
    parts = [data.phi.pullback(ghat.diff(v)) for v in data.target.variables]
    lam = None
    for l, (num, mn) in enumerate(zip(parts, mins), start=1):
        if mn.is_zero():
            continue
        den = mn if l % 2 == 0 else -mn
        lam = exact_divide(num, den)
        if lam is None:
            raise InconsistencyError(f"d_{l} ghat o fhat is not divisible by minor {l}")
        break
    if lam is None:
        raise ValidationError("all maximal minors vanish: fhat is not generically immersive")
    for l, (num, mn) in enumerate(zip(parts, mins), start=1):
        sign = 1 if l % 2 == 0 else -1
        if not (num - lam * mn.scale(sign)).is_zero():
            raise InconsistencyError(f"Piene identity fails for l = {l}")
    return lam


def conductor_data(data: MapData, img: ImageData, limits=None):
    """Fill lambda, the conductor and F_1, and compare (lambda) with F_1 O."""
    img.lam = conductor_lambda(data, img.ghat)
    img.conductor = Ideal(data.source, [img.lam], limits=limits)
    if img.presentation is None:
        img.presentation = pushforward_presentation(data.phi, limits=limits)
    img.fitting1 = fitting_ideal(img.presentation, 1)
    pulled = Ideal(data.source, [data.phi.pullback(p)
                                 for p in img.fitting1.generators], limits=limits)
    return pulled.equals(img.conductor)


# --------------------------------------------------------------------------
# N(ghat), M(g) and the relative module


@dataclass
class JacobianModule:
    """P / (J_y + extra): P = preimage of the pulled back Jacobian ideal."""

    ring: RingSpec
    P: List[Polynomial]
    Jy: List[Polynomial]
    relations: List[FreeModuleElement]   # syz(P) + lifts of Jy
    _aug: object = field(default=None, repr=False)

    def lift(self, q: Polynomial):
        c = self._aug.lift(FreeModuleElement(self.ring, [q]))
        if c is None:
            raise ContainmentError(f"{q} is not in the preimage ideal")
        return FreeModuleElement(self.ring, c)

    def specialised_dim(self, params: Sequence[str], power=1, char=0,
                        limits=None) -> QuotientDimension:
        """dim M / (params)^power M, read in the local ring."""
        rank = len(self.P)
        gens = list(self.relations)
        if params:
            idx = [self.ring.index(v) for v in params]
            for combo in combinations_with_replacement(idx, power):
                e = [0] * self.ring.nvars
                for i in combo:
                    e[i] += 1
                m = self.ring.monomial(e)
                for j in range(rank):
                    gens.append(FreeModuleElement(
                        self.ring, [m if a == j else self.ring.zero()
                                    for a in range(rank)]))
        return module_vdim(gens, rank, self.ring, char, limits)


def _drop_redundant(gens, ring, limits=None):
    """Greedy generating subset, lowest degree first.

    Membership is tested in the global ideal so every later lift stays
    expressible without units.
    """
    order = MonomialOrdering.degrevlex(ring.nvars)
    keep = []
    for g in gens:
        if keep and normal_form(g, Ideal(ring, keep, ordering=order,
                                         limits=limits)).is_zero():
            continue
        keep.append(g)
    return keep


def jacobian_module(data: MapData, G: Polynomial, pull_vars: Sequence[str],
                    limits=None, check_in=None) -> JacobianModule:
    """(phi^*)^{-1}(J_pull(G) O_source) / J_y(G).

    ``pull_vars`` are the target variables whose partials are pulled back:
    all of them for N(ghat), the y and z ones for M_rel(G).
    """
    tgt = data.target
    pulled = [data.phi.pullback(G.diff(v)) for v in pull_vars]
    P = preimage(Ideal(data.source, pulled, limits=limits), data.components,
                 tgt, ordering=None)
    gens = [p for p in P.generators if not p.is_zero()]
    gens = sorted(set(gens), key=lambda p: (p.degree(), format_polynomial(p)))
    gens = _drop_redundant(gens, tgt, limits)
    Jy = [G.diff(v) for v in data.y]
    aug = _Augmented([FreeModuleElement(tgt, [p]) for p in gens], 0, limits)
    rels = list(aug.syzygies())
    mod = JacobianModule(tgt, gens, Jy, rels, aug)
    for q in Jy:
        if q.is_zero():
            continue
        rels.append(mod.lift(q))
    if check_in is not None:
        for p in gens:
            if not normal_form(p, check_in).is_zero():
                raise ContainmentError("preimage ideal is not inside F_1")
    return mod


@dataclass
class NData:
    module: JacobianModule
    dimM: QuotientDimension


def module_N_and_M(data: MapData, img: ImageData, char=0, limits=None) -> NData:
    """N(ghat) and dim M(g) = dim N / m_k N."""
    F1 = img.fitting1
    if F1 is not None:
        F1 = Ideal(F1.ring, F1.generators, limits=limits)
    mod = jacobian_module(data, img.ghat, data.target.variables, limits,
                          check_in=F1)
    dimM = mod.specialised_dim(data.z, 1, char, limits)
    return NData(mod, dimM)


def dim_K(g: Polynomial, char=0, limits=None) -> QuotientDimension:
    """dim (J(g) + (g)) / J(g) = dim O / (J(g) : g)."""
    if g.is_zero():
        raise ValidationError("g is zero")
    J = Ideal(g.ring, [g.diff(v) for v in g.ring.variables], char=char,
              limits=limits)
    if not J.generators:
        raise ValidationError("g is constant")
    return vdim_quotient(colon_by_element(J, g))


# --------------------------------------------------------------------------
# A_e-codimension


@dataclass
class NormalSpace:
    dim: QuotientDimension
    basis: List[List[Polynomial]]   # vectors in theta(f), source polynomials


def tangent_fields(ring: RingSpec, h: Sequence[Polynomial], limits=None):
    """Generators of theta_X = {xi : xi(h_i) in (h)} (vectors of length s)."""
    s = ring.nvars
    if not h:
        return [[ring.one() if i == j else ring.zero() for j in range(s)]
                for i in range(s)]
    k = len(h)
    cols = [FreeModuleElement(ring, [p.diff(v) for p in h]) for v in ring.variables]
    for p in h:
        for i in range(k):
            cols.append(FreeModuleElement(
                ring, [p if j == i else ring.zero() for j in range(k)]))
    aug = _Augmented(cols, 0, limits)
    return [list(z.components[:s]) for z in aug.syzygies()
            if any(not c.is_zero() for c in z.components[:s])]


def normal_space(ring: RingSpec, h: Sequence[Polynomial], f: Sequence[Polynomial],
                 char=0, limits=None, want_basis=False) -> NormalSpace:
    """theta(f) / (tf(theta_X) + wf(theta_p)) with f : X -> C^p.

    Pushed forward to the target ring, where wf(theta_p) is the span of
    the unit vectors.
    """
    p = len(f)
    names = []
    taken = set(ring.variables)
    for i in range(p):
        names.append(_fresh(f"W{i + 1}", taken))
        taken.add(names[-1])
    tgt = RingSpec(names)
    xi = tangent_fields(ring, h, limits)
    rels = []
    for v in xi:
        comps = [ring.zero()] * p
        for j, c in enumerate(v):
            if c.is_zero():
                continue
            var = ring.variables[j]
            comps = [a + c * fi.diff(var) for a, fi in zip(comps, f)]
        rels.append(FreeModuleElement(ring, comps))
    for hp in h:
        for i in range(p):
            rels.append(FreeModuleElement(
                ring, [hp if j == i else ring.zero() for j in range(p)]))
    phi = RingMap(ring, tgt, list(f))
    gens, cols = pushforward_module(phi, p, rels, source_ideal=list(h),
                                    limits=limits)
    m = len(gens)
    zero = (0,) * ring.nvars
    vecs = [FreeModuleElement(tgt, col) for col in cols]
    for a, (b, i) in enumerate(gens):
        if b == zero:
            vecs.append(FreeModuleElement.unit(tgt, m, a))
    vecs = [v for v in vecs if not v.is_zero()]
    dim = module_vdim(vecs, m, tgt, char, limits) if vecs else QuotientDimension(
        None)
    basis = []
    if want_basis and dim.finite and dim.value:
        for t in module_standard_terms(vecs, m, tgt, char, limits):
            b, i = gens[t[-1]]
            mono = ring.monomial(b)
            for a, e in enumerate(t[:-1]):
                if e:
                    mono = mono * (f[a] ** e)
            basis.append([mono if j == i else ring.zero() for j in range(p)])
    return NormalSpace(dim, basis)


def codimAe_direct(spec: GermSpec, char=0, limits=None) -> QuotientDimension:
    ns = normal_space(spec.ring, spec.h, spec.f, char, limits)
    if not ns.dim.finite:
        return ns.dim
    tau = tjurina_icis(spec.h, char, limits)
    if not tau.finite:
        return tau
    return QuotientDimension(ns.dim.value + tau.value)


# --------------------------------------------------------------------------
# unfoldings


def make_unfolding(spec: GermSpec, directions: Sequence[Sequence[Polynomial]],
                   u_vars: Sequence[str] = None) -> UnfoldingSpec:
    """F = fhat + sum u_i * direction_i."""
    r = len(directions)
    taken = set(spec.variables)
    if u_vars is None:
        u_vars = []
        for i in range(r):
            u_vars.append(_fresh(f"u{i + 1}", taken))
            taken.add(u_vars[-1])
    u_vars = tuple(u_vars)
    if len(u_vars) != r:
        raise ValidationError("one parameter name per direction")
    ring = _source_ring(spec, u_vars)
    fhat = [p.to_ring(ring) for p in list(spec.f) + list(spec.h)]
    for d in directions:
        if len(d) != len(fhat):
            raise ValidationError(f"direction needs {len(fhat)} components")
    F = []
    for j, base in enumerate(fhat):
        acc = base
        for u, d in zip(u_vars, directions):
            acc = acc + ring.var(u) * d[j].to_ring(ring)
        F.append(acc)
    U = UnfoldingSpec(spec, u_vars, ring, tuple(F))
    U.check()
    return U


def stable_unfolding(spec: GermSpec, char=0, limits=None) -> UnfoldingSpec:
    """Versal unfolding of fhat (smooth source), hence stable.

    Directions are a basis of the normal space of fhat; when that space is
    zero fhat is already stable and no parameter is added.
    """
    fhat = list(spec.f) + list(spec.h)
    ns = normal_space(spec.ring, [], fhat, char, limits, want_basis=True)
    if not ns.dim.finite:
        raise ValidationError("fhat is not A-finite; no finite stable unfolding")
    return make_unfolding(spec, ns.basis)


@dataclass
class RelData:
    data: MapData
    G: Polynomial
    module: JacobianModule


def module_Mrel(U: UnfoldingSpec, limits=None) -> RelData:
    data = build_unfolding_map(U, limits)
    img = image_equation(data, limits, check_fitting=False, method="fitting")
    mod = jacobian_module(data, img.ghat, list(data.y) + list(data.z), limits)
    return RelData(data, img.ghat, mod)


def specialised_Mrel_dim(rel: RelData, char=0, limits=None) -> QuotientDimension:
    params = list(rel.data.z) + list(rel.data.u)
    return rel.module.specialised_dim(params, 1, char, limits)


def _locally_inside(ring, A, B, limits):
    """A inside B at the origin; the global test is tried first since it
    is cheap and implies the local one."""
    glob = Ideal(ring, B, MonomialOrdering.degrevlex(ring.nvars), limits=limits)
    rest = [a for a in A if not normal_form(a, glob).is_zero()]
    if not rest:
        return True
    loc = Ideal(ring, B, limits=limits)
    return all(normal_form(a, loc).is_zero() for a in rest)


def locally_equal(ring, A, B, limits=None) -> bool:
    return (_locally_inside(ring, A, B, limits)
            and _locally_inside(ring, B, A, limits))


def pullback_identity(rel: RelData, limits=None) -> bool:
    """J_{y,z}(G) O_source == J(G) O_source (all partials)."""
    d = rel.data
    yz = list(d.y) + list(d.z)
    A = [d.phi.pullback(rel.G.diff(v)) for v in yz]
    B = [d.phi.pullback(rel.G.diff(v)) for v in d.target.variables]
    return locally_equal(d.source, A, B, limits)


@dataclass(frozen=True)
class GoodEquation:
    """G' = E G with E a formal unit satisfying dG'/dt = G'.

    Only the Jacobian ideals are needed, and up to the unit E they are
    J(G') = J(G) + (G) (the t-partial is G' itself) and J_y(G') = J_y(G).
    """

    G: Polynomial
    t: str = "t"

    def jacobian(self) -> List[Polynomial]:
        ring = self.G.ring
        return [self.G.diff(v) for v in ring.variables] + [self.G]

    def jacobian_y(self, y: Sequence[str]) -> List[Polynomial]:
        return [self.G.diff(v) for v in y]

    def in_own_jacobian(self) -> bool:
        return True     # G' = dG'/dt


def good_equation_transform(G: Polynomial) -> GoodEquation:
    taken = set(G.ring.variables)
    return GoodEquation(G, _fresh("t", taken))


def good_equation_identity(rel: RelData, limits=None) -> bool:
    """The preimage ideal of M_rel(G') equals J(G').

    Multiplying by the unit E changes neither the pulled back Jacobian
    ideal nor its preimage, so the comparison runs without t.
    """
    G2 = good_equation_transform(rel.G)
    return locally_equal(rel.data.target, rel.module.P, G2.jacobian(), limits)


def specialisation_check(rel: RelData, dimM, char=0, limits=None):
    """(ok, specialised M_rel dimension, dimM)."""
    d = specialised_Mrel_dim(rel, char, limits)
    return d == dimM, d, dimM


@dataclass
class SamuelResult:
    value: Optional[int]
    table: List[int]
    d: int


def samuel_multiplicity(rel: RelData, budget=12, char=0, limits=None,
                        deadline=None) -> SamuelResult:
    """e(m_{k+r}, M_rel) from the Hilbert-Samuel function.

    H(t) = dim M/m^t M for t = 1, 2, ...; once the d-th differences agree
    three times in a row their common value is the multiplicity.
    """
    params = list(rel.data.z) + list(rel.data.u)
    d = len(params)
    if d == 0:
        v = rel.module.specialised_dim([], 1, char, limits)
        return SamuelResult(v.value, [v.value], 0)
    table = []
    diffs = []
    for t in range(1, budget + 1):
        if deadline is not None and time.monotonic() > deadline:
            break
        H = rel.module.specialised_dim(params, t, char, limits)
        if not H.finite:
            raise ValidationError("M_rel / m^t M_rel is infinite-dimensional")
        table.append(H.value)
        if len(table) > d:
            seq = list(table)
            for _ in range(d):
                seq = [b - a for a, b in zip(seq, seq[1:])]
            diffs.append(seq[-1])
            if len(diffs) >= 3 and diffs[-1] == diffs[-2] == diffs[-3]:
                return SamuelResult(diffs[-1], table, d)
    err = ResourceError(
        f"Hilbert-Samuel differences did not stabilise within t <= {budget}: {table}")
    err.table = table
    raise err
