from types import SimpleNamespace

import pytest

from icismond import germ as gp
from icismond.errors import ValidationError
from icismond.ideals import Ideal, squarefree_check
from icismond.ring import RingSpec

PAPER = dict(n=2, k=1, variables=["x", "y", "z"], h=["x^3+y^3-z^2"],
             f=["x", "y", "z^3+x*z+y^2"])
CROSS_CAP = dict(n=2, k=0, variables=["x", "y"], h=[], f=["x", "y^2", "x*y"])
CUSP = dict(n=1, k=0, variables=["x"], h=[], f=["x^2", "x^3"])
IMMERSION = dict(n=1, k=0, variables=["x"], h=[], f=["x", "0"])


def spec(d):
    return gp.GermSpec.from_strings(d["n"], d["k"], d["variables"], d["h"], d["f"])


def pipeline(d):
    s = spec(d)
    data = gp.build_fhat(s)
    img = gp.image_equation(data)
    return s, data, img


def same_up_to_sign(p, q):
    return p == q or p == -q


def test_build_fhat():
    data = gp.build_fhat(spec(PAPER))
    assert data.target.nvars == 4 and len(data.z) == 1
    assert data.components[3] == data.source.parse("x^3+y^3-z^2")
    assert gp.build_fhat(spec(CROSS_CAP)).target.nvars == 3
    assert gp.build_fhat(spec(CUSP)).target.nvars == 2


def test_non_finite_fhat_is_rejected():
    bad = dict(n=1, k=0, variables=["x", "y"][:1], h=[], f=["0", "0"])
    with pytest.raises(ValidationError):
        gp.build_fhat(spec(bad))


def test_image_equations():
    _, data, img = pipeline(CUSP)
    T = data.target
    assert same_up_to_sign(img.ghat, T.parse("Y1^3 - Y2^2"))
    assert img.fitting0_matches
    _, data, img = pipeline(CROSS_CAP)
    T = data.target
    assert same_up_to_sign(img.ghat, T.parse("Y3^2 - Y1^2*Y2"))
    _, data, img = pipeline(PAPER)
    assert data.phi.pullback(img.ghat).is_zero()
    assert squarefree_check(img.ghat)
    assert img.fitting0_matches
    assert img.ghat.ring.nvars == 4


def test_fitting_route_agrees_with_elimination():
    for d in (CUSP, CROSS_CAP, PAPER):
        _, data, img = pipeline(d)
        other = gp.image_equation(data, check_fitting=False, method="fitting")
        assert same_up_to_sign(other.ghat, img.ghat)


def test_cusp_conductor():
    _, data, img = pipeline(CUSP)
    lam = gp.conductor_lambda(data, img.ghat)
    S = data.source
    assert lam == S.parse("x^2") or lam == S.parse("-x^2")
    assert gp.conductor_data(data, img)


def test_immersion_conductor_is_unit():
    _, data, img = pipeline(IMMERSION)
    assert same_up_to_sign(img.ghat, data.target.parse("Y2"))
    lam = gp.conductor_lambda(data, img.ghat)
    assert lam.degree() == 0 and not lam.is_zero()


def test_conductor_dual_on_classics():
    for d in (CROSS_CAP, PAPER):
        _, data, img = pipeline(d)
        assert gp.conductor_data(data, img)


def test_module_M():
    for d, want in ((PAPER, 6), (CROSS_CAP, 0)):
        _, data, img = pipeline(d)
        gp.conductor_data(data, img)
        assert gp.module_N_and_M(data, img).dimM.value == want


def test_dim_K():
    R = RingSpec(["x", "y"])
    assert gp.dim_K(R.parse("x^3 + y^2")).value == 0
    assert gp.dim_K(R.parse("x^4+y^5+x^2*y^3")).value == 1
    _, _, img = pipeline(PAPER)
    assert gp.dim_K(img.g).value == 0


def test_codim():
    assert gp.codimAe_direct(spec(PAPER)).value == 6
    assert gp.codimAe_direct(spec(CROSS_CAP)).value == 0
    assert gp.codimAe_direct(spec(CUSP)).value == 1


def test_make_unfolding():
    s = spec(CUSP)
    U = gp.make_unfolding(s, [])
    assert U.r == 0 and [str(p) for p in U.F] == ["x^2", "x^3"]
    x = s.ring.var("x")
    U = gp.make_unfolding(s, [[s.ring.zero(), x]])
    assert U.F[1] == U.ring.parse("x^3 + u1*x")
    with pytest.raises(ValidationError):
        gp.make_unfolding(s, [[x]])


def test_cusp_stabilisation():
    s = spec(CUSP)
    U = gp.make_unfolding(s, [[s.ring.zero(), s.ring.var("x")]])
    rel = gp.module_Mrel(U)
    ok, d, _ = gp.specialisation_check(rel, 1)
    assert ok and d.value == 1
    assert gp.samuel_multiplicity(rel).value == 1
    assert gp.pullback_identity(rel)
    assert gp.good_equation_identity(rel)


def test_stable_unfolding_of_paper_example():
    s = spec(PAPER)
    U = gp.stable_unfolding(s)
    rel = gp.module_Mrel(U)
    ok, d, _ = gp.specialisation_check(rel, 6)
    assert ok and d.value == 6
    assert gp.samuel_multiplicity(rel).value == 6
    assert gp.pullback_identity(rel)


def test_trivial_unfolding_of_stable_germ():
    s = spec(CROSS_CAP)
    rel = gp.module_Mrel(gp.make_unfolding(s, []))
    ok, d, _ = gp.specialisation_check(rel, 0)
    assert ok and d.value == 0


def test_good_equation():
    R = RingSpec(["a", "b"])
    G = gp.good_equation_transform(R.parse("a^3 - b^2 + a^2*b^2"))
    assert G.in_own_jacobian()
    assert G.t not in R.variables
    assert G.jacobian()[-1] == G.G


def test_samuel_of_regular_ring():
    # the parameter ring over itself: H(t) = t, so e = 1
    U = RingSpec(["u"])
    mod = gp.JacobianModule(U, [U.one()], [], [])
    rel = SimpleNamespace(data=SimpleNamespace(z=(), u=("u",)), module=mod)
    res = gp.samuel_multiplicity(rel)
    assert res.value == 1 and res.table[:3] == [1, 2, 3]


def test_fiber_is_origin():
    _, data, _ = pipeline(PAPER)
    assert gp.fiber_is_origin(data)
    s = gp.GermSpec.from_strings(1, 0, ["x"], [], ["x^2 - x^3", "x^3 - x^4"])
    data = gp.build_fhat(s)
    assert not gp.fiber_is_origin(data)


def test_pullback_of_fitting_inside_conductor():
    _, data, img = pipeline(PAPER)
    gp.conductor_data(data, img)
    cond = Ideal(data.source, [img.lam])
    for p in img.fitting1.generators:
        assert data.phi.pullback(p) in cond
