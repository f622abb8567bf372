"""Acceptance criteria.

Each test records one PASS/FAIL line, printed at the end of the run
(``pytest -s tests/test_acceptance.py`` also prints them as they happen).
"""
import os
import time
from concurrent.futures import ProcessPoolExecutor

import pytest

from icismond import germ as gp
from icismond import report as rp
from icismond.ideals import Ideal
from icismond.modules import RingMap, fitting_ideal, pushforward_presentation
from icismond.ring import RingSpec

from conftest import ACCEPTANCE

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")
PAPER = {"n": 2, "k": 1, "vars": ["x", "y", "z"], "h": ["x^3+y^3-z^2"],
         "f": ["x", "y", "z^3+x*z+y^2"]}
STABLE = {"immersion", "cross_cap"}


def record(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def _corpus_report(path):
    spec, U = rp.load_germ(path)
    t = time.perf_counter()
    rep = rp.run_report(spec, rp.Options(), U)
    # the conductor comparison, recomputed outside the report
    data = gp.build_fhat(spec)
    img = gp.image_equation(data)
    dual = gp.conductor_data(data, img)
    return rep.to_json(), dual, time.perf_counter() - t


@pytest.fixture(scope="module")
def corpus():
    files = rp.corpus_files(CORPUS)
    t = time.perf_counter()
    with ProcessPoolExecutor(max_workers=4) as ex:
        out = list(ex.map(_corpus_report, files))
    names = [os.path.basename(f)[:-len(".json")] for f in files]
    reps = {n: (rp.InvariantReport.from_json(d), dual) for n, (d, dual, _) in zip(names, out)}
    return reps, time.perf_counter() - t


def test_golden_paper_example():
    spec, _ = rp.parse_germ(PAPER)
    t = time.perf_counter()
    rep = rp.run_report(spec)
    exact = time.perf_counter() - t
    t = time.perf_counter()
    modp = rp.run_report(spec, rp.Options(char=32003))
    prime = time.perf_counter() - t
    got = (rep.dimM, rep.codimAe_direct, rep.dimK, rep.muI, rep.verdict)
    ok = (got == (6, 6, 0, 6, "holds-with-equality") and exact < 600
          and (modp.dimM, modp.codimAe_direct) == (6, 6) and prime < 60)
    record("golden example", ok,
           f"dimM/codim/dimK/muI = {got[:4]}, {got[4]}, {exact:.1f}s exact, "
           f"{prime:.1f}s mod p")


def test_relation_battery(corpus):
    reps, secs = corpus
    names = set(reps)
    k1 = [n for n, (r, _) in reps.items() if r.germ["k"] == 1]
    bad = [n for n, (r, _) in reps.items() if r.dimM != r.dimK + r.codimAe_direct]
    ok = (len(reps) >= 10 and {"cusp", "cross_cap", "s1"} <= names
          and len(k1) >= 3 and not bad and secs < 1800)
    record("relation dimM = dimK + codimAe", ok,
           f"{len(reps)} germs, {len(k1)} with k=1, {secs:.1f}s, failing {bad}")


def test_stability_detection(corpus):
    reps, _ = corpus
    wrong = [n for n, (r, _) in reps.items() if (r.dimM == 0) != (n in STABLE)]
    ok = STABLE <= set(reps) and not wrong
    record("stability detection", ok, f"wrong {wrong}")


def test_conductor_dual(corpus):
    reps, _ = corpus
    bad = [n for n, (r, dual) in reps.items()
           if not dual or not r.identity("conductor-dual").passed]
    X = RingSpec(["x"])
    Y = RingSpec(["y1", "y2"])
    phi = RingMap(X, Y, [X.parse("x^2"), X.parse("x^3")])
    P = pushforward_presentation(phi)
    F0 = fitting_ideal(P, 0)
    F1 = fitting_ideal(P, 1)
    cond = Ideal(X, [phi.pullback(g) for g in F1.generators])
    cusp_ok = (cond.equals(Ideal(X, [X.parse("x^2")]))
               and F0.equals(Ideal(Y, [Y.parse("y2^2 - y1^3")])))
    record("conductor dual", not bad and cusp_ok,
           f"failing {bad}, cusp conductor (x^2) and det y2^2-y1^3: {cusp_ok}")


def test_specialisation_and_samuel(corpus):
    reps, _ = corpus
    two = {n: r for n, (r, _) in reps.items() if r.germ["n"] == 2}
    bad = [n for n, r in two.items()
           if not r.identity("specialisation").passed or r.samuel != r.dimM]
    record("specialisation and Samuel multiplicity", two and not bad,
           f"{len(two)} germs with n=2, failing {bad}")


def test_oracle_suites():
    import test_engine
    import test_invariants
    import test_modules

    t = time.perf_counter()
    for g in test_invariants.random_cases(2024, 20):
        test_invariants.test_milnor_and_tjurina_match_oracle(g)
    test_engine.test_staircase_matches_enumeration()
    test_modules.test_subquotient_matches_staircase_and_is_additive()
    test_modules.test_random_syzygies_annihilate()
    test_engine.test_eliminate_parametrized_curves()
    test_engine.test_local_vdim_matches_truncated_oracle()
    secs = time.perf_counter() - t
    record("oracle suites", secs < 300, f"{secs:.1f}s")


def test_out_of_scope_note():
    # disentanglement topology and Siersma's critical-point sum are not
    # computed; the algebraic identities above stand in for them
    ACCEPTANCE.append("SKIP  disentanglement topology and Siersma sum "
                      "(out of scope, covered by the algebraic identities)")
