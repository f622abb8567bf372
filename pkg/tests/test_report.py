import json
import os
import shutil

import pytest

from icismond import cli
from icismond import germ as gp
from icismond import report as rp
from icismond.errors import InconsistencyError, ValidationError

HERE = os.path.dirname(__file__)
CORPUS = os.path.join(HERE, "..", "corpus")

PAPER = {"n": 2, "k": 1, "vars": ["x", "y", "z"], "h": ["x^3+y^3-z^2"],
         "f": ["x", "y", "z^3+x*z+y^2"]}
CROSS_CAP = {"n": 2, "k": 0, "vars": ["x", "y"], "h": [], "f": ["x", "y^2", "x*y"]}
CUSP = {"n": 1, "k": 0, "vars": ["x"], "h": [], "f": ["x^2", "x^3"]}


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


# ------------------------------------------------------------------ input

def test_load_paper_example(tmp_path):
    spec, U = rp.load_germ(write(tmp_path, "p.json", PAPER))
    assert (spec.n, spec.k) == (2, 1) and U is None


def test_load_cross_cap(tmp_path):
    spec, _ = rp.load_germ(write(tmp_path, "c.json", CROSS_CAP))
    assert spec.k == 0 and spec.h == ()


def test_non_isolated_h_is_rejected(tmp_path):
    bad = {"n": 1, "k": 1, "vars": ["x", "y"], "h": ["(x*y)*x"], "f": ["x", "y"]}
    with pytest.raises(ValidationError, match="ICIS"):
        rp.load_germ(write(tmp_path, "b.json", bad))


@pytest.mark.parametrize("doc", [
    {**PAPER, "schema": 2},
    {**PAPER, "colour": "red"},
    {k: v for k, v in PAPER.items() if k != "f"},
    {**PAPER, "f": ["x", "y"]},
    {**PAPER, "h": ["x^3+w"]},
    {**PAPER, "n": "2"},
    {**PAPER, "f": ["x", "y", "1+z"]},
    {**PAPER, "unfolding": {"u_vars": ["x"], "F": []}},
])
def test_schema_violations(tmp_path, doc):
    with pytest.raises(ValidationError):
        rp.load_germ(write(tmp_path, "bad.json", doc))


def test_invalid_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError):
        rp.load_germ(str(p))


# ------------------------------------------------------------------ reports

def report(doc, **opts):
    spec, U = rp.parse_germ(doc)
    return rp.run_report(spec, rp.Options(**opts), U)


def test_report_paper_example():
    rep = report(PAPER)
    assert (rep.dimM, rep.dimK, rep.codimAe_direct, rep.muI) == (6, 0, 6, 6)
    assert rep.muI_provenance == "proved-n2"
    assert rep.verdict == "holds-with-equality"
    assert rep.samuel == 6
    assert rep.failures() == []
    assert all(i.passed for i in rep.identities)


def test_report_cross_cap():
    rep = report(CROSS_CAP)
    assert (rep.dimM, rep.codimAe_direct) == (0, 0)
    assert rep.verdict == "holds-with-equality"


def test_report_cusp():
    rep = report(CUSP)
    assert (rep.dimM, rep.codimAe_direct, rep.muI) == (1, 1, 1)
    assert rep.muI_provenance == "smooth-source"


def test_user_unfolding():
    doc = {**CUSP, "unfolding": {"u_vars": ["u"], "F": ["x^2", "x^3+u*x"]}}
    rep = report(doc)
    assert rep.unfolding["r"] == 1 and rep.dimM == 1
    assert rep.germ["unfolding"]["u_vars"] == ["u"]


def test_unstable_user_unfolding_is_rejected():
    doc = {**CUSP, "unfolding": {"u_vars": ["u"], "F": ["x^2", "x^3+u*x^2"]}}
    with pytest.raises(ValidationError):
        report(doc)


def test_perturb_extension():
    rep = report(PAPER, perturb_extension=True)
    ident = rep.identity("extension-independence")
    assert ident is not None and ident.passed


def test_prime_field_mode():
    rep = report(PAPER, char=32003)
    assert (rep.dimM, rep.codimAe_direct) == (6, 6)
    assert rep.engine_config["coefficients"] == "GF(32003)"


def test_determinism_and_roundtrip(tmp_path):
    path = write(tmp_path, "p.json", PAPER)
    outs = []
    for i in range(2):
        out = str(tmp_path / f"r{i}.json")
        assert cli.main(["report", path, "--out", out]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    rep = rp.InvariantReport.from_json(doc)
    assert rep.to_json() == doc
    assert rep == rp.InvariantReport.from_json(json.loads(rp.dumps(rep)))
    assert doc["codimAe-derived"] == doc["dimM"] - doc["dimK"]


def test_timings_only_on_request():
    assert report(CUSP).timings == {}
    assert set(report(CUSP, timings=True).timings) >= {"image", "codim"}


# ------------------------------------------------------------------ exit codes

def test_exit_success_and_subcommands(tmp_path, capsys):
    path = write(tmp_path, "c.json", CUSP)
    for sub in ("validate", "image", "conductor", "module-m", "codim", "mu"):
        assert cli.main([sub, path]) == 0
        json.loads(capsys.readouterr().out)
    assert cli.main(["report", path, "--pretty"]) == 0
    assert "mu_I" in capsys.readouterr().out


def test_exit_validation(tmp_path):
    bad = {"n": 1, "k": 1, "vars": ["x", "y"], "h": ["(x*y)*x"], "f": ["x", "y"]}
    assert cli.main(["report", write(tmp_path, "b.json", bad)]) == 2
    assert cli.main(["report", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["report", write(tmp_path, "c.json", CUSP), "--char", "4"]) == 2


def test_exit_resource(tmp_path):
    path = write(tmp_path, "p.json", PAPER)
    assert cli.main(["report", path, "--max-degree", "2"]) == 3


def test_exit_identity_failure(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    shutil.copy(os.path.join(CORPUS, "cusp.json"), d)
    (d / "cusp.expected.json").write_text(json.dumps({"dimM": 2}))
    assert cli.main(["corpus", str(d)]) == 4


def test_exit_internal_inconsistency(tmp_path, monkeypatch):
    def broken(*a, **k):
        raise InconsistencyError("forced")
    monkeypatch.setattr(gp, "conductor_lambda", broken)
    assert cli.main(["report", write(tmp_path, "c.json", CUSP)]) == 5


# ------------------------------------------------------------------ corpus

def test_shipped_corpus_passes():
    entries = rp.run_corpus(CORPUS, rp.Options(), jobs=4)
    assert len(entries) >= 10
    assert [e.name for e in entries if e.status != "pass"] == []
    assert rp.corpus_exit_code(entries) == 0


def test_empty_corpus(tmp_path):
    entries = rp.run_corpus(str(tmp_path))
    assert entries == []
    assert rp.corpus_exit_code(entries) == 0
    assert rp.corpus_summary(entries)["total"] == 0


def test_one_perturbed_sidecar_gives_one_failure(tmp_path):
    d = tmp_path / "corpus"
    shutil.copytree(CORPUS, d)
    side = d / "cross_cap.expected.json"
    doc = json.loads(side.read_text())
    doc["codimAe-direct"] += 1
    side.write_text(json.dumps(doc))
    entries = rp.run_corpus(str(d), rp.Options(), jobs=4)
    bad = [e for e in entries if e.status != "pass"]
    assert [e.name for e in bad] == ["cross_cap"]
    assert bad[0].mismatches == ["codimAe-direct: expected 1, got 0"]
    assert rp.corpus_exit_code(entries) == 4
