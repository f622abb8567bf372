"""Input loading, the full invariant report, and the corpus runner."""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from . import germ as gp
from .engine import Limits
from .errors import (IcisError, IdentityFailure,
                     ParseError, ResourceError, ValidationError)
from .invariants import tjurina_icis, weighted_homogeneous_weights
from .ring import format_polynomial

SCHEMA = 1
PROVENANCE = ("proved-n2", "smooth-source", "samuel-evidence", "conjectural")
VERDICTS = ("holds-with-equality", "holds-strict", "violated", "not-applicable")

# identities whose failure is a defect (exit code 4); the others are evidence
REQUIRED = ("relation", "stability", "piene", "conductor-dual", "fitting0",
            "fiber-origin", "pullback", "good-equation", "specialisation",
            "extension-independence")


# --------------------------------------------------------------------------
# options


@dataclass(frozen=True)
class Options:
    max_degree: Optional[int] = 400
    timeout: Optional[float] = None
    char: int = 0
    hs_budget: int = 12
    perturb_extension: bool = False
    timings: bool = False

    def limits(self, deadline=None) -> Limits:
        return Limits(max_degree=self.max_degree, deadline=deadline)

    def engine_config(self):
        return {
            "coefficients": f"GF({self.char})" if self.char else "QQ",
            "local-ordering": "negdegrevlex",
            "global-ordering": "degrevlex",
            "elimination-ordering": "block(degrevlex, degrevlex)",
            "module-ordering": "priority classes, position over term between, "
                               "term over position inside",
            "max-degree": self.max_degree,
            "timeout": self.timeout,
            "hs-budget": self.hs_budget,
            "perturb-extension": self.perturb_extension,
        }


# --------------------------------------------------------------------------
# input


def parse_germ(doc) -> Tuple[gp.GermSpec, Optional[gp.UnfoldingSpec]]:
    """GermSpec (and optional unfolding) from a decoded input document."""
    if not isinstance(doc, dict):
        raise ValidationError("input must be a JSON object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise ValidationError(f"unsupported schema {doc.get('schema')!r}")
    allowed = {"schema", "n", "k", "vars", "h", "f", "unfolding"}
    extra = sorted(set(doc) - allowed)
    if extra:
        raise ValidationError(f"unknown fields: {extra}")
    for key in ("n", "k", "vars", "h", "f"):
        if key not in doc:
            raise ValidationError(f"missing field {key!r}")
    n, k = doc["n"], doc["k"]
    if not (isinstance(n, int) and isinstance(k, int)) or isinstance(n, bool) \
            or isinstance(k, bool):
        raise ValidationError("n and k must be integers")
    for key in ("vars", "h", "f"):
        if not isinstance(doc[key], list) or not all(
                isinstance(s, str) for s in doc[key]):
            raise ValidationError(f"{key!r} must be a list of strings")
    names = doc["vars"]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate variable names")
    try:
        spec = gp.GermSpec.from_strings(n, k, names, doc["h"], doc["f"])
    except ParseError as e:
        raise ValidationError(f"bad polynomial: {e}") from e
    spec.check_shape()
    U = None
    if doc.get("unfolding") is not None:
        u = doc["unfolding"]
        if not isinstance(u, dict) or set(u) != {"u_vars", "F"}:
            raise ValidationError("unfolding needs exactly 'u_vars' and 'F'")
        try:
            U = gp.unfolding_from_strings(spec, u["u_vars"], u["F"])
        except ParseError as e:
            raise ValidationError(f"bad unfolding polynomial: {e}") from e
    return spec, U


def validate_germ(spec: gp.GermSpec, options: Options = Options(),
                  limits=None) -> Dict:
    """ICIS and finiteness checks; returns a small summary."""
    limits = limits or options.limits()
    tau = tjurina_icis(spec.h, options.char, limits)
    if not tau.finite:
        raise ValidationError("h does not define an ICIS: T^1 is infinite")
    data = gp.build_fhat(spec, limits)      # raises if fhat is not finite
    return {"tau": tau.value, "fiber-is-origin": gp.fiber_is_origin(data, limits)}


def load_germ(path, options: Options = Options()):
    """Read, parse and validate an input file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON: {e}") from e
    except OSError as e:
        raise ValidationError(f"{path}: {e.strerror}") from e
    spec, U = parse_germ(doc)
    validate_germ(spec, options)
    return spec, U


# --------------------------------------------------------------------------
# the report


@dataclass(frozen=True)
class Identity:
    name: str
    passed: bool
    lhs: str
    rhs: str

    def to_json(self):
        return {"name": self.name, "pass": self.passed,
                "lhs": self.lhs, "rhs": self.rhs}

    @classmethod
    def from_json(cls, d):
        return cls(d["name"], d["pass"], d["lhs"], d["rhs"])


@dataclass
class InvariantReport:
    germ: Dict
    dimM: int
    dimM_direct: int
    dimK: int
    codimAe_direct: int
    tau: int
    muI: Optional[int]
    muI_provenance: str
    samuel: Optional[int]
    samuel_table: List[int]
    image: Dict
    unfolding: Optional[Dict]
    weights: Optional[Dict]
    identities: List[Identity]
    verdict: str
    timings: Dict[str, int]
    engine_config: Dict

    @property
    def codimAe_derived(self):
        return self.dimM - self.dimK

    def identity(self, name) -> Optional[Identity]:
        for i in self.identities:
            if i.name == name:
                return i
        return None

    def failures(self) -> List[Identity]:
        return [i for i in self.identities
                if not i.passed and (i.name in REQUIRED or
                                     (i.name == "samuel-cm" and self.germ["n"] == 2))]

    def to_json(self):
        return {
            "schema": SCHEMA,
            "input-echo": self.germ,
            "dimM": self.dimM,
            "dimM-direct": self.dimM_direct,
            "dimK": self.dimK,
            "codimAe-direct": self.codimAe_direct,
            "codimAe-derived": self.codimAe_derived,
            "tau": self.tau,
            "muI": {"value": self.muI, "provenance": self.muI_provenance},
            "samuel": self.samuel,
            "samuel-table": list(self.samuel_table),
            "image": self.image,
            "unfolding": self.unfolding,
            "weights": self.weights,
            "identities": [i.to_json() for i in self.identities],
            "conjecture-verdict": self.verdict,
            "timings": dict(self.timings),
            "engine-config": self.engine_config,
        }

    @classmethod
    def from_json(cls, d):
        if d.get("schema") != SCHEMA:
            raise ValidationError(f"unsupported report schema {d.get('schema')!r}")
        rep = cls(
            germ=d["input-echo"], dimM=d["dimM"], dimM_direct=d["dimM-direct"],
            dimK=d["dimK"], codimAe_direct=d["codimAe-direct"], tau=d["tau"],
            muI=d["muI"]["value"], muI_provenance=d["muI"]["provenance"],
            samuel=d["samuel"], samuel_table=list(d["samuel-table"]),
            image=d["image"], unfolding=d["unfolding"], weights=d["weights"],
            identities=[Identity.from_json(i) for i in d["identities"]],
            verdict=d["conjecture-verdict"], timings=dict(d["timings"]),
            engine_config=d["engine-config"])
        if rep.codimAe_derived != d["codimAe-derived"]:
            raise ValidationError("codimAe-derived does not equal dimM - dimK")
        return rep


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, final newline."""
    if isinstance(obj, InvariantReport):
        obj = obj.to_json()
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


class _Clock:
    def __init__(self, enabled):
        self.enabled = enabled
        self.table = {}

    def stage(self, name):
        clock = self

        class _Ctx:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                if clock.enabled:
                    clock.table[name] = int(round(
                        (time.perf_counter() - self.t) * 1000))
                return False
        return _Ctx()


def _dim(q, what) -> int:
    if not q.finite:
        raise ValidationError(f"{what} is infinite: the germ is not A-finite")
    return q.value


def _ident(name, ok, lhs, rhs):
    return Identity(name, bool(ok), str(lhs), str(rhs))


def perturbed_spec(spec: gp.GermSpec) -> Optional[gp.GermSpec]:
    """f with h_1 added to its last component (another extension of f|X).

    Adding a multiple of h of higher degree, such as x_1*h_1, gives the
    same answer but blows up the image equation and the module basis.
    """
    if spec.k == 0:
        return None
    f = list(spec.f)
    f[-1] = f[-1] + spec.h[0]
    return spec.with_f(f)


def _dimM_direct(spec, options, limits):
    data = gp.build_fhat(spec, limits)
    img = gp.image_equation(data, limits, check_fitting=False)
    return _dim(gp.module_N_and_M(data, img, options.char, limits).dimM, "dim M(g)")


def nice_dimensions(n) -> bool:
    """(n, n+1) are Mather's nice dimensions exactly when n < 15."""
    return n < 15


def run_report(spec: gp.GermSpec, options: Options = Options(),
               unfolding: Optional[gp.UnfoldingSpec] = None) -> InvariantReport:
    deadline = time.monotonic() + options.timeout if options.timeout else None
    limits = options.limits(deadline)
    char = options.char
    clock = _Clock(options.timings)
    ids: List[Identity] = []

    with clock.stage("validate"):
        info = validate_germ(spec, options, limits)
        tau = info["tau"]
    with clock.stage("image"):
        data = gp.build_fhat(spec, limits)
        img = gp.image_equation(data, limits)
        ids.append(_ident("fiber-origin", info["fiber-is-origin"],
                          "global fibre length", "local fibre length"))
        ids.append(_ident("fitting0", img.fitting0_matches,
                          "F0(pushforward)", "(ghat)"))
    with clock.stage("conductor"):
        ok = gp.conductor_data(data, img, limits)   # raises if Piene fails
        ids.append(_ident("piene", True, "d_l ghat o fhat",
                          "(-1)^l lambda minor_l"))
        ids.append(_ident("conductor-dual", ok, "(lambda) O",
                          "pullback F1(fhat) O"))
    with clock.stage("module-m"):
        dimM_direct = _dim(gp.module_N_and_M(data, img, char, limits).dimM,
                           "dim M(g)")
    with clock.stage("dim-k"):
        dimK = _dim(gp.dim_K(img.g, char, limits), "dim K(g)")
        cert = weighted_homogeneous_weights(img.g) if not img.g.is_zero() else None
    with clock.stage("codim"):
        codim = _dim(gp.codimAe_direct(spec, char, limits), "codim_Ae")

    # relative module of a stable unfolding
    samuel, table, spec_dim, U = None, [], None, unfolding
    with clock.stage("unfolding"):
        if U is None:
            U = gp.stable_unfolding(spec, char, limits)
        else:
            _check_stable(U, char, limits)
    with clock.stage("m-rel"):
        rel = gp.module_Mrel(U, limits)
        spec_dim = _dim(gp.specialised_Mrel_dim(rel, char, limits),
                        "specialised M_rel")
        ids.append(_ident("pullback", gp.pullback_identity(rel, limits),
                          "J_{y,z}(G) O", "J(G) O"))
        ids.append(_ident("good-equation", gp.good_equation_identity(rel, limits),
                          "preimage of J(G') O", "J(G) + (G)"))
    with clock.stage("samuel"):
        try:
            sam = gp.samuel_multiplicity(rel, options.hs_budget, char, limits)
            samuel, table = sam.value, sam.table
        except ResourceError as e:
            if getattr(e, "table", None) is None:
                raise
            table = e.table

    # for curves the definition of M(g) gives the delta-type defect; the
    # specialised relative module is the quantity the relation refers to
    dimM = spec_dim if spec.n == 1 else dimM_direct

    ids.append(_ident("relation", dimM == dimK + codim, f"dimM = {dimM}",
                      f"dimK + codimAe = {dimK} + {codim}"))
    ids.append(_ident("stability", (dimM == 0) == (codim == 0),
                      f"dimM = 0: {dimM == 0}", f"codimAe = 0: {codim == 0}"))
    ids.append(_ident("specialisation", spec_dim == dimM,
                      f"dim M_rel / m M_rel = {spec_dim}", f"dimM = {dimM}"))
    if samuel is not None:
        ids.append(_ident("samuel-cm", samuel == dimM,
                          f"e(m, M_rel) = {samuel}", f"dimM = {dimM}"))
    else:
        ids.append(_ident("samuel-cm", False,
                          f"no stabilisation within t <= {options.hs_budget}: {table}",
                          f"dimM = {dimM}"))

    if options.perturb_extension:
        with clock.stage("perturb"):
            alt = perturbed_spec(spec)
            if alt is not None:
                other = _dimM_direct(alt, options, limits)
                ids.append(_ident("extension-independence", other == dimM_direct,
                                  f"dimM (perturbed) = {other}",
                                  f"dimM = {dimM_direct}"))

    # image Milnor number: dim M(g), labelled by what backs the equality
    muI = dimM
    cm = samuel is not None and samuel == dimM
    if spec.n == 2:
        prov = "proved-n2"
    elif spec.k == 0 and cm:
        prov = "smooth-source"
    elif cm:
        prov = "samuel-evidence"
    else:
        prov = "conjectural"
    if not nice_dimensions(spec.n):
        verdict = "not-applicable"
    elif muI > codim:
        verdict = "holds-strict"
    elif muI == codim:
        verdict = "holds-with-equality"
    else:
        verdict = "violated"
    if verdict != "not-applicable":
        ids.append(_ident("equality-iff-K-zero", (muI == codim) == (dimK == 0),
                          f"muI = codimAe: {muI == codim}", f"dimK = 0: {dimK == 0}"))

    return InvariantReport(
        germ=_echo(spec, unfolding),
        dimM=dimM, dimM_direct=dimM_direct, dimK=dimK, codimAe_direct=codim,
        tau=tau, muI=muI, muI_provenance=prov, samuel=samuel,
        samuel_table=list(table),
        image={"ghat": format_polynomial(img.ghat),
               "g": format_polynomial(img.g),
               "lambda": format_polynomial(img.lam),
               "target-vars": list(data.target.variables)},
        unfolding={"r": U.r, **U.to_json()},
        weights=cert.to_json() if cert is not None else None,
        identities=ids, verdict=verdict, timings=clock.table,
        engine_config=options.engine_config())


def _echo(spec, unfolding):
    d = {"schema": SCHEMA, **spec.to_json()}
    if unfolding is not None:
        d["unfolding"] = unfolding.to_json()
    return d


def _check_stable(U: gp.UnfoldingSpec, char, limits):
    """A user supplied unfolding must itself be a stable germ."""
    F = list(U.F) + [U.ring.var(u) for u in U.u_vars]
    ns = gp.normal_space(U.ring, [], F, char, limits)
    if ns.dim != 0:
        raise ValidationError("supplied unfolding is not stable")


def check_report(rep: InvariantReport):
    """Raise IdentityFailure on a required identity failure or a violation."""
    bad = rep.failures()
    if bad:
        raise IdentityFailure("identity failed: " + ", ".join(
            f"{i.name} ({i.lhs} vs {i.rhs})" for i in bad))
    if rep.verdict == "violated":
        raise IdentityFailure(
            f"Mond conjecture violated: muI = {rep.muI} < codimAe = {rep.codimAe_direct}")


# --------------------------------------------------------------------------
# human readable output


def pretty(rep: InvariantReport) -> str:
    g = rep.germ
    rows = [
        ("germ", f"n={g['n']} k={g['k']} h={g['h']} f={g['f']}"),
        ("image equation", rep.image["ghat"]),
        ("dim M(g)", rep.dimM),
        ("dim M(g), direct", rep.dimM_direct),
        ("dim K(g)", rep.dimK),
        ("codim_Ae (direct)", rep.codimAe_direct),
        ("codim_Ae (dimM - dimK)", rep.codimAe_derived),
        ("tau(X)", rep.tau),
        ("mu_I", f"{rep.muI} [{rep.muI_provenance}]"),
        ("Samuel multiplicity", rep.samuel),
        ("stable unfolding params", rep.unfolding["r"] if rep.unfolding else "-"),
        ("verdict", rep.verdict),
    ]
    w = max(len(a) for a, _ in rows)
    out = [f"{a.ljust(w)}  {b}" for a, b in rows]
    out.append("")
    out.append("identities:")
    for i in rep.identities:
        out.append(f"  {'PASS' if i.passed else 'FAIL'}  {i.name}: {i.lhs} | {i.rhs}")
    if rep.timings:
        out.append("")
        out.append("timings (ms): " + ", ".join(
            f"{k}={v}" for k, v in sorted(rep.timings.items())))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# corpus


@dataclass
class CorpusEntry:
    name: str
    status: str                 # "pass", "fail" or "error"
    exit_code: int
    mismatches: List[str] = field(default_factory=list)
    failed_identities: List[str] = field(default_factory=list)
    error: Optional[str] = None
    seconds: Optional[float] = None


def _subset_mismatches(expected, actual, path=""):
    out = []
    if isinstance(expected, dict) and isinstance(actual, dict):
        for key in sorted(expected):
            p = f"{path}.{key}" if path else key
            if key not in actual:
                out.append(f"{p}: missing from report")
            else:
                out.extend(_subset_mismatches(expected[key], actual[key], p))
        return out
    if expected != actual:
        out.append(f"{path}: expected {expected!r}, got {actual!r}")
    return out


def run_entry(path, options: Options = Options()) -> CorpusEntry:
    name = os.path.basename(path)[:-len(".json")]
    side = os.path.join(os.path.dirname(path), name + ".expected.json")
    t = time.perf_counter()
    try:
        spec, U = load_germ(path, options)
        rep = run_report(spec, options, U)
    except IcisError as e:
        return CorpusEntry(name, "error", e.exit_code, error=str(e),
                           seconds=round(time.perf_counter() - t, 2))
    except Exception as e:   # defect, reported rather than crashing the run
        return CorpusEntry(name, "error", 5, error=f"{type(e).__name__}: {e}",
                           seconds=round(time.perf_counter() - t, 2))
    doc = rep.to_json()
    mism = []
    if os.path.exists(side):
        with open(side) as fh:
            mism = _subset_mismatches(json.load(fh), doc)
    bad = [i.name for i in rep.failures()]
    if rep.verdict == "violated":
        bad.append("mond-verdict")
    ok = not mism and not bad
    return CorpusEntry(name, "pass" if ok else "fail", 0 if ok else 4,
                       mism, bad, seconds=round(time.perf_counter() - t, 2))


def corpus_files(directory) -> List[str]:
    if not os.path.isdir(directory):
        raise ValidationError(f"{directory}: not a directory")
    return sorted(os.path.join(directory, f) for f in os.listdir(directory)
                  if f.endswith(".json") and not f.endswith(".expected.json"))


def run_corpus(directory, options: Options = Options(), jobs=1) -> List[CorpusEntry]:
    files = corpus_files(directory)
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(run_entry, files, [options] * len(files)))
    return [run_entry(f, options) for f in files]


def corpus_exit_code(entries: List[CorpusEntry]) -> int:
    if any(e.status == "fail" for e in entries):
        return 4
    for e in entries:
        if e.status == "error":
            return e.exit_code
    return 0


def corpus_summary(entries: List[CorpusEntry], include_times=False) -> Dict:
    rows = []
    for e in entries:
        d = asdict(e)
        if not include_times:
            d.pop("seconds")
        rows.append(d)
    return {"schema": SCHEMA, "entries": rows,
            "passed": sum(e.status == "pass" for e in entries),
            "total": len(entries)}


def pretty_corpus(entries: List[CorpusEntry]) -> str:
    if not entries:
        return "empty corpus\n"
    w = max(len(e.name) for e in entries)
    out = []
    for e in entries:
        line = f"{e.name.ljust(w)}  {e.status.upper():5}"
        if e.seconds is not None:
            line += f"  {e.seconds:7.2f}s"
        if e.mismatches:
            line += "  mismatches: " + "; ".join(e.mismatches)
        if e.failed_identities:
            line += "  failed: " + ", ".join(e.failed_identities)
        if e.error:
            line += f"  error: {e.error}"
        out.append(line)
    out.append(f"{sum(e.status == 'pass' for e in entries)}/{len(entries)} passed")
    return "\n".join(out) + "\n"
