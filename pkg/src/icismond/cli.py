"""Command line entry point: ``icismond <subcommand> [options] FILE``."""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import germ as gp
from . import report as rp
from .errors import IcisError, ValidationError
from .ring import format_polynomial

SUBCOMMANDS = ("validate", "image", "conductor", "module-m", "codim", "mu",
               "report", "corpus")


def _common(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--max-degree", type=int, default=d(400), metavar="N",
                        help="abort when a basis element exceeds this degree")
    parser.add_argument("--timeout", type=float, default=d(None), metavar="SECS",
                        help="wall-clock limit per germ")
    parser.add_argument("--char", type=int, default=d(0), metavar="P",
                        help="count dimensions over GF(P) (evidence mode)")
    parser.add_argument("--hs-budget", type=int, default=d(12), metavar="T",
                        help="largest t tried for the Hilbert-Samuel function")
    parser.add_argument("--perturb-extension", action="store_true",
                        default=d(False),
                        help="recompute dim M(g) with another extension of f")
    parser.add_argument("--jobs", type=int, default=d(1),
                        help="parallel corpus entries")
    parser.add_argument("--out", default=d(None), metavar="FILE",
                        help="write output here instead of stdout")
    parser.add_argument("--pretty", action="store_true", default=d(False),
                        help="human readable table instead of JSON")
    parser.add_argument("--timings", action="store_true", default=d(False),
                        help="record per-stage times (output is then not "
                             "byte-reproducible)")


def build_parser():
    p = argparse.ArgumentParser(
        prog="icismond",
        description="Invariants of map germs from an ICIS to C^{n+1}.")
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        _common(sp, suppress=True)
        if name == "corpus":
            sp.add_argument("directory")
        else:
            sp.add_argument("file")
    return p


def _options(args):
    if args.char and not _is_prime(args.char):
        raise ValidationError("--char must be 0 or a prime")
    return rp.Options(max_degree=args.max_degree, timeout=args.timeout,
                      char=args.char, hs_budget=args.hs_budget,
                      perturb_extension=args.perturb_extension,
                      timings=args.timings)


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _emit(args, doc, text=None):
    out = text if (args.pretty and text is not None) else rp.dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _pretty_dict(doc):
    w = max((len(k) for k in doc), default=0)
    return "".join(f"{k.ljust(w)}  {v}\n" for k, v in doc.items())


def _limits(opts):
    return opts.limits(time.monotonic() + opts.timeout if opts.timeout else None)


def cmd_validate(args, opts):
    spec, U = rp.load_germ(args.file, opts)
    doc = {"schema": rp.SCHEMA, "valid": True, "n": spec.n, "k": spec.k,
           **rp.validate_germ(spec, opts)}
    if U is not None:
        doc["unfolding-params"] = U.r
    return doc


def cmd_image(args, opts):
    spec, _ = rp.load_germ(args.file, opts)
    lim = _limits(opts)
    data = gp.build_fhat(spec, lim)
    img = gp.image_equation(data, lim)
    return {"schema": rp.SCHEMA, "target-vars": list(data.target.variables),
            "ghat": format_polynomial(img.ghat), "g": format_polynomial(img.g),
            "fitting0-matches": img.fitting0_matches,
            "fiber-is-origin": gp.fiber_is_origin(data, lim)}


def cmd_conductor(args, opts):
    spec, _ = rp.load_germ(args.file, opts)
    lim = _limits(opts)
    data = gp.build_fhat(spec, lim)
    img = gp.image_equation(data, lim, check_fitting=False)
    ok = gp.conductor_data(data, img, lim)
    return {"schema": rp.SCHEMA, "lambda": format_polynomial(img.lam),
            "conductor-dual": ok,
            "fitting1": [format_polynomial(p) for p in img.fitting1.generators]}


def cmd_module_m(args, opts):
    spec, _ = rp.load_germ(args.file, opts)
    lim = _limits(opts)
    data = gp.build_fhat(spec, lim)
    img = gp.image_equation(data, lim, check_fitting=False)
    nd = gp.module_N_and_M(data, img, opts.char, lim)
    dk = gp.dim_K(img.g, opts.char, lim)
    doc = {"schema": rp.SCHEMA, "dimM-direct": nd.dimM.value, "dimK": dk.value,
           "preimage-generators": len(nd.module.P)}
    if spec.n == 1:
        # for curves the report's dimM comes from the relative module
        U = gp.stable_unfolding(spec, opts.char, lim)
        rel = gp.module_Mrel(U, lim)
        doc["dimM"] = gp.specialised_Mrel_dim(rel, opts.char, lim).value
    else:
        doc["dimM"] = nd.dimM.value
    return doc


def cmd_codim(args, opts):
    spec, _ = rp.load_germ(args.file, opts)
    lim = _limits(opts)
    ns = gp.normal_space(spec.ring, spec.h, spec.f, opts.char, lim)
    codim = gp.codimAe_direct(spec, opts.char, lim)
    return {"schema": rp.SCHEMA, "codimAe-direct": codim.value,
            "normal-space": ns.dim.value,
            "tau": gp.tjurina_icis(spec.h, opts.char, lim).value}


def cmd_mu(args, opts):
    rep = _full_report(args, opts)
    return {"schema": rp.SCHEMA,
            "muI": {"value": rep.muI, "provenance": rep.muI_provenance},
            "samuel": rep.samuel, "samuel-table": rep.samuel_table,
            "conjecture-verdict": rep.verdict}


def _full_report(args, opts):
    spec, U = rp.load_germ(args.file, opts)
    return rp.run_report(spec, opts, U)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _options(args)
        if args.command == "corpus":
            entries = rp.run_corpus(args.directory, opts, max(1, args.jobs))
            _emit(args, rp.corpus_summary(entries, opts.timings),
                  rp.pretty_corpus(entries))
            return rp.corpus_exit_code(entries)
        if args.command == "report":
            rep = _full_report(args, opts)
            _emit(args, rep.to_json(), rp.pretty(rep))
            rp.check_report(rep)
            return 0
        handler = {"validate": cmd_validate, "image": cmd_image,
                   "conductor": cmd_conductor, "module-m": cmd_module_m,
                   "codim": cmd_codim, "mu": cmd_mu}[args.command]
        doc = handler(args, opts)
        _emit(args, doc, _pretty_dict(doc))
        if args.command == "mu" and doc["conjecture-verdict"] == "violated":
            return 4
        return 0
    except IcisError as e:
        print(f"icismond: error: {e}", file=sys.stderr)
        return e.exit_code if e.exit_code in (2, 3, 4, 5) else 5
    except RecursionError as e:
        print(f"icismond: resource error: {e}", file=sys.stderr)
        return 3
    except MemoryError:
        print("icismond: resource error: out of memory", file=sys.stderr)
        return 3
    except Exception as e:  # defect
        print(f"icismond: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
