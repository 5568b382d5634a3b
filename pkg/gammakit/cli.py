"""
Command-line front end. Every subcommand prints one JSON document
``{command, verdict|result, defect, certificate, params, diagnostics}`` and exits with 0 (holds / success),
1 (fails, with certificate) or 2 (input or usage error). ``sample`` writes CSV instead.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from gammakit import core, geometry, json
from gammakit.classifiers import (
    contraction_verdict,
    is_gamma_coisometry,
    is_gamma_isometry,
    is_gamma_unitary,
    sup_on_gamma,
    unitary_generators,
    vn_margin,
)
from gammakit.core import DEFAULT_TOL, Budget, Verdict
from gammakit.exceptions import GammaKitError, PreconditionError
from gammakit.model.blh import invariant_subspace_verdict, unitary_equiv
from gammakit.model.hardy import (
    build_pure_isometry,
    check_symbol_conditions,
    fundamental_invariant,
    truncate,
    wold_decompose,
)
from gammakit.symmetric import format_expression, format_poly, parse_poly, reduce_symmetric

logger = logging.getLogger(__name__)

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_INPUT = 2


def _read_text(value: str) -> str:
    if os.path.isfile(value):
        with open(value) as fd:
            return fd.read()
    return value.replace(";", "\n")


def _poly(args, n_vars: int = None):
    return parse_poly(_read_text(args.poly), n_vars)


def _budget(args) -> Budget:
    return Budget(max_degree=args.budget_degree, random_polys=args.budget_polys, grid=args.grid)


def _params(args) -> dict:
    skip = {"command", "handler", "verbose", "out"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _verdict_doc(args, verdict: Verdict) -> dict:
    return {
        "command": args.command,
        "verdict": verdict.holds,
        "defect": verdict.defect,
        "certificate": verdict.certificate,
        "params": _params(args),
        "diagnostics": list(verdict.diagnostics),
    }


def _result_doc(args, result) -> dict:
    return {
        "command": args.command,
        "result": result,
        "defect": None,
        "certificate": None,
        "params": _params(args),
        "diagnostics": [],
    }


def cmd_membership(args):
    s = json.point_from_doc(args.point)
    if args.cohn:
        return geometry.cohn_verdict(s, args.tol)
    if args.boundary:
        return geometry.on_boundary(s, args.tol, args.route)
    return geometry.in_gamma(s, args.tol)


def cmd_project(args):
    return geometry.project(json.point_from_doc(args.point))


def cmd_embed(args):
    return geometry.embed(json.point_from_doc(args.point), complex(args.alpha.replace("i", "j")))


def cmd_fiber(args):
    return geometry.fiber(json.point_from_doc(args.point))


def cmd_reduce(args):
    reduced = reduce_symmetric(_poly(args, args.n_vars), args.tol)
    return {"poly": format_poly(reduced), "expression": format_expression(reduced)}


def cmd_sup(args):
    q = _poly(args, args.n)
    return sup_on_gamma(q, args.n, args.grid)


def cmd_vn_check(args):
    S = json.tuple_from_doc(json.load_document(args.tuple))
    if args.poly:
        q = _poly(args, S.n)
        margin = vn_margin(S, q, args.grid)
        return Verdict.of(margin, args.tol, format_expression(q) if margin > args.tol else None)
    return contraction_verdict(S, _budget(args), args.seed, args.tol)


def cmd_classify(args):
    S = json.tuple_from_doc(json.load_document(args.tuple))
    check = {
        "unitary": is_gamma_unitary,
        "isometry": is_gamma_isometry,
        "coisometry": is_gamma_coisometry,
    }
    return check[args.kind](S, args.tol, args.grid, _budget(args), args.seed)


def cmd_generators(args):
    S = json.tuple_from_doc(json.load_document(args.tuple))
    return unitary_generators(S, args.tol, args.seed)


def _symbols(args):
    return json.symbol_tuple_from_doc(json.load_document(args.symbols))


def cmd_model_check(args):
    return check_symbol_conditions(_symbols(args), args.tol, _budget(args), args.seed)


def cmd_model_build(args):
    model = build_pure_isometry(_symbols(args), args.tol, _budget(args), args.seed)
    result = {"model": model}
    if args.section:
        result["section"] = truncate(model, args.section)
    return result


def cmd_invariant(args):
    model = build_pure_isometry(_symbols(args), args.tol, _budget(args), args.seed, check=False)
    return fundamental_invariant(model, args.section or 2)


def cmd_wold(args):
    S = json.tuple_from_doc(json.load_document(args.tuple))
    unitary, pure = wold_decompose(S, max(args.tol, 1e-8), args.section or 3, args.seed)
    return {"unitary": unitary, "pure": pure}


def cmd_blh_verify(args):
    model = build_pure_isometry(_symbols(args), args.tol, _budget(args), args.seed)
    theta = json.inner_symbol_from_doc(json.load_document(args.theta))
    return invariant_subspace_verdict(model, theta, max(args.tol, 1e-8), _budget(args), args.seed)


def cmd_equiv(args):
    other = json.symbol_tuple_from_doc(json.load_document(args.other))
    return unitary_equiv(_symbols(args), other, args.word_len, max(args.tol, 1e-8), seed=args.seed)


def cmd_sample(args):
    points = geometry.sample(args.n, args.count, args.boundary, args.seed)
    if args.out:
        with open(args.out, "w", newline="") as fd:
            geometry.samples_to_csv(points, fd)
        return {"path": args.out, "count": len(points)}

    geometry.samples_to_csv(points, sys.stdout)
    return None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="decision tolerance")
    common.add_argument("--grid", type=int, default=64, help="torus grid resolution")
    common.add_argument(
        "--budget-degree", type=int, default=4, help="maximal degree of test polynomials"
    )
    common.add_argument(
        "--budget-polys", type=int, default=64, help="number of random test polynomials"
    )
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument(
        "--threads", type=int, default=None, help="worker threads (default: $%s)" % core.THREADS_ENV
    )
    common.add_argument("--out", default=None, help="also write the result to this file")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="gammakit", description="Operator theory on the symmetrized polydisc"
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, handler, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(handler=handler)
        return p

    p = add("membership", cmd_membership, "membership in Gamma_n or its distinguished boundary")
    p.add_argument("--point", required=True, help="point as JSON, '(s1,...,sn)' or a file")
    p.add_argument("--boundary", action="store_true", help="test the distinguished boundary")
    p.add_argument("--route", choices=geometry.ROUTES, default="all", help="boundary test route")
    p.add_argument("--cohn", action="store_true", help="use the Cohn criterion for the boundary")

    p = add("project", cmd_project, "the map Gamma_n -> Gamma_(n-1)")
    p.add_argument("--point", required=True)

    p = add("embed", cmd_embed, "the map Gamma_n -> Gamma_(n+1) for a point of the disc")
    p.add_argument("--point", required=True)
    p.add_argument("--alpha", required=True, help="complex number, e.g. 0.5+0.1j")

    p = add("fiber", cmd_fiber, "roots of the characteristic polynomial")
    p.add_argument("--point", required=True)

    p = add("reduce", cmd_reduce, "express a symmetric polynomial in s_1, ..., s_n")
    p.add_argument(
        "--poly",
        required=True,
        help="polynomial text ('re im : e1 ... en' per line or ';') or a file",
    )
    p.add_argument("--n-vars", type=int, default=None)

    p = add("sup", cmd_sup, "supremum of |q| over Gamma_n")
    p.add_argument("--poly", required=True)
    p.add_argument("--n", type=int, default=None)

    p = add("vn-check", cmd_vn_check, "von Neumann check of a matrix tuple")
    p.add_argument("--tuple", required=True, help="MatrixTuple JSON or a file")
    p.add_argument("--poly", default=None, help="test a single polynomial instead of the battery")

    p = add("classify", cmd_classify, "Gamma_n-unitary, isometry or co-isometry test")
    p.add_argument("--tuple", required=True)
    p.add_argument("--kind", choices=("unitary", "isometry", "coisometry"), default="unitary")

    p = add("generators", cmd_generators, "commuting unitaries generating a Gamma_n-unitary")
    p.add_argument("--tuple", required=True)

    p = add("model-check", cmd_model_check, "admissibility of a parameter tuple")
    p.add_argument("--symbols", required=True, help="SymbolTuple JSON or a file")

    p = add("model-build", cmd_model_build, "build the pure Gamma_n-isometry model")
    p.add_argument("--symbols", required=True)
    p.add_argument(
        "--section", type=int, default=None, help="also emit the finite section of this degree"
    )

    p = add("invariant", cmd_invariant, "the unitary invariant of a model")
    p.add_argument("--symbols", required=True)
    p.add_argument("--section", type=int, default=None, help="section degree of the cross-check")

    p = add("wold", cmd_wold, "Wold decomposition of a finite tuple")
    p.add_argument("--tuple", required=True)
    p.add_argument("--section", type=int, default=None)

    p = add("blh-verify", cmd_blh_verify, "invariance of Theta H^2 under a model")
    p.add_argument("--symbols", required=True)
    p.add_argument("--theta", required=True, help="InnerSymbol JSON or a file")

    p = add("equiv", cmd_equiv, "unitary equivalence of parameter tuples")
    p.add_argument("--symbols", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--word-len", type=int, default=None)

    p = add("sample", cmd_sample, "random points of Gamma_n or its distinguished boundary as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--boundary", action="store_true")

    return parser


def _emit(doc: dict, out: Optional[str], to_file: bool = True):
    text = json.to_json(doc)
    print(text)
    if out and to_file:
        with open(out, "w") as fd:
            fd.write(text + "\n")


def run(argv: List[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_HOLDS if e.code == 0 else EXIT_INPUT

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    if args.tol <= 0:
        print("tolerance must be positive", file=sys.stderr)
        return EXIT_INPUT

    core.init(args.threads)
    try:
        result = args.handler(args)
    except PreconditionError as e:
        doc = _result_doc(args, None)
        doc.update({"verdict": False, "certificate": e.check, "error": str(e)})
        _emit(doc, args.out)
        return EXIT_FAILS
    except (ValueError, OSError) as e:
        logger.debug("invalid input", exc_info=True)
        print("%s: %s" % (args.command, e), file=sys.stderr)
        return EXIT_INPUT
    except GammaKitError as e:
        logger.exception("%s failed", args.command)
        doc = _result_doc(args, None)
        doc.update({"verdict": False, "error": str(e)})
        _emit(doc, args.out)
        return EXIT_FAILS
    finally:
        core.shutdown()

    if args.command == "sample":
        if result is not None:
            _emit(_result_doc(args, result), None)
        return EXIT_HOLDS

    if isinstance(result, Verdict):
        _emit(_verdict_doc(args, result), args.out)
        return EXIT_HOLDS if result.holds else EXIT_FAILS

    _emit(_result_doc(args, result), args.out)
    return EXIT_HOLDS


def main():
    sys.exit(run())
