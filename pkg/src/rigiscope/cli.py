"""Command line front end: ``rigiscope <subcommand> [options] FILE...``.

Every subcommand is a thin wrapper over the library.  Reports are JSON with
sorted keys, so identical inputs give byte-identical output.  Exit status is
0 on success, 1 on a geometric domain error (vertex on the absolute, on the
equator, outside the region) and 2 on I/O or parse errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import DomainError, FrameworkError, ParseError
from .framework import load, parse, require_valid, serialize
from .geometry import DEFAULT_TOL, GeometrySpec, Model
from .polarity import (angle_system_from_framework, parse_angle_system, polar_framework,
                       serialize_angle_system, stiffness_report)
from .polytopes import example, example_names
from .rigidity import (DEFAULT_RANK_EPS, matrix_to_csv, motion_space, rigidity_matrix,
                       rigidity_verdict, stress_space)
from .transfer import cone_framework, transfer_framework, verify_equivalence

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command line values; reported with exit status 2."""


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return value


def _default_tol() -> float:
    raw = os.environ.get("RIGISCOPE_TOL")
    if raw is None or raw == "":
        return DEFAULT_TOL
    try:
        return _positive_float(raw)
    except argparse.ArgumentTypeError as exc:
        raise InputError(f"RIGISCOPE_TOL: {exc}") from None


def _dumps(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")


def _geometry(model: str, n: int, form, level) -> GeometrySpec:
    try:
        return GeometrySpec.for_model(model, n, form, level)
    except ValueError as exc:
        raise InputError(str(exc)) from None


# -- per-file handlers ---------------------------------------------------------
# Each takes (path, args) and returns bytes.

def _analyze(path, args) -> bytes:
    v = rigidity_verdict(load(path), args.tol, args.rank_eps, args.formal)
    return _dumps(v.to_dict())


def _checked_matrix(path, args):
    fw = load(path)
    require_valid(fw, args.tol, args.formal)
    return rigidity_matrix(fw, args.tol)


def _matrix(path, args) -> bytes:
    M = _checked_matrix(path, args)
    if args.format == "csv":
        return matrix_to_csv(M).encode("utf-8")
    return _dumps({"convention": M.convention, "kind": M.kind, "shape": list(M.shape),
                   "row_labels": list(M.row_labels), "column_labels": list(M.column_labels),
                   "matrix": M.matrix.tolist()})


def _motions(path, args) -> bytes:
    M = _checked_matrix(path, args)
    ms = motion_space(M, args.rank_eps)
    return _dumps({"dimension": ms.dimension, "trivial_dim": ms.trivial_dimension,
                   "internal_dim": ms.internal_dimension, "column_labels": list(M.column_labels),
                   "basis": ms.basis.T.tolist()})


def _stresses(path, args) -> bytes:
    M = _checked_matrix(path, args)
    ss = stress_space(M, args.rank_eps)
    return _dumps({"dimension": ss.dimension, "row_labels": list(ss.row_labels),
                   "basis": ss.basis.T.tolist()})


def _transfer(path, args) -> bytes:
    fw = load(path)
    target = _geometry(args.to, fw.dimension, args.form, args.level)
    return serialize(transfer_framework(fw, target, args.coordinates, args.tol, args.formal))


def _verify(path, args) -> bytes:
    fw = load(path)
    require_valid(fw, args.tol, args.formal)
    return _dumps(verify_equivalence(fw, args.tol, args.rank_eps))


def _cone(path, args) -> bytes:
    fw = load(path)
    require_valid(fw, args.tol, args.formal)
    return serialize(cone_framework(fw, args.tol))


def _polar(path, args) -> bytes:
    with open(path, "rb") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if isinstance(doc, dict) and "hyperplanes" in doc:
        system = parse_angle_system(text, args.tol, args.formal)
        if args.stiffness:
            return _dumps(stiffness_report(system, args.rank_eps))
        return serialize(polar_framework(system))
    fw = parse(text)
    if fw.geometry.model is not Model.PROJ_EXTERIOR_HYPERBOLIC:
        raise DomainError(f"polar needs a proj_exterior_hyperbolic framework, got {fw.geometry.model.value}")
    require_valid(fw, args.tol, args.formal)
    system = angle_system_from_framework(fw, args.tol, args.formal)
    if args.stiffness:
        return _dumps(stiffness_report(system, args.rank_eps))
    return serialize_angle_system(system)


HANDLERS = {
    "analyze": _analyze,
    "matrix": _matrix,
    "motions": _motions,
    "stresses": _stresses,
    "transfer": _transfer,
    "verify-equivalence": _verify,
    "cone": _cone,
    "polar": _polar,
}


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=None,
                        help="geometric tolerance (default: $RIGISCOPE_TOL or %g)" % DEFAULT_TOL)
    common.add_argument("--rank-eps", type=_positive_float, default=DEFAULT_RANK_EPS,
                        help="relative singular value cutoff for numeric rank")
    common.add_argument("--formal", action="store_true",
                        help="accept points off the model region and ultraparallel pairs")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv applies to the matrix subcommand only")

    parser = argparse.ArgumentParser(prog="rigiscope",
                                     description="First-order rigidity of bar-and-joint frameworks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "analyze": "rigidity verdict record",
        "matrix": "export the rigidity matrix",
        "motions": "orthonormal basis of first-order motions",
        "stresses": "orthonormal basis of self-stresses",
        "verify-equivalence": "factorization, rank and stress comparison across geometries",
        "cone": "cone a spherical framework into Euclidean space one dimension up",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("inputs", nargs="+", metavar="FILE")

    p = sub.add_parser("transfer", parents=[common], help="move a framework to another geometry")
    p.add_argument("inputs", nargs="+", metavar="FILE")
    p.add_argument("--to", required=True, choices=[m.value for m in Model])
    p.add_argument("--coordinates", choices=("model", "ambient"))
    p.add_argument("--form", type=float, nargs="+", help="form coefficients for ambient_form")
    p.add_argument("--level", type=float, help="surface level for ambient_form")

    p = sub.add_parser("polar", parents=[common],
                       help="convert between exterior hyperbolic frameworks and angle systems")
    p.add_argument("inputs", nargs="+", metavar="FILE")
    p.add_argument("--stiffness", action="store_true", help="report stiffness instead of converting")

    p = sub.add_parser("examples", parents=[common], help="emit a named example framework")
    p.add_argument("name", nargs="?", help="e.g. octahedron, bipyramid(5), square-4-cycle")
    p.add_argument("--list", action="store_true", help="list example names")
    p.add_argument("--geometry", default="euclidean", choices=[m.value for m in Model])
    p.add_argument("--dimension", type=int, help="dimension for simplex")
    p.add_argument("--scale", type=_positive_float, default=1.0)
    p.add_argument("--coordinates", choices=("model", "ambient"))
    p.add_argument("--form", type=float, nargs="+")
    p.add_argument("--level", type=float)
    p.add_argument("--analyze", action="store_true", help="emit the verdict record instead")
    return parser


def _examples(args) -> bytes:
    if args.list:
        return _dumps(example_names())
    if not args.name:
        raise InputError("examples needs a NAME or --list")
    try:
        n = args.dimension or example(args.name).dimension
        geo = _geometry(args.geometry, n, args.form, args.level)
        fw = example(args.name, geo, args.scale, args.coordinates, args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.analyze:
        return _dumps(rigidity_verdict(fw, args.tol, args.rank_eps, args.formal).to_dict())
    return serialize(fw)


def _run_one(handler, path, args):
    try:
        return EXIT_OK, handler(path, args)
    except DomainError as exc:
        return EXIT_DOMAIN, f"{path}: {type(exc).__name__}: {exc}"
    except (ParseError, FrameworkError, InputError, OSError, ValueError) as exc:
        return EXIT_INPUT, f"{path}: {type(exc).__name__}: {exc}"


def _emit(chunks, out) -> None:
    data = b"".join(chunks)
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.tol is None:
            args.tol = _default_tol()
        if args.format == "csv" and args.command != "matrix":
            raise InputError("--format csv is only available for the matrix subcommand")
        if args.command == "examples":
            try:
                _emit([_examples(args)], args.out)
            except DomainError as exc:
                print(f"rigiscope: {type(exc).__name__}: {exc}", file=sys.stderr)
                return EXIT_DOMAIN
            return EXIT_OK
    except (InputError, OSError, FrameworkError, ParseError) as exc:
        print(f"rigiscope: {exc}", file=sys.stderr)
        return EXIT_INPUT

    handler = HANDLERS[args.command]
    workers = min(len(args.inputs), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        results = list(pool.map(lambda p: _run_one(handler, p, args), args.inputs))

    status = EXIT_OK
    chunks = []
    for code, payload in results:
        if code == EXIT_OK:
            chunks.append(payload)
        else:
            print(f"rigiscope: {payload}", file=sys.stderr)
            status = max(status, code)
    try:
        _emit(chunks, args.out)
    except OSError as exc:
        print(f"rigiscope: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return status


if __name__ == "__main__":
    sys.exit(main())
