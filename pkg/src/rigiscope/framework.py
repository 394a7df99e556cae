"""Graphs, frameworks, validation and the JSON framework format."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    AbsoluteError,
    DomainError,
    EquatorError,
    FrameworkError,
    ParseError,
    UnsupportedModelError,
)
from .geometry import DEFAULT_TOL, GeometrySpec, Model, distance

MEMBER_KINDS = ("bar", "cable", "strut")
COORDINATES = ("model", "ambient")
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple((int(i), int(j)) for i, j in self.edges)
        )


@dataclass(frozen=True, eq=False)
class Framework:
    """A graph with one point per vertex, tagged with its geometry.

    ``coordinates`` is ``"model"`` (n numbers per vertex) or ``"ambient"``
    (n + 1 numbers per vertex).  Construction never validates; call
    :func:`validate` for a report.  Points are stored as given.
    """

    graph: Graph
    geometry: GeometrySpec
    points: np.ndarray
    coordinates: str = "model"
    member_kinds: tuple = ()

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, self.point_dim)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        kinds = tuple(self.member_kinds) or ("bar",) * len(self.graph.edges)
        object.__setattr__(self, "member_kinds", kinds)

    @classmethod
    def create(cls, points, edges, geometry: GeometrySpec, coordinates: Optional[str] = None,
               member_kinds=None) -> "Framework":
        points = np.asarray(points, dtype=float)
        coordinates = coordinates or geometry.default_coordinates
        return cls(Graph(len(points), tuple(edges)), geometry, points, coordinates,
                   tuple(member_kinds or ()))

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @property
    def edges(self) -> tuple:
        return self.graph.edges

    @property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.graph.edges, dtype=np.int64).reshape(-1, 2)

    @property
    def dimension(self) -> int:
        return self.geometry.dimension

    @property
    def point_dim(self) -> int:
        n = self.geometry.dimension
        return n if self.coordinates == "model" else n + 1

    def with_points(self, points, geometry=None, coordinates=None) -> "Framework":
        return Framework(
            self.graph,
            geometry or self.geometry,
            np.asarray(points, dtype=float),
            coordinates or self.coordinates,
            self.member_kinds,
        )

    def __repr__(self):
        return (f"Framework(v={self.vertex_count}, |E|={len(self.edges)}, "
                f"model={self.geometry.model.value}, n={self.dimension}, "
                f"coordinates={self.coordinates})")


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    vertex: Optional[int] = None
    edge: Optional[int] = None


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def raise_first(self):
        """Raise the first violation as the matching exception type."""
        if self.ok:
            return
        v = self.violations[0]
        if v.kind == "absolute":
            raise AbsoluteError(v.message, vertex=v.vertex)
        if v.kind == "equator":
            raise EquatorError(v.message, vertex=v.vertex)
        if v.kind in ("region", "surface", "membership"):
            raise DomainError(v.message, vertex=v.vertex)
        raise FrameworkError(v.message)


def _structural(fw: Framework, report: ValidationReport):
    if fw.coordinates not in COORDINATES:
        report.violations.append(Violation("convention", f"unknown coordinates {fw.coordinates!r}"))
        return False
    if fw.coordinates not in fw.geometry.allowed_coordinates:
        report.violations.append(Violation(
            "convention",
            f"model {fw.geometry.model.value} does not support {fw.coordinates} coordinates"))
        return False
    pts = fw.points
    if pts.ndim != 2 or pts.shape != (fw.vertex_count, fw.point_dim):
        report.violations.append(Violation(
            "shape", f"points have shape {pts.shape}, expected ({fw.vertex_count}, {fw.point_dim})"))
        return False
    bad = np.flatnonzero(~np.isfinite(pts).all(axis=1))
    for k in bad:
        report.violations.append(Violation("nonfinite", f"vertex {k} has non-finite coordinates",
                                           vertex=int(k)))
    seen = {}
    for idx, (i, j) in enumerate(fw.edges):
        if not (0 <= i < fw.vertex_count and 0 <= j < fw.vertex_count):
            report.violations.append(Violation(
                "index", f"edge {idx} = ({i}, {j}) has an index outside [0, {fw.vertex_count})",
                edge=idx))
            continue
        if i == j:
            report.violations.append(Violation("loop", f"edge {idx} = ({i}, {j}) is a loop", edge=idx))
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            report.violations.append(Violation(
                "duplicate", f"edge {idx} = ({i}, {j}) duplicates edge {seen[key]}", edge=idx))
        else:
            seen[key] = idx
    if len(fw.member_kinds) != len(fw.edges):
        report.violations.append(Violation(
            "member_kind", f"{len(fw.member_kinds)} member kinds for {len(fw.edges)} edges"))
    for idx, kind in enumerate(fw.member_kinds):
        if kind not in MEMBER_KINDS:
            report.violations.append(Violation("member_kind", f"unknown member kind {kind!r}", edge=idx))
    return not bad.size


def _membership(fw: Framework, report: ValidationReport, tol: float, formal: bool):
    geo = fw.geometry
    m = geo.model
    for k, x in enumerate(fw.points):
        if fw.coordinates == "model":
            if m in (Model.PROJ_HYPERBOLIC, Model.PROJ_EXTERIOR_HYPERBOLIC):
                r2 = float(x @ x)
                if abs(1.0 - r2) <= tol:
                    report.violations.append(Violation(
                        "absolute", f"vertex {k} lies on the absolute (p.p = {r2!r})", vertex=k))
                elif not formal and (r2 > 1.0) == (m is Model.PROJ_HYPERBOLIC):
                    where = "outside" if r2 > 1.0 else "inside"
                    report.violations.append(Violation(
                        "region", f"vertex {k} lies {where} the unit ball (p.p = {r2!r})", vertex=k))
            continue
        if geo.is_euclidean:
            if abs(x[-1] - 1.0) > tol:
                report.violations.append(Violation(
                    "membership", f"vertex {k} has e.x = {x[-1]!r}, expected 1", vertex=k))
            continue
        if x[-1] <= tol:
            report.violations.append(Violation(
                "equator", f"vertex {k} has last coordinate {x[-1]!r} <= 0", vertex=k))
            continue
        q = float(np.sum(geo.form * x * x))
        if abs(q) <= tol:
            report.violations.append(Violation(
                "absolute", f"vertex {k} lies on the absolute (<p,p> = {q!r})", vertex=k))
        elif not formal and abs(q - geo.level) > tol:
            report.violations.append(Violation(
                "surface", f"vertex {k} has <p,p> = {q!r}, surface level is {geo.level}", vertex=k))


def validate(fw: Framework, tol: float = DEFAULT_TOL, formal: bool = False) -> ValidationReport:
    """List every violation in ``fw``; an empty report means valid.

    ``formal`` accepts points off the model's region or surface as long as
    they avoid the absolute, so mixed hyperbolic / exterior frameworks pass.
    """
    report = ValidationReport()
    if _structural(fw, report):
        _membership(fw, report, tol, formal)
    return report


def require_valid(fw: Framework, tol: float = DEFAULT_TOL, formal: bool = False) -> None:
    validate(fw, tol, formal).raise_first()


# -- edge lengths ------------------------------------------------------------

@dataclass(frozen=True)
class EdgeLengths:
    edges: tuple
    values: np.ndarray


def edge_lengths(fw: Framework, tol: float = DEFAULT_TOL, invariant: bool = False) -> EdgeLengths:
    """Per-edge distance; exterior hyperbolic frameworks need ``invariant=True``."""
    if fw.geometry.model is Model.PROJ_EXTERIOR_HYPERBOLIC and not invariant:
        raise DomainError("exterior hyperbolic space has no metric distance; pass invariant=True")
    values = np.empty(len(fw.edges))
    for idx, (i, j) in enumerate(fw.edges):
        try:
            values[idx] = distance(fw.geometry, fw.points[i], fw.points[j], tol)
        except DomainError as exc:
            raise type(exc)(f"edge {idx} = ({i}, {j}): {exc}", vertex=exc.vertex, edge=idx) from exc
    return EdgeLengths(fw.edges, values)


# -- file format -------------------------------------------------------------

def _require(doc, key):
    if key not in doc:
        raise ParseError(f"missing required field {key!r}", field=key)
    return doc[key]


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", field=where)
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"non-finite number {value!r}", field=where)
    return value


def _integer(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", field=where)
    return value


def framework_from_dict(doc) -> Framework:
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be a JSON object")
    version = _require(doc, "version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}", field="version")
    n = _integer(_require(doc, "dimension"), "dimension")
    if n < 1:
        raise ParseError("dimension must be >= 1", field="dimension")
    model_name = _require(doc, "model")
    try:
        model = Model(model_name)
    except ValueError:
        raise UnsupportedModelError(f"unsupported model {model_name!r}", field="model") from None
    coeffs = level = None
    if model is Model.AMBIENT_FORM:
        raw = _require(doc, "form_coefficients")
        if not isinstance(raw, list):
            raise ParseError("expected a list", field="form_coefficients")
        coeffs = [_number(a, f"form_coefficients[{i}]") for i, a in enumerate(raw)]
        level = _number(_require(doc, "level"), "level")
    try:
        geometry = GeometrySpec.for_model(model, n, coeffs, level)
    except ValueError as exc:
        raise ParseError(str(exc), field="form_coefficients" if coeffs else "model") from None

    coordinates = doc.get("coordinates", geometry.default_coordinates)
    if coordinates not in geometry.allowed_coordinates:
        raise ParseError(
            f"coordinates {coordinates!r} not allowed for model {model.value}", field="coordinates")
    width = n if coordinates == "model" else n + 1

    raw_vertices = _require(doc, "vertices")
    if not isinstance(raw_vertices, list):
        raise ParseError("expected a list of coordinate lists", field="vertices")
    vertices = []
    for k, row in enumerate(raw_vertices):
        if not isinstance(row, list) or len(row) != width:
            raise ParseError(f"expected {width} coordinates", field=f"vertices[{k}]")
        vertices.append([_number(x, f"vertices[{k}]") for x in row])

    raw_edges = _require(doc, "edges")
    if not isinstance(raw_edges, list):
        raise ParseError("expected a list of index pairs", field="edges")
    edges = []
    for idx, pair in enumerate(raw_edges):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError("expected an index pair", field=f"edges[{idx}]")
        edges.append((_integer(pair[0], f"edges[{idx}]"), _integer(pair[1], f"edges[{idx}]")))

    kinds = doc.get("member_kinds")
    if kinds is not None:
        if not isinstance(kinds, list) or len(kinds) != len(edges):
            raise ParseError("must be a list parallel to edges", field="member_kinds")
        for idx, kind in enumerate(kinds):
            if kind not in MEMBER_KINDS:
                raise ParseError(f"unknown member kind {kind!r}", field=f"member_kinds[{idx}]")
    points = np.asarray(vertices, dtype=float).reshape(len(vertices), width)
    return Framework(Graph(len(vertices), tuple(edges)), geometry, points, coordinates,
                     tuple(kinds or ()))


def parse(text) -> Framework:
    """Parse a framework document (bytes or str)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} at column {exc.colno}", line=exc.lineno) from None
    return framework_from_dict(doc)


def _fmt_number(x: float) -> str:
    return json.dumps(float(x))


def _fmt_rows(rows, fmt) -> str:
    if not rows:
        return "[]"
    body = ",\n".join("    [" + ", ".join(fmt(x) for x in row) + "]" for row in rows)
    return "[\n" + body + "\n  ]"


def framework_to_dict(fw: Framework) -> dict:
    geo = fw.geometry
    doc = {"version": FORMAT_VERSION, "dimension": geo.dimension, "model": geo.model.value}
    if geo.model is Model.AMBIENT_FORM:
        doc["form_coefficients"] = list(geo.form_coefficients)
        doc["level"] = geo.level
    doc["coordinates"] = fw.coordinates
    doc["vertices"] = fw.points.tolist()
    doc["edges"] = [list(e) for e in fw.edges]
    if any(k != "bar" for k in fw.member_kinds):
        doc["member_kinds"] = list(fw.member_kinds)
    return doc


def serialize(fw: Framework) -> bytes:
    """Canonical UTF-8 JSON: fixed key order, one vertex / edge per line."""
    doc = framework_to_dict(fw)
    parts = []
    for key, value in doc.items():
        if key == "vertices":
            text = _fmt_rows(value, _fmt_number)
        elif key == "edges":
            text = _fmt_rows(value, str)
        elif key == "form_coefficients":
            text = "[" + ", ".join(_fmt_number(a) for a in value) + "]"
        elif key == "level":
            text = _fmt_number(value)
        else:
            text = json.dumps(value)
        parts.append(f"  {json.dumps(key)}: {text}")
    return ("{\n" + ",\n".join(parts) + "\n}\n").encode("utf-8")


def load(path) -> Framework:
    with open(path, "rb") as fh:
        return parse(fh.read())


def save(fw: Framework, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(fw))
