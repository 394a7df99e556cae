"""Canonical rigid polytopes and flexible negative controls.

Polytope coordinates are hard-coded with circumradius 1 about the origin,
so any scale below 1 fits the projective hyperbolic model.  Other geometries
are reached with :func:`rigiscope.transfer.transfer_framework`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AbsoluteError, DomainError, FrameworkError
from .framework import Framework
from .geometry import DEFAULT_TOL, GeometrySpec, Model
from .transfer import transfer_framework


@dataclass(frozen=True)
class ExampleDescriptor:
    name: str
    dimension: int
    expected_verdict: str
    expected_rank: int
    internal_flexes: int = 0
    geometries: tuple = ("euclidean", "sphere_ambient", "proj_sphere", "proj_hyperbolic")


POLYTOPES = {
    "simplex(3)": ExampleDescriptor("simplex(3)", 3, "RIGID", 6),
    "octahedron": ExampleDescriptor("octahedron", 3, "RIGID", 12),
    "icosahedron": ExampleDescriptor("icosahedron", 3, "RIGID", 30),
    "bipyramid(5)": ExampleDescriptor("bipyramid(5)", 3, "RIGID", 15),
    "triangulated-prism": ExampleDescriptor("triangulated-prism", 3, "RIGID", 12),
}

FLEXIBLE = {
    "square-4-cycle": ExampleDescriptor("square-4-cycle", 2, "FLEXIBLE", 4, 1),
    "double-banana-3d": ExampleDescriptor("double-banana-3d", 3, "FLEXIBLE", 17, 1),
    "degenerate-collinear-triangle": ExampleDescriptor(
        "degenerate-collinear-triangle", 2, "FLEXIBLE", 2, 1),
}


def _helmert_basis(m: int) -> np.ndarray:
    """Orthonormal basis (rows) of the sum-zero hyperplane of R^m."""
    rows = []
    for k in range(1, m):
        b = np.zeros(m)
        b[:k] = 1.0
        b[k] = -float(k)
        rows.append(b / np.linalg.norm(b))
    return np.array(rows)


def simplex_points(n: int) -> np.ndarray:
    centered = np.eye(n + 1) - 1.0 / (n + 1)
    pts = centered @ _helmert_basis(n + 1).T
    return pts / np.linalg.norm(pts[0])


def _complete_edges(v: int) -> list:
    return [(i, j) for i in range(v) for j in range(i + 1, v)]


def _shortest_edges(pts: np.ndarray, rtol: float = 1e-9) -> list:
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    shortest = d[~np.eye(len(pts), dtype=bool)].min()
    return [(i, j) for i, j in _complete_edges(len(pts)) if d[i, j] <= shortest * (1 + rtol)]


def octahedron() -> tuple:
    pts = np.vstack([np.eye(3), -np.eye(3)])
    edges = [(i, j) for i, j in _complete_edges(6) if j != i + 3]
    return pts, edges


def icosahedron() -> tuple:
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    pts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            pts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    pts = np.array(pts) / np.sqrt(1.0 + phi * phi)
    return pts, _shortest_edges(pts)


def bipyramid(m: int) -> tuple:
    if m < 3:
        raise ValueError(f"bipyramid needs m >= 3, got {m}")
    t = 2.0 * np.pi * np.arange(m) / m
    ring = np.column_stack([np.cos(t), np.sin(t), np.zeros(m)])
    pts = np.vstack([ring, [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]])
    edges = [(k, (k + 1) % m) for k in range(m)]
    edges = [(min(e), max(e)) for e in edges]
    edges += [(k, m) for k in range(m)] + [(k, m + 1) for k in range(m)]
    return pts, edges


def triangulated_prism() -> tuple:
    t = 2.0 * np.pi * np.arange(3) / 3
    r, h = 0.8, 0.6
    top = np.column_stack([r * np.cos(t), r * np.sin(t), np.full(3, h)])
    bottom = np.column_stack([r * np.cos(t), r * np.sin(t), np.full(3, -h)])
    pts = np.vstack([top, bottom])
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    edges += [(k, k + 3) for k in range(3)]
    edges += [(k, 3 + (k + 1) % 3) for k in range(3)]
    return pts, edges


_NAME = re.compile(r"^\s*([a-z\-]+)\s*(?:[(:]\s*(\d+)\s*\)?)?\s*$")


def parse_name(name: str) -> tuple:
    """'bipyramid(5)' -> ('bipyramid', 5); 'octahedron' -> ('octahedron', None)."""
    m = _NAME.match(name.lower())
    if not m:
        raise ValueError(f"unrecognized example name {name!r}")
    return m.group(1), (int(m.group(2)) if m.group(2) else None)


def euclidean_polytope(name: str, n: Optional[int] = None) -> Framework:
    base, param = parse_name(name)
    if base == "simplex":
        dim = param or n or 3
        pts, edges = simplex_points(dim), _complete_edges(dim + 1)
    elif base == "octahedron":
        pts, edges = octahedron()
    elif base == "icosahedron":
        pts, edges = icosahedron()
    elif base == "bipyramid":
        pts, edges = bipyramid(param or 5)
    elif base in ("triangulated-prism", "prism"):
        pts, edges = triangulated_prism()
    else:
        raise ValueError(f"unknown polytope {name!r}")
    return Framework.create(pts, edges, GeometrySpec.euclidean(pts.shape[1]))


def canonical_polytope(name: str, geometry: Optional[GeometrySpec] = None, scale: float = 1.0,
                       coordinates: Optional[str] = None, tol: float = DEFAULT_TOL) -> Framework:
    """1-skeleton of a triangulated convex polytope placed in ``geometry``.

    The Euclidean coordinates (circumradius 1, scaled by ``scale``) are
    carried over by central projection, so the same rays appear in every
    geometry.
    """
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    n = geometry.dimension if geometry is not None else None
    base = euclidean_polytope(name, n)
    geometry = geometry or GeometrySpec.euclidean(base.dimension)
    if geometry.dimension != base.dimension:
        raise FrameworkError(
            f"{name} lives in dimension {base.dimension}, geometry has dimension {geometry.dimension}")
    fw = base.with_points(base.points * scale)
    r2 = np.einsum("ij,ij->i", fw.points, fw.points)
    if geometry.model is Model.PROJ_HYPERBOLIC and r2.max() >= 1.0 - tol:
        k = int(np.argmax(r2))
        raise AbsoluteError(
            f"scale {scale} puts vertex {k} at p.p = {r2[k]!r}, not inside the unit ball", vertex=k)
    if geometry.model is Model.PROJ_EXTERIOR_HYPERBOLIC and r2.min() <= 1.0 + tol:
        k = int(np.argmin(r2))
        raise DomainError(
            f"scale {scale} puts vertex {k} at p.p = {r2[k]!r}, not outside the unit ball", vertex=k)
    if geometry.is_euclidean and (coordinates or "model") == "model":
        return fw
    return transfer_framework(fw, geometry, coordinates, tol)


def flexible_example(name: str) -> Framework:
    """Negative controls; all coordinates lie inside the unit ball."""
    key = name.lower().strip()
    if key == "square-4-cycle":
        pts = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
        edges = [(0, 1), (1, 2), (2, 3), (0, 3)]
    elif key == "double-banana-3d":
        # poles 0, 1 shared by two triangular bipyramids with the pole-pole edge removed
        pts = [
            [0.02, 0.01, 0.6], [-0.01, 0.03, -0.6],
            [0.45, 0.12, 0.05], [0.25, 0.41, -0.08], [0.31, -0.28, 0.03],
            [-0.42, 0.15, -0.04], [-0.22, -0.38, 0.09], [-0.35, 0.33, 0.06],
        ]
        edges = []
        for tri in ((2, 3, 4), (5, 6, 7)):
            a, b, c = tri
            edges += [(a, b), (b, c), (a, c)]
            edges += [(0, t) for t in tri] + [(1, t) for t in tri]
    elif key == "degenerate-collinear-triangle":
        pts = [[-0.4, 0.1], [0.1, 0.1], [0.5, 0.1]]
        edges = [(0, 1), (1, 2), (0, 2)]
    else:
        raise ValueError(f"unknown flexible example {name!r}; choose from {sorted(FLEXIBLE)}")
    pts = np.asarray(pts, dtype=float)
    return Framework.create(pts, edges, GeometrySpec.euclidean(pts.shape[1]))


def example(name: str, geometry: Optional[GeometrySpec] = None, scale: float = 1.0,
            coordinates: Optional[str] = None, tol: float = DEFAULT_TOL) -> Framework:
    """Any named example, polytope or flexible control."""
    if name.lower().strip() in FLEXIBLE:
        fw = flexible_example(name)
        if scale != 1.0:
            fw = fw.with_points(fw.points * scale)
        if geometry is None or (geometry.is_euclidean and (coordinates or "model") == "model"):
            return fw
        return transfer_framework(fw, geometry, coordinates, tol)
    return canonical_polytope(name, geometry, scale, coordinates, tol)


def example_names() -> list:
    return ["simplex(n)", "octahedron", "icosahedron", "bipyramid(m)", "triangulated-prism",
            *FLEXIBLE]
