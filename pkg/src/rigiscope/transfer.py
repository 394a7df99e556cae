"""Moving frameworks, motions and rigidity matrices between geometries.

The bridge between projective models is the block-diagonal matrix
T_K(G,p) = diag(I + K p_k p_k^T), which satisfies R_X T_K = R_E.  Ambient
motions are carried to Euclidean ones by the central-projection maps of
:mod:`rigiscope.geometry`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import block_diag, subspace_angles

from . import _kernels
from .errors import AbsoluteError, DomainError, EquatorError, FrameworkError
from .framework import Framework, Graph
from .geometry import DEFAULT_TOL, GeometrySpec, Model, gnomic_project, normalize_to_surface
from .rigidity import (
    DEFAULT_RANK_EPS,
    decompose,
    rigidity_matrix_euclidean,
    rigidity_matrix_projective,
    verdict_for_matrix,
)


@dataclass(frozen=True, eq=False)
class TransferBlock:
    vertex: int
    matrix: np.ndarray

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Block-diagonal T_K(G,p); ``blocks`` has shape (v, n, n)."""

    blocks: np.ndarray
    K: float

    @property
    def vertex_count(self) -> int:
        return self.blocks.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        if self.vertex_count == 0:
            return np.zeros((0, 0))
        return block_diag(*self.blocks)

    def block(self, k: int) -> TransferBlock:
        return TransferBlock(k, self.blocks[k])

    @property
    def block_determinants(self) -> np.ndarray:
        if self.vertex_count == 0:
            return np.zeros(0)
        return np.linalg.det(self.blocks)

    @property
    def determinant(self) -> float:
        return float(np.prod(self.block_determinants))

    def singular_vertices(self, tol: float = DEFAULT_TOL) -> list:
        return [int(k) for k in np.flatnonzero(np.abs(self.block_determinants) <= tol)]

    def apply(self, w) -> np.ndarray:
        """T_K w for a stacked (v, n) motion."""
        w = np.asarray(w, dtype=float).reshape(self.blocks.shape[:2])
        return np.einsum("kab,kb->ka", self.blocks, w)

    def solve(self, u) -> np.ndarray:
        """T_K^{-1} u for a stacked (v, n) motion."""
        u = np.asarray(u, dtype=float).reshape(self.blocks.shape[:2])
        if self.vertex_count == 0:
            return u
        return np.linalg.solve(self.blocks, u[:, :, None])[:, :, 0]


def transfer_block(p, K: float) -> TransferBlock:
    """T_p = I + K p p^T."""
    p = np.asarray(p, dtype=float).reshape(1, -1)
    return TransferBlock(0, _kernels.transfer_blocks(p, K)[0])


def transfer_matrix(fw: Framework, K: float) -> TransferMatrix:
    if fw.coordinates != "model":
        raise FrameworkError("transfer matrices need model coordinates")
    pts = fw.points.reshape(fw.vertex_count, fw.dimension)
    return TransferMatrix(_kernels.transfer_blocks(pts, K), float(K))


# -- factorization -----------------------------------------------------------

@dataclass
class FactorizationReport:
    K: int
    max_residual: float
    rank_E: int
    rank_X: int
    det_T: float
    passed: bool

    def to_dict(self) -> dict:
        return {"K": self.K, "max_residual": self.max_residual, "rank_E": self.rank_E,
                "rank_X": self.rank_X, "det_T": self.det_T, "pass": self.passed}


def verify_factorization(fw: Framework, K: int, tol: float = DEFAULT_TOL,
                         rank_eps: float = DEFAULT_RANK_EPS) -> FactorizationReport:
    """max |R_X T_K - R_E|; passes when at most ``tol``.

    Raises :class:`AbsoluteError` when R_X cannot be built (K = -1 and a
    vertex on the unit sphere).
    """
    RX = rigidity_matrix_projective(fw, K, tol)
    RE = rigidity_matrix_euclidean(fw)
    T = transfer_matrix(fw, K)
    prod = RX.matrix @ T.matrix if RX.matrix.size else RX.matrix
    resid = float(np.max(np.abs(prod - RE.matrix))) if prod.size else 0.0
    return FactorizationReport(int(K), resid, decompose(RE, rank_eps).rank,
                               decompose(RX, rank_eps).rank, T.determinant, resid <= tol)


def max_principal_angle(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle between column spaces (0 when both are empty)."""
    if A.shape[1] == 0 and B.shape[1] == 0:
        return 0.0
    if A.shape[1] != B.shape[1]:
        return math.pi / 2
    return float(np.max(subspace_angles(A, B)))


def homogeneous_points(fw: Framework) -> np.ndarray:
    if fw.coordinates == "model":
        return np.hstack([fw.points, np.ones((fw.vertex_count, 1))])
    return np.array(fw.points)


def to_model_coordinates(fw: Framework, tol: float = DEFAULT_TOL) -> Framework:
    """Same rays in model coordinates (central projection), geometry kept if possible."""
    if fw.coordinates == "model":
        return fw
    geo = fw.geometry
    if "model" not in geo.allowed_coordinates:
        geo = GeometrySpec.proj_sphere(geo.dimension) if geo.model is Model.SPHERE_AMBIENT \
            else GeometrySpec.euclidean(geo.dimension)
    H = homogeneous_points(fw)
    pts = np.empty((fw.vertex_count, fw.dimension))
    for k, h in enumerate(H):
        if abs(h[-1]) <= tol:
            raise EquatorError(f"vertex {k} has zero homogenizing coordinate", vertex=k)
        pts[k] = h[:-1] / h[-1]
    return fw.with_points(pts, geo, "model")


def verify_equivalence(fw: Framework, tol: float = DEFAULT_TOL,
                       rank_eps: float = DEFAULT_RANK_EPS) -> dict:
    """Factorization, rank, verdict and stress-subspace comparison for K = +1 and -1."""
    mfw = to_model_coordinates(fw, tol)
    RE = rigidity_matrix_euclidean(mfw)
    svd_E = decompose(RE, rank_eps)
    verdict_E = verdict_for_matrix(RE, rank_eps)
    stresses_E = svd_E.U[:, svd_E.rank:]
    report = {"rank_E": svd_E.rank, "verdict_E": verdict_E.verdict,
              "stress_dim": stresses_E.shape[1], "geometries": {}}
    ok = True
    for K, name in ((1, "proj_sphere"), (-1, "proj_hyperbolic")):
        T = transfer_matrix(mfw, K)
        entry = {"det_T": T.determinant}
        try:
            fact = verify_factorization(mfw, K, tol, rank_eps)
        except AbsoluteError as exc:
            entry.update(applicable=False, absolute_vertex=exc.vertex, error=str(exc), **{"pass": None})
            report["geometries"][name] = entry
            continue
        RX = rigidity_matrix_projective(mfw, K, tol)
        svd_X = decompose(RX, rank_eps)
        angle = max_principal_angle(stresses_E, svd_X.U[:, svd_X.rank:])
        verdict_X = verdict_for_matrix(RX, rank_eps).verdict
        passed = (fact.passed and fact.rank_E == fact.rank_X and verdict_X == verdict_E.verdict
                  and angle <= 1e-8)
        entry.update(applicable=True, max_residual=fact.max_residual, rank_E=fact.rank_E,
                     rank_X=fact.rank_X, verdict_X=verdict_X, stress_angle=angle,
                     **{"pass": passed})
        ok = ok and passed
        report["geometries"][name] = entry
    report["pass"] = ok
    return report


# -- frameworks --------------------------------------------------------------

def _check_model_region(target: GeometrySpec, x: np.ndarray, k: int, tol: float, formal: bool):
    if target.model not in (Model.PROJ_HYPERBOLIC, Model.PROJ_EXTERIOR_HYPERBOLIC):
        return
    r2 = float(x @ x)
    if abs(1.0 - r2) <= tol:
        raise AbsoluteError(f"vertex {k} lands on the absolute (p.p = {r2!r})", vertex=k)
    inside = r2 < 1.0
    if not formal and inside != (target.model is Model.PROJ_HYPERBOLIC):
        raise DomainError(
            f"vertex {k} lands {'inside' if inside else 'outside'} the unit ball, "
            f"not in {target.model.value}", vertex=k)


def transfer_framework(fw: Framework, target: GeometrySpec, coordinates: Optional[str] = None,
                       tol: float = DEFAULT_TOL, formal: bool = False) -> Framework:
    """Carry every vertex ray of ``fw`` into ``target``; the graph is unchanged.

    Model targets use central projection onto x_{n+1} = 1; ambient targets
    normalize the ray onto the target surface (or E^n for Euclidean space).
    """
    if target.dimension != fw.dimension:
        raise FrameworkError(f"dimension mismatch: {fw.dimension} vs {target.dimension}")
    coordinates = coordinates or target.default_coordinates
    if coordinates not in target.allowed_coordinates:
        raise FrameworkError(f"model {target.model.value} does not support {coordinates} coordinates")
    H = homogeneous_points(fw)
    n = fw.dimension
    out = np.empty((fw.vertex_count, n if coordinates == "model" else n + 1))
    for k, h in enumerate(H):
        try:
            if coordinates == "model":
                if abs(h[-1]) <= tol:
                    raise EquatorError("zero homogenizing coordinate")
                x = h[:-1] / h[-1]
                _check_model_region(target, x, k, tol, formal)
                out[k] = x
            elif target.is_euclidean:
                out[k] = gnomic_project(h, tol)
            else:
                out[k] = normalize_to_surface(target, h, tol, formal)
        except DomainError as exc:
            if exc.vertex is not None:
                raise
            raise type(exc)(f"vertex {k}: {exc}", vertex=k) from exc
    return fw.with_points(out, target, coordinates)


def _to_euclidean_motion(fw: Framework, u) -> np.ndarray:
    n, v = fw.dimension, fw.vertex_count
    u = np.asarray(u, dtype=float).reshape(v, fw.point_dim)
    if fw.coordinates == "model":
        kappa = fw.geometry.model_kappa
        if kappa == 0:
            return u.copy()
        return transfer_matrix(fw, kappa).solve(u)
    P = fw.points
    s = P[:, -1]
    for k in np.flatnonzero(s == 0.0):
        raise EquatorError(f"vertex {k} lies on the equator", vertex=int(k))
    a = fw.geometry.form
    return (u * a)[:, :n] / s[:, None]


def _from_euclidean_motion(tf: Framework, w: np.ndarray) -> np.ndarray:
    n = tf.dimension
    if tf.coordinates == "model":
        kappa = tf.geometry.model_kappa
        if kappa == 0:
            return w.copy()
        return transfer_matrix(tf, kappa).apply(w)
    Q = tf.points
    s = Q[:, -1]
    a = tf.geometry.form
    out = np.empty_like(Q)
    out[:, :n] = s[:, None] * w / a[:n]
    if a[n] == 0.0:
        out[:, n] = 0.0
    else:
        out[:, n] = -np.einsum("ka,ka->k", Q[:, :n], w) / a[n]
    return out


def transfer_motion(fw: Framework, u, target: GeometrySpec, coordinates: Optional[str] = None,
                    tol: float = DEFAULT_TOL, formal: bool = False) -> np.ndarray:
    """Image of the first-order motion ``u`` of ``fw`` on the transferred framework.

    Every route passes through the Euclidean model: ambient motions use
    (D u)' / (e.p) (the sphere-to-plane map, composed with J_k for the
    signature forms) and model motions use T_K^{-1}.  Returns a (v, width)
    array in the target convention.
    """
    tf = transfer_framework(fw, target, coordinates, tol, formal)
    w = _to_euclidean_motion(fw, u)
    return _from_euclidean_motion(tf, w)


def projective_derivative(fw: Framework, u) -> np.ndarray:
    """Model-coordinate velocity of ambient motion ``u`` under central projection.

    For x = P'/P_{n+1}: dx = (U' - U_{n+1} x) / P_{n+1}.
    """
    n, v = fw.dimension, fw.vertex_count
    u = np.asarray(u, dtype=float).reshape(v, n + 1)
    P = fw.points
    s = P[:, -1:]
    x = P[:, :n] / s
    return (u[:, :n] - u[:, n:] * x) / s


# -- coning and projective maps ---------------------------------------------

def cone_framework(fw: Framework, tol: float = DEFAULT_TOL) -> Framework:
    """Join a new apex at the origin of E^{n+1} to every vertex.

    The original vertices keep their ambient spherical coordinates, read as
    Euclidean points of R^{n+1}.
    """
    if fw.geometry.model not in (Model.SPHERE_AMBIENT, Model.PROJ_SPHERE):
        raise FrameworkError(f"coning needs a spherical framework, got {fw.geometry.model.value}")
    if fw.coordinates == "model":
        fw = transfer_framework(fw, GeometrySpec.sphere(fw.dimension), "ambient", tol)
    v = fw.vertex_count
    pts = np.vstack([fw.points, np.zeros((1, fw.dimension + 1))])
    edges = fw.edges + tuple((k, v) for k in range(v))
    kinds = fw.member_kinds + ("bar",) * v
    return Framework(Graph(v + 1, edges), GeometrySpec.euclidean(fw.dimension + 1), pts,
                     "model", kinds)


@dataclass(frozen=True, eq=False)
class ProjectiveMap:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"projective map must be square, got shape {m.shape}")
        if abs(np.linalg.det(m)) == 0.0:
            raise ValueError("projective map is singular")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def apply_projective_transform(fw: Framework, M, tol: float = DEFAULT_TOL) -> Framework:
    """x -> dehomogenize(M (x, 1)) on a model-coordinate framework."""
    if not isinstance(M, ProjectiveMap):
        M = ProjectiveMap(M)
    if fw.coordinates != "model":
        raise FrameworkError("projective maps act on model coordinates")
    n = fw.dimension
    if M.matrix.shape != (n + 1, n + 1):
        raise ValueError(f"expected a {n + 1}x{n + 1} map, got {M.matrix.shape}")
    image = homogeneous_points(fw) @ M.matrix.T
    w = image[:, -1]
    for k in np.flatnonzero(np.abs(w) < tol):
        raise EquatorError(f"vertex {k} is sent to infinity", vertex=int(k))
    return fw.with_points(image[:, :n] / w[:, None])
