"""Rigidity matrices, numeric rank, motion / stress spaces and verdicts."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import AbsoluteError, FrameworkError
from .framework import Framework, ValidationReport, _structural, require_valid
from .geometry import DEFAULT_TOL, GeometrySpec

DEFAULT_RANK_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class RigidityMatrix:
    """Dense rigidity matrix with row / column labels.

    ``kind`` is ``"euclidean"``, ``"projective"`` or ``"ambient"``.
    ``curvature`` is the K used by projective matrices (0 for Euclidean,
    None for ambient ones).
    """

    matrix: np.ndarray
    row_labels: tuple
    column_labels: tuple
    convention: str
    kind: str
    geometry: GeometrySpec
    framework: Framework
    curvature: Optional[float] = None
    degenerate_edges: tuple = ()

    @property
    def shape(self):
        return self.matrix.shape

    def trivial_coefficients(self) -> np.ndarray:
        """Form coefficients whose isometry generators give the trivial motions."""
        n = self.framework.dimension
        if self.kind == "ambient":
            return self.geometry.form
        return np.append(np.ones(n), float(self.curvature))


def _column_labels(v: int, width: int) -> tuple:
    return tuple(f"v{k}.x{c}" for k in range(v) for c in range(width))


def _edge_labels(fw: Framework) -> tuple:
    return tuple(f"e({i},{j})" for i, j in fw.edges)


def _check_structure(fw: Framework, convention: str):
    report = ValidationReport()
    if not _structural(fw, report):
        report.raise_first()
    structural = [v for v in report.violations if v.kind in ("index", "loop", "duplicate", "nonfinite")]
    if structural:
        raise FrameworkError(structural[0].message)
    if fw.coordinates != convention:
        raise FrameworkError(
            f"matrix needs {convention} coordinates, framework has {fw.coordinates}")


def _degenerate_edges(fw: Framework) -> tuple:
    pts = fw.points
    return tuple(idx for idx, (i, j) in enumerate(fw.edges) if np.array_equal(pts[i], pts[j]))


def rigidity_matrix_euclidean(fw: Framework) -> RigidityMatrix:
    """R_E: row {i,j} holds p_i - p_j in block i and p_j - p_i in block j.

    Any model-coordinate framework is accepted and read as raw R^n points.
    """
    _check_structure(fw, "model")
    mat = _kernels.projective_rows(fw.points, fw.edge_array, 0.0)
    return RigidityMatrix(mat, _edge_labels(fw), _column_labels(fw.vertex_count, fw.dimension),
                          "model", "euclidean", GeometrySpec.euclidean(fw.dimension), fw, 0.0,
                          _degenerate_edges(fw))


def rigidity_matrix_projective(fw: Framework, K: Optional[int] = None,
                               tol: float = DEFAULT_TOL) -> RigidityMatrix:
    """R_X of a projective model: row {i,j} holds k_ij in block i and k_ji in block j.

    k_ij = ((1 + K p_i.p_j) / (1 + K p_i.p_i)) p_i - p_j.
    """
    _check_structure(fw, "model")
    if K is None:
        K = fw.geometry.curvature_sign
        if K is None:
            raise FrameworkError(f"model {fw.geometry.model.value} has no curvature sign; pass K")
    if K not in (1, -1):
        raise ValueError(f"K must be +1 or -1, got {K!r}")
    denom = 1.0 + K * np.einsum("ij,ij->i", fw.points, fw.points)
    for k in np.flatnonzero(np.abs(denom) <= tol):
        raise AbsoluteError(
            f"vertex {k} lies on the absolute (1 + K p.p = {denom[k]!r})", vertex=int(k))
    mat = _kernels.projective_rows(fw.points, fw.edge_array, float(K))
    geometry = fw.geometry
    if geometry.curvature_sign != K:
        geometry = (GeometrySpec.proj_sphere if K == 1 else GeometrySpec.proj_hyperbolic)(fw.dimension)
    return RigidityMatrix(mat, _edge_labels(fw), _column_labels(fw.vertex_count, fw.dimension),
                          "model", "projective", geometry, fw, float(K), _degenerate_edges(fw))


def rigidity_matrix_ambient(fw: Framework) -> RigidityMatrix:
    """Ambient matrix: |E| edge rows then one tangency row per vertex.

    Kernel = ambient first-order motions u with <p_i,u_j> + <p_j,u_i> = 0 and
    <p_k,u_k> = 0 (Euclidean: (p_i - p_j).(u_i - u_j) = 0 and e.u_k = 0).
    """
    _check_structure(fw, "ambient")
    geo = fw.geometry
    mat = _kernels.ambient_rows(fw.points, fw.edge_array, geo.form, geo.is_euclidean)
    rows = _edge_labels(fw) + tuple(f"t({k})" for k in range(fw.vertex_count))
    return RigidityMatrix(mat, rows, _column_labels(fw.vertex_count, fw.dimension + 1),
                          "ambient", "ambient", geo, fw, None, _degenerate_edges(fw))


def rigidity_matrix(fw: Framework, tol: float = DEFAULT_TOL) -> RigidityMatrix:
    """The natural matrix for ``fw``'s geometry and coordinate convention."""
    if fw.coordinates == "ambient":
        return rigidity_matrix_ambient(fw)
    if fw.geometry.is_euclidean:
        return rigidity_matrix_euclidean(fw)
    return rigidity_matrix_projective(fw, fw.geometry.curvature_sign, tol)


# -- rank and decompositions -------------------------------------------------

@dataclass(frozen=True, eq=False)
class SVDResult:
    rank: int
    singular_values: np.ndarray
    U: np.ndarray
    Vh: np.ndarray
    threshold: float

    @property
    def gap(self) -> Optional[float]:
        """sigma_rank / sigma_{rank+1}; inf when the next value is exactly 0."""
        s = self.singular_values
        if self.rank == 0 or self.rank >= len(s):
            return None
        return float("inf") if s[self.rank] == 0 else float(s[self.rank - 1] / s[self.rank])


def _as_array(M) -> np.ndarray:
    return M.matrix if isinstance(M, RigidityMatrix) else np.asarray(M, dtype=float)


def decompose(M, rank_eps: float = DEFAULT_RANK_EPS) -> SVDResult:
    a = _as_array(M)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return SVDResult(0, np.zeros(0), np.eye(rows), np.eye(cols), 0.0)
    U, s, Vh = np.linalg.svd(a, full_matrices=True)
    threshold = float(s[0]) * max(rows, cols) * rank_eps
    rank = int(np.count_nonzero(s > threshold))
    return SVDResult(rank, s, U, Vh, threshold)


def numeric_rank(M, rank_eps: float = DEFAULT_RANK_EPS) -> int:
    """Count of singular values above sigma_max * max(rows, cols) * rank_eps."""
    return decompose(M, rank_eps).rank


# -- trivial motions ---------------------------------------------------------

def trivial_generators(coefficients) -> np.ndarray:
    """Basis of {A : A^T D + D A = 0}, D = diag(coefficients), shape (g, m, m).

    With a zero last coefficient (Euclidean space) the basis is the rotations
    of the first n coordinates plus the n translations A = E_{i, n+1}.
    """
    a = np.asarray(coefficients, dtype=float)
    m = a.shape[0]
    gens = []
    if a[-1] == 0.0:
        for i in range(m - 1):
            for j in range(i + 1, m - 1):
                A = np.zeros((m, m))
                A[i, j] = 1.0 / a[i]
                A[j, i] = -1.0 / a[j]
                gens.append(A)
        for i in range(m - 1):
            A = np.zeros((m, m))
            A[i, m - 1] = 1.0
            gens.append(A)
    else:
        for i in range(m):
            for j in range(i + 1, m):
                A = np.zeros((m, m))
                A[i, j] = 1.0 / a[i]
                A[j, i] = -1.0 / a[j]
                gens.append(A)
    return np.array(gens).reshape(len(gens), m, m)


def restricted_trivial_matrix(points: np.ndarray, convention: str, coefficients) -> np.ndarray:
    """Columns are generator restrictions (A p_1, ..., A p_v) in ``convention``.

    Model points p are lifted to (p, 1) and the ambient velocity U = A (p, 1)
    is pushed down by the derivative of central projection, U' - U_{n+1} p.
    """
    gens = trivial_generators(coefficients)
    if convention == "ambient":
        return _kernels.restrict_generators(gens, points)
    v, n = points.shape
    lifted = np.hstack([points, np.ones((v, 1))])
    amb = _kernels.restrict_generators(gens, lifted).reshape(v, n + 1, -1)
    model = amb[:, :n, :] - amb[:, n:, :] * points[:, :, None]
    return model.reshape(v * n, -1)


@dataclass(frozen=True, eq=False)
class TrivialSpace:
    basis: np.ndarray
    dimension: int
    generator_dimension: int
    generators: np.ndarray
    restriction: np.ndarray

    @property
    def injective(self) -> bool:
        return self.dimension == self.generator_dimension


def _trivial_space(points, convention, coefficients, rank_eps) -> TrivialSpace:
    R = restricted_trivial_matrix(points, convention, coefficients)
    gens = trivial_generators(coefficients)
    svd = decompose(R, rank_eps)
    return TrivialSpace(svd.U[:, :svd.rank], svd.rank, gens.shape[0], gens, R)


def trivial_motion_space(fw: Framework, rank_eps: float = DEFAULT_RANK_EPS) -> TrivialSpace:
    """Restrictions of the isometry generators of ``fw``'s geometry to its vertices."""
    if fw.coordinates == "ambient":
        coeffs = fw.geometry.form
    else:
        kappa = fw.geometry.model_kappa
        coeffs = np.append(np.ones(fw.dimension), float(kappa))
    return _trivial_space(fw.points, fw.coordinates, coeffs, rank_eps)


def trivial_space_for(M: RigidityMatrix, rank_eps: float = DEFAULT_RANK_EPS) -> TrivialSpace:
    return _trivial_space(M.framework.points, M.convention, M.trivial_coefficients(), rank_eps)


# -- motion and stress spaces ------------------------------------------------

@dataclass(frozen=True, eq=False)
class MotionSpace:
    basis: np.ndarray
    dimension: int
    trivial_dimension: Optional[int] = None

    @property
    def internal_dimension(self) -> Optional[int]:
        if self.trivial_dimension is None:
            return None
        return self.dimension - self.trivial_dimension


@dataclass(frozen=True, eq=False)
class StressSpace:
    basis: np.ndarray
    dimension: int
    row_labels: tuple = ()


def motion_space(M, rank_eps: float = DEFAULT_RANK_EPS) -> MotionSpace:
    """Orthonormal kernel basis (columns) with its trivial / internal split."""
    svd = decompose(M, rank_eps)
    basis = svd.Vh[svd.rank:].T.copy()
    trivial = None
    if isinstance(M, RigidityMatrix):
        trivial = trivial_space_for(M, rank_eps).dimension
    return MotionSpace(basis, basis.shape[1], trivial)


def stress_space(M, rank_eps: float = DEFAULT_RANK_EPS) -> StressSpace:
    """Orthonormal left-kernel basis (columns), one entry per matrix row."""
    svd = decompose(M, rank_eps)
    basis = svd.U[:, svd.rank:].copy()
    labels = M.row_labels if isinstance(M, RigidityMatrix) else ()
    return StressSpace(basis, basis.shape[1], labels)


# -- verdict -----------------------------------------------------------------

@dataclass(eq=False)
class Verdict:
    verdict: str
    rank: int
    motion_dimension: int
    trivial_dimension: int
    generator_dimension: int
    stress_dimension: int
    model_rank: int
    spanning: bool
    isostatic_rank: Optional[int]
    convention: str
    singular_values: np.ndarray = field(repr=False)
    singular_gap: Optional[float] = None
    degenerate_edges: tuple = ()

    @property
    def rigid(self) -> bool:
        return self.verdict == "RIGID"

    @property
    def internal_dimension(self) -> int:
        return self.motion_dimension - self.trivial_dimension

    @property
    def isostatic(self) -> bool:
        return self.rigid and self.stress_dimension == 0

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "motion_dim": self.motion_dimension,
            "trivial_dim": self.trivial_dimension,
            "internal_dim": self.internal_dimension,
            "stress_dim": self.stress_dimension,
            "generator_dim": self.generator_dimension,
            "model_rank": self.model_rank,
            "isostatic_rank": self.isostatic_rank,
            "isostatic": self.isostatic,
            "spanning": self.spanning,
            "convention": self.convention,
            "degenerate_edges": list(self.degenerate_edges),
            "singular_gap": self.singular_gap,
            "singular_values": [float(s) for s in self.singular_values],
        }


def affinely_spanning(fw: Framework, rank_eps: float = DEFAULT_RANK_EPS) -> bool:
    pts = fw.points
    if fw.coordinates == "model":
        pts = np.hstack([pts, np.ones((fw.vertex_count, 1))])
    return numeric_rank(pts, rank_eps) == fw.dimension + 1 if len(pts) else False


def verdict_for_matrix(M: RigidityMatrix, rank_eps: float = DEFAULT_RANK_EPS) -> Verdict:
    fw = M.framework
    svd = decompose(M, rank_eps)
    rows, cols = M.shape
    motion_dim = cols - svd.rank
    trivial = trivial_space_for(M, rank_eps)
    n, v = fw.dimension, fw.vertex_count
    spanning = affinely_spanning(fw, rank_eps)
    iso = n * v - n * (n + 1) // 2 if spanning and v >= n + 1 else None
    return Verdict(
        verdict="RIGID" if motion_dim == trivial.dimension else "FLEXIBLE",
        rank=svd.rank,
        motion_dimension=motion_dim,
        trivial_dimension=trivial.dimension,
        generator_dimension=trivial.generator_dimension,
        stress_dimension=rows - svd.rank,
        model_rank=n * v - motion_dim,
        spanning=spanning,
        isostatic_rank=iso,
        convention=M.convention,
        singular_values=svd.singular_values,
        singular_gap=svd.gap,
        degenerate_edges=M.degenerate_edges,
    )


def rigidity_verdict(fw: Framework, tol: float = DEFAULT_TOL, rank_eps: float = DEFAULT_RANK_EPS,
                     formal: bool = False) -> Verdict:
    """RIGID iff every first-order motion is a restricted trivial motion."""
    require_valid(fw, tol, formal)
    return verdict_for_matrix(rigidity_matrix(fw, tol), rank_eps)


# -- export ------------------------------------------------------------------

def matrix_to_csv(M: RigidityMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row", *M.column_labels])
    for label, row in zip(M.row_labels, M.matrix):
        writer.writerow([label, *(repr(float(x)) for x in row)])
    return buf.getvalue()
