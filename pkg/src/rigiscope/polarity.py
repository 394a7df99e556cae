"""Point / hyperplane polarity between exterior hyperbolic space and H^n.

A point p with <p,p>_1 > 0 is the pole of the hyperplane
{x in H^n : <p,x>_1 = 0}; two such hyperplanes meet at angle
arccos(<p,q>_1) for normalized poles.  Angle constraints on a family of
hyperplanes are then exactly distance constraints on their poles, so
stiffness of a plane-and-angle system is first-order rigidity of the pole
framework in D^n.

The constraint matrix here is assembled independently of
:mod:`rigiscope.rigidity` so the two verdicts can be cross-checked.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParseError, UltraparallelError
from .framework import Framework, Graph
from .geometry import DEFAULT_TOL, GeometrySpec, involution_J
from .rigidity import DEFAULT_RANK_EPS, decompose, rigidity_verdict


def _lorentz(x, y) -> float:
    return float(x[:-1] @ y[:-1] - x[-1] * y[-1])


@dataclass(frozen=True, eq=False)
class HyperplaneH:
    """Hyperplane of H^n stored by its normalized pole (<p,p>_1 = 1)."""

    pole: np.ndarray

    @property
    def dimension(self) -> int:
        return self.pole.shape[0] - 1

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        return abs(_lorentz(self.pole, np.asarray(x, dtype=float))) <= tol


def polar_hyperplane(p, tol: float = DEFAULT_TOL) -> HyperplaneH:
    """Hyperplane polar to the exterior point ``p`` (ambient coordinates)."""
    p = np.asarray(p, dtype=float)
    q = _lorentz(p, p)
    if q <= tol:
        raise DomainError(f"{p.tolist()} is not an exterior point (<p,p>_1 = {q!r})")
    pole = p / math.sqrt(q)
    if pole[-1] < 0:
        pole = -pole
    pole.setflags(write=False)
    return HyperplaneH(pole)


def hyperplane_angle(P: HyperplaneH, Q: HyperplaneH, tol: float = DEFAULT_TOL) -> float:
    """arccos(<p,q>_1) for intersecting hyperplanes."""
    c = _lorentz(P.pole, Q.pole)
    if abs(c) > 1.0 + tol:
        raise UltraparallelError(f"hyperplanes do not intersect (<p,q>_1 = {c!r})")
    return math.acos(min(1.0, max(-1.0, c)))


@dataclass(frozen=True, eq=False)
class AngleSystem:
    """Hyperplanes of H^n with angle constraints along ``graph`` edges.

    ``angles`` holds arccos(<p_i,p_j>_1) per edge, or None for ultraparallel
    pairs admitted with ``formal``; ``invariants`` holds <p_i,p_j>_1.
    """

    graph: Graph
    hyperplanes: tuple
    angles: tuple
    invariants: tuple

    @property
    def dimension(self) -> int:
        return self.hyperplanes[0].dimension if self.hyperplanes else 0

    @property
    def poles(self) -> np.ndarray:
        return np.array([h.pole for h in self.hyperplanes])


def angle_system(poles, angle_edges, tol: float = DEFAULT_TOL, formal: bool = False) -> AngleSystem:
    planes = tuple(polar_hyperplane(p, tol) for p in poles)
    graph = Graph(len(planes), tuple(angle_edges))
    angles, invariants = [], []
    for idx, (i, j) in enumerate(graph.edges):
        if not (0 <= i < len(planes) and 0 <= j < len(planes)) or i == j:
            raise DomainError(f"angle edge {idx} = ({i}, {j}) is not a pair of distinct hyperplanes",
                              edge=idx)
        invariants.append(_lorentz(planes[i].pole, planes[j].pole))
        try:
            angles.append(hyperplane_angle(planes[i], planes[j], tol))
        except UltraparallelError as exc:
            if not formal:
                raise UltraparallelError(f"angle edge {idx} = ({i}, {j}): {exc}", edge=idx) from None
            angles.append(None)
    return AngleSystem(graph, planes, tuple(angles), tuple(invariants))


def polar_framework(sys: AngleSystem) -> Framework:
    """The D^n point framework of the poles (ambient coordinates)."""
    n = sys.dimension
    return Framework(sys.graph, GeometrySpec.proj_exterior_hyperbolic(n), sys.poles, "ambient")


def angle_system_from_framework(fw: Framework, tol: float = DEFAULT_TOL,
                                formal: bool = False) -> AngleSystem:
    """Read a D^n framework (model or ambient coordinates) as an angle system."""
    pts = fw.points
    if fw.coordinates == "model":
        pts = np.hstack([pts, np.ones((fw.vertex_count, 1))])
    return angle_system(pts, fw.edges, tol, formal)


# -- stiffness ---------------------------------------------------------------

def _angle_constraint_matrix(poles: np.ndarray, edges) -> np.ndarray:
    """d<p_i,p_j>_1 = 0 per edge and d<p_i,p_i>_1 = 0 per plane."""
    v, m = poles.shape
    J = involution_J(1, poles)
    rows = []
    for i, j in edges:
        r = np.zeros(v * m)
        r[i * m:(i + 1) * m] = J[j]
        r[j * m:(j + 1) * m] = J[i]
        rows.append(r)
    for k in range(v):
        r = np.zeros(v * m)
        r[k * m:(k + 1) * m] = J[k]
        rows.append(r)
    return np.array(rows).reshape(len(rows), v * m)


def lorentz_generators(n: int) -> list:
    """Rotations and boosts spanning so(n,1)."""
    m = n + 1
    gens = []
    for i in range(n):
        for j in range(i + 1, n):
            A = np.zeros((m, m))
            A[i, j], A[j, i] = 1.0, -1.0
            gens.append(A)
    for i in range(n):
        A = np.zeros((m, m))
        A[i, n] = A[n, i] = 1.0
        gens.append(A)
    return gens


@dataclass
class StiffnessVerdict:
    verdict: str
    rank: int
    motion_dimension: int
    trivial_dimension: int
    spanning: bool
    polar: Framework = field(repr=False)
    angles: tuple = ()

    @property
    def stiff(self) -> bool:
        return self.verdict == "STIFF"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "motion_dim": self.motion_dimension,
            "trivial_dim": self.trivial_dimension,
            "internal_dim": self.motion_dimension - self.trivial_dimension,
            "spanning": self.spanning,
            "angles": [None if a is None else float(a) for a in self.angles],
            "poles": self.polar.points.tolist(),
        }


def stiffness_verdict(sys: AngleSystem, rank_eps: float = DEFAULT_RANK_EPS) -> StiffnessVerdict:
    """STIFF iff every first-order motion of the planes is an isometry restriction.

    ``spanning`` is False when the poles lie in a proper linear subspace; the
    verdict is still the dimension comparison.
    """
    poles = sys.poles
    v = len(sys.hyperplanes)
    if v == 0:
        raise DomainError("angle system has no hyperplanes")
    n = sys.dimension
    C = _angle_constraint_matrix(poles, sys.graph.edges)
    svd = decompose(C, rank_eps)
    motion_dim = C.shape[1] - svd.rank
    trivial = np.column_stack([(poles @ A.T).ravel() for A in lorentz_generators(n)])
    trivial_dim = decompose(trivial, rank_eps).rank
    spanning = decompose(poles, rank_eps).rank == n + 1
    return StiffnessVerdict("STIFF" if motion_dim == trivial_dim else "FLEXIBLE", svd.rank,
                            motion_dim, trivial_dim, spanning, polar_framework(sys), sys.angles)


# -- JSON --------------------------------------------------------------------

def parse_angle_system(text, tol: float = DEFAULT_TOL, formal: bool = False) -> AngleSystem:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be a JSON object")
    for key in ("hyperplanes", "angle_edges"):
        if key not in doc:
            raise ParseError(f"missing required field {key!r}", field=key)
    planes = doc["hyperplanes"]
    if not isinstance(planes, list) or not planes:
        raise ParseError("expected a nonempty list of poles", field="hyperplanes")
    width = len(planes[0]) if isinstance(planes[0], list) else None
    for k, pole in enumerate(planes):
        if (not isinstance(pole, list) or len(pole) != width or width < 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pole)):
            raise ParseError("expected a list of numbers matching the first pole", field=f"hyperplanes[{k}]")
    edges = doc["angle_edges"]
    if not isinstance(edges, list):
        raise ParseError("expected a list of index pairs", field="angle_edges")
    for idx, pair in enumerate(edges):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)):
            raise ParseError("expected an index pair", field=f"angle_edges[{idx}]")
    return angle_system(np.asarray(planes, dtype=float), [tuple(e) for e in edges], tol, formal)


def serialize_angle_system(sys: AngleSystem) -> bytes:
    doc = {"hyperplanes": sys.poles.tolist(), "angle_edges": [list(e) for e in sys.graph.edges]}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def stiffness_report(sys: AngleSystem, rank_eps: float = DEFAULT_RANK_EPS,
                     cross_check: bool = True) -> dict:
    """Stiffness record plus the direct D^n rigidity verdict of the poles."""
    sv = stiffness_verdict(sys, rank_eps)
    out = sv.to_dict()
    if cross_check:
        direct = rigidity_verdict(sv.polar, rank_eps=rank_eps, formal=True)
        out["polar_verdict"] = direct.verdict
        out["agree"] = (direct.rigid == sv.stiff)
    return out
