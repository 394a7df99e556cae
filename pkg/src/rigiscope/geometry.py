"""Bilinear forms, distances and the point / motion maps between geometries.

Ambient points live in R^{n+1}; model points are the n coordinates obtained by
central projection onto the hyperplane x_{n+1} = 1.  Everything here is a pure
function of its inputs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import AbsoluteError, DomainError, EquatorError, NumericDomainError

DEFAULT_TOL = 1e-9


class Model(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE_AMBIENT = "sphere_ambient"
    PROJ_SPHERE = "proj_sphere"
    PROJ_HYPERBOLIC = "proj_hyperbolic"
    PROJ_EXTERIOR_HYPERBOLIC = "proj_exterior_hyperbolic"
    AMBIENT_FORM = "ambient_form"


_SPHERICAL = (Model.SPHERE_AMBIENT, Model.PROJ_SPHERE)
_HYPERBOLIC = (Model.PROJ_HYPERBOLIC, Model.PROJ_EXTERIOR_HYPERBOLIC)


@dataclass(frozen=True)
class GeometrySpec:
    """Which metric space a framework lives in.

    ``form_coefficients`` are the diagonal entries a_i of the ambient form
    sum a_i x_i y_i.  For Euclidean space the last coefficient is 0; for every
    other model all coefficients are nonzero.  ``level`` is the value c of
    <x,x> on the surface (None for Euclidean) and ``curvature_sign`` the K
    used by the projective models (None for Euclidean and general forms).
    """

    model: Model
    dimension: int
    form_coefficients: tuple
    level: Optional[float] = None
    curvature_sign: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(
            self, "form_coefficients", tuple(float(a) for a in self.form_coefficients)
        )
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if len(self.form_coefficients) != self.dimension + 1:
            raise ValueError(
                f"expected {self.dimension + 1} form coefficients, "
                f"got {len(self.form_coefficients)}"
            )
        if self.model is Model.EUCLIDEAN:
            return
        if any(a == 0.0 for a in self.form_coefficients):
            raise ValueError("form coefficients must all be nonzero outside Euclidean space")
        if self.level is None or self.level == 0.0:
            raise ValueError("level c must be nonzero for non-Euclidean models")

    # -- constructors -------------------------------------------------------

    @classmethod
    def euclidean(cls, n: int) -> "GeometrySpec":
        return cls(Model.EUCLIDEAN, n, (1.0,) * n + (0.0,))

    @classmethod
    def sphere(cls, n: int) -> "GeometrySpec":
        return cls(Model.SPHERE_AMBIENT, n, (1.0,) * (n + 1), 1.0, 1)

    @classmethod
    def proj_sphere(cls, n: int) -> "GeometrySpec":
        return cls(Model.PROJ_SPHERE, n, (1.0,) * (n + 1), 1.0, 1)

    @classmethod
    def proj_hyperbolic(cls, n: int) -> "GeometrySpec":
        return cls(Model.PROJ_HYPERBOLIC, n, (1.0,) * n + (-1.0,), -1.0, -1)

    @classmethod
    def proj_exterior_hyperbolic(cls, n: int) -> "GeometrySpec":
        return cls(Model.PROJ_EXTERIOR_HYPERBOLIC, n, (1.0,) * n + (-1.0,), 1.0, -1)

    @classmethod
    def ambient_form(cls, coefficients: Sequence[float], level: float) -> "GeometrySpec":
        return cls(Model.AMBIENT_FORM, len(coefficients) - 1, tuple(coefficients), float(level))

    @classmethod
    def signature(cls, n: int, k: int, level: float) -> "GeometrySpec":
        """The surface <x,x>_k = c with k trailing minus signs."""
        if not 0 <= k <= n + 1:
            raise ValueError(f"k must lie in [0, {n + 1}], got {k}")
        return cls.ambient_form((1.0,) * (n + 1 - k) + (-1.0,) * k, level)

    @classmethod
    def for_model(cls, model, n: int, form_coefficients=None, level=None) -> "GeometrySpec":
        model = Model(model)
        if model is Model.AMBIENT_FORM:
            if form_coefficients is None or level is None:
                raise ValueError("ambient_form needs form_coefficients and level")
            spec = cls.ambient_form(form_coefficients, level)
            if spec.dimension != n:
                raise ValueError(
                    f"form has {len(spec.form_coefficients)} coefficients, "
                    f"dimension {n} needs {n + 1}"
                )
            return spec
        return {
            Model.EUCLIDEAN: cls.euclidean,
            Model.SPHERE_AMBIENT: cls.sphere,
            Model.PROJ_SPHERE: cls.proj_sphere,
            Model.PROJ_HYPERBOLIC: cls.proj_hyperbolic,
            Model.PROJ_EXTERIOR_HYPERBOLIC: cls.proj_exterior_hyperbolic,
        }[model](n)

    # -- derived data -------------------------------------------------------

    @property
    def form(self) -> np.ndarray:
        return np.asarray(self.form_coefficients, dtype=float)

    @property
    def is_euclidean(self) -> bool:
        return self.model is Model.EUCLIDEAN

    @property
    def model_kappa(self) -> Optional[int]:
        """Last form coefficient of the model-coordinate lift (x, 1).

        0 for Euclidean, +1 spherical, -1 hyperbolic / exterior hyperbolic.
        None when the geometry has no projective model.
        """
        if self.model is Model.EUCLIDEAN:
            return 0
        if self.model in _SPHERICAL or self.model in _HYPERBOLIC:
            return int(self.curvature_sign)
        return None

    @property
    def allowed_coordinates(self) -> tuple:
        if self.model in (Model.SPHERE_AMBIENT, Model.AMBIENT_FORM):
            return ("ambient",)
        return ("model", "ambient")

    @property
    def default_coordinates(self) -> str:
        return self.allowed_coordinates[0]

    def generator_dimension(self) -> int:
        n = self.dimension
        return n * (n + 1) // 2


def e_vector(m: int) -> np.ndarray:
    e = np.zeros(m)
    e[-1] = 1.0
    return e


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _check_ambient(spec: GeometrySpec, *vectors):
    for v in vectors:
        if v.shape != (spec.dimension + 1,):
            raise ValueError(
                f"expected ambient vector of length {spec.dimension + 1}, got shape {v.shape}"
            )


def bilinear_form(spec: GeometrySpec, x, y) -> float:
    """sum_i a_i x_i y_i with the coefficients of ``spec``."""
    x, y = _vec(x), _vec(y)
    _check_ambient(spec, x, y)
    return float(np.sum(spec.form * x * y))


def form_value(coefficients, x, y) -> float:
    return float(np.sum(_vec(coefficients) * _vec(x) * _vec(y)))


def safe_arccos(value: float, tol: float = DEFAULT_TOL) -> float:
    if value > 1.0 + tol or value < -1.0 - tol:
        raise NumericDomainError(f"arccos argument {value!r} outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, value)))


def safe_arccosh(value: float, tol: float = DEFAULT_TOL) -> float:
    if value < 1.0 - tol:
        raise NumericDomainError(f"arccosh argument {value!r} below 1")
    return math.acosh(max(1.0, value))


def _check_inside_ball(x: np.ndarray, tol: float, vertex=None):
    r2 = float(x @ x)
    if abs(1.0 - r2) <= tol:
        raise AbsoluteError(f"point {x.tolist()} lies on the absolute", vertex=vertex)
    if r2 > 1.0:
        raise DomainError(f"point {x.tolist()} lies outside the unit ball", vertex=vertex)


def lift(spec: GeometrySpec, x) -> np.ndarray:
    """Homogeneous ambient representative of a point.

    Model points become (x, 1); ambient points are returned unchanged.
    """
    x = _vec(x)
    if x.shape == (spec.dimension,):
        return np.append(x, 1.0)
    _check_ambient(spec, x)
    return x


def _normalized_form(coefficients, x, y, tol: float) -> float:
    qx = form_value(coefficients, x, x)
    qy = form_value(coefficients, y, y)
    if abs(qx) <= tol or abs(qy) <= tol:
        raise AbsoluteError("point on the absolute has no normalized representative")
    return form_value(coefficients, x, y) / math.sqrt(abs(qx) * abs(qy))


def distance(spec: GeometrySpec, x, y, tol: float = DEFAULT_TOL) -> float:
    """Distance between two points of ``spec`` (model or ambient coordinates).

    For exterior hyperbolic space there is no model distance; the normalized
    form value <x^, y^>_1 is returned instead.  General ambient forms likewise
    return the normalized form value.
    """
    x, y = _vec(x), _vec(y)
    if x.shape != y.shape:
        raise ValueError(f"point shapes differ: {x.shape} vs {y.shape}")
    model_coords = x.shape == (spec.dimension,)
    if not model_coords:
        _check_ambient(spec, x, y)
    m = spec.model

    if m is Model.EUCLIDEAN:
        return float(np.linalg.norm(x - y))
    if m in _SPHERICAL:
        if model_coords:
            c = (1.0 + x @ y) / (math.sqrt(1.0 + x @ x) * math.sqrt(1.0 + y @ y))
        else:
            c = (x @ y) / (np.linalg.norm(x) * np.linalg.norm(y))
        return safe_arccos(float(c), tol)
    if m is Model.PROJ_HYPERBOLIC:
        if model_coords:
            _check_inside_ball(x, tol)
            _check_inside_ball(y, tol)
            c = (1.0 - x @ y) / (math.sqrt(1.0 - x @ x) * math.sqrt(1.0 - y @ y))
        else:
            c = -_normalized_form(spec.form, x, y, tol)
        return safe_arccosh(float(c), tol)
    # exterior hyperbolic and general forms: normalized invariant
    return _normalized_form(spec.form, lift(spec, x), lift(spec, y), tol)


def gnomic_project(x, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Central projection x -> x / (e.x) onto the hyperplane x_{n+1} = 1."""
    x = _vec(x)
    s = float(x[-1])
    if s <= tol:
        raise EquatorError(f"point {x.tolist()} has e.x = {s!r}; not in the open upper half")
    out = x / s
    out[-1] = 1.0
    return out


def normalize_to_surface(spec: GeometrySpec, x, tol: float = DEFAULT_TOL,
                         formal: bool = False) -> np.ndarray:
    """Representative of the ray through ``x`` on the surface of ``spec``.

    Sphere: x/|x|.  Surfaces <x,x> = c: x/sqrt(|<x,x>|).  Euclidean: the
    gnomic projection.  With ``formal`` the sign of <x,x> may differ from the
    sign of c (mixed H^n / D^n frameworks).
    """
    x = _vec(x)
    _check_ambient(spec, x)
    if spec.is_euclidean:
        return gnomic_project(x, tol)
    if float(x[-1]) <= tol:
        raise EquatorError(f"point {x.tolist()} has last coordinate {x[-1]!r} <= 0")
    q = bilinear_form(spec, x, x)
    if abs(q) <= tol:
        raise AbsoluteError(f"point {x.tolist()} lies on the absolute <x,x> = 0")
    if not formal and math.copysign(1.0, q) != math.copysign(1.0, spec.level):
        raise DomainError(
            f"<x,x> = {q!r} has the wrong sign for the surface <x,x> = {spec.level}"
        )
    return x / math.sqrt(abs(q))


def involution_J(k: int, x) -> np.ndarray:
    """Negate the last ``k`` coordinates."""
    x = _vec(x)
    if not 0 <= k <= x.shape[-1]:
        raise ValueError(f"k must lie in [0, {x.shape[-1]}], got {k}")
    out = x.copy()
    if k:
        out[..., -k:] *= -1.0
    return out


def motion_sphere_to_euclid(p, u, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(u - (u.e) e) / (e.p): motion at p on S^n_+ to motion at psi(p) in E^n."""
    p, u = _vec(p), _vec(u)
    s = float(p[-1])
    if s <= tol:
        raise EquatorError(f"point {p.tolist()} lies on or below the equator")
    out = u.copy()
    out[-1] = 0.0
    return out / s


def motion_euclid_to_sphere(q, v, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(v - (v.q) e) / sqrt(q.q): inverse of :func:`motion_sphere_to_euclid`."""
    q, v = _vec(q), _vec(v)
    if abs(float(v[-1])) > tol:
        raise ValueError(f"Euclidean motion vector must satisfy e.v = 0, got {v[-1]!r}")
    out = v - float(v @ q) * e_vector(q.shape[0])
    return out / math.sqrt(float(q @ q))


def motion_X_to_sphere(p, u, k: int) -> np.ndarray:
    """J_k(u) / sqrt(p.p): motion on X^n_{c,k} to motion on S^n_+."""
    p = _vec(p)
    return involution_J(k, u) / math.sqrt(float(p @ p))
