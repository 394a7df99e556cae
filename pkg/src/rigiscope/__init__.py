"""First-order rigidity of bar-and-joint frameworks in Euclidean, spherical,
hyperbolic and exterior hyperbolic geometry."""

__version__ = "0.1.0"

from .errors import (AbsoluteError, DomainError, EquatorError, FrameworkError,
                     NumericDomainError, ParseError, RigiscopeError, UltraparallelError,
                     UnsupportedModelError)
from .framework import Framework, Graph, edge_lengths, load, parse, save, serialize, validate
from .geometry import DEFAULT_TOL, GeometrySpec, Model, distance
from .polarity import angle_system, angle_system_from_framework, stiffness_verdict
from .polytopes import canonical_polytope, example, flexible_example
from .rigidity import (motion_space, numeric_rank, rigidity_matrix, rigidity_verdict,
                       stress_space, trivial_motion_space)
from .transfer import (cone_framework, transfer_framework, transfer_matrix, transfer_motion,
                       verify_equivalence, verify_factorization)

__all__ = [
    "AbsoluteError", "DomainError", "EquatorError", "FrameworkError", "NumericDomainError",
    "ParseError", "RigiscopeError", "UltraparallelError", "UnsupportedModelError",
    "Framework", "Graph", "edge_lengths", "load", "parse", "save", "serialize", "validate",
    "DEFAULT_TOL", "GeometrySpec", "Model", "distance",
    "angle_system", "angle_system_from_framework", "stiffness_verdict",
    "canonical_polytope", "example", "flexible_example",
    "motion_space", "numeric_rank", "rigidity_matrix", "rigidity_verdict", "stress_space",
    "trivial_motion_space",
    "cone_framework", "transfer_framework", "transfer_matrix", "transfer_motion",
    "verify_equivalence", "verify_factorization",
]
