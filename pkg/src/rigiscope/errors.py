"""Exception hierarchy.

Analysis-domain problems (points on the absolute, on the equator, outside a
numeric domain) derive from :class:`DomainError`; malformed input derives from
:class:`ParseError`. The CLI maps the two families to different exit codes.
"""


class RigiscopeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RigiscopeError):
    """A point or value lies outside the domain an operation needs."""

    def __init__(self, message, vertex=None, edge=None):
        super().__init__(message)
        self.vertex = vertex
        self.edge = edge


class EquatorError(DomainError):
    """Homogenizing coordinate is (numerically) zero."""


class AbsoluteError(DomainError):
    """Point lies on the absolute quadric <x,x> = 0."""


class NumericDomainError(DomainError):
    """arccos / arccosh argument outside its domain beyond tolerance."""


class UltraparallelError(DomainError):
    """Two hyperplanes of H^n do not intersect."""


class FrameworkError(RigiscopeError):
    """Structurally invalid framework (bad indices, loops, wrong shapes)."""


class ParseError(RigiscopeError):
    """Malformed framework or angle-system document."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.field = field
        self.line = line


class UnsupportedModelError(ParseError):
    """Unknown geometry model string."""
