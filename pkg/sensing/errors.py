"""
Exceptions raised by the sensing package.
Everything a caller can fix by changing its input derives from ValidationError.
"""


class ErmError(Exception):
    """Base class for toolkit errors."""


class ValidationError(ErmError, ValueError):
    """Input rejected; the CLI maps this to exit code 1."""


class ScenarioError(ValidationError):
    """Malformed scenario or CSV file."""

    def __init__(self, message, path=None, line=None, field=None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class InvariantError(ValidationError):
    """A domain type was constructed with values it does not accept."""


class GeometryError(ValidationError):
    """Terminal placed on a wall, or a degenerate wall."""


class EllipseDegenerate(ValidationError):
    """Path length does not exceed the BS-UE baseline (LoS or nonphysical record)."""


class BehindBaseline(ValidationError):
    """Solved distance to the reflection point is not positive."""


class NoConvergence(ValidationError):
    """Root finder hit max_iter without meeting tolerance."""


class AmbiguousRoot(ValidationError):
    """Only the law-of-cosines root that violates the mirror constraint was found."""


class DegenerateBisector(ValidationError):
    """BS, reflection point and UE are collinear with the point between them."""


class TooFewClusters(ValidationError):
    """Not enough cluster peaks to pick the reference reflection loss."""


class VerticalLine(ValidationError):
    """Slope-intercept form is undefined; use the swapped-axis form."""


class EmptyInput(ValidationError):
    """Statistics requested over no values."""


class UsageError(ValidationError):
    """Bad command line."""
