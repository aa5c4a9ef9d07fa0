"""Exception types shared across the package."""


class SecNavError(Exception):
    """Base class for every error raised by secnav."""


class DegenerateInput(SecNavError, ValueError):
    """Fewer than three distinct points, or every point is collinear."""


class ZeroSpeed(SecNavError, ValueError):
    pass


class InsufficientAnchors(SecNavError):
    """Fewer than three landmarks are inside the detection range."""


class DegenerateGeometry(SecNavError):
    """Anchor layout cannot pin down a position (collinear or coincident anchors)."""


class NonConvergence(RuntimeWarning):
    """Position refinement hit its iteration cap before the gradient vanished."""


class SingularInnovation(SecNavError, FloatingPointError):
    pass


class EmptyCluster(SecNavError, ValueError):
    pass


class ZeroLengthTruth(SecNavError, ValueError):
    pass


class ScenarioError(SecNavError):
    pass


class ParseError(ScenarioError, ValueError):
    def __init__(self, message, *, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class VersionMismatch(ScenarioError):
    pass
