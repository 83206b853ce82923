"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A precondition on an argument was violated."""


class InvalidParameters(InvalidArgument):
    """Rank-one parameters are malformed at some stage."""

    def __init__(self, message, stage=None):
        super().__init__(message if stage is None else f"stage {stage}: {message}")
        self.stage = stage


class InvalidPlan(InvalidArgument):
    """A subsequence plan violates its gap condition."""


class DegenerateCylinder(ArithmeticError):
    """A cylinder has zero estimated measure, so it cannot be normalized."""


class OrbitError(ArithmeticError):
    """Orbit evaluation failed at a definite time step."""

    def __init__(self, message, n):
        super().__init__(f"{message} (n={n})")
        self.n = n


class UndefinedRatio(ArithmeticError):
    """The denominator of a ratio average vanished."""


class ResourceError(RuntimeError):
    """A configured size budget would be exceeded."""
