"""Exception types shared across the package."""


class InvalidProfile(ValueError):
    """A corner germ violates its defining constraints."""


class SideMismatch(ValueError):
    """A point was requested on the wrong side of a weak corner."""


class GeometryError(ValueError):
    """A boundary curve is not closed, not simple, or badly oriented."""


class PreconditionViolated(ValueError):
    """A hypothesis of the vanishing argument (e.g. distinct potentials) does not hold."""


class DegenerateTangents(ValueError):
    """Two tangent directions are parallel."""


class SolveFailure(RuntimeError):
    """The dense Nystrom system is numerically singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class BesselFailure(ArithmeticError):
    """A Bessel/Hankel evaluation returned non-finite values."""


class NoRootInBracket(ValueError):
    """No sign change of the transmission determinant at scan resolution."""


class ConfigError(ValueError):
    """A geometry or run configuration cannot be interpreted."""
