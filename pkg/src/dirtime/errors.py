"""Exception hierarchy."""


class DirtimeError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(DirtimeError, ValueError):
    pass


class InvalidDirection(DirtimeError, ValueError):
    """The direction vector is zero (or has the wrong shape)."""


class UnsupportedVariant(DirtimeError, TypeError):
    """The operation is not defined for this kind of set."""


class PointNotInSet(DirtimeError, ValueError):
    pass


class NotInDomain(DirtimeError, ValueError):
    """The minimal time is infinite at the query point."""


class NotComputable(DirtimeError, ValueError):
    """No exact formula is available and an approximation would be silent."""


class PreconditionError(DirtimeError, ValueError):
    pass


class SchemaError(DirtimeError, ValueError):
    """Malformed problem or set description; ``path`` locates the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
