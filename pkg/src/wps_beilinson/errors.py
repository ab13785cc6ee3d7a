class WPSError(Exception):
    """Base class for library errors."""


class DegreeError(WPSError):
    pass


class FieldError(WPSError, ValueError):
    pass


class RangeError(WPSError, ValueError):
    pass


class AmbientError(WPSError):
    pass


class ShapeError(WPSError):
    pass


class ChainMapError(WPSError):
    pass


class UnsupportedTwistRange(WPSError):
    """A pushforward would need the top cohomology row, which is not implemented."""


class WrongVariant(WPSError):
    pass


class InvarianceError(WPSError):
    pass


class SerreSkipped(WPSError):
    """The Euler form on the sublattice is degenerate; Serre check not defined."""
