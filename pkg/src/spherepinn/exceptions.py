"""Exception types raised across the package."""


class SpherePinnError(Exception):
    """Base class for package errors."""


class OrderTooHighError(SpherePinnError, ValueError):
    """Requested SH order needs more capsules than are available."""


class BesselNullError(SpherePinnError, ArithmeticError):
    """A radial term vanishes, so SH encoding would divide by ~zero."""


class EnclosureUnsupportedError(SpherePinnError, ValueError):
    """The requested model does not support this array enclosure."""


class ShapeMismatchError(SpherePinnError, ValueError):
    """Two data sets that must align do not."""


class GeometryError(SpherePinnError, ValueError):
    """Invalid array geometry or geometry file."""


class NonFiniteLossError(SpherePinnError, FloatingPointError):
    """Training produced a non-finite loss."""

    def __init__(self, iteration, value):
        super().__init__(f"non-finite loss {value!r} at iteration {iteration}")
        self.iteration = iteration
        self.value = value


class FileFormatError(SpherePinnError, ValueError):
    """A data or model file is malformed or of an unsupported version."""
