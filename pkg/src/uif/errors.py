"""Exception types raised by the uif package."""


class UifError(Exception):
    """Base class for all uif errors."""


class IoError(UifError):
    """A required file is missing or unreadable."""


class DecodeError(UifError):
    """An image file is corrupt or in an unsupported format."""


class ShapeError(UifError):
    """An image has the wrong number of channels for the operation."""


class ShapeMismatch(UifError):
    """Two images that must share dimensions do not."""


class DegenerateInput(UifError):
    """Input carries no usable signal (constant samples, zero vector, ...)."""


class TooSmall(UifError):
    """Image smaller than the minimum the operation can tile or window."""


class InsufficientData(UifError):
    """Not enough samples to fit (scaler or regressor)."""


class NonFiniteInput(UifError):
    """Features or labels contain NaN or infinity."""


class FormatError(UifError):
    """A model or data file violates its expected format."""


class AllInvalid(UifError):
    """An image column has no valid ratings left."""


class InvalidMask(UifError):
    """A feature-group mask selects no group or names an unknown one."""
