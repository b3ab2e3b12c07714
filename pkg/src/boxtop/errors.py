"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: :class:`PropertyFailure` and its
subclasses exit 1, :class:`InputError` exits 2, :class:`ResourceError`
exits 3.
"""


class BoxtopError(Exception):
    """Base class for all errors raised by boxtop."""


class InputError(BoxtopError, ValueError):
    """Malformed or inconsistent input."""


class ResourceError(BoxtopError):
    """An enumeration would exceed the configured limit."""


class PropertyFailure(BoxtopError):
    """A semantic check failed; ``witness`` carries the counterexample."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotDenseError(PropertyFailure):
    """A family of cubes misses a point of the Boolean cube."""


class CoverError(PropertyFailure):
    """A cover is missing a point, or cannot be refined at some point."""


class DimensionTooSmallError(InputError):
    """The coordinate pool ran out while picking fresh coordinates."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index
