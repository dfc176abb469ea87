class UpdownError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(UpdownError, ValueError):
    pass


class ResourceError(UpdownError):
    """A level cap or cell budget would be exceeded."""


class TruncationError(ResourceError):
    """An operator was applied past the top realized level."""


class InvariantError(UpdownError):
    """Internal data violates a structural invariant (a generator bug)."""


class PreconditionError(UpdownError):
    pass


class UnsupportedError(UpdownError):
    pass
