"""Exception hierarchy shared across the package."""


class FedsketchError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(FedsketchError, ValueError):
    """An input's shape disagrees with the operator or dataset dimension."""
