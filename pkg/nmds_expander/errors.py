class NmdsError(Exception):
    """Base class for every error raised by this package."""


class TooLarge(NmdsError):
    """Raised when an enumeration or elimination exceeds its desk-scale guard."""
