"""Exception types shared across the package."""


class HiqlipError(Exception):
    """Base class for all package-specific errors."""


class FormatError(HiqlipError):
    """A network file or payload is malformed, mis-shaped, or non-finite."""


class SolverError(HiqlipError):
    """A solver backend failed (unreachable remote, bad response, bad config)."""


class CapError(HiqlipError):
    """Refusal: a problem exceeds a configured enumeration cap.

    ``required`` holds the cap that would have been needed, when known.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required
