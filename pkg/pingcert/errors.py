"""Exception hierarchy shared by the services and the CLI."""

from typing import Optional


class PingCertError(Exception):
    """Base class for every error raised by pingcert."""


class PresentationParseError(PingCertError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class UnsupportedPresentationError(PingCertError):
    pass


class ResourceBudgetError(PingCertError):
    """Raised when a construction would exceed its configured budget."""

    def __init__(self, message: str, completed_radius: Optional[int] = None):
        self.completed_radius = completed_radius
        if completed_radius is not None:
            message = f"{message} (completed radius {completed_radius})"
        super().__init__(message)


class RadiusTooSmallError(PingCertError):
    pass


class WindowError(PingCertError):
    pass


class InstanceInvariantError(PingCertError):
    pass


class DegenerateSyllableError(PingCertError):
    pass


class NormalizeFirstError(PingCertError):
    pass


class ActionOutsideSetError(PingCertError):
    pass


class InconclusiveError(PingCertError):
    """A pipeline stage could not decide; `reason` becomes the verdict tag."""

    def __init__(self, reason: str, message: str = ""):
        self.reason = reason
        super().__init__(message or reason)
