"""Exception types shared across the package."""


class QtelError(Exception):
    """Base class for all package-specific errors."""


class UnknownModeError(QtelError):
    """A form references a mode that the linear map does not define."""


class CapacityExceededError(QtelError):
    """More photons requested than the exact expansion supports."""


class ConfigInvalidError(QtelError):
    """An experiment configuration failed validation."""


class DomainError(QtelError):
    """A closed-form expression was evaluated outside its parameter domain."""


class ZeroInformationError(QtelError):
    """Resolution is undefined because the Fisher information vanishes."""


class NoMinimumError(QtelError):
    """The resolution curve has no interior minimum on the scanned range."""
