"""Exception hierarchy shared by the library and the CLI."""


class LaserToolsError(Exception):
    """Base class for all errors raised by lasertools."""


class FrameError(LaserToolsError, LookupError):
    """A frame is unknown or cannot be reached in the transform tree."""


class TreeError(LaserToolsError, ValueError):
    """An edge insertion would break the forest invariants."""


class FormatError(LaserToolsError, ValueError):
    """A scan, cloud or scene file could not be parsed.

    ``location`` carries a line number or key path when one is known.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class ConfigError(FormatError):
    """Invalid configuration file contents."""
