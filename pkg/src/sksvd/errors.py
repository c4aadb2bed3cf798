"""Exception types shared across the package.

Plain ``ValueError``/``IndexError`` are used for ordinary argument
validation; the classes here mark conditions a caller may want to
handle separately (resource limits, incompatible states, corrupt or
malformed inputs).
"""


class SketchError(Exception):
    """Base class for sketch-specific failures."""


class BudgetExceededError(SketchError):
    """A dense materialization would exceed the configured memory budget."""


class IncompatibleSketchError(SketchError):
    """Two sketch states cannot be combined (configs differ)."""


class CorruptStateError(SketchError):
    """A persisted sketch state failed to parse (bad magic, header, or payload size)."""


class StreamFormatError(SketchError):
    """A stream line is not a well-formed update record."""
