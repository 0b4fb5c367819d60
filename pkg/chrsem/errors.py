"""
chrsem-specific errors and warnings.
"""


class ChrSyntaxError(Exception):
    """
    Raised when CHR program, goal or store text cannot be parsed.
    The line and column of the offending token are kept as attributes.
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is None:
            super().__init__(message)
        else:
            super().__init__(f'line {line}, column {column}: {message}')


class UnsupportedError(Exception):
    """
    Raised when an attempt to use a feature that is not supported
    by a given engine.
    """
    pass


class SequenceError(Exception):
    """
    Raised when a derivation or abstract sequence violates the
    invariants of its domain.
    """
    pass


class CompositionError(Exception):
    """
    Raised when two abstract sequences share variables that the
    renaming-apart discipline of their derivations forbids.
    """
    pass


class TraceFileError(Exception):
    """
    Raised when a trace file cannot be loaded.
    """
    pass


class TruncationWarning(UserWarning):
    """
    Issued when a bounded enumeration stops at its depth limit while
    some configurations still have successors.
    """
    pass
