"""Exception types, mapped one-to-one onto CLI exit codes."""


class JointPolError(Exception):
    exit_code = 1


class DomainError(JointPolError, ValueError):
    """Inputs are well-formed but physically or mathematically invalid."""

    exit_code = 1


class DesignError(DomainError):
    """A joint-measurement design fails a validity condition."""


class WitnessError(DomainError):
    """Input correlations do not certify entanglement, so C^2 is unrecoverable."""

    exit_code = 3


class FormatError(JointPolError):
    """A data file is missing, unreadable or malformed."""

    exit_code = 2
