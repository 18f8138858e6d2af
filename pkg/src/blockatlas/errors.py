"""Exception types shared across the package.

Precondition violations raise subclasses of BlockatlasError; internal
consistency failures raise InvariantViolation (the CLI maps the former to
exit code 2 and the latter to exit code 1).
"""


class BlockatlasError(Exception):
    """Base class for all domain errors raised by this package."""


class DividesModulus(BlockatlasError):
    """The prime divides the base, so no multiplicative order exists."""


class BoundExceeded(BlockatlasError):
    """An input exceeds a configured desk-scale bound."""


class LengthTooShort(BlockatlasError):
    """Requested beta-set length is smaller than the number of parts."""


class NotSupported(BlockatlasError):
    """The operation is outside the supported family/configuration."""


class BadPrimeHypothesis(BlockatlasError):
    """A block-theoretic hypothesis on the prime fails; the message names it."""


class IncompatibleAction(BlockatlasError):
    """A matrix does not act on the group it was paired with."""


class NotFinite(BlockatlasError):
    """The group is infinite where a finite one is required."""


class NotAutomorphism(BlockatlasError):
    """The endomorphism is not invertible on the module."""


class InvalidDatum(BlockatlasError):
    """A root datum fails its structural invariants."""


class InvalidWitness(BlockatlasError):
    """A claimed permuted basis is not a basis or is not permuted."""


class ParseError(BlockatlasError):
    """Malformed input file; carries location information when available."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None and column is not None:
            prefix = f"line {line}, column {column}: "
        elif line is not None:
            prefix = f"line {line}: "
        else:
            prefix = ""
        super().__init__(prefix + message)
        self.line = line
        self.column = column


class InvariantViolation(Exception):
    """An internal cross-check failed; this is a defect, not a usage error."""
