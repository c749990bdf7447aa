"""Exception hierarchy.

``SchemaError`` covers malformed inputs (CLI exit code 2), ``DomainError``
covers numeric domain violations (exit code 3).
"""


class IncongruityError(Exception):
    pass


class SchemaError(IncongruityError, ValueError):
    pass


class DomainError(IncongruityError, ValueError):
    pass


class DimensionError(DomainError):
    pass


class UnsupportedTheoryError(IncongruityError):
    """The theory's collision conditions cannot generate hypothetical points."""
