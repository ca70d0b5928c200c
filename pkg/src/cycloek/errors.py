"""Exception hierarchy shared by the library and the CLI."""


class CycloekError(Exception):
    """Base class; the CLI maps it to exit status 2 (1 for DomainError)."""


class DomainError(CycloekError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionError(CycloekError, ArithmeticError):
    """A numerical result failed a sanity check that signals precision loss."""


class RefusalError(CycloekError):
    """The request exceeds a configured size bound."""
