"""Exception hierarchy shared by the engine and the command line."""


class CoopetError(Exception):
    """Base class for every error raised by coopet."""


class InvalidCoalitionError(CoopetError, ValueError):
    """A bit pattern does not describe a subset of the player set."""


class DisjointnessError(CoopetError, ValueError):
    pass


class ContainmentError(CoopetError, ValueError):
    pass


class DomainError(CoopetError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class FamilyError(CoopetError, ValueError):
    """A probability family is malformed or cannot answer a query."""


class PreconditionError(CoopetError, ValueError):
    pass


class GeneratorError(CoopetError, ValueError):
    pass


class DocumentError(CoopetError, ValueError):
    """A game or family document could not be parsed."""


class IdentityViolation(CoopetError, AssertionError):
    """An identity that must hold exactly was found to fail."""
