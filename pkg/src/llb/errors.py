"""Exception hierarchy shared by all modules.

The CLI maps ``InputError`` subclasses to exit code 2 and
``ResourceCapError`` subclasses to exit code 3.
"""


class LLBError(Exception):
    pass


class InputError(LLBError):
    pass


class ResourceCapError(LLBError):
    pass


class ParseError(InputError):
    def __init__(self, line, reason, path=None):
        self.line = line
        self.reason = reason
        self.path = path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}: {reason}")


class ValidationError(InputError):
    pass


# chain-complex-core
class NonSimplicial(ValidationError):
    pass


class DuplicateCell(ValidationError):
    pass


class MissingFace(ValidationError):
    pass


class DegreeOutOfRange(InputError):
    pass


# cover-towers
class Disconnected(ValidationError):
    pass


class RelatorViolated(ValidationError):
    pass


class DegreeMismatch(ValidationError):
    pass


class UnsupportedFamily(InputError):
    pass


class NoFreeQuotient(InputError):
    pass


# lueck-approximation
class TooLargeForExact(ResourceCapError):
    pass


class NotSymmetric(ValidationError):
    pass


class InvalidProbeCount(InputError):
    pass


class GridTooCoarse(InputError):
    pass


# local-statistics
class RadiusMismatch(InputError):
    pass


# hyperbolic-images
class TOutOfWindow(InputError):
    pass


class WindowEmpty(InputError):
    pass


class PruningUnsound(LLBError):
    """Raised if the orbit search pruned a branch that contained a valid element."""


class TruncationUnreachable(ResourceCapError):
    pass


class UnsupportedSpace(InputError):
    pass
