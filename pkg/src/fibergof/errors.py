"""Exception hierarchy shared by every fibergof module."""


class FiberGOFError(Exception):
    """Base class for all errors raised by this package."""


class InvalidGraph(FiberGOFError, ValueError):
    """A graph violates simplicity or node-range invariants."""


class PreconditionViolation(FiberGOFError, ValueError):
    """A move cannot be applied to the given graph."""


class StatMismatch(FiberGOFError, AssertionError):
    """A move changed the sufficient statistics (generator bug)."""


class InvalidSize(FiberGOFError, ValueError):
    pass


class ShapeMismatch(FiberGOFError, ValueError):
    pass


class DegenerateFit(FiberGOFError, ArithmeticError):
    """An observed configuration has fitted probability below the floor."""


class TooFewEdges(FiberGOFError, ValueError):
    pass


class TooLarge(FiberGOFError, ValueError):
    """Brute-force enumeration guard tripped."""


class Infeasible(FiberGOFError, ValueError):
    """No graph realizes the requested degree data."""


class OracleViolation(FiberGOFError, AssertionError):
    """A sampled state is missing from the enumerated fiber."""


class ParseError(FiberGOFError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DuplicateEdge(ParseError):
    pass


class SelfLoop(ParseError):
    pass
