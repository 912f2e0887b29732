"""Exception types shared across the package."""


class DHHError(Exception):
    """Base class for all package errors."""


class ContainmentViolation(DHHError):
    """A subspace expected to contain another does not."""


class StabilityViolation(DHHError):
    """A subspace is not stable under an action or sigma."""


class AxiomViolation(DHHError):
    """An object fails one of its structural axioms."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class ShapeMismatch(DHHError):
    pass


class DegreeOverflow(DHHError):
    """A construction would exceed the configured dimension cap."""


class InversivityRequired(DHHError):
    """An internal hom was requested for a non-inversive object."""


class LiftFailure(DHHError):
    """A coinvariant cocycle could not be lifted through sigma - 1."""


class WindowTooSmall(DHHError):
    pass


class ParseError(DHHError):
    pass
