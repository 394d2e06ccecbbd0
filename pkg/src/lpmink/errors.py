"""Exception hierarchy for the solver."""


class LpMinkowskiError(Exception):
    """Base class for all errors raised by lpmink."""


class InvalidMeasure(LpMinkowskiError, ValueError):
    pass


class NonUnitDirection(InvalidMeasure):
    pass


class NonPositiveWeight(InvalidMeasure):
    pass


class TooFewDirections(InvalidMeasure):
    pass


class EmptyInput(InvalidMeasure):
    pass


class CombinatorialLimitExceeded(LpMinkowskiError):
    pass


class UnboundedIntersection(LpMinkowskiError):
    pass


class EmptyInterior(LpMinkowskiError):
    pass


class DegenerateSystem(LpMinkowskiError):
    """A near-singular n-subset of constraints. Skipped during enumeration."""


class NonPositiveScale(LpMinkowskiError, ValueError):
    pass


class BoundaryPoint(LpMinkowskiError):
    """A slack h_k - xi.u_k fell to or below the slack floor."""


class MaxIterationsExceeded(LpMinkowskiError):
    pass


class DiameterDivergence(LpMinkowskiError):
    pass


class FacetLoss(LpMinkowskiError):
    pass


class OriginNotInterior(LpMinkowskiError):
    pass


class BudgetExceeded(LpMinkowskiError):
    pass


class RejectionLimitExceeded(LpMinkowskiError):
    pass
