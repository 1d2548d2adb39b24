"""Exception types shared across the package."""


class LingEquivError(Exception):
    """Base class for all domain errors."""


class InvalidVertexError(LingEquivError):
    pass


class InvalidCycleError(LingEquivError):
    pass


class GraphFormatError(LingEquivError):
    """Malformed graph file or inconsistent vertex/latent/edge lists."""


class SizeCapError(LingEquivError):
    """Input exceeds a documented enumeration cap."""


class NotAMatroidError(LingEquivError):
    """A claimed basis family violates the matroid axioms."""


class NotTransversalError(LingEquivError):
    """A matroid that is not transversal was handed to a realization routine."""


class InfeasibleOracleError(LingEquivError):
    """Rank oracle answers cannot be realized by any support matrix
    (faithfulness or oracle violation)."""


class SingularModelError(LingEquivError):
    """I - B is numerically singular and resampling did not help."""


class BudgetExceededError(LingEquivError):
    """Traversal budget hit; carries the partial result found so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
