"""Exception hierarchy shared by all modules.

Every validation failure raises a subclass of ForestSolveError so the
service layer and CLI can map them uniformly (HTTP 422 / exit code 2).
"""


class ForestSolveError(Exception):
    """Base class for all user-facing errors."""


# -- network construction / validation ------------------------------------

class DuplicateNode(ForestSolveError):
    pass


class UnknownEndpoint(ForestSolveError):
    pass


class UnknownNode(ForestSolveError):
    pass


class NonPositiveConductance(ForestSolveError):
    pass


class Disconnected(ForestSolveError):
    pass


class EmptyFuseSet(ForestSolveError):
    pass


# -- enumeration ------------------------------------------------------------

class TooLarge(ForestSolveError):
    """Enumeration guard tripped; suggest the Monte Carlo path."""


class EmptyRootSet(ForestSolveError):
    pass


# -- solving ----------------------------------------------------------------

class SingularSystem(ForestSolveError):
    """Internal error: cannot occur on connected networks with a fixed node."""


class InvalidInjection(ForestSolveError):
    """Injected current vector does not sum to zero."""


class InconsistentCurrentMatrix(ForestSolveError):
    pass


class SameNode(ForestSolveError):
    pass


class QTooSmall(ForestSolveError):
    pass


class TargetIsRoot(ForestSolveError):
    pass


# -- sampling ---------------------------------------------------------------

class WalkBudgetExceeded(ForestSolveError):
    """Random-walk step guard tripped; signals a pathological configuration."""


# -- markov -----------------------------------------------------------------

class StartInR(ForestSolveError):
    pass


class NotArborescence(ForestSolveError):
    pass


class BadDistribution(ForestSolveError):
    pass
