"""Exception types shared across the library."""


class ProxilabError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(ProxilabError):
    """Raised when vector/space/body dimensions disagree."""


class InfeasibleError(ProxilabError):
    """Raised when a feasible region is empty."""


class UnboundedError(ProxilabError):
    """Raised when an LP objective or a polytope is unbounded."""


class DimTooLargeError(ProxilabError):
    """Raised when an exact combinatorial routine is asked to run above its dimension cap."""


class NoExactHRepError(ProxilabError):
    """Raised when a strictly convex unit ball is asked for an exact halfspace representation."""


class BodyMembershipError(ProxilabError):
    """Raised when a point required to lie in a convex body does not."""


class ConvergenceError(ProxilabError):
    """Raised when an iterative solver stops without reaching its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SchemaError(ProxilabError):
    """Raised on malformed scenario configs; carries the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
