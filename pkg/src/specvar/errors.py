"""Exception hierarchy shared across the package."""


class SpecvarError(Exception):
    """Base class for all errors raised by this package."""


class InvalidShape(SpecvarError):
    """Input does not have the ambient shape required by the system."""


class InvalidData(SpecvarError):
    """Non-finite entries or an unparseable payload."""


class InvalidParam(SpecvarError):
    """Parameter outside its admissible range."""


class NumericalFailure(SpecvarError):
    """An underlying factorization or solve did not converge."""


class TooLarge(SpecvarError):
    """Group enumeration would exceed the configured cap."""


class Unsupported(SpecvarError):
    """Requested combination is declared out of scope."""


class GroupMismatch(SpecvarError):
    """Oracle is not invariant under the group of the requested system."""


class NotDifferentiable(SpecvarError):
    """Gradient requested at a point where the function is not smooth."""


class NotLipschitz(SpecvarError):
    """Difference quotients diverge; local Lipschitz continuity fails."""


class NotInSet(SpecvarError):
    """Base point of a normal-cone query lies outside the set."""


class Infeasible(SpecvarError):
    """No feasible point found inside the search box."""


class OracleInconsistency(SpecvarError):
    """An oracle returned something that violates its own contract."""


class UnknownOracle(SpecvarError):
    """Registry lookup failed for a function or set name."""


class Unconverged(SpecvarError):
    """Iteration cap reached; a partial result may be attached."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
