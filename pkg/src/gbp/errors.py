"""Exception types shared across the package."""


class GBPError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GBPError):
    """Model file is malformed; the message carries line/field context."""


class ValidationError(GBPError):
    """Model parsed but violates structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NonpositiveDiagonal(GBPError):
    """Normalization requires strictly positive diagonal entries."""


class NotPositiveDefinite(GBPError):
    """Symmetric factorization hit a nonpositive pivot."""

    def __init__(self, message, node=None, pivot=None):
        super().__init__(message)
        self.node = node
        self.pivot = pivot


class NotATree(GBPError):
    """The graph contains a cycle where an acyclic graph is required."""


class DidNotConverge(GBPError):
    """Iteration budget exhausted.

    ``bracket`` is the last rigorous (lo, hi) enclosure of the spectral
    radius; callers may still use it even though the target tolerance was
    not reached.
    """

    def __init__(self, message, bracket, iterations):
        super().__init__(message)
        self.bracket = bracket
        self.iterations = iterations


class LimitExceeded(GBPError):
    """Walk enumeration would exceed the configured budget."""


class NotWalkSummable(GBPError):
    """Operation requires a walk-summable model."""


class NonpositivePrecision(GBPError):
    """A per-edge aggregate precision dropped to or below the positivity floor.

    Signals belief-propagation failure on this instance. ``trajectory`` is
    attached by :func:`gbp.bp.run` so callers can inspect the partial run.
    """

    def __init__(self, source, target, iteration):
        super().__init__(
            "aggregate precision for %d->%d nonpositive at iteration %d"
            % (source, target, iteration)
        )
        self.source = source
        self.target = target
        self.iteration = iteration
        self.trajectory = None


class InsufficientData(GBPError):
    """Not enough finite trajectory points to fit a convergence rate."""


class SizeLimit(GBPError):
    """Computation tree would exceed the node budget."""


class Unsatisfiable(GBPError):
    """Generator could not produce a walk-summable instance."""
