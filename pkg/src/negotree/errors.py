"""Exception types shared across the package."""


class NegotreeError(Exception):
    """Base class for everything raised deliberately by this package."""


class DisjointnessViolation(NegotreeError):
    """Two partial assignments were combined but their scopes overlap."""


class ScopeViolation(NegotreeError):
    """A projection asked for attributes outside the assignment's scope."""


class InvalidAssignment(NegotreeError):
    """An assignment references unknown attributes or out-of-domain values."""


class ValidationError(NegotreeError):
    """A CP-net failed structural validation.

    Carries the full violation list so callers can report all problems at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ExactModeExceeded(NegotreeError):
    """The outcome space is larger than the configured exact-mode bound.

    Dominance answers are exact or absent: there is no approximation fallback.
    Callers must shrink the instance or raise the bound explicitly.
    """


class ConfigError(NegotreeError):
    """A generator or protocol configuration value is out of range."""


class NetFormatError(NegotreeError):
    """A CP-net document or file does not match the interchange format."""


class BatchError(NegotreeError):
    """A batch round failed; carries the sub-seeds needed to replay it."""

    def __init__(self, round_index: int, pair_seed: int, run_seed: int, cause: Exception):
        self.round_index = round_index
        self.pair_seed = pair_seed
        self.run_seed = run_seed
        super().__init__(
            f"round {round_index} failed (pair_seed={pair_seed}, "
            f"run_seed={run_seed}): {cause}"
        )


class DeadlockError(NegotreeError):
    """Both agents passed with no open node left; believed unreachable."""


class InternalInvariantViolation(NegotreeError):
    """An internal protocol invariant broke; indicates a bug, not bad input."""
