"""Exception hierarchy shared by the samplers, oracles and CLI."""


class RegShrinkError(Exception):
    """Base class for all library errors."""


class DomainError(RegShrinkError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(RegShrinkError, ValueError):
    """A prior or sampler configuration is inconsistent (e.g. empty support)."""


class ComputationError(RegShrinkError, RuntimeError):
    """A numerical routine failed (quadrature, factorization, rejection budget)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ChainDivergenceError(ComputationError):
    """A Markov chain produced a non-finite state.

    ``snapshot`` holds the last finite state and the offending proposal so
    that the failure can be inspected offline.
    """

    def __init__(self, message, snapshot=None):
        super().__init__(message, diagnostics=snapshot)
        self.snapshot = dict(snapshot or {})
