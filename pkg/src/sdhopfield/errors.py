"""Shared exception types.

Exit-code mapping used by the command line interface:

* ``ConfigError``                -> 2 (bad input, bad config file, unusable parameters)
* ``DivergenceError``            -> 3 (trajectory norm blew past the guard threshold)
* ``AnalysisError`` subclasses   -> 4 (spectrum empty, linearization unstable, flow degenerate)
"""


class SimulationError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SimulationError):
    """Invalid parameters, configuration files, or call arguments."""


class DomainError(ConfigError, ValueError):
    """Evaluation requested outside the domain of a segment or activation table."""


class PathHorizonError(ConfigError):
    """A noise path is too short for the requested computation.

    The message states the horizon the caller must extend the path to.
    """

    def __init__(self, message, t_min_required=None, t_max_required=None):
        super().__init__(message)
        self.t_min_required = t_min_required
        self.t_max_required = t_max_required


class DivergenceError(SimulationError):
    """Trajectory norm exceeded the divergence guard (or became non-finite)."""


class AnalysisError(SimulationError):
    """Base class for failures of the analysis pipeline."""


class EmptySpectrumError(AnalysisError):
    """Root search converged to no characteristic roots inside the box."""


class UnstableLinearizationError(AnalysisError):
    """Spectral abscissa is nonnegative; decay constants are undefined."""


class FlowDegenerateError(AnalysisError):
    """Linear noise flow became numerically singular (condition number guard)."""
