"""Exception types shared across the solver suite."""


class ArzFlowError(Exception):
    """Base class for all solver errors."""


class DomainError(ArzFlowError):
    """A density was passed outside the validity domain of a velocity-offset law.

    For the singular law this typically means the scheme produced an
    inadmissible state (rho >= rho_star) and the run cannot continue.
    """


class ParameterError(ArzFlowError):
    """Invalid or inconsistent law / scheme parameters."""


class ConvergenceError(ArzFlowError):
    """A scalar root solve exhausted its iteration budget."""


class NegativeVelocityError(ArzFlowError):
    """Conversion to primitive variables produced v < 0 beyond rounding noise.

    Signals that a scheme left the invariant region v >= 0.
    """


class TimestepUnderflow(ArzFlowError):
    """The stability-limited time step fell below the configured floor."""


class UnknownScenario(ArzFlowError):
    """Requested benchmark scenario name is not registered."""
