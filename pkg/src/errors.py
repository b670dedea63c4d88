"""Exception types shared by the services and the CLI.

Every error carries the process exit code the CLI reports for it.
"""


class DspecError(Exception):
    """Base class for all errors raised by dspec."""

    exit_code = 1


class DomainError(DspecError, ValueError):
    """An argument lies outside the domain of the operation (rho <= 0, x < 0, ...)."""

    exit_code = 3


class NoAdmissibleRegion(DspecError):
    """zeta * omega >= 1: the rotating frame admits no radial region at all."""

    exit_code = 2

    def __init__(self, zeta: float, omega: float):
        self.zeta = zeta
        self.omega = omega
        super().__init__(
            f"no admissible radial region: zeta*omega = {zeta * omega:.17g} >= 1 "
            f"(zeta={zeta!r}, omega={omega!r})"
        )


class EvaluationError(DspecError):
    """A special-function evaluation overflowed or failed to converge."""


class ResolutionError(DspecError):
    """A grid is too coarse (or too small) for the requested accuracy."""


class ConvergenceOrderError(DspecError):
    """Observed finite-difference order is outside the accepted band."""

    def __init__(self, order: float, low: float, high: float):
        self.order = order
        super().__init__(f"observed convergence order {order:.4f} outside [{low}, {high}]")


class ConfigError(DspecError):
    """A run configuration file or override could not be parsed or validated."""

    exit_code = 3


class InadmissibleSweep(NoAdmissibleRegion):
    """Some sweep values leave no admissible radial region."""

    def __init__(self, parameter: str, values):
        self.parameter = parameter
        self.values = list(values)
        listed = ", ".join(f"{v:.17g}" for v in self.values)
        DspecError.__init__(self, f"sweep over {parameter} crosses zeta*omega >= 1 at: {listed}")
