"""Exception types raised across the package.

Two families matter to callers: :class:`ConfigError` for rejected input and
:class:`PhysicsError` for violated invariants or failed integrations.  The CLI
maps them to distinct exit codes.
"""


class RabiForgeError(Exception):
    """Base class for every error raised by rabi_forge."""


class ConfigError(RabiForgeError, ValueError):
    """Invalid parameters or configuration text."""


class PhysicsError(RabiForgeError, RuntimeError):
    """A physical invariant was violated or a computation could not finish."""


class NonHermitianObservable(ConfigError):
    pass


class NonHermitianGenerator(ConfigError):
    pass


class InvalidState(ConfigError):
    pass


class AnisotropicInput(ConfigError):
    pass


class ZeroRotatingStrength(ConfigError):
    pass


class PhaseNotRepresentable(ConfigError):
    pass


class UnphysicalDecoherence(ConfigError):
    pass


class UndersampledBeat(ConfigError):
    pass


class UndersampledCarrier(ConfigError):
    pass


class NonCommensurateDuration(ConfigError):
    pass


class PeakCountMismatch(PhysicsError):
    pass


class DegenerateRange(ConfigError):
    pass


class StepSizeUnderflow(PhysicsError):
    """The adaptive step fell below floating-point resolution.

    ``worst_error`` holds the largest normalized local error estimate seen in
    the failing step.
    """

    def __init__(self, message, t=None, worst_error=None):
        super().__init__(message)
        self.t = t
        self.worst_error = worst_error


class InvariantViolation(PhysicsError):
    pass
