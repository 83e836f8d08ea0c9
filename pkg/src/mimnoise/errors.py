class ParameterError(ValueError):
    """Invalid or inconsistent physical parameters."""


class NonFiniteError(ParameterError):
    pass


class NegativeRateError(ParameterError):
    pass


class ZeroSplittingError(ParameterError):
    pass


class UndrivenChannelError(ParameterError):
    pass


class ExceptionalPointError(ParameterError):
    """J equals |kappa_L - kappa_R| / 4, where the two normal-mode poles merge."""


class DegenerateSteadyStateError(ArithmeticError):
    pass


class UndrivenModeError(ValueError):
    """The symmetric mode has zero mean amplitude, so G and eps_m are undefined."""


class NoNetDampingError(ArithmeticError):
    pass


class TimestepTooLargeError(ValueError):
    pass


class InsufficientRecordError(ValueError):
    pass
