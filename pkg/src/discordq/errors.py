"""Exception types raised across the package."""


class DiscordQError(Exception):
    """Base class for all package errors."""


class NonPhysical(DiscordQError, ValueError):
    pass


class DegenerateInvariants(DiscordQError, ValueError):
    pass


class SingularCovariance(DiscordQError, ValueError):
    pass


class ParamMismatch(DiscordQError, ValueError):
    pass


class Divergent(DiscordQError, ArithmeticError):
    """Kernel real part is not positive definite; the integral does not converge."""


class IllConditioned(DiscordQError, ArithmeticError):
    pass


class Degenerate(DiscordQError, ArithmeticError):
    pass


class ComplexResidue(DiscordQError, ArithmeticError):
    """The assembled marker has a non-negligible imaginary part."""


class TruncationError(DiscordQError, ValueError):
    pass


class NonConverged(DiscordQError, RuntimeError):
    def __init__(self, message: str, history):
        super().__init__(message)
        self.history = list(history)
