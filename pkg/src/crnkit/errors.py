"""Exception hierarchy.

Every error raised on purpose by crnkit derives from :class:`CrnError`.
The ``exit_code`` class attribute is what the command-line front end
returns when the error escapes a subcommand.
"""


class CrnError(Exception):
    exit_code = 3


# -- parsing (exit code 2) ---------------------------------------------------

class ParseError(CrnError, ValueError):
    exit_code = 2


class ReactionSyntaxError(ParseError):
    """Malformed reaction text. Carries the offending position and token."""

    def __init__(self, message, position=None, token=None, line=None):
        self.position = position
        self.token = token
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        if token is not None:
            where.append(f"token {token!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class MissingBlockError(ParseError):
    pass


class FormulaSyntaxError(ParseError):
    pass


class UnknownModelError(ParseError, KeyError):
    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super().__init__(f"unknown model {name!r}; available: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]


# -- domain (exit code 3) ----------------------------------------------------

class DomainError(CrnError, ValueError):
    exit_code = 3


class NullStepError(DomainError):
    pass


class DuplicateStepError(DomainError):
    pass


class EmptyNetworkError(DomainError):
    pass


class NotReversibleError(DomainError):
    pass


class NonpositiveRateError(DomainError):
    pass


class NegativeConcentrationError(DomainError):
    pass


class UnknownElementError(DomainError):
    pass


class UnboundedEnumerationError(DomainError):
    pass


# -- numerical failures (exit code 4) ----------------------------------------

class NumericalError(CrnError, RuntimeError):
    exit_code = 4


class StepSizeUnderflowError(NumericalError):
    def __init__(self, t, h):
        self.t = t
        self.h = h
        super().__init__(f"step size underflow at t={t!r} (h={h!r})")


class MaxStepsExceededError(NumericalError):
    def __init__(self, t, max_steps):
        self.t = t
        self.max_steps = max_steps
        super().__init__(f"exceeded {max_steps} steps, stopped at t={t!r}")


class NoConvergenceError(NumericalError):
    pass


class LeapFailureError(NumericalError):
    pass


# -- infeasibility (exit code 5) ---------------------------------------------

class InfeasibleError(CrnError, ValueError):
    """A linear system has no nonnegative solution.

    ``certificate`` is a Farkas vector ``y`` with ``y @ A <= 0`` and
    ``y @ b > 0`` when one is available.
    """

    exit_code = 5

    def __init__(self, message, certificate=None):
        self.certificate = certificate
        super().__init__(message)
