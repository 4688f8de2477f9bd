"""
Exceptions raised by the solver. Each class knows the exit code the
command-line tool reports for it.
"""

from .constants import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL


class PitaError(Exception):
    exit_code = 1


###########################
# configuration / input
###########################
class ConfigError(PitaError, ValueError):
    exit_code = EXIT_CONFIG


class DimensionMismatchError(ConfigError):
    def __init__(self, field, message):
        super().__init__("{}: {}".format(field, message))
        self.field = field


class NonFiniteEntryError(ConfigError):
    def __init__(self, field):
        super().__init__("{}: contains NaN or Inf entries".format(field))
        self.field = field


class StepAlignmentError(ConfigError):
    pass


class ScheduleViolationError(ConfigError):
    pass


class OddOrderError(ConfigError):
    def __init__(self, k):
        super().__init__("only even orders are supported, got k={}".format(k))
        self.k = k


class InsufficientTermsError(ConfigError):
    def __init__(self, required, available, slice_index=None):
        where = "" if slice_index is None else " in slice j={}".format(slice_index)
        super().__init__(
            "extrapolation needs {} terms, got {}{}".format(required, available, where))
        self.required = required
        self.available = available
        self.slice_index = slice_index


class ConstraintViolationError(ConfigError):
    pass


###########################
# numerical failures
###########################
class NumericalError(PitaError, ArithmeticError):
    exit_code = EXIT_NUMERICAL


class NonFiniteResultError(NumericalError):
    def __init__(self, step, message="non-finite state"):
        super().__init__("{} at step {}".format(message, step))
        self.step = step


class SingularMatrixError(NumericalError):
    pass


class StabilityError(NumericalError):
    pass


class DegenerateDenominatorError(NumericalError):
    pass


class PropagationError(NumericalError):
    def __init__(self, iteration, slice_index, cause):
        super().__init__(
            "iteration k={} slice j={}: {}".format(iteration, slice_index, cause))
        self.iteration = iteration
        self.slice_index = slice_index


###########################
# output
###########################
class OutputError(PitaError, OSError):
    exit_code = EXIT_IO

    def __init__(self, path, cause):
        super().__init__("cannot write {}: {}".format(path, cause))
        self.path = path
