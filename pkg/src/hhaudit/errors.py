"""Exception hierarchy shared across the toolkit."""


class SpecParseError(ValueError):
    """A kernel/function spec string does not match the grammar."""


class DomainError(ValueError):
    """Arguments violate a mathematical domain constraint."""


class ConfigurationError(ValueError):
    """A request is structurally invalid (missing inputs, bad pairing)."""


class EvaluationError(RuntimeError):
    """An integrand produced a non-finite value."""

    def __init__(self, message, at=None):
        super().__init__(message)
        self.at = at


class ConvergenceError(RuntimeError):
    """Adaptive integration hit its subdivision limit before the tolerance."""

    def __init__(self, message, best_value=None, best_error=None):
        super().__init__(message)
        self.best_value = best_value
        self.best_error = best_error


class DivergentMomentError(ValueError):
    """A requested kernel moment integral diverges."""

    def __init__(self, message, moment=None):
        super().__init__(message)
        self.moment = moment


class NonEvaluableError(RuntimeError):
    """An inequality cannot be evaluated for the given kernel."""

    def __init__(self, message, theorem_id=None, moment=None):
        super().__init__(message)
        self.theorem_id = theorem_id
        self.moment = moment


class ExhaustionError(RuntimeError):
    """Hypothesis filtering discarded every sampled candidate."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats
