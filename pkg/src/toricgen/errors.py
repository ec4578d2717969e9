"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain of the operation."""


class HypothesisError(ParameterError):
    """Inputs violate the hypothesis under which a formula is valid."""


class NotInvertibleError(ParameterError):
    pass


class MalformedFanError(ValueError):
    """Fan data is structurally inconsistent (wrong cone sizes, bad indices, ...)."""


class InvalidConeError(ValueError):
    """A requested cone is not a face of the fan."""


class SizeError(RuntimeError):
    """A configured size cap would be exceeded."""


class InvariantViolation(AssertionError):
    """Internal consistency check failed. Indicates a bug or corrupt input."""


class ConjectureFailure(RuntimeError):
    """No epsilon found for a dimension covered by the coprimality conjecture."""
