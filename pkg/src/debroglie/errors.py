"""Exception types raised across the package."""


class DomainError(ValueError):
    """A physical parameter lies outside its valid domain."""


class ConfigurationError(ValueError):
    """Invalid discretization or run configuration."""


class PreconditionError(ValueError):
    """An operation was called with inputs that violate its precondition."""


class DegenerateError(ValueError):
    """An input carries no usable amplitude (zero norm, empty window, ...)."""


class WraparoundError(RuntimeError):
    """Excited-state amplitude reached the periodic box edge."""
